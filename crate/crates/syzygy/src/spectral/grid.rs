use std::collections::BTreeMap;

use serde::{Serialize, Serializer};

use super::SpectralError;
use crate::formal_groups::{
    check_exact, homology_at, slots_of, solve_extension, AtomRegistry, ExactnessReport, FormalGroup, FormalHom,
    TorsionRule,
};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GridEntry {
    Known(FormalGroup),
    Unknown(String),
}

impl GridEntry {
    pub fn known(&self) -> Option<&FormalGroup> {
        match self {
            GridEntry::Known(g) => Some(g),
            GridEntry::Unknown(_) => None,
        }
    }

    pub fn is_known_zero(&self) -> bool {
        self.known().is_some_and(FormalGroup::is_zero)
    }

    pub fn label(&self) -> String {
        match self {
            GridEntry::Known(g) => g.to_string(),
            GridEntry::Unknown(why) => format!("? ({why})"),
        }
    }
}

/// A page `E^r` of a first-quadrant homological spectral sequence,
/// `d^r : E_{p,q} -> E_{p-r,q+r-1}`, on the box `p <= p_max`, `q <= q_max`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpectralGrid {
    page: usize,
    p_max: usize,
    q_max: usize,
    entries: BTreeMap<(usize, usize), GridEntry>,
    differentials: BTreeMap<(usize, usize), FormalHom>,
    /// Every differential leaving the bottom row vanishes (split extensions).
    pub bottom_row_survives: bool,
    pub converges_to: String,
    pub notes: Vec<String>,
}

impl SpectralGrid {
    /// A page with every entry unknown.
    pub fn new(page: usize, p_max: usize, q_max: usize, converges_to: &str) -> Self {
        assert!(page >= 2, "pages start at 2");
        let mut entries = BTreeMap::new();
        for p in 0..=p_max {
            for q in 0..=q_max {
                entries.insert((p, q), GridEntry::Unknown("not supplied".into()));
            }
        }
        SpectralGrid {
            page,
            p_max,
            q_max,
            entries,
            differentials: BTreeMap::new(),
            bottom_row_survives: false,
            converges_to: converges_to.into(),
            notes: Vec::new(),
        }
    }

    pub fn page(&self) -> usize {
        self.page
    }

    pub fn bounds(&self) -> (usize, usize) {
        (self.p_max, self.q_max)
    }

    pub fn set(&mut self, p: usize, q: usize, entry: GridEntry) {
        assert!(p <= self.p_max && q <= self.q_max, "({p}, {q}) outside the box");
        self.entries.insert((p, q), entry);
    }

    pub fn set_known(&mut self, p: usize, q: usize, g: FormalGroup) {
        self.set(p, q, GridEntry::Known(g));
    }

    pub fn entry(&self, p: usize, q: usize) -> GridEntry {
        self.entries
            .get(&(p, q))
            .cloned()
            .unwrap_or_else(|| GridEntry::Unknown("outside the bounding box".into()))
    }

    pub fn known(&self, p: usize, q: usize) -> Option<FormalGroup> {
        self.entry(p, q).known().cloned()
    }

    fn target_of(&self, p: usize, q: usize) -> Option<(usize, usize)> {
        (p >= self.page).then(|| (p - self.page, q + self.page - 1))
    }

    pub fn differential(&self, p: usize, q: usize) -> Option<&FormalHom> {
        self.differentials.get(&(p, q))
    }

    /// Supplies `d^r` out of `(p, q)`; source and target slots must match the entries.
    pub fn set_differential(&mut self, p: usize, q: usize, d: FormalHom) -> Result<(), SpectralError> {
        let bad = |detail: String| SpectralError::BadDifferential { p, q, detail };
        let (tp, tq) = self
            .target_of(p, q)
            .ok_or_else(|| bad("target leaves the first quadrant".into()))?;
        let src = self.known(p, q).ok_or_else(|| bad("source entry is unknown".into()))?;
        let tgt = self
            .known(tp, tq)
            .ok_or_else(|| bad("target entry is unknown".into()))?;
        if d.source() != slots_of(&src)?.as_slice() || d.target() != slots_of(&tgt)?.as_slice() {
            return Err(bad(format!("expected a map {src} -> {tgt}")));
        }
        self.differentials.insert((p, q), d);
        Ok(())
    }

    /// `d∘d = 0` wherever two supplied differentials compose.
    pub fn check_d_squared(&self) -> Result<(), SpectralError> {
        for (&(p, q), d) in &self.differentials {
            let (tp, tq) = self.target_of(p, q).expect("validated");
            if let Some(next) = self.differentials.get(&(tp, tq)) {
                if !d.then(next)?.is_zero() {
                    return Err(SpectralError::BadDifferential {
                        p,
                        q,
                        detail: "d composed with d is nonzero".into(),
                    });
                }
            }
        }
        Ok(())
    }

    /// Whether `d^r` out of `(p, q)` is zero without being told: zero source
    /// or target, a surviving bottom row, torsion into torsion-free, or
    /// divisible into bounded exponent.
    fn forced_zero(&self, p: usize, q: usize) -> bool {
        let Some((tp, tq)) = self.target_of(p, q) else {
            return true;
        };
        let src = self.entry(p, q);
        let tgt = self.entry(tp, tq);
        if src.is_known_zero() || tgt.is_known_zero() || (q == 0 && self.bottom_row_survives) {
            return true;
        }
        match (src.known(), tgt.known()) {
            (Some(s), Some(t)) => (is_torsion(s) && is_torsion_free(t)) || (is_divisible(s) && has_bounded_exponent(t)),
            _ => false,
        }
    }

    fn outgoing(&self, p: usize, q: usize) -> Result<Option<&FormalHom>, SpectralError> {
        if let Some(d) = self.differentials.get(&(p, q)) {
            return Ok((!d.is_zero()).then_some(d));
        }
        if self.forced_zero(p, q) {
            return Ok(None);
        }
        Err(SpectralError::MissingDifferential { page: self.page, p, q })
    }

    /// `E^{r+1}` as homology of `E^r`.
    pub fn turn_page(&self) -> Result<SpectralGrid, SpectralError> {
        self.check_d_squared()?;
        let r = self.page;
        let mut next = SpectralGrid {
            page: r + 1,
            differentials: BTreeMap::new(),
            ..self.clone()
        };
        for (&(p, q), entry) in &self.entries {
            let out = self.outgoing(p, q)?;
            let inc = if q + 1 >= r && self.entries.contains_key(&(p + r, q + 1 - r)) {
                self.outgoing(p + r, q + 1 - r)?
            } else if q + 1 >= r && !self.forced_zero_from_outside(p + r, q + 1 - r) {
                return Err(SpectralError::MissingDifferential {
                    page: r,
                    p: p + r,
                    q: q + 1 - r,
                });
            } else {
                None
            };
            if out.is_none() && inc.is_none() {
                continue;
            }
            let GridEntry::Known(g) = entry else {
                next.entries.insert(
                    (p, q),
                    GridEntry::Unknown(format!("subquotient of an unknown entry on page {r}")),
                );
                continue;
            };
            let slots = slots_of(g)?;
            let f = inc
                .cloned()
                .unwrap_or_else(|| FormalHom::zero(Vec::new(), slots.clone()));
            let h = out
                .cloned()
                .unwrap_or_else(|| FormalHom::zero(slots.clone(), Vec::new()));
            next.entries.insert((p, q), GridEntry::Known(homology_at(&f, &h)?));
        }
        Ok(next)
    }

    /// Sources outside the box are only harmless when the target they would
    /// hit is already zero.
    fn forced_zero_from_outside(&self, p: usize, q: usize) -> bool {
        match self.target_of(p, q) {
            Some((tp, tq)) => self.entry(tp, tq).is_known_zero(),
            None => true,
        }
    }

    /// Once `r > p_max` no differential stays in the quadrant.
    pub fn is_stable(&self) -> bool {
        self.page > self.p_max
    }

    pub fn e_infinity(&self) -> Result<SpectralGrid, SpectralError> {
        let mut g = self.clone();
        while !g.is_stable() {
            g = g.turn_page()?;
        }
        Ok(g)
    }

    /// Candidates for `H_n` assembled from `E^∞_{p,n-p}` along the filtration.
    pub fn abutment(&self, n: usize) -> Result<Vec<FormalGroup>, SpectralError> {
        if n > self.p_max {
            return Err(SpectralError::Unsupported(format!("degree {n} leaves the box")));
        }
        let inf = self.e_infinity()?;
        let mut missing = Vec::new();
        let mut pieces = Vec::new();
        for p in 0..=n {
            match inf.entry(p, n - p) {
                GridEntry::Known(g) => pieces.push(g),
                GridEntry::Unknown(_) => missing.push(format!("E_{{{p},{}}}", n - p)),
            }
        }
        if !missing.is_empty() {
            return Err(SpectralError::MissingEntries(missing));
        }
        let mut candidates = vec![FormalGroup::zero()];
        for piece in pieces {
            let mut next = Vec::new();
            for c in &candidates {
                next.extend(solve_extension(c, &piece)?);
            }
            next.sort_by_key(|g| g.to_string());
            next.dedup();
            candidates = next;
        }
        Ok(candidates)
    }

    /// `H_2 -> E_{2,0} -> E_{0,1} -> H_1 -> E_{1,0} -> 0`.
    pub fn five_term(&self, abutment: &BTreeMap<usize, FormalGroup>) -> Result<ExactSequence, SpectralError> {
        self.require_low_entries()?;
        let mut seq = ExactSequence::default();
        let h2 = abutment.get(&2).cloned();
        seq.push("H_2", h2.clone());
        seq.push("E_{2,0}", self.known(2, 0));
        seq.push("E_{0,1}", self.known(0, 1));
        self.push_low_tail(&mut seq, abutment)?;
        seq.maps.insert(0, None);
        seq.maps.insert(1, self.d2_map(2, 0)?);
        Ok(seq)
    }

    /// `E_{3,0} -> E_{1,1} -> coker(E_{0,2} -> H_2) -> E_{2,0} -> E_{0,1} -> H_1 -> E_{1,0} -> 0`.
    pub fn seven_term(&self, abutment: &BTreeMap<usize, FormalGroup>) -> Result<ExactSequence, SpectralError> {
        self.require_low_entries()?;
        let mut seq = ExactSequence::default();
        seq.push("E_{3,0}", self.known(3, 0));
        seq.push("E_{1,1}", self.known(1, 1));
        seq.push("coker(E_{0,2} -> H_2)", None);
        seq.push("E_{2,0}", self.known(2, 0));
        seq.push("E_{0,1}", self.known(0, 1));
        self.push_low_tail(&mut seq, abutment)?;
        seq.maps.insert(0, self.d2_map(3, 0)?);
        seq.maps.insert(1, None);
        seq.maps.insert(2, None);
        seq.maps.insert(3, self.d2_map(2, 0)?);
        Ok(seq)
    }

    fn require_low_entries(&self) -> Result<(), SpectralError> {
        if self.page != 2 {
            return Err(SpectralError::Unsupported(
                "low-degree sequences are read off page 2".into(),
            ));
        }
        let missing: Vec<String> = [(1, 0), (2, 0), (0, 1)]
            .iter()
            .filter(|&&(p, q)| self.known(p, q).is_none())
            .map(|(p, q)| format!("E_{{{p},{q}}}"))
            .collect();
        if missing.is_empty() {
            Ok(())
        } else {
            Err(SpectralError::MissingEntries(missing))
        }
    }

    /// `d^2` out of `(p, q)` as a map, when known or forced to vanish.
    fn d2_map(&self, p: usize, q: usize) -> Result<Option<FormalHom>, SpectralError> {
        if let Some(d) = self.differentials.get(&(p, q)) {
            return Ok(Some(d.clone()));
        }
        let (Some(s), Some(t)) = (self.known(p, q), self.known(p - 2, q + 1)) else {
            return Ok(None);
        };
        if !self.forced_zero(p, q) {
            return Ok(None);
        }
        match (slots_of(&s), slots_of(&t)) {
            (Ok(a), Ok(b)) => Ok(Some(FormalHom::zero(a, b))),
            _ => Ok(None),
        }
    }

    /// `-> H_1 -> E_{1,0} -> 0`, filling `H_1 = E_{1,0}` when `E_{0,1} = 0`.
    fn push_low_tail(
        &self,
        seq: &mut ExactSequence,
        abutment: &BTreeMap<usize, FormalGroup>,
    ) -> Result<(), SpectralError> {
        let e01 = self.known(0, 1).expect("checked");
        let e10 = self.known(1, 0).expect("checked");
        let h1 = match abutment.get(&1) {
            Some(h) => Some(h.clone()),
            None if e01.is_zero() => Some(e10.clone()),
            None => None,
        };
        seq.push("H_1", h1.clone());
        seq.push("E_{1,0}", Some(e10.clone()));
        seq.push("0", Some(FormalGroup::zero()));
        let into_h1 = match (&h1, e01.is_zero()) {
            (Some(h), true) => slots_of(h).ok().map(|s| FormalHom::zero(Vec::new(), s)),
            _ => None,
        };
        let edge = match &h1 {
            Some(h) if e01.is_zero() && *h == e10 => slots_of(h).ok().map(FormalHom::identity),
            _ => None,
        };
        let last = slots_of(&e10).ok().map(|s| FormalHom::zero(s, Vec::new()));
        seq.maps.extend([into_h1, edge, last]);
        Ok(())
    }
}

fn is_torsion(g: &FormalGroup) -> bool {
    g.atoms().is_empty() && g.free_rank() == 0
}

fn has_bounded_exponent(g: &FormalGroup) -> bool {
    is_torsion(g)
}

fn is_torsion_free(g: &FormalGroup) -> bool {
    let reg = AtomRegistry::builtin();
    g.torsion().is_empty()
        && g.families().is_empty()
        && g.atoms()
            .keys()
            .all(|a| reg.get(a).is_some_and(|x| x.torsion_rule == TorsionRule::None))
}

fn is_divisible(g: &FormalGroup) -> bool {
    let reg = AtomRegistry::builtin();
    g.torsion().is_empty()
        && g.free_rank() == 0
        && g.families().is_empty()
        && g.atoms().keys().all(|a| reg.get(a).is_some_and(|x| x.divisible))
}

/// `A_1 -> A_2 -> ... -> A_n` with some terms or maps possibly unknown.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ExactSequence {
    pub labels: Vec<String>,
    pub terms: Vec<Option<FormalGroup>>,
    /// `maps[i] : terms[i] -> terms[i + 1]`.
    pub maps: Vec<Option<FormalHom>>,
}

impl ExactSequence {
    fn push(&mut self, label: &str, term: Option<FormalGroup>) {
        self.labels.push(label.into());
        self.terms.push(term);
    }

    /// Exactness on every maximal run of consecutive known maps. The report
    /// positions refer to this sequence, 1-based.
    pub fn check_known(&self) -> Result<Vec<(String, ExactnessReport)>, SpectralError> {
        let mut out = Vec::new();
        let mut i = 0;
        while i < self.maps.len() {
            if self.maps[i].is_none() {
                i += 1;
                continue;
            }
            let start = i;
            while i < self.maps.len() && self.maps[i].is_some() {
                i += 1;
            }
            if i - start < 2 {
                continue;
            }
            let run: Vec<FormalHom> = self.maps[start..i].iter().map(|m| m.clone().expect("known")).collect();
            let mut report = check_exact(&run)?;
            for pos in &mut report.positions {
                pos.position += start;
            }
            out.push((self.labels[start..=i].join(" -> "), report));
        }
        Ok(out)
    }

    /// Whether every checked position is exact and at least one was checked.
    pub fn known_positions_exact(&self) -> Result<bool, SpectralError> {
        let runs = self.check_known()?;
        Ok(!runs.is_empty() && runs.iter().all(|(_, r)| r.exact))
    }

    pub fn render(&self) -> String {
        self.labels
            .iter()
            .zip(&self.terms)
            .map(|(l, t)| match t {
                Some(g) => format!("{l} = {g}"),
                None => format!("{l} = ?"),
            })
            .collect::<Vec<_>>()
            .join(" -> ")
    }
}

#[derive(Serialize)]
struct EntryRecord<'a> {
    p: usize,
    q: usize,
    value: &'a GridEntry,
}

#[derive(Serialize)]
struct DiffRecord<'a> {
    p: usize,
    q: usize,
    map: &'a FormalHom,
}

impl Serialize for SpectralGrid {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            page: usize,
            p_max: usize,
            q_max: usize,
            bottom_row_survives: bool,
            converges_to: &'a str,
            entries: Vec<EntryRecord<'a>>,
            differentials: Vec<DiffRecord<'a>>,
            notes: &'a [String],
        }
        Repr {
            page: self.page,
            p_max: self.p_max,
            q_max: self.q_max,
            bottom_row_survives: self.bottom_row_survives,
            converges_to: &self.converges_to,
            entries: self
                .entries
                .iter()
                .map(|(&(p, q), value)| EntryRecord { p, q, value })
                .collect(),
            differentials: self
                .differentials
                .iter()
                .map(|(&(p, q), map)| DiffRecord { p, q, map })
                .collect(),
            notes: &self.notes,
        }
        .serialize(s)
    }
}

impl SpectralGrid {
    /// Rows from `q_max` down to 0, columns `p = 0 ..= p_max`, aligned.
    pub fn render_table(&self) -> String {
        let mut rows: Vec<Vec<String>> = Vec::new();
        for q in (0..=self.q_max).rev() {
            let mut row = vec![format!("q={q}")];
            for p in 0..=self.p_max {
                row.push(match self.entry(p, q) {
                    GridEntry::Known(g) => g.to_string(),
                    GridEntry::Unknown(_) => "?".into(),
                });
            }
            rows.push(row);
        }
        let mut header = vec![String::new()];
        header.extend((0..=self.p_max).map(|p| format!("p={p}")));
        rows.push(header);
        let widths: Vec<usize> = (0..=self.p_max + 1)
            .map(|c| rows.iter().map(|r| r[c].chars().count()).max().unwrap_or(0))
            .collect();
        let mut out = format!("E^{} => {}\n", self.page, self.converges_to);
        for r in rows {
            let cells: Vec<String> = r.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
            out.push_str(cells.join("  ").trim_end());
            out.push('\n');
        }
        out
    }
}
