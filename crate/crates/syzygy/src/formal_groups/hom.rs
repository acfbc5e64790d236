use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::atoms::{AtomRegistry, TorsionRule};
use super::group::FormalGroup;
use super::FormalError;
use crate::complexes::{smith_normal_form, subquotient, IntMatrix};

/// One summand of a group as seen by a homomorphism.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Slot {
    Free,
    Cyclic(u64),
    Atom(String),
}

impl Slot {
    fn is_discrete(&self) -> bool {
        !matches!(self, Slot::Atom(_))
    }

    fn atom_name(&self) -> Option<&str> {
        match self {
            Slot::Atom(a) => Some(a),
            _ => None,
        }
    }

    fn modulus(&self) -> Option<u64> {
        match self {
            Slot::Cyclic(n) => Some(*n),
            _ => None,
        }
    }
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Slot::Free => write!(f, "Z"),
            Slot::Cyclic(n) => write!(f, "Z/{n}"),
            Slot::Atom(a) => write!(f, "{a}"),
        }
    }
}

impl fmt::Debug for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Serialize for Slot {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Slot {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        parse_slot(&text).map_err(serde::de::Error::custom)
    }
}

fn parse_slot(text: &str) -> Result<Slot, FormalError> {
    if text == "Z" {
        return Ok(Slot::Free);
    }
    if AtomRegistry::builtin().get(text).is_some() {
        return Ok(Slot::Atom(text.to_string()));
    }
    match text.strip_prefix("Z/").map(str::parse::<u64>) {
        Some(Ok(n)) if n >= 2 => Ok(Slot::Cyclic(n)),
        _ => Err(FormalError::Parse {
            input: text.to_string(),
            detail: "expected Z, Z/n with n >= 2, or a registered atom".into(),
        }),
    }
}

/// Expands a group into slots: atoms by name, then cyclic factors, then free.
pub fn slots_of(g: &FormalGroup) -> Result<Vec<Slot>, FormalError> {
    if !g.families().is_empty() {
        return Err(FormalError::FamilyInHom(g.to_string()));
    }
    let mut out = Vec::new();
    for (name, k) in g.atoms() {
        out.extend(std::iter::repeat_n(Slot::Atom(name.clone()), *k));
    }
    out.extend(g.torsion().iter().map(|&n| Slot::Cyclic(n)));
    out.extend(std::iter::repeat_n(Slot::Free, g.free_rank()));
    Ok(out)
}

pub fn group_of(slots: &[Slot]) -> FormalGroup {
    slots.iter().fold(FormalGroup::zero(), |acc, s| {
        acc.direct_sum(&match s {
            Slot::Free => FormalGroup::free(1),
            Slot::Cyclic(n) => FormalGroup::cyclic(*n),
            Slot::Atom(a) => FormalGroup::atom(a),
        })
    })
}

/// Integer block matrix between slot lists; rows index the target.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "HomRepr")]
pub struct FormalHom {
    source: Vec<Slot>,
    target: Vec<Slot>,
    matrix: Vec<Vec<i64>>,
}

#[derive(Deserialize)]
struct HomRepr {
    source: Vec<Slot>,
    target: Vec<Slot>,
    matrix: Vec<Vec<i64>>,
}

impl TryFrom<HomRepr> for FormalHom {
    type Error = FormalError;
    fn try_from(r: HomRepr) -> Result<Self, Self::Error> {
        FormalHom::new(r.source, r.target, r.matrix)
    }
}

impl FormalHom {
    pub fn new(source: Vec<Slot>, target: Vec<Slot>, matrix: Vec<Vec<i64>>) -> Result<Self, FormalError> {
        if matrix.len() != target.len() || matrix.iter().any(|r| r.len() != source.len()) {
            return Err(FormalError::ShapeMismatch(format!(
                "matrix must be {} x {}",
                target.len(),
                source.len()
            )));
        }
        let reg = AtomRegistry::builtin();
        for s in source.iter().chain(&target) {
            if let Slot::Atom(a) = s {
                reg.require(a)?;
            }
        }
        let mut h = FormalHom { source, target, matrix };
        for i in 0..h.target.len() {
            for j in 0..h.source.len() {
                check_block(reg, &h.source[j], &h.target[i], h.matrix[i][j])
                    .map_err(|detail| FormalError::IncompatibleBlock { row: i, col: j, detail })?;
            }
        }
        h.reduce();
        Ok(h)
    }

    /// Homomorphism between the normal-form slot expansions of two groups.
    pub fn between(source: &FormalGroup, target: &FormalGroup, matrix: Vec<Vec<i64>>) -> Result<Self, FormalError> {
        Self::new(slots_of(source)?, slots_of(target)?, matrix)
    }

    pub fn zero(source: Vec<Slot>, target: Vec<Slot>) -> Self {
        let matrix = vec![vec![0; source.len()]; target.len()];
        FormalHom { source, target, matrix }
    }

    pub fn identity(slots: Vec<Slot>) -> Self {
        Self::scalar(slots, 1)
    }

    pub fn scalar(slots: Vec<Slot>, k: i64) -> Self {
        let n = slots.len();
        let matrix = (0..n)
            .map(|i| (0..n).map(|j| if i == j { k } else { 0 }).collect())
            .collect();
        let mut h = FormalHom {
            source: slots.clone(),
            target: slots,
            matrix,
        };
        h.reduce();
        h
    }

    /// Sends each source slot to every target slot of the same kind with
    /// coefficient one; for `A -> A (+) A` this is the diagonal.
    pub fn diagonal(source: Vec<Slot>, target: Vec<Slot>) -> Self {
        let matrix = target
            .iter()
            .map(|t| source.iter().map(|s| i64::from(s == t)).collect())
            .collect();
        FormalHom { source, target, matrix }
    }

    pub fn source(&self) -> &[Slot] {
        &self.source
    }

    pub fn target(&self) -> &[Slot] {
        &self.target
    }

    pub fn matrix(&self) -> &[Vec<i64>] {
        &self.matrix
    }

    pub fn source_group(&self) -> FormalGroup {
        group_of(&self.source)
    }

    pub fn target_group(&self) -> FormalGroup {
        group_of(&self.target)
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.iter().flatten().all(|&x| x == 0)
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &FormalHom) -> Result<FormalHom, FormalError> {
        if self.target != next.source {
            return Err(FormalError::ShapeMismatch(format!(
                "cannot compose: {:?} vs {:?}",
                self.target, next.source
            )));
        }
        let mut matrix = vec![vec![0i64; self.source.len()]; next.target.len()];
        for (i, row) in matrix.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                let mut acc: i128 = 0;
                for m in 0..self.target.len() {
                    acc += i128::from(next.matrix[i][m]) * i128::from(self.matrix[m][j]);
                }
                if let Some(n) = next.target[i].modulus() {
                    acc = acc.rem_euclid(i128::from(n));
                }
                *entry = i64::try_from(acc).expect("composition entry overflow");
            }
        }
        Ok(FormalHom {
            source: self.source.clone(),
            target: next.target.clone(),
            matrix,
        })
    }

    fn reduce(&mut self) {
        for (i, t) in self.target.iter().enumerate() {
            if let Some(n) = t.modulus() {
                for x in &mut self.matrix[i] {
                    *x = x.rem_euclid(n as i64);
                }
            }
        }
    }
}

fn check_block(reg: &AtomRegistry, s: &Slot, t: &Slot, k: i64) -> Result<(), String> {
    if k == 0 {
        return Ok(());
    }
    match (s, t) {
        (Slot::Free, Slot::Free) | (Slot::Free, Slot::Cyclic(_)) => Ok(()),
        (Slot::Cyclic(_), Slot::Free) => Err("a finite group maps trivially to Z".into()),
        (Slot::Cyclic(m), Slot::Cyclic(n)) => {
            if (i128::from(k) * i128::from(*m)).rem_euclid(i128::from(*n)) == 0 {
                Ok(())
            } else {
                Err(format!("{k} does not define a map Z/{m} -> Z/{n}"))
            }
        }
        (Slot::Atom(a), Slot::Atom(b)) if a == b || reg.has_map(a, b) => Ok(()),
        (Slot::Atom(a), Slot::Atom(b)) => Err(format!("no registered map {a} -> {b}")),
        _ => Err(format!("no registered map {s} -> {t}")),
    }
}

fn submatrix(m: &[Vec<i64>], rows: &[usize], cols: &[usize]) -> IntMatrix {
    let entries: Vec<Vec<i64>> = rows.iter().map(|&i| cols.iter().map(|&j| m[i][j]).collect()).collect();
    IntMatrix::from_rows_shaped(rows.len(), cols.len(), &entries)
}

/// Columns `n * e_i` for each cyclic slot among `idx`.
fn relations(slots: &[Slot], idx: &[usize]) -> IntMatrix {
    let cyc: Vec<(usize, u64)> = idx
        .iter()
        .enumerate()
        .filter_map(|(r, &i)| slots[i].modulus().map(|n| (r, n)))
        .collect();
    let mut m = IntMatrix::zeros(idx.len(), cyc.len());
    for (c, (r, n)) in cyc.into_iter().enumerate() {
        m[(r, c)] = BigInt::from(n);
    }
    m
}

fn indices(slots: &[Slot], pred: impl Fn(&Slot) -> bool) -> Vec<usize> {
    (0..slots.len()).filter(|&i| pred(&slots[i])).collect()
}

fn reject_cross_atom(h: &FormalHom) -> Result<(), FormalError> {
    for (i, t) in h.target.iter().enumerate() {
        for (j, s) in h.source.iter().enumerate() {
            if let (Some(a), Some(b)) = (s.atom_name(), t.atom_name()) {
                if a != b && h.matrix[i][j] != 0 {
                    return Err(FormalError::InsufficientAtomData {
                        atom: format!("{a} -> {b}"),
                        detail: "kernel and image of a map between distinct atoms are not modelled".into(),
                    });
                }
            }
        }
    }
    Ok(())
}

/// `ker(g) / im(f)`.
///
/// The discrete slots are handled by a lattice subquotient. For each atom
/// `D`, the block is an integer complex `Z^p -> Z^m -> Z^q` tensored with
/// `D`, so the answer is `H ⊗ D (+) Tor(coker, D)` with `H` its middle
/// homology over `Z`.
pub fn homology_at(f: &FormalHom, g: &FormalHom) -> Result<FormalGroup, FormalError> {
    if !f.then(g)?.is_zero() {
        return Err(FormalError::CompositionNonzero);
    }
    reject_cross_atom(f)?;
    reject_cross_atom(g)?;
    let reg = AtomRegistry::builtin();
    let mid = &f.target;

    let src_d = indices(&f.source, Slot::is_discrete);
    let mid_d = indices(mid, Slot::is_discrete);
    let tgt_d = indices(&g.target, Slot::is_discrete);
    let a = submatrix(&g.matrix, &tgt_d, &mid_d);
    let b = relations(&g.target, &tgt_d);
    let c = submatrix(&f.matrix, &mid_d, &src_d).hstack(&relations(mid, &mid_d));
    let disc = subquotient(&a, &b, &c).map_err(|_| FormalError::CompositionNonzero)?;
    let mut out = FormalGroup::from_fg(&disc);

    let names: std::collections::BTreeSet<&str> = mid.iter().filter_map(Slot::atom_name).collect();
    for name in names {
        let atom = reg.require(name)?;
        let is = |s: &Slot| s.atom_name() == Some(name);
        let (src_a, mid_a, tgt_a) = (indices(&f.source, is), indices(mid, is), indices(&g.target, is));
        let fa = submatrix(&f.matrix, &mid_a, &src_a);
        let ga = submatrix(&g.matrix, &tgt_a, &mid_a);
        let h =
            subquotient(&ga, &IntMatrix::zeros(tgt_a.len(), 0), &fa).map_err(|_| FormalError::CompositionNonzero)?;
        let cok = subquotient(&IntMatrix::zeros(0, tgt_a.len()), &IntMatrix::zeros(0, 0), &ga)
            .expect("image lies in the ambient lattice");
        out = out.direct_sum(&FormalGroup::atom_power(name, h.free_rank()));
        if !h.torsion().is_empty() && !atom.divisible {
            return Err(FormalError::InsufficientAtomData {
                atom: name.into(),
                detail: "quotient by a finite-index subgroup of a non-divisible atom".into(),
            });
        }
        for s in cok.torsion() {
            let s = s.to_u64().expect("small torsion");
            match atom.torsion_rule {
                TorsionRule::Cyclic => out = out.direct_sum(&FormalGroup::cyclic(s)),
                TorsionRule::None => {}
                TorsionRule::Unknown => {
                    return Err(FormalError::InsufficientAtomData {
                        atom: name.into(),
                        detail: format!("its {s}-torsion is not known"),
                    })
                }
            }
        }
    }
    Ok(out)
}

pub fn kernel(h: &FormalHom) -> Result<FormalGroup, FormalError> {
    homology_at(&FormalHom::zero(vec![], h.source.clone()), h)
}

pub fn cokernel(h: &FormalHom) -> Result<FormalGroup, FormalError> {
    homology_at(h, &FormalHom::zero(h.target.clone(), vec![]))
}

fn require_discrete(h: &FormalHom) -> Result<(), FormalError> {
    match h.source.iter().chain(&h.target).find_map(Slot::atom_name) {
        Some(a) => Err(FormalError::InsufficientAtomData {
            atom: a.into(),
            detail: "explicit inclusions and projections are only built for discrete groups".into(),
        }),
        None => Ok(()),
    }
}

fn to_i64(x: &BigInt) -> i64 {
    x.to_i64().expect("entry fits in i64")
}

fn unimodular_inverse(u: &IntMatrix) -> IntMatrix {
    // s.u * u * s.v = 1, hence u^{-1} = s.v * s.u.
    let s = smith_normal_form(u);
    debug_assert_eq!(s.d, IntMatrix::identity(u.rows()));
    s.v.mul(&s.u)
}

/// The kernel of a discrete homomorphism together with its inclusion.
pub fn kernel_inclusion(h: &FormalHom) -> Result<FormalHom, FormalError> {
    require_discrete(h)?;
    let p = h.source.len();
    let all_s: Vec<usize> = (0..p).collect();
    let all_t: Vec<usize> = (0..h.target.len()).collect();
    let a = submatrix(&h.matrix, &all_t, &all_s);
    let stacked = a.hstack(&relations(&h.target, &all_t));
    let snf = smith_normal_form(&stacked);
    let kcols: Vec<usize> = (snf.rank()..stacked.cols()).collect();
    let gens = snf.v.select_columns(&kcols).top_rows(p);

    let gs = smith_normal_form(&gens);
    let ds = gs.invariant_factors();
    let s = ds.len();
    let ginv = unimodular_inverse(&gs.u);
    let mut basis = IntMatrix::zeros(p, s);
    for i in 0..p {
        for j in 0..s {
            basis[(i, j)] = &ginv[(i, j)] * &ds[j];
        }
    }
    let c = relations(&h.source, &all_s);
    let uc = gs.u.mul(&c);
    let mut coords = IntMatrix::zeros(s, c.cols());
    for i in 0..s {
        for j in 0..c.cols() {
            coords[(i, j)] = uc[(i, j)].div_floor(&ds[i]);
        }
    }
    let xs = smith_normal_form(&coords);
    let adapted = basis.mul(&unimodular_inverse(&xs.u));

    let mut slots = Vec::new();
    let mut cols = Vec::new();
    for j in 0..s {
        let d = if j < xs.d.rows().min(xs.d.cols()) {
            xs.d[(j, j)].clone()
        } else {
            BigInt::zero()
        };
        if d == BigInt::from(1) {
            continue;
        }
        slots.push(if d.is_zero() {
            Slot::Free
        } else {
            Slot::Cyclic(d.to_u64().unwrap())
        });
        cols.push(j);
    }
    let matrix = (0..p)
        .map(|i| {
            cols.iter()
                .map(|&j| {
                    let x = &adapted[(i, j)];
                    match h.source[i].modulus() {
                        Some(n) => to_i64(&x.mod_floor(&BigInt::from(n))),
                        None => to_i64(x),
                    }
                })
                .collect()
        })
        .collect();
    FormalHom::new(slots, h.source.clone(), matrix)
}

/// The cokernel of a discrete homomorphism together with its projection.
pub fn cokernel_projection(h: &FormalHom) -> Result<FormalHom, FormalError> {
    require_discrete(h)?;
    let q = h.target.len();
    let all_s: Vec<usize> = (0..h.source.len()).collect();
    let all_t: Vec<usize> = (0..q).collect();
    let m = submatrix(&h.matrix, &all_t, &all_s).hstack(&relations(&h.target, &all_t));
    let snf = smith_normal_form(&m);
    let r = snf.rank();
    let mut slots = Vec::new();
    let mut matrix = Vec::new();
    for i in 0..q {
        let d = if i < r { snf.d[(i, i)].clone() } else { BigInt::zero() };
        if d == BigInt::from(1) {
            continue;
        }
        let row: Vec<i64> = (0..q)
            .map(|j| {
                let x = &snf.u[(i, j)];
                if d.is_zero() {
                    to_i64(x)
                } else {
                    to_i64(&x.mod_floor(&d))
                }
            })
            .collect();
        slots.push(if d.is_zero() {
            Slot::Free
        } else {
            Slot::Cyclic(d.to_u64().unwrap())
        });
        matrix.push(row);
    }
    FormalHom::new(h.target.clone(), slots, matrix)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Verdict {
    Exact,
    NotExact { homology: FormalGroup },
    CompositionNonzero,
    Unknown { reason: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PositionVerdict {
    /// 1-based index of the object in the sequence.
    pub position: usize,
    pub object: FormalGroup,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExactnessReport {
    pub positions: Vec<PositionVerdict>,
    pub exact: bool,
}

impl ExactnessReport {
    pub fn failures(&self) -> Vec<usize> {
        self.positions
            .iter()
            .filter(|p| p.verdict != Verdict::Exact)
            .map(|p| p.position)
            .collect()
    }
}

/// Judges exactness at every interior object of `A1 -> A2 -> ... -> An+1`.
pub fn check_exact(seq: &[FormalHom]) -> Result<ExactnessReport, FormalError> {
    for (i, w) in seq.windows(2).enumerate() {
        if w[0].target != w[1].source {
            return Err(FormalError::ShapeMismatch(format!(
                "map {} ends in {} but map {} starts at {}",
                i + 1,
                w[0].target_group(),
                i + 2,
                w[1].source_group()
            )));
        }
    }
    let mut positions = Vec::new();
    for (i, w) in seq.windows(2).enumerate() {
        let verdict = match homology_at(&w[0], &w[1]) {
            Ok(g) if g.is_zero() => Verdict::Exact,
            Ok(g) => Verdict::NotExact { homology: g },
            Err(FormalError::CompositionNonzero) => Verdict::CompositionNonzero,
            Err(e) => Verdict::Unknown { reason: e.to_string() },
        };
        positions.push(PositionVerdict {
            position: i + 2,
            object: w[0].target_group(),
            verdict,
        });
    }
    let exact = positions.iter().all(|p| p.verdict == Verdict::Exact);
    Ok(ExactnessReport { positions, exact })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c() -> Slot {
        Slot::Atom("C*".into())
    }

    fn g(s: &str) -> FormalGroup {
        FormalGroup::parse(s).unwrap()
    }

    #[test]
    fn doubling_on_z() {
        let h = FormalHom::new(vec![Slot::Free], vec![Slot::Free], vec![vec![2]]).unwrap();
        assert!(kernel(&h).unwrap().is_zero());
        assert_eq!(cokernel(&h).unwrap(), FormalGroup::cyclic(2));
    }

    #[test]
    fn cokernel_of_diagonal_on_c_star() {
        let h = FormalHom::new(vec![c()], vec![c(), c()], vec![vec![1], vec![1]]).unwrap();
        assert_eq!(cokernel(&h).unwrap(), g("C*"));
        assert!(kernel(&h).unwrap().is_zero());
    }

    #[test]
    fn square_and_identity_column_is_injective() {
        let h = FormalHom::new(vec![c()], vec![c(), c()], vec![vec![2], vec![1]]).unwrap();
        assert!(kernel(&h).unwrap().is_zero());
        assert_eq!(cokernel(&h).unwrap(), g("C*"));
    }

    #[test]
    fn powers_on_c_star_have_root_of_unity_kernels() {
        let h = FormalHom::new(vec![c()], vec![c()], vec![vec![-3]]).unwrap();
        assert_eq!(kernel(&h).unwrap(), g("Z/3"));
        assert!(cokernel(&h).unwrap().is_zero());
        let z = FormalHom::new(vec![c()], vec![c()], vec![vec![0]]).unwrap();
        assert_eq!(kernel(&z).unwrap(), g("C*"));
    }

    #[test]
    fn unknown_torsion_fails_loudly() {
        let w = Slot::Atom("Wedge2(C*)".into());
        let h = FormalHom::new(vec![w.clone()], vec![w], vec![vec![2]]).unwrap();
        assert!(matches!(kernel(&h), Err(FormalError::InsufficientAtomData { .. })));
        assert!(cokernel(&h).unwrap().is_zero());
    }

    #[test]
    fn uniquely_divisible_atoms_have_no_torsion() {
        let k = Slot::Atom("K2(C)".into());
        let h = FormalHom::new(vec![k.clone()], vec![k], vec![vec![5]]).unwrap();
        assert!(kernel(&h).unwrap().is_zero());
    }

    #[test]
    fn illegal_blocks_are_rejected() {
        assert!(FormalHom::new(vec![Slot::Free], vec![c()], vec![vec![1]]).is_err());
        assert!(FormalHom::new(vec![Slot::Cyclic(2)], vec![Slot::Free], vec![vec![1]]).is_err());
        assert!(FormalHom::new(vec![Slot::Cyclic(2)], vec![Slot::Cyclic(3)], vec![vec![1]]).is_err());
        assert!(FormalHom::new(vec![Slot::Cyclic(2)], vec![Slot::Cyclic(4)], vec![vec![2]]).is_ok());
        let w = Slot::Atom("Wedge2(C*)".into());
        let k = Slot::Atom("K2(C)".into());
        assert!(FormalHom::new(vec![w.clone()], vec![k.clone()], vec![vec![1]]).is_ok());
        assert!(FormalHom::new(vec![k], vec![w], vec![vec![1]]).is_err());
    }

    #[test]
    fn zero_maps_leave_the_middle_unchanged() {
        let mid = slots_of(&g("C* (+) Z/4 (+) Z")).unwrap();
        let f = FormalHom::zero(vec![Slot::Free], mid.clone());
        let h = FormalHom::zero(mid, vec![Slot::Cyclic(2)]);
        assert_eq!(homology_at(&f, &h).unwrap(), g("C* (+) Z/4 (+) Z"));
    }

    #[test]
    fn nonzero_composition_is_an_error() {
        let f = FormalHom::new(vec![Slot::Free], vec![Slot::Free], vec![vec![1]]).unwrap();
        assert_eq!(homology_at(&f, &f), Err(FormalError::CompositionNonzero));
    }

    #[test]
    fn short_exact_sequences() {
        let z = vec![Slot::Free];
        let into = FormalHom::zero(vec![], z.clone());
        let double = FormalHom::new(z.clone(), z.clone(), vec![vec![2]]).unwrap();
        let proj2 = FormalHom::new(z.clone(), vec![Slot::Cyclic(2)], vec![vec![1]]).unwrap();
        let out2 = FormalHom::zero(vec![Slot::Cyclic(2)], vec![]);
        let r = check_exact(&[into.clone(), double.clone(), proj2, out2]).unwrap();
        assert!(r.exact);

        let proj3 = FormalHom::new(z, vec![Slot::Cyclic(3)], vec![vec![1]]).unwrap();
        let out3 = FormalHom::zero(vec![Slot::Cyclic(3)], vec![]);
        let r = check_exact(&[into, double, proj3, out3]).unwrap();
        assert!(!r.exact);
        assert_eq!(r.failures(), vec![3]);
    }

    #[test]
    fn mismatched_chain_is_rejected() {
        let a = FormalHom::zero(vec![Slot::Free], vec![Slot::Free]);
        let b = FormalHom::zero(vec![Slot::Cyclic(2)], vec![]);
        assert!(matches!(check_exact(&[a, b]), Err(FormalError::ShapeMismatch(_))));
    }

    #[test]
    fn inclusion_and_projection_give_exact_sequences() {
        let h = FormalHom::new(
            vec![Slot::Free, Slot::Free, Slot::Cyclic(4)],
            vec![Slot::Cyclic(6), Slot::Free],
            vec![vec![3, 2, 3], vec![4, 2, 0]],
        )
        .unwrap();
        let inc = kernel_inclusion(&h).unwrap();
        let proj = cokernel_projection(&h).unwrap();
        assert_eq!(inc.source_group(), kernel(&h).unwrap());
        assert_eq!(proj.target_group(), cokernel(&h).unwrap());
        let seq = [
            FormalHom::zero(vec![], inc.source().to_vec()),
            inc.clone(),
            h,
            proj.clone(),
            FormalHom::zero(proj.target().to_vec(), vec![]),
        ];
        assert!(check_exact(&seq).unwrap().exact);
    }

    #[test]
    fn json_round_trip() {
        let h = FormalHom::new(vec![c()], vec![c(), c()], vec![vec![2], vec![1]]).unwrap();
        let text = serde_json::to_string(&h).unwrap();
        assert_eq!(text, r#"{"source":["C*"],"target":["C*","C*"],"matrix":[[2],[1]]}"#);
        let back: FormalHom = serde_json::from_str(&text).unwrap();
        assert_eq!(back, h);
    }
}
