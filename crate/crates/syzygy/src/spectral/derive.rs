use std::collections::BTreeMap;

use serde::Serialize;

use super::{
    lhs_grid, Action, GridEntry, KnownHomologyRegistry, LhsExtension, RegistryEntry, SpectralError, SpectralGrid,
};
use crate::formal_groups::{
    cokernel, kernel, quotient_candidates, slots_of, solve_extension, FormalGroup, FormalHom, Slot,
};
use crate::surface_models::{BaseCase, GeneratorUniverse};

/// A homology group pinned down up to a list of candidates, with the
/// registry facts it introduced on the way.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Derivation {
    pub group: String,
    pub degree: usize,
    pub candidates: Vec<FormalGroup>,
    pub steps: Vec<String>,
    pub provenance: Vec<String>,
    pub established: Vec<RegistryEntry>,
}

impl Derivation {
    pub fn unique(&self) -> Option<&FormalGroup> {
        match self.candidates.as_slice() {
            [g] => Some(g),
            _ => None,
        }
    }

    /// `reg` plus the intermediate facts and, when unique, the result.
    pub fn register(&self, reg: &KnownHomologyRegistry) -> Result<KnownHomologyRegistry, SpectralError> {
        let mut out = reg.clone();
        for e in &self.established {
            ensure(&mut out, &e.group, e.degree, e.value.clone(), &e.provenance)?;
        }
        if let Some(g) = self.unique() {
            let why = format!("derived: {}", self.steps.join("; "));
            ensure(&mut out, &self.group, self.degree, g.clone(), &why)?;
        }
        Ok(out)
    }
}

/// Inserts unless present; a present entry must agree.
fn ensure(
    reg: &mut KnownHomologyRegistry,
    group: &str,
    degree: usize,
    value: FormalGroup,
    why: &str,
) -> Result<(), SpectralError> {
    match reg.get(group, degree) {
        Some(e) if e.value == value => Ok(()),
        Some(e) => Err(SpectralError::Registry(format!(
            "H_{degree}({group}) is registered as {} but derived as {value}",
            e.value
        ))),
        None => reg.insert(RegistryEntry {
            group: group.into(),
            degree,
            value,
            provenance: why.into(),
        }),
    }
}

fn require_zero(grid: &SpectralGrid, p: usize, q: usize) -> Result<(), SpectralError> {
    match grid.entry(p, q) {
        GridEntry::Known(g) if g.is_zero() => Ok(()),
        GridEntry::Known(g) => Err(SpectralError::Unsupported(format!("E_{{{p},{q}}} = {g} is not zero"))),
        GridEntry::Unknown(_) => Err(SpectralError::MissingEntries(vec![format!("E_{{{p},{q}}}")])),
    }
}

fn lookup(reg: &KnownHomologyRegistry, group: &str, degree: usize) -> Result<RegistryEntry, SpectralError> {
    reg.get(group, degree)
        .cloned()
        .ok_or_else(|| SpectralError::MissingRegistry(vec![format!("H_{degree}({group})")]))
}

/// `H_2(PGL(n,C))` from `1 -> Z/n -> SL(n,C) -> PGL(n,C) -> 1`.
///
/// With `E_{1,1} = E_{0,2} = 0` and `H_1(SL) = 0`, the differential
/// `E_{2,0} -> E_{0,1}` is onto with kernel `H_2(SL)`.
pub fn schur_pgl(n: u64, reg: &KnownHomologyRegistry) -> Result<Derivation, SpectralError> {
    let sl = format!("SL({n},C)");
    let pgl = format!("PGL({n},C)");
    let grid = lhs_grid(
        &LhsExtension {
            normal: format!("Z/{n}"),
            quotient: pgl.clone(),
            action: Action::Trivial,
            split: false,
            p_max: 2,
            q_max: 2,
        },
        reg,
    )?;
    require_zero(&grid, 1, 1)?;
    require_zero(&grid, 0, 2)?;
    let h1 = lookup(reg, &sl, 1)?;
    if !h1.value.is_zero() {
        return Err(SpectralError::Unsupported(format!(
            "H_1({sl}) = {} is not zero",
            h1.value
        )));
    }
    let h2 = lookup(reg, &sl, 2)?;
    let e01 = grid
        .known(0, 1)
        .ok_or_else(|| SpectralError::MissingEntries(vec!["E_{0,1}".into()]))?;
    let candidates = solve_extension(&h2.value, &e01)?;
    Ok(Derivation {
        group: pgl.clone(),
        degree: 2,
        candidates,
        steps: vec![
            format!("E_{{1,1}} = E_{{0,2}} = 0 and H_1({sl}) = 0"),
            format!("0 -> H_2({sl}) = {} -> H_2({pgl}) -> E_{{0,1}} = {e01} -> 0", h2.value),
        ],
        provenance: vec![h1.provenance, h2.provenance],
        established: Vec::new(),
    })
}

/// `H_2(Aut(P1xP1))` from the split extension of `Z/2` by
/// `PGL(2,C) x PGL(2,C)` with the factor swap.
pub fn schur_aut_p1xp1(reg: &KnownHomologyRegistry) -> Result<Derivation, SpectralError> {
    let pgl2 = schur_pgl(2, reg)?;
    let h2 = pgl2
        .unique()
        .cloned()
        .ok_or_else(|| SpectralError::Unsupported("H_2(PGL(2,C)) is not unique".into()))?;
    let h1 = lookup(reg, "PGL(2,C)", 1)?;
    if !h1.value.is_zero() {
        return Err(SpectralError::Unsupported("Kunneth needs H_1(PGL(2,C)) = 0".into()));
    }
    let product = h2.direct_sum(&h2);
    let mut established = vec![RegistryEntry {
        group: "PGL(2,C)".into(),
        degree: 2,
        value: h2.clone(),
        provenance: format!("derived: {}", pgl2.steps.join("; ")),
    }];
    established.push(RegistryEntry {
        group: "PGL(2,C)xPGL(2,C)".into(),
        degree: 2,
        value: product.clone(),
        provenance: "Kunneth: H_2 of a product of perfect groups is the sum of the H_2".into(),
    });
    let mut local = reg.clone();
    for e in &established {
        ensure(&mut local, &e.group, e.degree, e.value.clone(), &e.provenance)?;
    }
    let grid = lhs_grid(
        &LhsExtension {
            normal: "PGL(2,C)xPGL(2,C)".into(),
            quotient: "Z/2".into(),
            action: Action::SwapFactors,
            split: true,
            p_max: 3,
            q_max: 2,
        },
        &local,
    )?;
    let candidates = grid.abutment(2)?;
    Ok(Derivation {
        group: "Aut(P1xP1)".into(),
        degree: 2,
        candidates,
        steps: vec![
            format!("H_2(PGL(2,C)) = {h2}"),
            format!("H_2(PGL(2,C)xPGL(2,C)) = {product}"),
            "swap grid: only E_{0,2} survives in total degree 2".into(),
        ],
        provenance: [pgl2.provenance, vec![h1.provenance]].concat(),
        established,
    })
}

/// The map `H_d(aut_full) -> H_d(aut_plus)` in the long exact sequence of
/// the sign module.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Transfer {
    /// Multiplication by 2 in degree 0 and the diagonal above it.
    Diagonal,
    /// One map per degree, starting at degree 0.
    Explicit(Vec<FormalHom>),
}

impl Transfer {
    fn at(&self, d: usize, full: &FormalGroup, plus: &FormalGroup) -> Result<FormalHom, SpectralError> {
        match self {
            Transfer::Diagonal if d == 0 => {
                if *full != FormalGroup::free(1) || *plus != FormalGroup::free(1) {
                    return Err(SpectralError::Unsupported("degree 0 must be Z on both sides".into()));
                }
                Ok(FormalHom::scalar(vec![Slot::Free], 2))
            }
            Transfer::Diagonal => Ok(FormalHom::diagonal(slots_of(full)?, slots_of(plus)?)),
            Transfer::Explicit(maps) => {
                let m = maps
                    .get(d)
                    .cloned()
                    .ok_or_else(|| SpectralError::Unsupported(format!("no transfer supplied in degree {d}")))?;
                if m.source_group() != *full || m.target_group() != *plus {
                    return Err(SpectralError::Unsupported(format!(
                        "transfer in degree {d} has the wrong shape"
                    )));
                }
                Ok(m)
            }
        }
    }
}

/// `H_i` of the block of a model whose automorphisms can reverse its
/// orientation: `0 -> coker f_i -> H -> ker f_{i-1} -> 0` with `f` the transfer.
pub fn nonorientable_block_homology(
    i: usize,
    aut_full: &str,
    aut_plus: &str,
    transfer: &Transfer,
    reg: &KnownHomologyRegistry,
) -> Result<Derivation, SpectralError> {
    let mut provenance = Vec::new();
    let mut missing = Vec::new();
    let mut fetch = |group: &str, d: usize| match reg.get(group, d) {
        Some(e) => {
            provenance.push(e.provenance.clone());
            Some(e.value.clone())
        }
        None => {
            missing.push(format!("H_{d}({group})"));
            None
        }
    };
    let full_i = fetch(aut_full, i);
    let plus_i = fetch(aut_plus, i);
    let lower = if i > 0 {
        Some((fetch(aut_full, i - 1), fetch(aut_plus, i - 1)))
    } else {
        None
    };
    if !missing.is_empty() {
        return Err(SpectralError::MissingRegistry(missing));
    }
    let (full_i, plus_i) = (full_i.expect("checked"), plus_i.expect("checked"));
    let f_i = transfer.at(i, &full_i, &plus_i)?;
    let coker = cokernel(&f_i)?;
    let ker = match lower {
        Some((Some(full), Some(plus))) => kernel(&transfer.at(i - 1, &full, &plus)?)?,
        _ => FormalGroup::zero(),
    };
    let candidates = solve_extension(&coker, &ker)?;
    Ok(Derivation {
        group: format!("{aut_full} sign block"),
        degree: i,
        candidates,
        steps: vec![
            format!("coker(H_{i}({aut_full}) -> H_{i}({aut_plus})) = {coker}"),
            format!("ker in degree {} = {ker}", i.saturating_sub(1)),
        ],
        provenance,
        established: Vec::new(),
    })
}

/// Rows 0 and 1 of the Cremona grid, with the bound on `E_{2,1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CremonaRows {
    pub e_max: u32,
    pub r_max: usize,
    pub e10: FormalGroup,
    pub e20: FormalGroup,
    pub e30: FormalGroup,
    pub e01: FormalGroup,
    pub e11: FormalGroup,
    /// `E_{2,1}` is a quotient of this group of row-1 cycles.
    pub e21_bound: FormalGroup,
}

pub fn cremona_rows(e_max: u32, r_max: usize) -> Result<CremonaRows, SpectralError> {
    let u = GeneratorUniverse::new(BaseCase::CremonaOverPoint, 0, e_max, r_max)?;
    let row0 = |d: usize| u.row0_homology(d).map(|g| FormalGroup::from_fg(&g));
    let cx = u.row1_complex()?;
    Ok(CremonaRows {
        e_max,
        r_max,
        e10: row0(1)?,
        e20: row0(2)?,
        e30: row0(3)?,
        e01: u.row1_homology(0)?,
        e11: u.row1_homology(1)?,
        e21_bound: cx.cycles(2)?,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CremonaAssembly {
    pub e02: FormalGroup,
    pub e21_bound: FormalGroup,
    pub e21_forced_zero: bool,
    pub candidates: Vec<FormalGroup>,
    pub relation: String,
    pub grid: SpectralGrid,
    pub provenance: Vec<String>,
}

/// `H_2` of the plane Cremona group. Rows 0 and 1 vanish in total degrees
/// 2 and 3, leaving `E_{0,2}` modulo the image of `E_{2,1}`.
pub fn cremona_assemble(
    rows: &CremonaRows,
    reg: &KnownHomologyRegistry,
    e21_forced_zero: bool,
) -> Result<CremonaAssembly, SpectralError> {
    for (label, g) in [("E_{2,0}", &rows.e20), ("E_{1,1}", &rows.e11), ("E_{3,0}", &rows.e30)] {
        if !g.is_zero() {
            return Err(SpectralError::Unsupported(format!("{label} = {g} is not zero")));
        }
    }
    let row2 = lookup(reg, "Cr2 row 2", 0)?;
    let e02 = row2.value.clone();
    let candidates = if e21_forced_zero {
        vec![e02.clone()]
    } else {
        quotient_candidates(&rows.e21_bound, &e02)?
    };

    let mut grid = SpectralGrid::new(2, 3, 2, "H_*(Cr2(C))");
    grid.set_known(0, 0, FormalGroup::free(1));
    grid.set_known(1, 0, rows.e10.clone());
    grid.set_known(2, 0, rows.e20.clone());
    grid.set_known(3, 0, rows.e30.clone());
    grid.set_known(0, 1, rows.e01.clone());
    grid.set_known(1, 1, rows.e11.clone());
    if e21_forced_zero {
        grid.set_known(2, 1, FormalGroup::zero());
    } else {
        grid.set(2, 1, GridEntry::Unknown(format!("a quotient of {}", rows.e21_bound)));
    }
    grid.set_known(0, 2, e02.clone());
    grid.notes.push(format!("E_{{0,2}}: {}", row2.provenance));

    Ok(CremonaAssembly {
        e02,
        e21_bound: rows.e21_bound.clone(),
        e21_forced_zero,
        candidates,
        relation: "H2 ≅ E02 / Im(E21 → E02)".into(),
        grid,
        provenance: vec![row2.provenance],
    })
}

/// Rows 0 and 1 for ruled surfaces over `P^1` with `t` marked points.
/// `E_{3,0}` is filled only when `r_max >= 5`.
pub fn ruled_grid(t: usize, e_max: u32, r_max: usize) -> Result<SpectralGrid, SpectralError> {
    let u = GeneratorUniverse::new(BaseCase::RuledOverP1, t, e_max, r_max)?;
    let mut grid = SpectralGrid::new(2, 3, 1, "H_*(ruled)");
    grid.set_known(0, 0, FormalGroup::free(1));
    for p in 1..=3 {
        if p + 2 <= r_max {
            grid.set_known(p, 0, FormalGroup::from_fg(&u.row0_homology(p)?));
        } else {
            grid.set(p, 0, GridEntry::Unknown(format!("needs rank {} generators", p + 2)));
        }
    }
    grid.set_known(0, 1, u.row1_homology(0)?);
    grid.set_known(1, 1, u.row1_homology(1)?);
    for p in 2..=3 {
        grid.set(p, 1, GridEntry::Unknown("beyond the row-1 blocks".into()));
    }
    Ok(grid)
}

/// Values of `H_n` fixed by a grid whose low rows are already known,
/// for feeding `five_term` and `seven_term`.
pub fn low_abutment(grid: &SpectralGrid) -> BTreeMap<usize, FormalGroup> {
    let mut out = BTreeMap::new();
    if let (Some(e10), Some(e01)) = (grid.known(1, 0), grid.known(0, 1)) {
        if e01.is_zero() {
            out.insert(1, e10);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(s: &str) -> FormalGroup {
        FormalGroup::parse(s).unwrap()
    }

    fn reg() -> &'static KnownHomologyRegistry {
        KnownHomologyRegistry::builtin()
    }

    #[test]
    fn pgl_schur_multipliers() {
        assert_eq!(schur_pgl(2, reg()).unwrap().candidates, vec![g("K2(C) (+) Z/2")]);
        assert_eq!(schur_pgl(3, reg()).unwrap().candidates, vec![g("K2(C) (+) Z/3")]);
    }

    #[test]
    fn aut_p1xp1_schur_multiplier() {
        let d = schur_aut_p1xp1(reg()).unwrap();
        assert_eq!(d.candidates, vec![g("K2(C) (+) Z/2")]);
        let r = d.register(reg()).unwrap();
        assert_eq!(r.get("Aut(P1xP1)", 2).unwrap().value, g("K2(C) (+) Z/2"));
    }

    #[test]
    fn bl2_block() {
        let d = nonorientable_block_homology(1, "Aut(Bl2P2)", "Aut+(Bl2P2)", &Transfer::Diagonal, reg()).unwrap();
        assert_eq!(d.candidates, vec![g("C*")]);
    }

    #[test]
    fn p1xp1_blocks() {
        let r = schur_aut_p1xp1(reg()).unwrap().register(reg()).unwrap();
        let d1 = nonorientable_block_homology(1, "Aut(P1xP1)", "PGL(2,C)xPGL(2,C)", &Transfer::Diagonal, &r).unwrap();
        assert_eq!(d1.candidates, vec![FormalGroup::zero()]);
        let d2 = nonorientable_block_homology(2, "Aut(P1xP1)", "PGL(2,C)xPGL(2,C)", &Transfer::Diagonal, &r).unwrap();
        let mut want = vec![g("K2(C) (+) Z/4"), g("K2(C) (+) (Z/2)^2")];
        want.sort_by_key(|x| x.to_string());
        assert_eq!(d2.candidates, want);
    }

    #[test]
    fn block_needs_registry() {
        let err = nonorientable_block_homology(2, "Aut(P1xP1)", "PGL(2,C)xPGL(2,C)", &Transfer::Diagonal, reg());
        assert!(matches!(err, Err(SpectralError::MissingRegistry(_))));
    }

    #[test]
    fn cremona_candidates() {
        let rows = cremona_rows(4, 5).unwrap();
        let a = cremona_assemble(&rows, reg(), false).unwrap();
        let mut want = vec![g("K2(C) (+) (+)_Z Z/2"), g("K2(C) (+) Z/3 (+) (+)_Z Z/2")];
        want.sort_by_key(|x| x.to_string());
        assert_eq!(a.candidates, want);
        let forced = cremona_assemble(&rows, reg(), true).unwrap();
        assert_eq!(forced.candidates, vec![g("K2(C) (+) Z/3 (+) (+)_Z Z/2")]);
    }

    #[test]
    fn ruled_five_term_is_exact() {
        let grid = ruled_grid(3, 3, 4).unwrap();
        let seq = grid.five_term(&low_abutment(&grid)).unwrap();
        assert!(seq.known_positions_exact().unwrap());
    }
}
