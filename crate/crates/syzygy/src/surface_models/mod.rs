//! Central models of rational surfaces over `P^1` and over a point, and the
//! truncated chain complexes they generate.
//!
//! A model over `P^1` of rank `r` is a conic bundle with `r - 1` singular
//! fibres over marked points; its configuration tag records how the blown-up
//! points sit relative to minimal sections. Over a point the generators are
//! the del Pezzo surfaces together with the conic bundles, now without point
//! labels because the group moves the fibres around.

mod bl3;
mod cremona;
mod orientability;
mod row1;
mod ruled;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::complexes::{FGAbelianGroup, IntMatrix, IntegerChainComplex};

pub use bl3::{cubic_summary, syzygy_sphere_bl3, Bl3Model, CubicSummary, StatedComparison};
pub use orientability::OrientabilityRegistry;
pub use row1::{Row1Complex, Row1Term, ROW1_MAX_RANK};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SurfaceError {
    #[error("rank {rank} is outside 1..={max}")]
    RankOutOfRange { rank: usize, max: usize },
    #[error("degree {degree} needs generators of rank {needed}, but r_max is {r_max}")]
    DegreeOutOfRange { degree: usize, needed: usize, r_max: usize },
    #[error("truncation inadequate in degree {degree}: e_max={e_max} gives {at}, e_max+1 gives {next}")]
    InadequateTruncation {
        degree: usize,
        e_max: u32,
        at: String,
        next: String,
    },
    #[error("{0} does not have rank 2")]
    NotRankTwo(String),
    #[error("the two Mori models under {0} are exchanged by an automorphism and coincide as classes")]
    SymmetricLink(String),
    #[error("invalid universe: {0}")]
    InvalidUniverse(String),
    #[error("orientability registry: {0}")]
    Registry(String),
    #[error("construction failed: {0}")]
    Construction(String),
    #[error(transparent)]
    Complex(#[from] crate::complexes::ComplexError),
    #[error(transparent)]
    Lattice(#[from] crate::picard_lattice::LatticeError),
    #[error(transparent)]
    Formal(#[from] crate::formal_groups::FormalError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BaseCase {
    /// Models over `P^1`, the universe of `P^1 x P^1 / P^1`.
    #[serde(rename = "ruled")]
    RuledOverP1,
    /// Models over a point, the universe of `P^2`.
    #[serde(rename = "cremona")]
    CremonaOverPoint,
}

impl BaseCase {
    pub fn key(self) -> &'static str {
        match self {
            BaseCase::RuledOverP1 => "ruled",
            BaseCase::CremonaOverPoint => "cremona",
        }
    }
}

impl std::str::FromStr for BaseCase {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "ruled" => Ok(BaseCase::RuledOverP1),
            "cremona" => Ok(BaseCase::CremonaOverPoint),
            other => Err(format!("unknown base '{other}' (expected ruled or cremona)")),
        }
    }
}

/// Configuration of a central model. Variant order is the canonical order
/// inside one rank and one set of marked points.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Family {
    /// `P^2` over a point.
    Plane,
    /// `F_1` viewed over a point.
    DelPezzoF1,
    /// `P^1 x P^1` viewed over a point.
    DelPezzoQuadric,
    /// `Bl_m P^2` over a point, `m = 2, 3, 4`.
    BlownUpPlane { points: u8 },
    /// `S_{g,k}`, `k >= 2`: blown-up points in general position. At `k = 4`
    /// the configuration has a modulus, kept as an opaque label.
    General { modulus: Option<String> },
    /// Special configurations `S_{(2,1),3}`, `S_{(3,1),4}`, `S_{(2,2),4}`, `S_{(2,1,1),4}`.
    Split { parts: Vec<u8> },
    /// The e-series. With `k` singular fibres, `e = 0` is `P^1 x P^1 / P^1`
    /// (`k = 0`), `S_{g,1}` (`k = 1`) or `S_{s,k}` (`k >= 2`); `e >= 1` is
    /// `F_e / P^1` or `S_{e,k}`.
    ESeries { e: u32 },
}

/// Internal generator: rank, marked points (indices into the universe) and family.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) struct Gen {
    pub rank: usize,
    pub points: Vec<usize>,
    pub family: Family,
}

impl Gen {
    pub(crate) fn new(rank: usize, points: Vec<usize>, family: Family) -> Self {
        Gen { rank, points, family }
    }

    /// Number of singular fibres for families over `P^1`.
    fn fibres(&self) -> usize {
        self.rank - 1
    }

    fn e(&self) -> Option<u32> {
        match self.family {
            Family::ESeries { e } => Some(e),
            _ => None,
        }
    }

    /// Registry key, e.g. `S_e,2` or `F_e/P1`.
    pub(crate) fn tag(&self) -> String {
        let k = self.fibres();
        match &self.family {
            Family::Plane => "P2".into(),
            Family::DelPezzoF1 => "F1".into(),
            Family::DelPezzoQuadric => "P1xP1".into(),
            Family::BlownUpPlane { points } => format!("Bl{points}"),
            Family::General { .. } => format!("S_g,{k}"),
            Family::Split { parts } => format!("S_({}),{k}", join_parts(parts)),
            Family::ESeries { e } => match (k, e) {
                (0, 0) => "P1xP1/P1".into(),
                (0, _) => "F_e/P1".into(),
                (1, 0) => "S_g,1".into(),
                (_, 0) => format!("S_s,{k}"),
                _ => format!("S_e,{k}"),
            },
        }
    }

    fn name(&self, labels: &[String]) -> String {
        let k = self.fibres();
        let base = match &self.family {
            Family::Plane => "P2".to_string(),
            Family::DelPezzoF1 => "F1".to_string(),
            Family::DelPezzoQuadric => "P1xP1".to_string(),
            Family::BlownUpPlane { points } => format!("Bl{points}P2"),
            Family::General { modulus: None } => format!("S_g,{k}"),
            Family::General { modulus: Some(m) } => format!("S_g,{k}({m})"),
            Family::Split { parts } => format!("S_({}),{k}", join_parts(parts)),
            Family::ESeries { e } => match (k, e) {
                (0, 0) => "P1xP1/P1".to_string(),
                (0, e) => format!("F{e}/P1"),
                (1, 0) => "S_g,1".to_string(),
                (_, 0) => format!("S_s,{k}"),
                (_, e) => format!("S_e={e},{k}"),
            },
        };
        if self.points.is_empty() {
            base
        } else {
            let pts: Vec<&str> = self.points.iter().map(|&i| labels[i].as_str()).collect();
            format!("{base}{{{}}}", pts.join(","))
        }
    }
}

fn join_parts(parts: &[u8]) -> String {
    parts.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

/// Public view of a generator.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SurfaceCentralModel {
    pub rank: usize,
    pub marked_points: Vec<String>,
    pub family: Family,
    pub tag: String,
    pub name: String,
    pub orientable: bool,
}

impl SurfaceCentralModel {
    pub fn e(&self) -> Option<u32> {
        match self.family {
            Family::ESeries { e } => Some(e),
            _ => None,
        }
    }
}

impl fmt::Display for SurfaceCentralModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// A finite window onto the generators: marked points drawn from `points`,
/// invariants `e <= e_max`, ranks `<= r_max`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "UniverseRepr", into = "UniverseRepr")]
pub struct GeneratorUniverse {
    pub base: BaseCase,
    pub points: Vec<String>,
    pub e_max: u32,
    pub r_max: usize,
    /// Labels for the modulus of `S_{g,4}`; each label is a distinct generator.
    pub moduli: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct UniverseRepr {
    base: BaseCase,
    points: usize,
    e_max: u32,
    r_max: usize,
}

impl TryFrom<UniverseRepr> for GeneratorUniverse {
    type Error = SurfaceError;

    fn try_from(r: UniverseRepr) -> Result<Self, SurfaceError> {
        GeneratorUniverse::new(r.base, r.points, r.e_max, r.r_max)
    }
}

impl From<GeneratorUniverse> for UniverseRepr {
    fn from(u: GeneratorUniverse) -> Self {
        UniverseRepr {
            base: u.base,
            points: u.points.len(),
            e_max: u.e_max,
            r_max: u.r_max,
        }
    }
}

pub const MAX_RANK: usize = 5;

impl GeneratorUniverse {
    /// Points are labelled `P1 .. Pk`; one modulus label for `S_{g,4}`.
    pub fn new(base: BaseCase, points: usize, e_max: u32, r_max: usize) -> Result<Self, SurfaceError> {
        let labels = (1..=points).map(|i| format!("P{i}")).collect();
        Self::with_labels(base, labels, e_max, r_max)
    }

    pub fn with_labels(base: BaseCase, points: Vec<String>, e_max: u32, r_max: usize) -> Result<Self, SurfaceError> {
        if e_max < 1 {
            return Err(SurfaceError::InvalidUniverse("e_max must be at least 1".into()));
        }
        if !(1..=MAX_RANK).contains(&r_max) {
            return Err(SurfaceError::InvalidUniverse(format!(
                "r_max must be in 1..={MAX_RANK}"
            )));
        }
        let mut seen = std::collections::BTreeSet::new();
        if !points.iter().all(|p| seen.insert(p.clone())) {
            return Err(SurfaceError::InvalidUniverse("point labels must be distinct".into()));
        }
        Ok(GeneratorUniverse {
            base,
            points,
            e_max,
            r_max,
            moduli: vec!["t1".to_string()],
        })
    }

    fn check_rank(&self, rank: usize) -> Result<(), SurfaceError> {
        if rank == 0 || rank > self.r_max {
            return Err(SurfaceError::RankOutOfRange { rank, max: self.r_max });
        }
        Ok(())
    }

    fn model(&self, g: &Gen, reg: &OrientabilityRegistry) -> SurfaceCentralModel {
        SurfaceCentralModel {
            rank: g.rank,
            marked_points: g.points.iter().map(|&i| self.points[i].clone()).collect(),
            family: g.family.clone(),
            tag: g.tag(),
            name: g.name(&self.points),
            orientable: reg.orientable(self.base, &g.tag()).unwrap_or(true),
        }
    }

    /// Generators of a rank with `e` up to `e_bound`; e-series entries with
    /// `e = 0` are always included when their family exists at that rank.
    fn gens(&self, rank: usize, e_bound: Option<u32>) -> Vec<Gen> {
        match self.base {
            BaseCase::RuledOverP1 => ruled::generators(self.points.len(), rank, e_bound, &self.moduli),
            BaseCase::CremonaOverPoint => cremona::generators(rank, e_bound),
        }
    }

    /// Generators listed for `rank`, all with `e <= e_max` (and `e >= 1` for e-series proper).
    fn listed(&self, rank: usize) -> Vec<Gen> {
        self.gens(rank, Some(self.e_max))
    }

    /// Generators that enter the homology computation: `e <= e_max + 1 - rank`
    /// for e-series entries of rank `>= 2`, `e <= e_max` at rank 1. This set is
    /// closed under the boundary, because `∂` raises `e` by at most one while
    /// lowering the rank by one.
    fn truncated(&self, rank: usize) -> Vec<Gen> {
        let bound = (self.e_max as i64 + 1 - rank as i64).max(-1);
        let bound = if rank == 1 { self.e_max as i64 } else { bound };
        if bound < 0 {
            self.gens(rank, None).into_iter().filter(|g| g.e().is_none()).collect()
        } else {
            self.gens(rank, Some(bound as u32))
        }
    }

    pub fn enumerate_generators(&self, rank: usize) -> Result<Vec<SurfaceCentralModel>, SurfaceError> {
        self.check_rank(rank)?;
        let reg = OrientabilityRegistry::builtin();
        Ok(self.listed(rank).iter().map(|g| self.model(g, reg)).collect())
    }

    /// Generators of the truncated complex in the given rank.
    pub fn complex_generators(&self, rank: usize) -> Result<Vec<SurfaceCentralModel>, SurfaceError> {
        self.check_rank(rank)?;
        let reg = OrientabilityRegistry::builtin();
        Ok(self.truncated(rank).iter().map(|g| self.model(g, reg)).collect())
    }

    /// Boundary of one generator as a sparse combination of lower-rank generators.
    fn boundary_of(&self, g: &Gen) -> BTreeMap<Gen, i64> {
        let raw = match self.base {
            BaseCase::RuledOverP1 => ruled::boundary(g),
            BaseCase::CremonaOverPoint => cremona::boundary(g),
        };
        let mut out = BTreeMap::new();
        for (h, c) in raw {
            *out.entry(h).or_insert(0) += c;
        }
        out.retain(|_, c| *c != 0);
        out
    }

    /// `∂_rank` on the truncated generators: columns are rank-`rank` models, rows rank-`(rank-1)` models.
    pub fn boundary(&self, rank: usize) -> Result<BoundaryMatrix, SurfaceError> {
        self.check_rank(rank)?;
        let reg = OrientabilityRegistry::builtin();
        let cols = self.truncated(rank);
        if rank == 1 {
            // Augmentation to Z.
            let row = vec![vec![1i64; cols.len()]];
            return Ok(BoundaryMatrix {
                rows: Vec::new(),
                row_orders: vec![None],
                columns: cols.iter().map(|g| self.model(g, reg)).collect(),
                matrix: IntMatrix::from_rows_shaped(1, cols.len(), &row),
                augmentation: true,
            });
        }
        let rows = self.truncated(rank - 1);
        let pos: BTreeMap<&Gen, usize> = rows.iter().enumerate().map(|(i, g)| (g, i)).collect();
        let mut m = IntMatrix::zeros(rows.len(), cols.len());
        for (j, g) in cols.iter().enumerate() {
            for (h, c) in self.boundary_of(g) {
                let i = *pos.get(&h).ok_or_else(|| {
                    SurfaceError::Construction(format!(
                        "boundary of {} reaches {} outside the truncation",
                        g.name(&self.points),
                        h.name(&self.points)
                    ))
                })?;
                m[(i, j)] += c;
            }
        }
        let row_models: Vec<SurfaceCentralModel> = rows.iter().map(|g| self.model(g, reg)).collect();
        Ok(BoundaryMatrix {
            row_orders: row_models
                .iter()
                .map(|r| if r.orientable { None } else { Some(2) })
                .collect(),
            rows: row_models,
            columns: cols.iter().map(|g| self.model(g, reg)).collect(),
            matrix: m,
            augmentation: false,
        })
    }

    /// Checks `∂∘∂ = 0` generator by generator on every listed model of rank
    /// `2..=r_max`, with no truncation of intermediate terms. Coefficients on
    /// non-orientable targets are read modulo 2. Returns the number of
    /// compositions checked.
    pub fn check_boundary_squared(&self) -> Result<usize, SurfaceError> {
        let reg = OrientabilityRegistry::builtin();
        let mut checked = 0;
        for rank in 3..=self.r_max {
            for g in self.listed(rank) {
                let mut acc: BTreeMap<Gen, i64> = BTreeMap::new();
                for (h, c) in self.boundary_of(&g) {
                    for (k, d) in self.boundary_of(&h) {
                        *acc.entry(k).or_insert(0) += c * d;
                    }
                }
                for (k, v) in acc {
                    let orientable = reg.orientable(self.base, &k.tag()).unwrap_or(true);
                    let vanishes = if orientable { v == 0 } else { v % 2 == 0 };
                    if !vanishes {
                        return Err(SurfaceError::Construction(format!(
                            "boundary squared of {} has coefficient {} on {}",
                            g.name(&self.points),
                            v,
                            k.name(&self.points)
                        )));
                    }
                }
                checked += 1;
            }
        }
        Ok(checked)
    }

    /// The coinvariant complex: degree `d` holds rank `d + 1` generators, as
    /// `Z` for orientable models and `Z/2` otherwise.
    pub fn row0_complex(&self) -> Result<IntegerChainComplex, SurfaceError> {
        let reg = OrientabilityRegistry::builtin();
        let mut ranks = Vec::new();
        let mut mats = Vec::new();
        let mut cyclic: BTreeMap<usize, BTreeMap<usize, u64>> = BTreeMap::new();
        for rank in 1..=self.r_max {
            let gens = self.truncated(rank);
            ranks.push(gens.len());
            let tors: BTreeMap<usize, u64> = gens
                .iter()
                .enumerate()
                .filter(|(_, g)| !reg.orientable(self.base, &g.tag()).unwrap_or(true))
                .map(|(i, _)| (i, 2))
                .collect();
            if !tors.is_empty() {
                cyclic.insert(rank - 1, tors);
            }
            if rank >= 2 {
                mats.push(self.boundary(rank)?.matrix);
            }
        }
        Ok(IntegerChainComplex::new(ranks, mats, cyclic)?)
    }

    /// `E_{i,0}`: homology of the row-0 complex in degree `i`, accepted only
    /// when it agrees with the same computation at `e_max + 1`.
    pub fn row0_homology(&self, degree: usize) -> Result<FGAbelianGroup, SurfaceError> {
        let needed = degree + 2;
        if needed > self.r_max {
            return Err(SurfaceError::DegreeOutOfRange {
                degree,
                needed,
                r_max: self.r_max,
            });
        }
        let at = self.row0_complex()?.homology(degree);
        let mut wider = self.clone();
        wider.e_max += 1;
        let next = wider.row0_complex()?.homology(degree);
        if at != next {
            return Err(SurfaceError::InadequateTruncation {
                degree,
                e_max: self.e_max,
                at: at.to_string(),
                next: next.to_string(),
            });
        }
        Ok(at)
    }

    /// The two Mori models under a rank-2 model, as `(positive end, negative end)` of its boundary.
    pub fn two_ray_game(
        &self,
        model: &SurfaceCentralModel,
    ) -> Result<(SurfaceCentralModel, SurfaceCentralModel), SurfaceError> {
        if model.rank != 2 {
            return Err(SurfaceError::NotRankTwo(model.name.clone()));
        }
        let g = self.gen_of(model)?;
        if g.family == Family::DelPezzoQuadric {
            return Err(SurfaceError::SymmetricLink(model.name.clone()));
        }
        let b = self.boundary_of(&g);
        let pos: Vec<&Gen> = b.iter().filter(|(_, &c)| c > 0).map(|(h, _)| h).collect();
        let neg: Vec<&Gen> = b.iter().filter(|(_, &c)| c < 0).map(|(h, _)| h).collect();
        if pos.len() != 1 || neg.len() != 1 {
            return Err(SurfaceError::Construction(format!(
                "{} does not bound exactly two Mori models",
                model.name
            )));
        }
        let reg = OrientabilityRegistry::builtin();
        Ok((self.model(pos[0], reg), self.model(neg[0], reg)))
    }

    fn gen_of(&self, m: &SurfaceCentralModel) -> Result<Gen, SurfaceError> {
        let points = m
            .marked_points
            .iter()
            .map(|p| {
                self.points
                    .iter()
                    .position(|q| q == p)
                    .ok_or_else(|| SurfaceError::InvalidUniverse(format!("unknown point {p}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Gen::new(m.rank, points, m.family.clone()))
    }

    /// Looks up a generator by its display name among the listed models.
    pub fn find(&self, name: &str) -> Option<SurfaceCentralModel> {
        (1..=self.r_max)
            .flat_map(|r| self.enumerate_generators(r).unwrap_or_default())
            .find(|m| m.name == name)
    }
}

/// A boundary matrix with its row and column generators. Rows marked with
/// `Some(2)` are non-orientable generators, contributing `Z/2`.
#[derive(Clone, Debug, Serialize)]
pub struct BoundaryMatrix {
    pub rows: Vec<SurfaceCentralModel>,
    pub row_orders: Vec<Option<u64>>,
    pub columns: Vec<SurfaceCentralModel>,
    pub matrix: IntMatrix,
    pub augmentation: bool,
}

impl BoundaryMatrix {
    /// Sparse boundary of column `j`, as `(row name, coefficient)`.
    pub fn column_terms(&self, j: usize) -> Vec<(String, i64)> {
        (0..self.matrix.rows())
            .filter_map(|i| {
                let c = i64::try_from(&self.matrix[(i, j)]).expect("small coefficients");
                (c != 0).then(|| {
                    let name = self.rows.get(i).map_or_else(|| "Z".to_string(), |r| r.name.clone());
                    (name, c)
                })
            })
            .collect()
    }
}

/// New invariant after an elementary transformation centred at a point of
/// `F_e`: on the minimal section it rises, off it it drops. On `F_0` every
/// point lies on a minimal section and the result is `F_1`.
pub fn elementary_transformation(e: u32, on_minimal_section: bool) -> u32 {
    match (e, on_minimal_section) {
        (0, _) => 1,
        (e, true) => e + 1,
        (e, false) => e - 1,
    }
}
