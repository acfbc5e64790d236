//! Regular CW complexes presented by their face poset and signed incidences.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::abelian::FGAbelianGroup;
use super::chain::IntegerChainComplex;
use super::matrix::IntMatrix;
use super::ComplexError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cell {
    pub id: usize,
    pub dim: usize,
    #[serde(default)]
    pub label: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "CwRepr")]
pub struct RegularCWComplex {
    cells: Vec<Cell>,
    boundary: BTreeMap<usize, Vec<(usize, i64)>>,
    #[serde(skip)]
    index: BTreeMap<usize, usize>,
}

#[derive(Deserialize)]
struct CwRepr {
    cells: Vec<Cell>,
    #[serde(default)]
    boundary: BTreeMap<usize, Vec<(usize, i64)>>,
}

impl TryFrom<CwRepr> for RegularCWComplex {
    type Error = ComplexError;

    fn try_from(r: CwRepr) -> Result<Self, ComplexError> {
        RegularCWComplex::new(r.cells, r.boundary)
    }
}

/// Outcome of [`RegularCWComplex::validate`]. Each failure is a readable line.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub boundary_squared_zero: bool,
    pub regular: bool,
    pub dimensions_consistent: bool,
    pub links_are_spheres: bool,
    pub failures: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.boundary_squared_zero && self.regular && self.dimensions_consistent && self.links_are_spheres
    }
}

impl RegularCWComplex {
    /// Rejects duplicate ids, dangling references and signs other than ±1.
    pub fn new(cells: Vec<Cell>, boundary: BTreeMap<usize, Vec<(usize, i64)>>) -> Result<Self, ComplexError> {
        let mut index = BTreeMap::new();
        for (pos, c) in cells.iter().enumerate() {
            if index.insert(c.id, pos).is_some() {
                return Err(ComplexError::Malformed(format!("duplicate cell id {}", c.id)));
            }
        }
        for (id, faces) in &boundary {
            if !index.contains_key(id) {
                return Err(ComplexError::Malformed(format!(
                    "boundary listed for unknown cell {id}"
                )));
            }
            for &(f, s) in faces {
                if !index.contains_key(&f) {
                    return Err(ComplexError::Malformed(format!("cell {id} refers to unknown cell {f}")));
                }
                if s != 1 && s != -1 {
                    return Err(ComplexError::Malformed(format!("sign {s} on incidence {id} -> {f}")));
                }
            }
        }
        Ok(RegularCWComplex { cells, boundary, index })
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn cell(&self, id: usize) -> Option<&Cell> {
        self.index.get(&id).map(|&p| &self.cells[p])
    }

    pub fn facets(&self, id: usize) -> &[(usize, i64)] {
        self.boundary.get(&id).map_or(&[], Vec::as_slice)
    }

    pub fn dimension(&self) -> Option<usize> {
        self.cells.iter().map(|c| c.dim).max()
    }

    /// Cell ids of dimension `d`, ascending.
    pub fn cells_of_dim(&self, d: usize) -> Vec<usize> {
        let mut v: Vec<usize> = self.cells.iter().filter(|c| c.dim == d).map(|c| c.id).collect();
        v.sort_unstable();
        v
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.cells.iter().map(|c| if c.dim % 2 == 0 { 1 } else { -1 }).sum()
    }

    /// All cells strictly below `id` in the face poset.
    pub fn faces_below(&self, id: usize) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        let mut stack: Vec<usize> = self.facets(id).iter().map(|&(f, _)| f).collect();
        while let Some(f) = stack.pop() {
            if out.insert(f) {
                stack.extend(self.facets(f).iter().map(|&(g, _)| g));
            }
        }
        out
    }

    /// Strict order relation as a map from each cell to the cells above it.
    fn cofaces(&self) -> BTreeMap<usize, BTreeSet<usize>> {
        let mut up: BTreeMap<usize, BTreeSet<usize>> = self.cells.iter().map(|c| (c.id, BTreeSet::new())).collect();
        for c in &self.cells {
            for f in self.faces_below(c.id) {
                up.get_mut(&f).expect("face is a cell").insert(c.id);
            }
        }
        up
    }

    fn require(&self, id: usize) -> Result<&Cell, ComplexError> {
        self.cell(id).ok_or(ComplexError::UnknownCell(id))
    }

    /// Cellular chains: degree `d` generators are the `d`-cells in id order.
    /// Incidences with the wrong dimension are ignored here and caught by `validate`.
    pub fn cellular_chain_complex(&self) -> IntegerChainComplex {
        let (ranks, mats) = self.chain_matrices();
        IntegerChainComplex::new_unchecked(ranks, mats, BTreeMap::new()).expect("shapes follow from cell counts")
    }

    fn chain_matrices(&self) -> (Vec<usize>, Vec<IntMatrix>) {
        let top = match self.dimension() {
            Some(t) => t,
            None => return (Vec::new(), Vec::new()),
        };
        let by_dim: Vec<Vec<usize>> = (0..=top).map(|d| self.cells_of_dim(d)).collect();
        let pos: Vec<BTreeMap<usize, usize>> = by_dim
            .iter()
            .map(|ids| ids.iter().enumerate().map(|(i, &id)| (id, i)).collect())
            .collect();
        let ranks: Vec<usize> = by_dim.iter().map(Vec::len).collect();
        let mut mats = Vec::new();
        for d in 1..=top {
            let mut m = IntMatrix::zeros(ranks[d - 1], ranks[d]);
            for (j, &id) in by_dim[d].iter().enumerate() {
                for &(f, s) in self.facets(id) {
                    if let Some(&i) = pos[d - 1].get(&f) {
                        m[(i, j)] += s;
                    }
                }
            }
            mats.push(m);
        }
        (ranks, mats)
    }

    pub fn homology(&self) -> Vec<FGAbelianGroup> {
        self.cellular_chain_complex().homology_all()
    }

    /// Checks `∂∘∂ = 0`, the regularity proxy, incidence dimensions, and that
    /// every link has the homology of a sphere of the expected dimension.
    /// The last check is the homological shadow of the manifold condition,
    /// not a homeomorphism test.
    pub fn validate(&self) -> ValidationReport {
        let mut rep = self.validate_incidences();
        if rep.dimensions_consistent {
            let n = self.dimension().unwrap_or(0);
            let up = self.cofaces();
            for c in &self.cells {
                let link = order_complex(self, &up[&c.id]);
                let expected = n as i64 - c.dim as i64 - 1;
                if !is_homology_sphere(&link, expected) {
                    rep.links_are_spheres = false;
                    rep.failures.push(format!(
                        "link of cell {} does not have the homology of S^{}",
                        c.id, expected
                    ));
                }
            }
        }
        rep
    }

    fn validate_incidences(&self) -> ValidationReport {
        let mut rep = ValidationReport {
            boundary_squared_zero: true,
            regular: true,
            dimensions_consistent: true,
            links_are_spheres: true,
            failures: Vec::new(),
        };
        for c in &self.cells {
            let mut seen = BTreeSet::new();
            for &(f, _) in self.facets(c.id) {
                if !seen.insert(f) {
                    rep.regular = false;
                    rep.failures
                        .push(format!("cell {} lists facet {} more than once", c.id, f));
                }
                let fd = self.cell(f).map(|x| x.dim);
                if fd != Some(c.dim.wrapping_sub(1)) {
                    rep.dimensions_consistent = false;
                    rep.failures
                        .push(format!("cell {} (dim {}) has facet {} of dim {:?}", c.id, c.dim, f, fd));
                }
            }
            if c.dim > 0 && self.facets(c.id).is_empty() {
                rep.dimensions_consistent = false;
                rep.failures
                    .push(format!("cell {} of dim {} has empty boundary", c.id, c.dim));
            }
        }
        let (_, mats) = self.chain_matrices();
        for k in 1..mats.len() {
            if !mats[k - 1].mul(&mats[k]).is_zero() {
                rep.boundary_squared_zero = false;
                rep.failures
                    .push(format!("boundary squared is nonzero from degree {}", k + 1));
            }
        }
        rep
    }

    /// Order complex of the whole face poset.
    pub fn barycentric_subdivision(&self) -> Result<RegularCWComplex, ComplexError> {
        self.require_valid_incidences()?;
        let all: BTreeSet<usize> = self.cells.iter().map(|c| c.id).collect();
        Ok(order_complex(self, &all))
    }

    /// Chains in `{G : G ≥ F}`: the cone over the link with apex `s_F`.
    pub fn dual_block(&self, id: usize) -> Result<RegularCWComplex, ComplexError> {
        self.require(id)?;
        self.require_valid_incidences()?;
        let mut set = self.cofaces().remove(&id).unwrap_or_default();
        set.insert(id);
        Ok(order_complex(self, &set))
    }

    /// Chains in `{G : G > F}`.
    pub fn link(&self, id: usize) -> Result<RegularCWComplex, ComplexError> {
        self.require(id)?;
        self.require_valid_incidences()?;
        let set = self.cofaces().remove(&id).unwrap_or_default();
        Ok(order_complex(self, &set))
    }

    /// Subdivision needs a genuine poset: consistent dimensions and `∂∘∂ = 0`.
    fn require_valid_incidences(&self) -> Result<(), ComplexError> {
        let rep = self.validate_incidences();
        if rep.failures.is_empty() {
            Ok(())
        } else {
            Err(ComplexError::Invalid(rep.failures.join("; ")))
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("complex serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, ComplexError> {
        serde_json::from_str(text).map_err(|e| ComplexError::Parse(e.to_string()))
    }
}

/// Simplicial complex of strict chains in `set` (ordered by the face relation
/// of `cx`). Vertex `i` of the result corresponds to the `i`-th cell of `set`
/// in (dim, id) order; simplex labels list the original cell ids.
fn order_complex(cx: &RegularCWComplex, set: &BTreeSet<usize>) -> RegularCWComplex {
    let mut elems: Vec<usize> = set.iter().copied().collect();
    elems.sort_by_key(|&id| (cx.cell(id).map_or(0, |c| c.dim), id));
    let below: BTreeMap<usize, BTreeSet<usize>> = elems.iter().map(|&id| (id, cx.faces_below(id))).collect();

    // Chains are listed bottom-up; each extends a shorter chain by a larger element.
    let mut chains_by_len: Vec<Vec<Vec<usize>>> = vec![elems.iter().map(|&e| vec![e]).collect()];
    loop {
        let last = chains_by_len.last().expect("nonempty");
        let mut next = Vec::new();
        for ch in last {
            let top = *ch.last().expect("chains are nonempty");
            for &g in &elems {
                if below[&g].contains(&top) {
                    let mut c = ch.clone();
                    c.push(g);
                    next.push(c);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        next.sort();
        chains_by_len.push(next);
    }
    if elems.is_empty() {
        chains_by_len.clear();
    }

    let mut cells = Vec::new();
    let mut ids: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    let mut boundary = BTreeMap::new();
    for (k, chains) in chains_by_len.iter().enumerate() {
        for ch in chains {
            let id = cells.len();
            let label = ch.iter().map(ToString::to_string).collect::<Vec<_>>().join("<");
            cells.push(Cell { id, dim: k, label });
            if k > 0 {
                let faces = (0..ch.len())
                    .map(|i| {
                        let mut f = ch.clone();
                        f.remove(i);
                        (ids[&f], if i % 2 == 0 { 1 } else { -1 })
                    })
                    .collect();
                boundary.insert(id, faces);
            }
            ids.insert(ch.clone(), id);
        }
    }
    RegularCWComplex::new(cells, boundary).expect("order complex is well formed")
}

/// `S^{-1}` is the empty complex; `S^0` is two points.
fn is_homology_sphere(cx: &RegularCWComplex, dim: i64) -> bool {
    if dim < 0 {
        return cx.cells().is_empty();
    }
    let h = cx.homology();
    let d = dim as usize;
    if h.len() != d + 1 {
        return false;
    }
    h.iter().enumerate().all(|(k, g)| {
        let want = match (k == 0, k == d) {
            (true, true) => 2,
            (true, false) | (false, true) => 1,
            _ => 0,
        };
        *g == FGAbelianGroup::free(want)
    })
}

/// Builds a complex from `(dim, label)` cells with ids `0..` and signed facet lists.
pub fn complex_from_lists(
    cells: &[(usize, &str)],
    facets: &[(usize, Vec<(usize, i64)>)],
) -> Result<RegularCWComplex, ComplexError> {
    let cells = cells
        .iter()
        .enumerate()
        .map(|(id, &(dim, label))| Cell {
            id,
            dim,
            label: label.to_string(),
        })
        .collect();
    RegularCWComplex::new(cells, facets.iter().cloned().collect())
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    /// Boundary of a hexagon: vertices 0..6, edge 6+i runs from i to i+1.
    pub fn hexagon() -> RegularCWComplex {
        let mut cells: Vec<(usize, &str)> = vec![(0, "v"); 6];
        cells.extend(vec![(1, "e"); 6]);
        let facets = (0..6)
            .map(|i| (6 + i, vec![(i, -1), ((i + 1) % 6, 1)]))
            .collect::<Vec<_>>();
        complex_from_lists(&cells, &facets).unwrap()
    }

    /// Octahedron surface: vertices ±x, ±y, ±z, 12 edges, 8 coherently oriented triangles.
    pub fn octahedron() -> RegularCWComplex {
        // 0:+x 1:-x 2:+y 3:-y 4:+z 5:-z
        let edges: Vec<(usize, usize)> = vec![
            (0, 2),
            (0, 3),
            (0, 4),
            (0, 5),
            (1, 2),
            (1, 3),
            (1, 4),
            (1, 5),
            (2, 4),
            (2, 5),
            (3, 4),
            (3, 5),
        ];
        let mut cells: Vec<(usize, &str)> = vec![(0, "v"); 6];
        cells.extend(vec![(1, "e"); 12]);
        cells.extend(vec![(2, "f"); 8]);
        let edge_id = |a: usize, b: usize| -> (usize, i64) {
            let (lo, hi, s) = if a < b { (a, b, 1) } else { (b, a, -1) };
            (6 + edges.iter().position(|&e| e == (lo, hi)).unwrap(), s)
        };
        let mut facets: Vec<(usize, Vec<(usize, i64)>)> = edges
            .iter()
            .enumerate()
            .map(|(i, &(a, b))| (6 + i, vec![(a, -1), (b, 1)]))
            .collect();
        // Outward orientation: (x, y, z) sign triples with a right-handed cycle.
        let tris = [
            (0, 2, 4),
            (2, 1, 4),
            (1, 3, 4),
            (3, 0, 4),
            (2, 0, 5),
            (1, 2, 5),
            (3, 1, 5),
            (0, 3, 5),
        ];
        for (k, &(a, b, c)) in tris.iter().enumerate() {
            facets.push((18 + k, vec![edge_id(a, b), edge_id(b, c), edge_id(c, a)]));
        }
        complex_from_lists(&cells, &facets).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    #[test]
    fn hexagon_is_a_valid_circle() {
        let h = hexagon();
        let rep = h.validate();
        assert!(rep.is_valid(), "{:?}", rep.failures);
        assert_eq!(h.homology(), vec![FGAbelianGroup::free(1), FGAbelianGroup::free(1)]);
        assert_eq!(h.euler_characteristic(), 0);
        let link = h.link(0).unwrap();
        assert_eq!(link.cells().len(), 2);
        assert_eq!(link.homology(), vec![FGAbelianGroup::free(2)]);
    }

    #[test]
    fn octahedron_is_a_valid_sphere() {
        let o = octahedron();
        let rep = o.validate();
        assert!(rep.is_valid(), "{:?}", rep.failures);
        assert_eq!(o.euler_characteristic(), 2);
        assert_eq!(
            o.homology(),
            vec![FGAbelianGroup::free(1), FGAbelianGroup::zero(), FGAbelianGroup::free(1)]
        );
        // The link of a vertex is the subdivided 4-cycle of its star.
        let link = o.link(0).unwrap();
        assert_eq!(link.cells_of_dim(0).len(), 8);
        assert_eq!(link.cells_of_dim(1).len(), 8);
        assert_eq!(link.homology(), vec![FGAbelianGroup::free(1), FGAbelianGroup::free(1)]);
    }

    #[test]
    fn point_has_z_in_degree_zero() {
        let p = complex_from_lists(&[(0, "pt")], &[]).unwrap();
        assert_eq!(p.homology(), vec![FGAbelianGroup::free(1)]);
        assert!(p.validate().is_valid());
    }

    #[test]
    fn repeated_facet_is_flagged() {
        let cells = [(0, "a"), (0, "b"), (1, "e"), (2, "f")];
        let facets = vec![(2, vec![(0, -1), (1, 1)]), (3, vec![(2, 1), (2, -1)])];
        let cx = complex_from_lists(&cells, &facets).unwrap();
        let rep = cx.validate();
        assert!(!rep.regular);
        assert!(!rep.is_valid());
    }

    #[test]
    fn dangling_reference_is_an_error() {
        let err = complex_from_lists(&[(0, "a"), (1, "e")], &[(1, vec![(0, -1), (7, 1)])]).unwrap_err();
        assert!(matches!(err, ComplexError::Malformed(_)));
    }

    #[test]
    fn subdivision_counts_and_homology() {
        let interval = complex_from_lists(&[(0, "a"), (0, "b"), (1, "e")], &[(2, vec![(0, -1), (1, 1)])]).unwrap();
        let sd = interval.barycentric_subdivision().unwrap();
        assert_eq!((sd.cells_of_dim(0).len(), sd.cells_of_dim(1).len()), (3, 2));

        let sd = hexagon().barycentric_subdivision().unwrap();
        assert_eq!((sd.cells_of_dim(0).len(), sd.cells_of_dim(1).len()), (12, 12));
        assert_eq!(sd.homology(), hexagon().homology());

        let sd = octahedron().barycentric_subdivision().unwrap();
        assert!(sd.validate().is_valid());
        assert_eq!(sd.homology(), octahedron().homology());
    }

    #[test]
    fn dual_block_of_top_cell_is_a_point() {
        let o = octahedron();
        let b = o.dual_block(18).unwrap();
        assert_eq!(b.cells().len(), 1);
        let b = o.dual_block(0).unwrap();
        // Cone over an 8-cycle: contractible.
        assert_eq!(b.homology()[0], FGAbelianGroup::free(1));
        assert!(b.homology()[1..].iter().all(FGAbelianGroup::is_zero));
        assert!(matches!(o.link(99), Err(ComplexError::UnknownCell(99))));
    }

    #[test]
    fn json_schema_roundtrip() {
        let h = hexagon();
        let text = h.to_json();
        assert!(text.starts_with(r#"{"cells":[{"id":0,"dim":0,"label":"v"}"#));
        assert!(text.contains(r#""boundary":{"6":[[0,-1],[1,1]]"#));
        assert_eq!(RegularCWComplex::from_json(&text).unwrap(), h);
    }
}
