//! The Picard lattice of `Bl_n P^2` and the curve classes counted on del Pezzo surfaces.
//!
//! Coordinates are taken in the basis `(H, E_1, .., E_n)`, so a class is
//! `a_0 H + Σ a_i E_i` and the form is `diag(1, -1, .., -1)`. Classes are
//! characterized numerically; for points in general position (`n <= 8`) the
//! numerical conditions single out exactly the effective curves, so no
//! effectivity test is attempted.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LatticeError {
    #[error("class has {got} coefficients, lattice needs {want}")]
    DimensionMismatch { want: usize, got: usize },
    #[error("number of blown-up points {0} is outside the supported range")]
    OutOfRange(usize),
    #[error("{0} is not a root (needs r.r = -2 and K.r = 0)")]
    InvalidRoot(DivisorClass),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BlowupLattice {
    n: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DivisorClass(pub Vec<i64>);

impl DivisorClass {
    pub fn coefficients(&self) -> &[i64] {
        &self.0
    }

    pub fn degree(&self) -> i64 {
        self.0[0]
    }

    pub fn add(&self, other: &DivisorClass) -> DivisorClass {
        DivisorClass(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn neg(&self) -> DivisorClass {
        DivisorClass(self.0.iter().map(|a| -a).collect())
    }

    pub fn scale(&self, k: i64) -> DivisorClass {
        DivisorClass(self.0.iter().map(|a| k * a).collect())
    }
}

impl fmt::Display for DivisorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (i, &a) in self.0.iter().enumerate() {
            if a == 0 {
                continue;
            }
            let name = if i == 0 { "H".to_string() } else { format!("E{i}") };
            let body = match a {
                1 => name,
                -1 => format!("-{name}"),
                _ => format!("{a}{name}"),
            };
            terms.push(body);
        }
        if terms.is_empty() {
            return write!(f, "0");
        }
        let mut s = terms[0].clone();
        for t in &terms[1..] {
            if let Some(rest) = t.strip_prefix('-') {
                s.push_str(&format!(" - {rest}"));
            } else {
                s.push_str(&format!(" + {t}"));
            }
        }
        write!(f, "{s}")
    }
}

/// Simple graph on canonically ordered classes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IncidenceGraph {
    pub vertices: Vec<DivisorClass>,
    pub edges: Vec<(usize, usize)>,
}

impl IncidenceGraph {
    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.vertices.len()];
        for &(i, j) in &self.edges {
            d[i] += 1;
            d[j] += 1;
        }
        d
    }

    /// `Some(k)` when every vertex has degree `k`.
    pub fn regular_degree(&self) -> Option<usize> {
        let d = self.degrees();
        match d.first() {
            Some(&k) if d.iter().all(|&x| x == k) => Some(k),
            _ => None,
        }
    }

    pub fn is_connected(&self) -> bool {
        let n = self.vertices.len();
        if n == 0 {
            return true;
        }
        let mut adj = vec![Vec::new(); n];
        for &(i, j) in &self.edges {
            adj[i].push(j);
            adj[j].push(i);
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|x| x)
    }

    /// A connected 2-regular graph: a single cycle through every vertex.
    pub fn is_single_cycle(&self) -> bool {
        self.vertices.len() >= 3 && self.regular_degree() == Some(2) && self.is_connected()
    }
}

/// Counts of fibration configurations `(E_1..E_{n-1}, L_1..L_{n-1})`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FibrationCount {
    pub n: usize,
    /// Ordered tuples, built one pair `(E_i, L_i)` at a time.
    pub ordered_pairwise: u64,
    /// Ordered tuples, built as all `E_i` first and then all `L_i`.
    pub ordered_blockwise: u64,
    /// Tuples up to reordering the pairs (pairs themselves stay ordered).
    pub pair_sets: u64,
    /// Tuples up to reordering the pairs and swapping inside each pair.
    pub unordered: u64,
    /// Distinct classes `E_i + L_i` occurring in some configuration.
    pub conic_classes: u64,
}

impl FibrationCount {
    pub fn orders_agree(&self) -> bool {
        self.ordered_pairwise == self.ordered_blockwise
    }
}

/// Which numerical type of curve to enumerate.
#[derive(Clone, Copy, Debug)]
struct CurveType {
    self_intersection: i64,
    anticanonical_degree: i64,
}

const LINE: CurveType = CurveType {
    self_intersection: -1,
    anticanonical_degree: 1,
};
const CONIC: CurveType = CurveType {
    self_intersection: 0,
    anticanonical_degree: 2,
};

/// Initial search box, in multiplicities `m_i = -a_i`: `a_0 ∈ [0, 6]`, `m_i ∈ [-2, 4]`.
const BOX_DEGREE: i64 = 6;
const BOX_MULT_LO: i64 = -2;
const BOX_MULT_HI: i64 = 4;

impl BlowupLattice {
    pub const MAX_POINTS: usize = 8;

    pub fn new(n: usize) -> Result<Self, LatticeError> {
        if n > Self::MAX_POINTS {
            return Err(LatticeError::OutOfRange(n));
        }
        Ok(BlowupLattice { n })
    }

    /// The cubic surface is `Bl_6 P^2`; `degree` is `9 - n`.
    pub fn del_pezzo(degree: usize) -> Result<Self, LatticeError> {
        if !(1..=9).contains(&degree) {
            return Err(LatticeError::OutOfRange(9usize.saturating_sub(degree)));
        }
        Self::new(9 - degree)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.n + 1
    }

    pub fn hyperplane(&self) -> DivisorClass {
        self.basis(0)
    }

    /// `E_i` for `1 <= i <= n`.
    pub fn exceptional(&self, i: usize) -> DivisorClass {
        assert!((1..=self.n).contains(&i), "no exceptional class E{i}");
        self.basis(i)
    }

    fn basis(&self, i: usize) -> DivisorClass {
        let mut v = vec![0; self.rank()];
        v[i] = 1;
        DivisorClass(v)
    }

    pub fn class(&self, coefficients: Vec<i64>) -> Result<DivisorClass, LatticeError> {
        self.check(&DivisorClass(coefficients.clone()))?;
        Ok(DivisorClass(coefficients))
    }

    fn check(&self, c: &DivisorClass) -> Result<(), LatticeError> {
        if c.0.len() != self.rank() {
            return Err(LatticeError::DimensionMismatch {
                want: self.rank(),
                got: c.0.len(),
            });
        }
        Ok(())
    }

    pub fn intersect(&self, a: &DivisorClass, b: &DivisorClass) -> Result<i64, LatticeError> {
        self.check(a)?;
        self.check(b)?;
        Ok(pair(a, b))
    }

    /// `K = -3H + Σ E_i`.
    pub fn canonical_class(&self) -> DivisorClass {
        let mut v = vec![1; self.rank()];
        v[0] = -3;
        DivisorClass(v)
    }

    pub fn is_root(&self, r: &DivisorClass) -> bool {
        r.0.len() == self.rank() && pair(r, r) == -2 && pair(&self.canonical_class(), r) == 0
    }

    /// Simple roots `E_i - E_{i+1}` and, for `n >= 3`, `H - E_1 - E_2 - E_3`.
    pub fn simple_roots(&self) -> Vec<DivisorClass> {
        let mut out = Vec::new();
        for i in 1..self.n {
            let mut v = vec![0; self.rank()];
            v[i] = 1;
            v[i + 1] = -1;
            out.push(DivisorClass(v));
        }
        if self.n >= 3 {
            let mut v = vec![0; self.rank()];
            v[0] = 1;
            v[1] = -1;
            v[2] = -1;
            v[3] = -1;
            out.push(DivisorClass(v));
        }
        out
    }

    /// `c + (c·r) r`, the reflection in the hyperplane orthogonal to a root.
    pub fn weyl_reflect(&self, c: &DivisorClass, root: &DivisorClass) -> Result<DivisorClass, LatticeError> {
        self.check(c)?;
        if !self.is_root(root) {
            return Err(LatticeError::InvalidRoot(root.clone()));
        }
        Ok(c.add(&root.scale(pair(c, root))))
    }

    /// Classes with `C·C = -1` and `K·C = -1`, in lexicographic order.
    pub fn enumerate_lines(&self) -> Vec<DivisorClass> {
        self.enumerate(LINE)
    }

    /// Primitive classes with `F·F = 0`, `K·F = -2` and `a_0 >= 0`, in lexicographic order.
    pub fn enumerate_conic_classes(&self) -> Vec<DivisorClass> {
        let mut out = self.enumerate(CONIC);
        out.retain(|c| c.degree() >= 0 && is_primitive(c));
        out
    }

    fn enumerate(&self, t: CurveType) -> Vec<DivisorClass> {
        let (mut deg, mut lo, mut hi) = (BOX_DEGREE, BOX_MULT_LO, BOX_MULT_HI);
        loop {
            let (found, touches) = self.search_box(t, deg, lo, hi);
            if !touches {
                let mut out: Vec<DivisorClass> = found.into_iter().collect();
                out.sort();
                return out;
            }
            // A solution sits on the boundary of the box, so it might not be
            // exhaustive. Widen and retry.
            deg += 2;
            hi += 2;
            lo -= 1;
        }
    }

    /// All solutions in the box, and whether any of them lies on its boundary.
    fn search_box(&self, t: CurveType, max_deg: i64, lo: i64, hi: i64) -> (BTreeSet<DivisorClass>, bool) {
        let mut found = BTreeSet::new();
        let mut touches = false;
        for a0 in -max_deg..=max_deg {
            let sum = 3 * a0 - t.anticanonical_degree;
            let sq = a0 * a0 - t.self_intersection;
            let mut mults = Vec::with_capacity(self.n);
            search_mults(self.n, sum, sq, lo, hi, &mut mults, &mut |m| {
                let mut v = Vec::with_capacity(self.n + 1);
                v.push(a0);
                v.extend(m.iter().map(|x| -x));
                if a0.abs() == max_deg || m.iter().any(|&x| x == lo || x == hi) {
                    touches = true;
                }
                found.insert(DivisorClass(v));
            });
        }
        (found, touches)
    }

    /// Graph on the canonicalized class list with an edge wherever the pairing equals `threshold`.
    pub fn incidence_graph(&self, classes: &[DivisorClass], threshold: i64) -> Result<IncidenceGraph, LatticeError> {
        for c in classes {
            self.check(c)?;
        }
        let vertices: Vec<DivisorClass> = classes.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
        let mut edges = Vec::new();
        for i in 0..vertices.len() {
            for j in i + 1..vertices.len() {
                if pair(&vertices[i], &vertices[j]) == threshold {
                    edges.push((i, j));
                }
            }
        }
        Ok(IncidenceGraph { vertices, edges })
    }

    /// Counts tuples `(E_1..E_{n-1}, L_1..L_{n-1})` of line classes with
    /// `E_i·E_j = L_i·L_j = E_i·L_j = 0` for `i != j` and `E_i·L_i = 1`.
    /// Each pair `E_i + L_i` is then a conic class; on the cubic surface
    /// (`n = 6`) such a tuple records a conic bundle with its singular fibres.
    pub fn count_fibration_configurations(&self) -> Result<FibrationCount, LatticeError> {
        if !(2..=6).contains(&self.n) {
            return Err(LatticeError::OutOfRange(self.n));
        }
        let lines = self.enumerate_lines();
        let k = self.n - 1;
        let g: Vec<Vec<i64>> = lines
            .iter()
            .map(|a| lines.iter().map(|b| pair(a, b)).collect())
            .collect();

        let mut pairwise = 0u64;
        let mut pair_sets = 0u64;
        let mut unordered = 0u64;
        let mut conics = BTreeSet::new();
        let mut es = Vec::with_capacity(k);
        let mut ls = Vec::with_capacity(k);
        pairwise_search(&g, k, &mut es, &mut ls, &mut |es, ls| {
            pairwise += 1;
            if es
                .iter()
                .zip(ls)
                .map(|(e, l)| (*e, *l))
                .collect::<Vec<_>>()
                .windows(2)
                .all(|w| w[0] < w[1])
            {
                pair_sets += 1;
            }
            let normal: Vec<(usize, usize)> = es.iter().zip(ls).map(|(&e, &l)| (e.min(l), e.max(l))).collect();
            if normal.windows(2).all(|w| w[0] < w[1]) && es.iter().zip(ls).all(|(e, l)| e < l) {
                unordered += 1;
            }
            for (&e, &l) in es.iter().zip(ls) {
                conics.insert(lines[e].add(&lines[l]));
            }
        });

        let mut blockwise = 0u64;
        let mut es = Vec::with_capacity(k);
        blockwise_search(&g, k, &mut es, &mut |es| {
            let mut ls = Vec::with_capacity(k);
            blockwise_partners(&g, es, &mut ls, &mut || blockwise += 1);
        });

        Ok(FibrationCount {
            n: self.n,
            ordered_pairwise: pairwise,
            ordered_blockwise: blockwise,
            pair_sets,
            unordered,
            conic_classes: conics.len() as u64,
        })
    }
}

fn pair(a: &DivisorClass, b: &DivisorClass) -> i64 {
    let head = a.0[0] * b.0[0];
    head - a.0[1..].iter().zip(&b.0[1..]).map(|(x, y)| x * y).sum::<i64>()
}

fn is_primitive(c: &DivisorClass) -> bool {
    c.0.iter().fold(0i64, |g, &x| num_integer::gcd(g, x)) == 1
}

/// Enumerates integer vectors of length `slots` in `[lo, hi]` with the given
/// sum and sum of squares, pruning with the Cauchy–Schwarz bound.
fn search_mults(slots: usize, sum: i64, sq: i64, lo: i64, hi: i64, acc: &mut Vec<i64>, emit: &mut dyn FnMut(&[i64])) {
    if sq < 0 {
        return;
    }
    if slots == 0 {
        if sum == 0 && sq == 0 {
            emit(acc);
        }
        return;
    }
    let r = slots as i64;
    if sum < r * lo || sum > r * hi || sum * sum > r * sq {
        return;
    }
    for m in lo..=hi {
        if m * m > sq {
            continue;
        }
        acc.push(m);
        search_mults(slots - 1, sum - m, sq - m * m, lo, hi, acc, emit);
        acc.pop();
    }
}

fn pairwise_search(
    g: &[Vec<i64>],
    k: usize,
    es: &mut Vec<usize>,
    ls: &mut Vec<usize>,
    emit: &mut dyn FnMut(&[usize], &[usize]),
) {
    if es.len() == k {
        emit(es, ls);
        return;
    }
    for e in 0..g.len() {
        if !es.iter().chain(ls.iter()).all(|&x| g[e][x] == 0) {
            continue;
        }
        for l in 0..g.len() {
            if g[e][l] != 1 || !es.iter().chain(ls.iter()).all(|&x| g[l][x] == 0) {
                continue;
            }
            es.push(e);
            ls.push(l);
            pairwise_search(g, k, es, ls, emit);
            es.pop();
            ls.pop();
        }
    }
}

fn blockwise_search(g: &[Vec<i64>], k: usize, es: &mut Vec<usize>, emit: &mut dyn FnMut(&[usize])) {
    if es.len() == k {
        emit(es);
        return;
    }
    for e in 0..g.len() {
        if es.iter().all(|&x| g[e][x] == 0) {
            es.push(e);
            blockwise_search(g, k, es, emit);
            es.pop();
        }
    }
}

fn blockwise_partners(g: &[Vec<i64>], es: &[usize], ls: &mut Vec<usize>, emit: &mut dyn FnMut()) {
    let i = ls.len();
    if i == es.len() {
        emit();
        return;
    }
    for l in 0..g.len() {
        let fits = g[l][es[i]] == 1
            && es.iter().enumerate().all(|(j, &e)| j == i || g[l][e] == 0)
            && ls.iter().all(|&x| g[l][x] == 0);
        if fits {
            ls.push(l);
            blockwise_partners(g, es, ls, emit);
            ls.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lat(n: usize) -> BlowupLattice {
        BlowupLattice::new(n).unwrap()
    }

    /// Plain brute force over a box wide enough by the Cauchy–Schwarz
    /// estimate `(3a_0 - k)^2 <= n (a_0^2 - s)`, without any pruning.
    fn brute_force(n: usize, s: i64, k: i64) -> Vec<DivisorClass> {
        let n_i = n as i64;
        let max_deg = (0..50)
            .filter(|&a: &i64| (3 * a - k).pow(2) <= n_i * (a * a - s) || n == 0)
            .max()
            .unwrap_or(0);
        let max_m = ((max_deg * max_deg - s) as f64).sqrt().ceil() as i64;
        let mut out = Vec::new();
        for a0 in -max_deg..=max_deg {
            let mut m = vec![-max_m; n];
            loop {
                let sum: i64 = m.iter().sum();
                let sq: i64 = m.iter().map(|x| x * x).sum();
                if sum == 3 * a0 - k && sq == a0 * a0 - s {
                    let mut v = vec![a0];
                    v.extend(m.iter().map(|x| -x));
                    out.push(DivisorClass(v));
                }
                let mut i = 0;
                while i < n && m[i] == max_m {
                    m[i] = -max_m;
                    i += 1;
                }
                if i == n {
                    break;
                }
                m[i] += 1;
            }
        }
        out.sort();
        out
    }

    #[test]
    fn form_values() {
        let l = lat(2);
        let h = l.hyperplane();
        let e1 = l.exceptional(1);
        assert_eq!(l.intersect(&h, &h).unwrap(), 1);
        assert_eq!(l.intersect(&e1, &e1).unwrap(), -1);
        let c = l.class(vec![1, -1, -1]).unwrap();
        assert_eq!(l.intersect(&c, &c).unwrap(), -1);
        assert!(matches!(
            l.intersect(&h, &DivisorClass(vec![1, 0])),
            Err(LatticeError::DimensionMismatch { want: 3, got: 2 })
        ));
    }

    #[test]
    fn canonical_self_intersection() {
        assert_eq!(lat(0).canonical_class(), DivisorClass(vec![-3]));
        for n in 0..=8 {
            let l = lat(n);
            let k = l.canonical_class();
            assert_eq!(l.intersect(&k, &k).unwrap(), 9 - n as i64);
        }
    }

    #[test]
    fn line_counts_match_brute_force() {
        let expected = [0, 1, 3, 6, 10, 16, 27];
        for (n, &want) in expected.iter().enumerate() {
            let lines = lat(n).enumerate_lines();
            assert_eq!(lines.len(), want, "n = {n}");
            assert_eq!(lines, brute_force(n, -1, 1), "n = {n}");
        }
    }

    #[test]
    fn larger_lattices_need_a_wider_box() {
        assert_eq!(lat(7).enumerate_lines().len(), 56);
        let lines8 = lat(8).enumerate_lines();
        assert_eq!(lines8.len(), 240);
        assert_eq!(lines8.iter().map(DivisorClass::degree).max(), Some(6));
        let conics8 = lat(8).enumerate_conic_classes();
        assert_eq!(conics8.len(), 2160);
        assert_eq!(conics8.iter().map(DivisorClass::degree).max(), Some(11));
    }

    #[test]
    fn conic_classes_small_cases() {
        assert_eq!(lat(1).enumerate_conic_classes(), vec![DivisorClass(vec![1, -1])]);
        let c3 = lat(3).enumerate_conic_classes();
        assert_eq!(
            c3,
            vec![
                DivisorClass(vec![1, -1, 0, 0]),
                DivisorClass(vec![1, 0, -1, 0]),
                DivisorClass(vec![1, 0, 0, -1])
            ]
        );
        for n in 0..=6 {
            let mut bf = brute_force(n, 0, 2);
            bf.retain(|c| c.degree() >= 0 && is_primitive(c));
            assert_eq!(lat(n).enumerate_conic_classes(), bf, "n = {n}");
        }
        assert_eq!(lat(6).enumerate_conic_classes().len(), 27);
    }

    #[test]
    fn canonical_order_at_three_points() {
        let lines = lat(3).enumerate_lines();
        let text: Vec<String> = lines.iter().map(ToString::to_string).collect();
        assert_eq!(text, ["E3", "E2", "E1", "H - E1 - E2", "H - E1 - E3", "H - E2 - E3"]);
    }

    #[test]
    fn out_of_range() {
        assert_eq!(BlowupLattice::new(9), Err(LatticeError::OutOfRange(9)));
        assert_eq!(BlowupLattice::del_pezzo(3).unwrap().n(), 6);
        assert!(lat(7).count_fibration_configurations().is_err());
    }

    #[test]
    fn hexagon_and_cubic_graphs() {
        let l3 = lat(3);
        let g = l3.incidence_graph(&l3.enumerate_lines(), 1).unwrap();
        assert!(g.is_single_cycle());
        assert_eq!(g.vertices.len(), 6);

        let l6 = lat(6);
        let g = l6.incidence_graph(&l6.enumerate_lines(), 1).unwrap();
        assert_eq!(g.vertices.len(), 27);
        assert_eq!(g.regular_degree(), Some(10));

        assert_eq!(
            l6.incidence_graph(&[], 1).unwrap(),
            IncidenceGraph {
                vertices: vec![],
                edges: vec![]
            }
        );
    }

    #[test]
    fn graph_ignores_input_order() {
        let l = lat(4);
        let mut lines = l.enumerate_lines();
        let a = l.incidence_graph(&lines, 1).unwrap();
        lines.reverse();
        lines.push(lines[0].clone());
        assert_eq!(l.incidence_graph(&lines, 1).unwrap(), a);
    }

    #[test]
    fn reflections() {
        let l = lat(3);
        let r = l.class(vec![0, 1, -1, 0]).unwrap();
        let c = l.class(vec![1, -1, -1, 0]).unwrap();
        assert_eq!(l.weyl_reflect(&c, &r).unwrap(), c);
        assert_eq!(l.weyl_reflect(&l.exceptional(1), &r).unwrap(), l.exceptional(2));
        let twice = l.weyl_reflect(&l.weyl_reflect(&c, &r).unwrap(), &r).unwrap();
        assert_eq!(twice, c);
        assert!(matches!(
            l.weyl_reflect(&c, &l.hyperplane()),
            Err(LatticeError::InvalidRoot(_))
        ));
    }

    #[test]
    fn fibration_configurations_three_points() {
        let c = lat(3).count_fibration_configurations().unwrap();
        assert_eq!(c.ordered_pairwise, 24);
        assert!(c.orders_agree());
        assert_eq!(c.pair_sets, 12);
        assert_eq!(c.unordered, 3);
        assert_eq!(c.conic_classes, 3);
    }

    #[test]
    fn fibration_configurations_cubic() {
        let c = lat(6).count_fibration_configurations().unwrap();
        // 27 conic bundles, 5! orderings of the singular fibres, 2 choices of line in each.
        assert_eq!(c.ordered_pairwise, 27 * 120 * 32);
        assert_eq!(c.ordered_blockwise, c.ordered_pairwise);
        assert_eq!(c.pair_sets, 864);
        assert_eq!(c.unordered, 27);
        assert_eq!(c.conic_classes, 27);
    }

    #[test]
    fn serde_shapes() {
        let c = DivisorClass(vec![1, -1, 0]);
        assert_eq!(serde_json::to_string(&c).unwrap(), "[1,-1,0]");
        let g = IncidenceGraph {
            vertices: vec![c.clone()],
            edges: vec![],
        };
        assert_eq!(
            serde_json::to_string(&g).unwrap(),
            r#"{"vertices":[[1,-1,0]],"edges":[]}"#
        );
    }
}
