//! Integer chain complexes, optionally with cyclic generators, and their homology.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::abelian::{subquotient, FGAbelianGroup};
use super::matrix::IntMatrix;
use super::ComplexError;

/// Chain groups `C_0 .. C_top`. Generator `i` of degree `d` is a copy of `Z`
/// unless `cyclic[d][i] = m`, in which case it is a copy of `Z/m`.
///
/// `boundaries[k]` is `∂_{k+1} : C_{k+1} -> C_k`, stored as a
/// `ranks[k] x ranks[k+1]` matrix acting on column vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegerChainComplex {
    ranks: Vec<usize>,
    boundaries: Vec<IntMatrix>,
    cyclic: BTreeMap<usize, BTreeMap<usize, u64>>,
}

impl IntegerChainComplex {
    /// Builds a complex and checks shapes, cyclic annotations and `∂∘∂ ≡ 0`.
    pub fn new(
        ranks: Vec<usize>,
        boundaries: Vec<IntMatrix>,
        cyclic: BTreeMap<usize, BTreeMap<usize, u64>>,
    ) -> Result<Self, ComplexError> {
        let cc = Self::new_unchecked(ranks, boundaries, cyclic)?;
        cc.check_square_zero()?;
        Ok(cc)
    }

    /// Shape and annotation checks only; `∂∘∂` is not examined.
    pub fn new_unchecked(
        ranks: Vec<usize>,
        boundaries: Vec<IntMatrix>,
        cyclic: BTreeMap<usize, BTreeMap<usize, u64>>,
    ) -> Result<Self, ComplexError> {
        if boundaries.len() + 1 != ranks.len().max(1) {
            return Err(ComplexError::Shape(format!(
                "{} ranks need {} boundary matrices, got {}",
                ranks.len(),
                ranks.len().saturating_sub(1),
                boundaries.len()
            )));
        }
        for (k, m) in boundaries.iter().enumerate() {
            if m.shape() != (ranks[k], ranks[k + 1]) {
                return Err(ComplexError::Shape(format!(
                    "boundary {} has shape {:?}, expected {:?}",
                    k + 1,
                    m.shape(),
                    (ranks[k], ranks[k + 1])
                )));
            }
        }
        for (&d, gens) in &cyclic {
            for (&i, &m) in gens {
                if d >= ranks.len() || i >= ranks[d] {
                    return Err(ComplexError::Shape(format!("cyclic annotation ({d},{i}) out of range")));
                }
                if m < 2 {
                    return Err(ComplexError::Shape(format!(
                        "cyclic order {m} at ({d},{i}) must be at least 2"
                    )));
                }
            }
        }
        Ok(IntegerChainComplex {
            ranks,
            boundaries,
            cyclic,
        })
    }

    /// A complex of free groups.
    pub fn free(ranks: Vec<usize>, boundaries: Vec<IntMatrix>) -> Result<Self, ComplexError> {
        Self::new(ranks, boundaries, BTreeMap::new())
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    pub fn top_degree(&self) -> Option<usize> {
        self.ranks.len().checked_sub(1)
    }

    pub fn rank(&self, degree: usize) -> usize {
        self.ranks.get(degree).copied().unwrap_or(0)
    }

    /// `∂_degree : C_degree -> C_{degree-1}`; the zero map out of range.
    pub fn boundary(&self, degree: usize) -> IntMatrix {
        if degree == 0 {
            return IntMatrix::zeros(0, self.rank(0));
        }
        match self.boundaries.get(degree - 1) {
            Some(m) => m.clone(),
            None => IntMatrix::zeros(self.rank(degree - 1), self.rank(degree)),
        }
    }

    pub fn cyclic(&self) -> &BTreeMap<usize, BTreeMap<usize, u64>> {
        &self.cyclic
    }

    /// Columns `m * e_i` for the cyclic generators in `degree`.
    pub fn relations(&self, degree: usize) -> IntMatrix {
        let n = self.rank(degree);
        let gens: Vec<(usize, u64)> = self
            .cyclic
            .get(&degree)
            .map(|g| g.iter().map(|(&i, &m)| (i, m)).collect())
            .unwrap_or_default();
        let mut r = IntMatrix::zeros(n, gens.len());
        for (col, (i, m)) in gens.into_iter().enumerate() {
            r[(i, col)] = BigInt::from(m);
        }
        r
    }

    fn order_of(&self, degree: usize, index: usize) -> Option<u64> {
        self.cyclic.get(&degree).and_then(|g| g.get(&index)).copied()
    }

    /// Is `v` (a vector in `C_degree`) zero in the presented group?
    fn vanishes_in(&self, degree: usize, v: &[BigInt]) -> bool {
        v.iter().enumerate().all(|(i, x)| match self.order_of(degree, i) {
            Some(m) => x.is_multiple_of(&BigInt::from(m)),
            None => x.is_zero(),
        })
    }

    /// Checks that `∂` is well defined on cyclic generators and that `∂∘∂ ≡ 0`.
    pub fn check_square_zero(&self) -> Result<(), ComplexError> {
        for d in 1..self.ranks.len() {
            let dm = self.boundary(d);
            if let Some(gens) = self.cyclic.get(&d) {
                for (&j, &m) in gens {
                    let col: Vec<BigInt> = dm.column(j).into_iter().map(|x| x * m).collect();
                    if !self.vanishes_in(d - 1, &col) {
                        return Err(ComplexError::IllDefined {
                            degree: d,
                            generator: j,
                        });
                    }
                }
            }
            if d + 1 < self.ranks.len() {
                let prod = dm.mul(&self.boundary(d + 1));
                for j in 0..prod.cols() {
                    if !self.vanishes_in(d - 1, &prod.column(j)) {
                        return Err(ComplexError::NotAComplex { degree: d + 1 });
                    }
                }
            }
        }
        Ok(())
    }

    /// `H_degree`, computed as `{x : ∂x ∈ R_{d-1}} / (im ∂_{d+1} + R_d)`.
    pub fn homology(&self, degree: usize) -> FGAbelianGroup {
        if degree >= self.ranks.len() {
            return FGAbelianGroup::zero();
        }
        let a = self.boundary(degree);
        let b = if degree == 0 {
            IntMatrix::zeros(0, 0)
        } else {
            self.relations(degree - 1)
        };
        let c = self.boundary(degree + 1).hstack(&self.relations(degree));
        subquotient(&a, &b, &c).expect("boundaries of a checked complex lie in the cycles")
    }

    pub fn homology_all(&self) -> Vec<FGAbelianGroup> {
        (0..self.ranks.len()).map(|d| self.homology(d)).collect()
    }

    /// Alternating sum of ranks; only meaningful without cyclic generators.
    pub fn euler_characteristic(&self) -> i64 {
        self.ranks
            .iter()
            .enumerate()
            .map(|(d, &r)| if d % 2 == 0 { r as i64 } else { -(r as i64) })
            .sum()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&ChainRepr::from(self)).expect("chain complex serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, ComplexError> {
        let repr: ChainRepr = serde_json::from_str(text).map_err(|e| ComplexError::Parse(e.to_string()))?;
        repr.try_into()
    }
}

#[derive(Serialize, Deserialize)]
struct ChainRepr {
    ranks: Vec<usize>,
    boundaries: Vec<IntMatrix>,
    #[serde(default)]
    cyclic: BTreeMap<usize, BTreeMap<usize, u64>>,
}

impl From<&IntegerChainComplex> for ChainRepr {
    fn from(c: &IntegerChainComplex) -> Self {
        ChainRepr {
            ranks: c.ranks.clone(),
            boundaries: c.boundaries.clone(),
            cyclic: c.cyclic.clone(),
        }
    }
}

impl TryFrom<ChainRepr> for IntegerChainComplex {
    type Error = ComplexError;

    fn try_from(r: ChainRepr) -> Result<Self, ComplexError> {
        if r.boundaries.len() + 1 != r.ranks.len().max(1) {
            return Err(ComplexError::Shape("boundary count does not match ranks".into()));
        }
        // Empty JSON matrices lose their width; rebuild shapes from the ranks.
        let mut mats = Vec::with_capacity(r.boundaries.len());
        for (k, m) in r.boundaries.into_iter().enumerate() {
            let want = (r.ranks[k], r.ranks[k + 1]);
            if want.0 == 0 || want.1 == 0 {
                if !(m.rows() == 0 || (m.rows() == want.0 && m.cols() == 0)) {
                    return Err(ComplexError::Shape(format!("boundary {} should be empty", k + 1)));
                }
                mats.push(IntMatrix::zeros(want.0, want.1));
            } else {
                mats.push(m);
            }
        }
        IntegerChainComplex::new(r.ranks, mats, r.cyclic)
    }
}

impl Serialize for IntegerChainComplex {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ChainRepr::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntegerChainComplex {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        ChainRepr::deserialize(d)?.try_into().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle() -> IntegerChainComplex {
        // Two vertices, two edges both running v0 -> v1.
        let d1 = IntMatrix::from_rows(&[vec![-1, -1], vec![1, 1]]);
        IntegerChainComplex::free(vec![2, 2], vec![d1]).unwrap()
    }

    #[test]
    fn circle_homology() {
        let h = circle().homology_all();
        assert_eq!(h, vec![FGAbelianGroup::free(1), FGAbelianGroup::free(1)]);
    }

    #[test]
    fn doubling_map_gives_z2() {
        let cc = IntegerChainComplex::free(vec![1, 1], vec![IntMatrix::from_rows(&[vec![2]])]).unwrap();
        assert_eq!(cc.homology(0), FGAbelianGroup::from_cyclic_orders(0, [2]));
        assert_eq!(cc.homology(1), FGAbelianGroup::zero());
    }

    #[test]
    fn cyclic_generators_add_relations() {
        // Z/2 in degree 1 mapping by 0 to Z: H_1 = Z/2, H_0 = Z.
        let mut cyc = BTreeMap::new();
        cyc.insert(1, BTreeMap::from([(0, 2)]));
        let cc = IntegerChainComplex::new(vec![1, 1], vec![IntMatrix::zeros(1, 1)], cyc).unwrap();
        assert_eq!(cc.homology(1), FGAbelianGroup::from_cyclic_orders(0, [2]));
        assert_eq!(cc.homology(0), FGAbelianGroup::free(1));
    }

    #[test]
    fn map_out_of_cyclic_generator_must_be_torsion() {
        let mut cyc = BTreeMap::new();
        cyc.insert(1, BTreeMap::from([(0, 2)]));
        let err = IntegerChainComplex::new(vec![1, 1], vec![IntMatrix::from_rows(&[vec![1]])], cyc).unwrap_err();
        assert!(matches!(
            err,
            ComplexError::IllDefined {
                degree: 1,
                generator: 0
            }
        ));
    }

    #[test]
    fn rejects_nonzero_square() {
        let d1 = IntMatrix::from_rows(&[vec![1]]);
        let d2 = IntMatrix::from_rows(&[vec![1]]);
        let err = IntegerChainComplex::free(vec![1, 1, 1], vec![d1, d2]).unwrap_err();
        assert!(matches!(err, ComplexError::NotAComplex { degree: 2 }));
    }

    #[test]
    fn json_roundtrip_keeps_empty_shapes() {
        let cc = IntegerChainComplex::free(vec![0, 3], vec![IntMatrix::zeros(0, 3)]).unwrap();
        let text = cc.to_json();
        assert_eq!(text, r#"{"ranks":[0,3],"boundaries":[[]],"cyclic":{}}"#);
        let back = IntegerChainComplex::from_json(&text).unwrap();
        assert_eq!(back, cc);
        assert_eq!(back.homology(1), FGAbelianGroup::free(3));
    }
}
