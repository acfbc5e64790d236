//! Finitely generated abelian groups in invariant-factor form, and the
//! lattice subquotient routine every homology computation goes through.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::matrix::{IntMatrix, JsonInt};
use super::snf::smith_normal_form;

/// `Z^free_rank (+) Z/d1 (+) ... (+) Z/dk` with `d1 | d2 | ... | dk`, all `di >= 2`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct FGAbelianGroup {
    free_rank: usize,
    torsion: Vec<BigInt>,
}

impl FGAbelianGroup {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn free(rank: usize) -> Self {
        FGAbelianGroup {
            free_rank: rank,
            torsion: Vec::new(),
        }
    }

    /// Builds the group from arbitrary cyclic orders; a zero order means `Z`,
    /// order one is dropped. The result is normalized to invariant factors.
    pub fn from_cyclic_orders<I, T>(free_rank: usize, orders: I) -> Self
    where
        I: IntoIterator<Item = T>,
        T: Into<BigInt>,
    {
        let mut free = free_rank;
        let mut finite = Vec::new();
        for o in orders {
            let o: BigInt = o.into();
            let o = o.abs();
            if o.is_zero() {
                free += 1;
            } else if !o.is_one() {
                finite.push(o);
            }
        }
        FGAbelianGroup {
            free_rank: free,
            torsion: invariant_factors_of(&finite),
        }
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn torsion(&self) -> &[BigInt] {
        &self.torsion
    }

    pub fn is_zero(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    /// Order of the torsion subgroup.
    pub fn torsion_order(&self) -> BigInt {
        self.torsion.iter().product()
    }

    pub fn direct_sum(&self, other: &FGAbelianGroup) -> FGAbelianGroup {
        let mut all = self.torsion.clone();
        all.extend(other.torsion.iter().cloned());
        FGAbelianGroup {
            free_rank: self.free_rank + other.free_rank,
            torsion: invariant_factors_of(&all),
        }
    }

    /// Elementary divisors (prime powers), sorted.
    pub fn elementary_divisors(&self) -> Vec<BigInt> {
        let mut out = Vec::new();
        for d in &self.torsion {
            out.extend(prime_power_parts(d));
        }
        out.sort();
        out
    }
}

/// Converts a multiset of cyclic orders (each >= 2) into the invariant-factor chain.
pub fn invariant_factors_of(orders: &[BigInt]) -> Vec<BigInt> {
    if orders.is_empty() {
        return Vec::new();
    }
    let snf = smith_normal_form(&IntMatrix::diagonal(orders));
    snf.invariant_factors().into_iter().filter(|d| !d.is_one()).collect()
}

fn prime_power_parts(n: &BigInt) -> Vec<BigInt> {
    let mut n = n.abs();
    let mut out = Vec::new();
    let mut p = BigInt::from(2);
    while &p * &p <= n {
        if n.is_multiple_of(&p) {
            let mut q = BigInt::one();
            while n.is_multiple_of(&p) {
                n /= &p;
                q *= &p;
            }
            out.push(q);
        }
        p += 1;
    }
    if n > BigInt::one() {
        out.push(n);
    }
    out
}

impl fmt::Display for FGAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.torsion.iter().map(|d| format!("Z/{d}")).collect();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" (+) "))
        }
    }
}

impl fmt::Debug for FGAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FGAbelianGroup({self})")
    }
}

#[derive(Serialize, Deserialize)]
struct FGRepr {
    free_rank: usize,
    torsion: Vec<JsonInt>,
}

impl Serialize for FGAbelianGroup {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        FGRepr {
            free_rank: self.free_rank,
            torsion: self.torsion.iter().cloned().map(JsonInt).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FGAbelianGroup {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = FGRepr::deserialize(d)?;
        Ok(FGAbelianGroup::from_cyclic_orders(
            r.free_rank,
            r.torsion.into_iter().map(|x| x.0),
        ))
    }
}

/// Failure of the subquotient precondition `N ⊆ L`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NotContained;

/// Computes `L / N` where `L = { x in Z^p : a x in im(b) }` and `N = im(c)`.
///
/// Shapes: `a` is `q x p`, `b` is `q x m`, `c` is `p x k`. Plain homology
/// uses an empty `b`; cyclic annotations on the target contribute columns
/// `m * e_i` to `b`.
pub fn subquotient(a: &IntMatrix, b: &IntMatrix, c: &IntMatrix) -> Result<FGAbelianGroup, NotContained> {
    let p = a.cols();
    assert_eq!(a.rows(), b.rows(), "a and b must share a target");
    assert_eq!(c.rows(), p, "c must land in the source of a");

    // Generators of L: kernel of [a | b], projected to the first p coordinates.
    let stacked = a.hstack(b);
    let snf = smith_normal_form(&stacked);
    let r = snf.rank();
    let kernel_cols: Vec<usize> = (r..stacked.cols()).collect();
    let gens = snf.v.select_columns(&kernel_cols).top_rows(p);

    // A basis of L: if u g v = diag(d), then L has basis d_i * u^{-1} e_i,
    // and coordinates of x in that basis are (u x)_i / d_i.
    let gsnf = smith_normal_form(&gens);
    let ds = gsnf.invariant_factors();
    let s = ds.len();
    let ux = gsnf.u.mul(c);
    let mut coords = IntMatrix::zeros(s, c.cols());
    for j in 0..c.cols() {
        for i in 0..ux.rows() {
            let val = &ux[(i, j)];
            if i < s {
                let (q, rem) = val.div_rem(&ds[i]);
                if !rem.is_zero() {
                    return Err(NotContained);
                }
                coords[(i, j)] = q;
            } else if !val.is_zero() {
                return Err(NotContained);
            }
        }
    }

    let qsnf = smith_normal_form(&coords);
    let factors = qsnf.invariant_factors();
    let free = s - factors.len();
    Ok(FGAbelianGroup::from_cyclic_orders(free, factors))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normal_form_merges_coprime_orders() {
        let g = FGAbelianGroup::from_cyclic_orders(1, [2, 3, 0, 1]);
        assert_eq!(g.free_rank(), 2);
        assert_eq!(g.torsion(), &[BigInt::from(6)]);
        assert_eq!(g.to_string(), "Z/6 (+) Z^2");
        assert_eq!(g.elementary_divisors(), vec![BigInt::from(2), BigInt::from(3)]);
    }

    #[test]
    fn cokernel_of_doubling() {
        // Z^1 / 2Z
        let a = IntMatrix::zeros(0, 1);
        let b = IntMatrix::zeros(0, 0);
        let c = IntMatrix::from_rows(&[vec![2]]);
        let g = subquotient(&a, &b, &c).unwrap();
        assert_eq!(g, FGAbelianGroup::from_cyclic_orders(0, [2]));
    }

    #[test]
    fn kernel_into_cyclic_target() {
        // x -> x mod 4 on Z: kernel 4Z, modulo 2Z... not contained; modulo 8Z gives Z/2.
        let a = IntMatrix::from_rows(&[vec![1]]);
        let b = IntMatrix::from_rows(&[vec![4]]);
        let c_bad = IntMatrix::from_rows(&[vec![2]]);
        assert_eq!(subquotient(&a, &b, &c_bad), Err(NotContained));
        let c = IntMatrix::from_rows(&[vec![8]]);
        assert_eq!(
            subquotient(&a, &b, &c).unwrap(),
            FGAbelianGroup::from_cyclic_orders(0, [2])
        );
    }

    #[test]
    fn serde_shape() {
        let g = FGAbelianGroup::from_cyclic_orders(1, [2, 2]);
        let s = serde_json::to_string(&g).unwrap();
        assert_eq!(s, r#"{"free_rank":1,"torsion":[2,2]}"#);
        let back: FGAbelianGroup = serde_json::from_str(&s).unwrap();
        assert_eq!(back, g);
    }
}
