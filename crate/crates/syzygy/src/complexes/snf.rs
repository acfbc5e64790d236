//! Smith normal form over the integers.
//!
//! The pivot at each stage is the nonzero entry of least absolute value in
//! the remaining block, ties broken by smallest row and then smallest column.
//! That keeps the output deterministic and entry growth modest.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::matrix::IntMatrix;

/// `u * a * v == d` with `u`, `v` unimodular and `d` diagonal, `d[i] | d[i+1]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SNFResult {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
}

impl SNFResult {
    /// Nonzero diagonal entries, all positive.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        let k = self.d.rows().min(self.d.cols());
        (0..k)
            .map(|i| self.d[(i, i)].clone())
            .take_while(|x| !x.is_zero())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors().len()
    }
}

pub fn smith_normal_form(a: &IntMatrix) -> SNFResult {
    let (m, n) = a.shape();
    let mut d = a.clone();
    let mut u = IntMatrix::identity(m);
    let mut v = IntMatrix::identity(n);

    for t in 0..m.min(n) {
        let Some((pi, pj)) = min_abs_entry(&d, t..m, t..n) else {
            break;
        };
        move_to_pivot(&mut d, &mut u, &mut v, t, pi, pj);

        loop {
            let mut clean = true;
            for i in t + 1..m {
                if d[(i, t)].is_zero() {
                    continue;
                }
                let q = -(d[(i, t)].div_floor(&d[(t, t)]));
                d.add_row_multiple(i, t, &q);
                u.add_row_multiple(i, t, &q);
                if !d[(i, t)].is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..n {
                if d[(t, j)].is_zero() {
                    continue;
                }
                let q = -(d[(t, j)].div_floor(&d[(t, t)]));
                d.add_col_multiple(j, t, &q);
                v.add_col_multiple(j, t, &q);
                if !d[(t, j)].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                // A remainder smaller than the pivot survived; promote it.
                let (pi, pj) = min_in_cross(&d, t, m, n);
                move_to_pivot(&mut d, &mut u, &mut v, t, pi, pj);
                continue;
            }
            // Row and column are clear. Enforce divisibility on the rest.
            let bad = (t + 1..m)
                .flat_map(|i| (t + 1..n).map(move |j| (i, j)))
                .find(|&(i, j)| !d[(i, j)].is_multiple_of(&d[(t, t)]));
            match bad {
                Some((i, _)) => {
                    d.add_row_multiple(t, i, &BigInt::one());
                    u.add_row_multiple(t, i, &BigInt::one());
                }
                None => break,
            }
        }

        if d[(t, t)].is_negative() {
            d.negate_row(t);
            u.negate_row(t);
        }
    }

    SNFResult { u, d, v }
}

fn min_abs_entry(d: &IntMatrix, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Option<(usize, usize)> {
    let mut best: Option<(BigInt, usize, usize)> = None;
    for i in rows {
        for j in cols.clone() {
            let x = &d[(i, j)];
            if x.is_zero() {
                continue;
            }
            let ax = x.abs();
            if best.as_ref().is_none_or(|(b, _, _)| ax < *b) {
                best = Some((ax, i, j));
            }
        }
    }
    best.map(|(_, i, j)| (i, j))
}

/// Smallest nonzero entry in row `t` and column `t` of the active block,
/// pivot included; row candidates are scanned before column candidates.
fn min_in_cross(d: &IntMatrix, t: usize, m: usize, n: usize) -> (usize, usize) {
    let mut cells: Vec<(usize, usize)> = (t..n).map(|j| (t, j)).collect();
    cells.extend((t + 1..m).map(|i| (i, t)));
    cells.sort();
    let mut best: Option<(BigInt, usize, usize)> = None;
    for (i, j) in cells {
        let x = &d[(i, j)];
        if x.is_zero() {
            continue;
        }
        let ax = x.abs();
        if best.as_ref().is_none_or(|(b, _, _)| ax < *b) {
            best = Some((ax, i, j));
        }
    }
    let (_, i, j) = best.expect("pivot cross cannot be empty");
    (i, j)
}

fn move_to_pivot(d: &mut IntMatrix, u: &mut IntMatrix, v: &mut IntMatrix, t: usize, i: usize, j: usize) {
    d.swap_rows(t, i);
    u.swap_rows(t, i);
    d.swap_cols(t, j);
    v.swap_cols(t, j);
}
