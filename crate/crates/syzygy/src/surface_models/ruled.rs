//! Generators and boundary formulas over `P^1`.
//!
//! Every boundary has the shape `∂(P ⊗ X) = (-1)^k δP ⊗ c(X)` where `P` is
//! the set of `k` marked points, `δP = Σ_i (-1)^{i+1} (P \ P_i)` (points
//! sorted, `i` from 1), and `c` sends a configuration with `k` singular fibres
//! to a combination of configurations with `k - 1`. Because `δ∘δ = 0`, any
//! such `c` gives `∂∘∂ = 0`.
//!
//! For `k <= 3` the coefficients `c` reproduce the classical formulas; at
//! `k = 4` they are chosen by forgetting one singular fibre and reading off
//! the configuration of the remaining three.

use itertools::Itertools;

use super::{Family, Gen};

/// Canonically ordered generators of `rank` over `t` points. `e_bound = None`
/// leaves out the e-series entirely.
pub(super) fn generators(t: usize, rank: usize, e_bound: Option<u32>, moduli: &[String]) -> Vec<Gen> {
    if rank == 0 || rank > super::MAX_RANK {
        return Vec::new();
    }
    let k = rank - 1;
    let mut families = Vec::new();
    match k {
        2 | 3 => families.push(Family::General { modulus: None }),
        4 => families.extend(moduli.iter().map(|m| Family::General {
            modulus: Some(m.clone()),
        })),
        _ => {}
    }
    match k {
        3 => families.push(Family::Split { parts: vec![2, 1] }),
        4 => {
            for parts in [vec![2, 1, 1], vec![2, 2], vec![3, 1]] {
                families.push(Family::Split { parts });
            }
        }
        _ => {}
    }
    if let Some(b) = e_bound {
        families.extend((0..=b).map(|e| Family::ESeries { e }));
    }
    families.sort();

    let mut out = Vec::new();
    for pts in (0..t).combinations(k) {
        for f in &families {
            out.push(Gen::new(rank, pts.clone(), f.clone()));
        }
    }
    out
}

/// `c(X)`: the configurations seen after forgetting one singular fibre.
fn forget_one(k: usize, family: &Family) -> Vec<(Family, i64)> {
    use Family::*;
    let e0 = |c| (ESeries { e: 0 }, c);
    let g = |c| (General { modulus: None }, c);
    let s21 = |c| (Split { parts: vec![2, 1] }, c);
    match family {
        ESeries { e } => vec![(ESeries { e: *e }, 1), (ESeries { e: e + 1 }, -1)],
        // S_{g,2} degenerates to S_{g,1} twice; from then on general stays general.
        General { .. } if k == 2 => vec![e0(2)],
        General { .. } => vec![g(2)],
        Split { parts } => match parts.as_slice() {
            [2, 1] => vec![g(1), e0(1)],
            [3, 1] => vec![e0(1), s21(1)],
            [2, 2] => vec![s21(2)],
            [2, 1, 1] => vec![g(1), s21(1)],
            other => unreachable!("no split configuration {other:?}"),
        },
        Plane | DelPezzoF1 | DelPezzoQuadric | BlownUpPlane { .. } => {
            unreachable!("del Pezzo surfaces do not live over P^1")
        }
    }
}

pub(super) fn boundary(g: &Gen) -> Vec<(Gen, i64)> {
    let k = g.points.len();
    if k == 0 {
        return Vec::new();
    }
    let sign = if k.is_multiple_of(2) { 1 } else { -1 };
    let targets = forget_one(k, &g.family);
    let mut out = Vec::new();
    for i in 0..k {
        let mut q = g.points.clone();
        q.remove(i);
        let s = if i % 2 == 0 { sign } else { -sign };
        for (f, c) in &targets {
            out.push((Gen::new(g.rank - 1, q.clone(), f.clone()), s * c));
        }
    }
    out
}
