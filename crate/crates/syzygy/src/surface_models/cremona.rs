//! Generators and boundary formulas over a point.
//!
//! There are no point labels here: the group permutes the fibres of a conic
//! bundle, so only the configuration survives in the coinvariants. From rank
//! 3 on every generator is non-orientable and coefficients are read mod 2.

use super::{Family, Gen};

pub(super) fn generators(rank: usize, e_bound: Option<u32>) -> Vec<Gen> {
    use Family::*;
    let mut fams = match rank {
        1 => vec![Plane],
        2 => vec![DelPezzoF1, DelPezzoQuadric],
        3 => vec![BlownUpPlane { points: 2 }, General { modulus: None }],
        4 => vec![
            BlownUpPlane { points: 3 },
            General { modulus: None },
            Split { parts: vec![2, 1] },
        ],
        5 => vec![BlownUpPlane { points: 4 }],
        _ => return Vec::new(),
    };
    if rank <= 4 {
        if let Some(b) = e_bound {
            fams.extend((0..=b).map(|e| ESeries { e }));
        }
    }
    fams.sort();
    fams.into_iter().map(|f| Gen::new(rank, Vec::new(), f)).collect()
}

pub(super) fn boundary(g: &Gen) -> Vec<(Gen, i64)> {
    use Family::*;
    let r = g.rank;
    let at = |f: Family, c: i64| (Gen::new(r - 1, Vec::new(), f), c);
    match (&g.family, r) {
        (_, 1) => Vec::new(),
        (DelPezzoF1, 2) => vec![at(ESeries { e: 1 }, 1), at(Plane, -1)],
        (DelPezzoQuadric, 2) => Vec::new(),
        (BlownUpPlane { points: 2 }, 3) => vec![at(DelPezzoQuadric, 1)],
        (BlownUpPlane { points: 3 }, 4) => vec![at(General { modulus: None }, 1)],
        (BlownUpPlane { points: 4 }, 5) => vec![at(General { modulus: None }, 1)],
        // On rank 2 the e-series runs F_{e+1} - F_e, with S_{g,1} as e = 0.
        (ESeries { e }, 2) => vec![at(ESeries { e: e + 1 }, 1), at(ESeries { e: *e }, -1)],
        (ESeries { .. }, 3) | (General { .. }, 3) => Vec::new(),
        (General { .. }, 4) => Vec::new(),
        (Split { parts }, 4) if parts == &[2, 1] => {
            vec![at(General { modulus: None }, 1), at(ESeries { e: 0 }, 1)]
        }
        (ESeries { e }, 4) => vec![at(ESeries { e: e + 1 }, 1), at(ESeries { e: *e }, 1)],
        (f, r) => unreachable!("no generator {f:?} of rank {r} over a point"),
    }
}
