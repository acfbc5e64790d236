//! The first row: chains with coefficients in the abelianised automorphism
//! groups, which are built from copies of `C*`.
//!
//! Over `P^1` every model is orientable and each block is `C*` or `0`; the
//! maps are the row-0 boundary coefficients acting as powers. Over a point
//! the blocks and maps come from an explicit table, because the maps out of
//! non-orientable models do not follow the row-0 incidences.

use std::collections::BTreeMap;

use serde::Serialize;

use super::{BaseCase, Family, Gen, GeneratorUniverse, SurfaceError};
use crate::formal_groups::{group_of, homology_at, kernel, FormalGroup, FormalHom, Slot};

/// Highest rank for which the first-row blocks are tabulated.
pub const ROW1_MAX_RANK: usize = 3;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Row1Term {
    pub model: String,
    pub group: FormalGroup,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Row1Complex {
    pub base: BaseCase,
    /// `terms[d]` lists the rank-`(d + 1)` blocks.
    pub terms: Vec<Vec<Row1Term>>,
    /// `boundaries[d]` maps degree `d + 1` to degree `d`.
    pub boundaries: Vec<FormalHom>,
}

impl Row1Complex {
    pub fn chain_group(&self, degree: usize) -> FormalGroup {
        self.terms
            .get(degree)
            .map(|t| t.iter().fold(FormalGroup::zero(), |acc, x| acc.direct_sum(&x.group)))
            .unwrap_or_default()
    }

    fn outgoing(&self, degree: usize) -> FormalHom {
        if degree == 0 {
            let src = self.boundaries.first().map(|b| b.target().to_vec()).unwrap_or_default();
            FormalHom::zero(src, Vec::new())
        } else {
            self.boundaries[degree - 1].clone()
        }
    }

    /// Closed chains in `degree`.
    pub fn cycles(&self, degree: usize) -> Result<FormalGroup, SurfaceError> {
        if degree >= self.terms.len() {
            return Err(SurfaceError::DegreeOutOfRange {
                degree,
                needed: degree + 1,
                r_max: self.terms.len(),
            });
        }
        Ok(kernel(&self.outgoing(degree))?)
    }

    pub fn homology(&self, degree: usize) -> Result<FormalGroup, SurfaceError> {
        if degree + 1 >= self.terms.len() {
            return Err(SurfaceError::DegreeOutOfRange {
                degree,
                needed: degree + 2,
                r_max: self.terms.len(),
            });
        }
        Ok(homology_at(&self.boundaries[degree], &self.outgoing(degree))?)
    }
}

fn c_star(n: usize) -> Vec<Slot> {
    vec![Slot::Atom("C*".into()); n]
}

/// Slots of one generator, or `None` above the tabulated ranks.
fn block(base: BaseCase, g: &Gen) -> Option<Vec<Slot>> {
    if g.rank > ROW1_MAX_RANK {
        return None;
    }
    let k = g.rank - 1;
    Some(match (base, &g.family) {
        (BaseCase::RuledOverP1, Family::ESeries { e }) if k == 0 && *e == 0 => vec![],
        (BaseCase::RuledOverP1, Family::ESeries { .. }) => c_star(1),
        (BaseCase::RuledOverP1, _) => vec![],
        (BaseCase::CremonaOverPoint, f) => match (k, f) {
            (0, Family::ESeries { e }) if *e >= 1 => c_star(1),
            (1, Family::DelPezzoF1) => c_star(1),
            (1, Family::ESeries { .. }) => c_star(2),
            (2, Family::BlownUpPlane { .. }) => c_star(1),
            (2, Family::General { .. }) => vec![Slot::Atom("C*".into()), Slot::Cyclic(2)],
            (2, Family::ESeries { .. }) => c_star(1),
            _ => vec![],
        },
    })
}

/// Cremona table: `(target, block)` pairs for the first-row boundary of `g`.
fn cremona_map(g: &Gen) -> Vec<(Gen, Vec<Vec<i64>>)> {
    use Family::*;
    let at = |rank, family| Gen::new(rank, Vec::new(), family);
    let k = g.rank - 1;
    match (k, &g.family) {
        (1, DelPezzoF1) => vec![(at(1, ESeries { e: 1 }), vec![vec![1]])],
        (1, ESeries { e }) => {
            let mut v = vec![(at(1, ESeries { e: e + 1 }), vec![vec![1, 1]])];
            if *e >= 1 {
                v.push((at(1, ESeries { e: *e }), vec![vec![-1, -1]]));
            }
            v
        }
        (2, BlownUpPlane { .. }) => vec![
            (at(2, ESeries { e: 0 }), vec![vec![2], vec![1]]),
            (at(2, DelPezzoF1), vec![vec![-3]]),
        ],
        (2, General { .. }) => vec![(at(2, ESeries { e: 0 }), vec![vec![-2, 0], vec![2, 0]])],
        (2, ESeries { e }) => {
            let mut v = vec![(at(2, ESeries { e: e + 1 }), vec![vec![1], vec![-1]])];
            if *e >= 1 {
                v.push((at(2, ESeries { e: *e }), vec![vec![1], vec![-1]]));
            }
            v
        }
        _ => Vec::new(),
    }
}

impl GeneratorUniverse {
    /// The first-row complex in degrees `0 ..= min(r_max, 3) - 1`, on the same
    /// truncated generators as row 0.
    pub fn row1_complex(&self) -> Result<Row1Complex, SurfaceError> {
        let top = self.r_max.min(ROW1_MAX_RANK);
        let mut layers: Vec<Vec<(Gen, Vec<Slot>)>> = Vec::new();
        for rank in 1..=top {
            let gens = self.truncated(rank);
            layers.push(
                gens.into_iter()
                    .map(|g| {
                        let b = block(self.base, &g).expect("rank is tabulated");
                        (g, b)
                    })
                    .collect(),
            );
        }
        let terms = layers
            .iter()
            .map(|layer| {
                layer
                    .iter()
                    .map(|(g, b)| Row1Term {
                        model: g.name(&self.points),
                        group: group_of(b),
                    })
                    .collect()
            })
            .collect();

        let mut boundaries = Vec::new();
        for d in 1..layers.len() {
            let (rows, cols) = (&layers[d - 1], &layers[d]);
            let mut offset = BTreeMap::new();
            let mut target = Vec::new();
            for (g, b) in rows {
                offset.insert(g.clone(), target.len());
                target.extend(b.iter().cloned());
            }
            let source: Vec<Slot> = cols.iter().flat_map(|(_, b)| b.iter().cloned()).collect();
            let mut matrix = vec![vec![0i64; source.len()]; target.len()];
            let mut col = 0;
            for (g, b) in cols {
                let entries: Vec<(Gen, Vec<Vec<i64>>)> = match self.base {
                    BaseCase::RuledOverP1 => self
                        .boundary_of(g)
                        .into_iter()
                        .map(|(h, c)| {
                            let rows = block(self.base, &h).map_or(0, |s| s.len());
                            (h, vec![vec![c; b.len()]; rows])
                        })
                        .collect(),
                    BaseCase::CremonaOverPoint => cremona_map(g),
                };
                for (h, blk) in entries {
                    if blk.is_empty() || b.is_empty() {
                        continue;
                    }
                    let r0 = *offset.get(&h).ok_or_else(|| {
                        SurfaceError::Construction(format!(
                            "first-row boundary of {} reaches {} outside the truncation",
                            g.name(&self.points),
                            h.name(&self.points)
                        ))
                    })?;
                    for (i, row) in blk.iter().enumerate() {
                        for (j, x) in row.iter().enumerate() {
                            matrix[r0 + i][col + j] += x;
                        }
                    }
                }
                col += b.len();
            }
            boundaries.push(FormalHom::new(source, target, matrix)?);
        }
        for w in boundaries.windows(2) {
            if !w[1].then(&w[0])?.is_zero() {
                return Err(SurfaceError::Construction(
                    "first-row boundary does not square to zero".into(),
                ));
            }
        }
        Ok(Row1Complex {
            base: self.base,
            terms,
            boundaries,
        })
    }

    /// `E_{i,1}`, accepted only when it agrees with the computation at `e_max + 1`.
    pub fn row1_homology(&self, degree: usize) -> Result<FormalGroup, SurfaceError> {
        let at = self.row1_complex()?.homology(degree)?;
        let mut wider = self.clone();
        wider.e_max += 1;
        let next = wider.row1_complex()?.homology(degree)?;
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
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ruled_row_one() {
        for t in 3..=5 {
            for e_max in 3..=5 {
                let u = GeneratorUniverse::new(BaseCase::RuledOverP1, t, e_max, 3).unwrap();
                assert!(u.row1_homology(0).unwrap().is_zero());
                assert_eq!(
                    u.row1_homology(1).unwrap(),
                    FormalGroup::atom_power("C*", t - 1),
                    "t={t}"
                );
            }
        }
    }

    #[test]
    fn cremona_row_one() {
        for e_max in 3..=5 {
            let u = GeneratorUniverse::new(BaseCase::CremonaOverPoint, 0, e_max, 4).unwrap();
            assert!(u.row1_homology(0).unwrap().is_zero());
            assert!(u.row1_homology(1).unwrap().is_zero());
            let cx = u.row1_complex().unwrap();
            // Z/3 (+) (Z/2)^2 in invariant-factor form.
            assert_eq!(cx.cycles(2).unwrap(), FormalGroup::finite(&[3, 2, 2]));
        }
    }

    #[test]
    fn degree_two_homology_needs_rank_four_blocks() {
        let u = GeneratorUniverse::new(BaseCase::CremonaOverPoint, 0, 4, 4).unwrap();
        assert!(matches!(
            u.row1_complex().unwrap().homology(2),
            Err(SurfaceError::DegreeOutOfRange { .. })
        ));
    }
}
