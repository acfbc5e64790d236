//! A small symbolic calculus of abelian groups.
//!
//! Groups are finite sums of named atoms (divisible groups such as `C*` or
//! `K2(C)` whose internal structure is never modelled), finite cyclic groups
//! and free summands, plus display-only indexed families such as
//! `(+)_Z Z/2`. Homomorphisms are integer block matrices: an entry `k`
//! between two copies of the same atom is the `k`-th power map.

mod atoms;
mod extension;
mod group;
mod hom;

pub use atoms::{Atom, AtomMap, AtomRegistry, TorsionRule};
pub use extension::{quotient_candidates, solve_extension};
pub use group::{Family, FormalGroup};
pub use hom::{
    check_exact, cokernel, cokernel_projection, group_of, homology_at, kernel, kernel_inclusion, slots_of,
    ExactnessReport, FormalHom, PositionVerdict, Slot, Verdict,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FormalError {
    #[error("insufficient atom data for {atom}: {detail}")]
    InsufficientAtomData { atom: String, detail: String },
    #[error("composition is nonzero")]
    CompositionNonzero,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("incompatible block at ({row}, {col}): {detail}")]
    IncompatibleBlock { row: usize, col: usize, detail: String },
    #[error("unknown atom {0}")]
    UnknownAtom(String),
    #[error("cannot parse group expression {input:?}: {detail}")]
    Parse { input: String, detail: String },
    #[error("unbounded or unsupported candidate set: {0}")]
    Unbounded(String),
    #[error("indexed families cannot enter a homomorphism: {0}")]
    FamilyInHom(String),
    #[error("atom registry: {0}")]
    Registry(String),
}
