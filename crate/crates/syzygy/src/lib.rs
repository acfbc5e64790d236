//! Exact computations around syzygies of Mori fibre spaces on rational surfaces.
//!
//! Lattice enumeration, integer homology of cellular complexes, the truncated
//! chain complexes of surface central models, a formal calculus of abelian
//! groups and the spectral-sequence bookkeeping built on top of it.

pub mod complexes;
pub mod formal_groups;
pub mod picard_lattice;
pub mod spectral;
pub mod surface_models;

pub use complexes::{FGAbelianGroup, IntMatrix, IntegerChainComplex, RegularCWComplex, SNFResult};
