//! Integer linear algebra, chain complexes and regular CW complexes.

mod abelian;
mod chain;
mod cw;
mod matrix;
mod snf;

pub use abelian::{invariant_factors_of, subquotient, FGAbelianGroup, NotContained};
pub use chain::IntegerChainComplex;
pub use cw::{complex_from_lists, Cell, RegularCWComplex, ValidationReport};
pub use matrix::{IntMatrix, JsonInt};
pub use snf::{smith_normal_form, SNFResult};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ComplexError {
    #[error("shape error: {0}")]
    Shape(String),
    #[error("malformed complex: {0}")]
    Malformed(String),
    #[error("invalid complex: {0}")]
    Invalid(String),
    #[error("unknown cell id {0}")]
    UnknownCell(usize),
    #[error("boundary squared is nonzero into degree {degree}")]
    NotAComplex { degree: usize },
    #[error("boundary of cyclic generator {generator} in degree {degree} is not torsion of the right order")]
    IllDefined { degree: usize, generator: usize },
    #[error("parse error: {0}")]
    Parse(String),
}
