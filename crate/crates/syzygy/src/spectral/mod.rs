//! First-quadrant homological spectral sequences over formal groups, the
//! low-degree exact sequences, Lyndon–Hochschild–Serre grids fed by a
//! registry of known group homology, and the derivations assembled from them.

mod derive;
mod grid;
mod lhs;
mod registry;

pub use derive::{
    cremona_assemble, cremona_rows, low_abutment, nonorientable_block_homology, ruled_grid, schur_aut_p1xp1, schur_pgl,
    CremonaAssembly, CremonaRows, Derivation, Transfer,
};
pub use grid::{ExactSequence, GridEntry, SpectralGrid};
pub use lhs::{lhs_grid, tensor, tor, Action, LhsExtension};
pub use registry::{KnownHomologyRegistry, RegistryEntry};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SpectralError {
    #[error("differential on page {page} at ({p}, {q}) is not supplied and not forced to vanish")]
    MissingDifferential { page: usize, p: usize, q: usize },
    #[error("missing entries: {0:?}")]
    MissingEntries(Vec<String>),
    #[error("missing registry entries: {0:?}")]
    MissingRegistry(Vec<String>),
    #[error("registry: {0}")]
    Registry(String),
    #[error("bad differential at ({p}, {q}): {detail}")]
    BadDifferential { p: usize, q: usize, detail: String },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Formal(#[from] crate::formal_groups::FormalError),
    #[error(transparent)]
    Surface(#[from] crate::surface_models::SurfaceError),
}
