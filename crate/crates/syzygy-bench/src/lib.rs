//! Deterministic inputs shared by the benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use syzygy::IntMatrix;

/// A reproducible `rows x cols` matrix with entries in `[-bound, bound]`.
pub fn random_matrix(seed: u64, rows: usize, cols: usize, bound: i64) -> IntMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data: Vec<Vec<i64>> = (0..rows)
        .map(|_| (0..cols).map(|_| rng.gen_range(-bound..=bound)).collect())
        .collect();
    IntMatrix::from_rows_shaped(rows, cols, &data)
}
