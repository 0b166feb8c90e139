//! Flat complex tori `Cⁿ/Λ`.
//!
//! Points of `Cⁿ` are handled as `2n` real coordinates ordered
//! `(Re z₁, Im z₁, Re z₂, Im z₂, …)`. The metric is the Euclidean one on
//! these coordinates (`g_{ij̄} = ½δ_{ij}`), so the squared torus distance is
//! the minimum of `|z − w − λ|²` over lattice vectors `λ`.

mod basis;
mod fake;
mod lattice;

pub use basis::LatticeBasis;
pub use fake::{Bump, FakeDistance};
pub use lattice::{complex_to_real, real_to_complex, Lattice, TorusPoint};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("basis must have 2n rows of length 2n, got {rows} rows of length {cols}")]
    Shape { rows: usize, cols: usize },
    #[error("basis vectors are linearly dependent (|det| = {0:e})")]
    Singular(f64),
    #[error("point has dimension {got}, lattice expects {expected}")]
    Dimension { expected: usize, got: usize },
    #[error("fake distance parameters invalid: {0}")]
    FakeDistance(String),
}

/// SHA-256 over a canonical byte encoding of `f64` values, hex encoded.
pub(crate) fn fingerprint_f64s(tag: &str, values: &[f64]) -> String {
    use sha2::{Digest, Sha256};
    let mut h = Sha256::new();
    h.update(tag.as_bytes());
    for v in values {
        h.update(v.to_bits().to_le_bytes());
    }
    hex::encode(h.finalize())
}
