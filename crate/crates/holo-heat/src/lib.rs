//! Heat kernel `H_t` of the flat Dolbeault Laplacian on `Cⁿ/Λ`, the
//! propagator `P = ∫₀^∞ ∂̄* H_t dt`, its holomorphic derivatives and its
//! restriction to the diagonal.
//!
//! Kernel values are forms `coefficient · ∧ᵢ(dz̄ᵢ − dw̄ᵢ)` for `H_t` and
//! `Σᵢ cᵢ ωᵢ` with `ωᵢ = ι_{∂/∂z̄ᵢ} ∧ⱼ(dz̄ⱼ − dw̄ⱼ)` for `P`.

pub mod cache;
pub mod conventions;
mod heat;
mod propagator;
pub mod weak;

pub use heat::{HeatKernelEval, HeatMethod, Truncated};
pub use holo_numerics::schwinger_moment;
pub use propagator::{
    bm_singular_part, LegDerivs, PropagatorConfig, PropagatorKernel, PropagatorValue, TimeQuadrature,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HeatError {
    #[error("time must be positive, got {0}")]
    NonPositiveTime(f64),
    #[error("points coincide modulo the lattice (squared distance {0:e})")]
    Coincident(f64),
    #[error("derivative order {requested} exceeds the supported maximum {max}")]
    DerivativeOrder { requested: u32, max: u32 },
    #[error("truncation infeasible: {0}")]
    TruncationInfeasible(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Numerics(#[from] holo_numerics::NumericsError),
    #[error("cache i/o: {0}")]
    Io(String),
}

/// Upper bound on the number of lattice terms a truncation may request.
pub(crate) const MAX_TERMS: f64 = 5.0e7;

/// Volume of the unit ball in `R^d`.
pub(crate) fn unit_ball_volume(d: usize) -> f64 {
    std::f64::consts::PI.powf(d as f64 / 2.0) / holo_numerics::gamma(d as f64 / 2.0 + 1.0)
}
