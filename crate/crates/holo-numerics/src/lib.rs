//! Numerical building blocks: Gauss rules (plain and log-weighted), adaptive
//! Gauss–Kronrod integration, deterministic pairwise summation, weighted
//! least-squares extrapolation and Gaussian lattice tail bounds.

pub mod adaptive;
pub mod fit;
pub mod gauss;
pub mod special;
pub mod sum;

pub use adaptive::{integrate_adaptive, AdaptiveOptions, AdaptiveResult, QuadValue};
pub use fit::{extrapolate_to_zero, weighted_lstsq, LstsqFit};
pub use gauss::{gauss_legendre, log_weighted_rule, GaussRule};
pub use special::{gamma, lattice_gaussian_tail, schwinger_moment, tail_radius, upper_gamma_int};
pub use sum::{pairwise_sum, pairwise_sum_complex};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericsError {
    #[error("least-squares system is underdetermined: {rows} rows for {cols} unknowns")]
    Underdetermined { rows: usize, cols: usize },
    #[error("adaptive quadrature did not reach tolerance: estimate {estimate:.3e}, requested {requested:.3e}")]
    NotConverged { estimate: f64, requested: f64 },
    #[error("domain error: {0}")]
    Domain(String),
}
