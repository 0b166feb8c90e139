//! Graph integrals on flat tori as `ε → 0` limits of integrals over
//! `{∏_{i<j} ρ̃²(pᵢ, pⱼ) > ε}`, with Monte Carlo and product-rule backends.

mod invariance;
mod result;
mod schedule;
mod strategy;
mod sweep;

pub use invariance::{invariance_suite, Comparison, InvarianceReport};
pub use result::{graph_integral, CauchyCheck, GraphIntegralResult, ModelFit, RunMetadata};
pub use schedule::{CutoffSchedule, ExtrapolationModel};
pub use strategy::{Backend, IntegrationStrategy, Pinning};
pub use sweep::{cutoff_integral, cutoff_sweep, singular_homogeneity, CutoffEstimate, Sweep};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IntegratorError {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error(transparent)]
    Graph(#[from] holo_graph::GraphError),
    #[error(transparent)]
    Numerics(#[from] holo_numerics::NumericsError),
    #[error("output: {0}")]
    Io(String),
}
