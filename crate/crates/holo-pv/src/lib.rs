//! Cauchy principal values of forms `z^{−i} (ln|z|²)^k β dz∧dz̄` on the unit
//! polydisc: direct cutoff extrapolation, Taylor desingularization, and
//! checks that the value does not depend on the cutoff.

mod check;
pub mod corpus;
mod desing;
mod direct;
mod domain;
mod integrand;
pub mod smooth;

pub use check::{independence_check, IndependenceReport};
pub use desing::{desingularize, Certificate, DesingQuadrature, Desingularized, RemovedTerm};
pub use direct::{
    cutoff_by_defining_function, cutoff_integral, extrapolate, pv_direct, DirectQuadrature, PvEstimate, FIT_TOLERANCE,
};
pub use domain::{DeltaSchedule, PvDomain};
pub use integrand::PVIntegrand;
pub use smooth::{Beta, ExpPolyBlock, ExpPolySum, PolyTerm};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PvError {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("declared derivative order {declared} is below the required {required}")]
    InsufficientDerivatives { declared: u32, required: u32 },
    #[error("extrapolation residual {residual:.3e} exceeds {tolerance:.3e}")]
    NoConvergence { residual: f64, tolerance: f64 },
    #[error(transparent)]
    Numerics(#[from] holo_numerics::NumericsError),
    #[error("corpus: {0}")]
    Corpus(String),
}
