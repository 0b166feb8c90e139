//! Exact jets of Kähler normal coordinates and of the model heat kernel,
//! with the weight filtration used for Getzler rescaling.
//!
//! All arithmetic is over `ℚ(i)`; nothing here rounds.

pub mod coeff;
mod jet;
pub mod matrix;
mod metric;
mod rescale;
mod transport;

pub use coeff::Coeff;
pub use jet::{Jet, MAX_ORDER};
pub use matrix::JetMatrix;
pub use metric::{
    eikonal_residual, eikonal_solve, frame_residual, kahler_normal_residual, normal_frame_gauge, transformed_metric,
    HermitianJet, MetricJet, Violation,
};
pub use rescale::{RescalableExpression, TermKey};
pub use transport::{
    contraction_d, getzler_decomposition, heat_residual_check, laplacian, model_transport_solve, nabla, nabla_bar,
    radial, FormJet, HeatCoefficientJet, HeatResidual, ModelData,
};

use thiserror::Error;

/// Default truncation order.
pub const DEFAULT_ORDER: u32 = 6;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum JetError {
    #[error("order {requested} exceeds the available order {available}")]
    OrderOverflow { requested: u32, available: u32 },
    #[error("constant term is not invertible")]
    NonUnit,
    #[error("substituted jet {index} does not vanish at the origin")]
    NonzeroConstant { index: usize },
    #[error("shape mismatch: expected {expected}, got {got}")]
    Shape { expected: usize, got: usize },
    #[error("inconsistent linear solve at order {order}")]
    Inconsistent { order: u32 },
    #[error("linear part of the map is not invertible")]
    NonInvertibleLinear,
    #[error("matrix jet is not Hermitian")]
    NotHermitian,
    #[error("constant term is not positive definite or not the identity")]
    NotPositive,
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("parse error: {0}")]
    Parse(String),
}
