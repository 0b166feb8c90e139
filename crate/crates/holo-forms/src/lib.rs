//! Exterior algebra generated by `dz̄_{v,i}`, one copy of `Cⁿ` per point
//! label `v`.
//!
//! Orientation: `dz ∧ dz̄ = −2i dx ∧ dy` per complex coordinate, and the
//! holomorphic top form of each point is paired so that the full density is
//! read off against `∏_{(v,i)} (dz_{v,i} ∧ dz̄_{v,i})`.

mod form;
mod kernel;

pub use form::{AntiholoGenerator, Monomial, MultiPointForm};
pub use kernel::{difference_minor, difference_top, GradedKernelValue};
