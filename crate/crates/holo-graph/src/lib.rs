//! Directed graphs with holomorphic vertex densities and the assembly of
//! their integrands over configurations of points on a flat torus.

mod assignment;
mod density;
mod graph;
mod integrand;

pub use assignment::{Diagnostic, GraphAssignment};
pub use density::{LagrangianDensity, VertexCoefficient};
pub use graph::{degree_selection, degree_selection_for, DirectedGraph, End, HalfEdge, TypeVerdict};
pub use integrand::{assemble_integrand, EdgeKernel, GraphIntegrand};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("invalid assignment: {0}")]
    Invalid(Diagnostic),
    #[error("edge {edge} joins coincident points")]
    Coincident { edge: usize },
    #[error("expected {expected} points, got {got}")]
    PointCount { expected: usize, got: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error(transparent)]
    Kernel(#[from] holo_heat::HeatError),
}
