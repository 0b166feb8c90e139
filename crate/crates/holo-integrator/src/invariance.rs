use holo_graph::{assemble_integrand, EdgeKernel, GraphAssignment};
use holo_lattice::FakeDistance;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::result::{graph_integral, GraphIntegralResult};
use crate::schedule::CutoffSchedule;
use crate::strategy::{IntegrationStrategy, Pinning};
use crate::IntegratorError;

/// Two limits that should coincide, after `expected_factor` is applied to `b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub label: String,
    pub a: Complex64,
    pub b: Complex64,
    pub expected_factor: f64,
    pub discrepancy: f64,
    /// Three combined standard errors plus a roundoff floor.
    pub tolerance: f64,
    pub pass: bool,
}

impl Comparison {
    fn new(label: String, ra: &GraphIntegralResult, rb: &GraphIntegralResult, factor: f64) -> Self {
        let (a, b) = (ra.value, rb.value * factor);
        let scale = [ra, rb]
            .iter()
            .flat_map(|r| r.estimates.iter().map(|e| e.value.norm().max(e.abs_integral)))
            .fold(0.0, f64::max);
        let tolerance = 3.0 * ra.total_error().hypot(rb.total_error()) + 1e-12 * scale;
        let discrepancy = (a - b).norm();
        Self { label, a, b, expected_factor: factor, discrepancy, tolerance, pass: discrepancy <= tolerance }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvarianceReport {
    pub runs: Vec<GraphIntegralResult>,
    pub fake_distance: Vec<Comparison>,
    /// Present when the integrand is translation-invariant.
    pub pinning: Option<Comparison>,
    pub permutation: Comparison,
    pub flagged: bool,
}

/// Reversal of `0..v`, with `sgn(π)^n` as the expected density factor.
fn reversal(v: usize, n: usize) -> (Vec<usize>, f64) {
    let perm: Vec<usize> = (0..v).rev().collect();
    let parity = (v * v.saturating_sub(1) / 2) % 2;
    let sign = if parity == 1 && n % 2 == 1 { -1.0 } else { 1.0 };
    (perm, sign)
}

/// Fake-distance independence, pinned against unpinned sampling, and
/// vertex relabelling, each compared within three combined errors.
pub fn invariance_suite<K: EdgeKernel + Sync>(
    assignment: &GraphAssignment,
    kernel: &K,
    fds: &[FakeDistance],
    schedule: &CutoffSchedule,
    strategy: &IntegrationStrategy,
) -> Result<InvarianceReport, IntegratorError> {
    if fds.len() < 2 {
        return Err(IntegratorError::Invalid("invariance needs at least two fake distances".into()));
    }
    let itg = assemble_integrand(assignment, kernel)?;
    let runs = fds.iter().map(|fd| graph_integral(&itg, fd, schedule, strategy)).collect::<Result<Vec<_>, _>>()?;
    let fake_distance: Vec<Comparison> = runs[1..]
        .iter()
        .enumerate()
        .map(|(i, r)| Comparison::new(format!("fake distance 0 vs {}", i + 1), &runs[0], r, 1.0))
        .collect();
    let pinning = if itg.translation_invariant() {
        let on = graph_integral(&itg, &fds[0], schedule, &strategy.clone().with_pinning(Pinning::On))?;
        let off = graph_integral(&itg, &fds[0], schedule, &strategy.clone().with_pinning(Pinning::Off))?;
        Some(Comparison::new("pinned vs unpinned".into(), &on, &off, 1.0))
    } else {
        None
    };
    let (perm, sign) = reversal(assignment.graph.vertices, assignment.n);
    let relabelled = assignment.relabel(&perm);
    let itg2 = assemble_integrand(&relabelled, kernel)?;
    let permuted = graph_integral(&itg2, &fds[0], schedule, strategy)?;
    let permutation = Comparison::new("vertex reversal".into(), &runs[0], &permuted, sign);
    let flagged = fake_distance.iter().any(|c| !c.pass)
        || pinning.as_ref().is_some_and(|c| !c.pass)
        || !permutation.pass
        || runs.iter().any(|r| r.flagged);
    Ok(InvarianceReport { runs, fake_distance, pinning, permutation, flagged })
}
