//! Weak form of `∂̄P = δ − ℋ` on a one-dimensional torus.
//!
//! By translation invariance the pairing of `P` with `∂̄`-derivatives of a
//! test function on `M × M` reduces to one integral over the displacement:
//! `∫_M c(u) · (−∂_ū α)(u) dA = α(0) − mean(α)`, where `c` is the
//! coefficient of `P`. The integral is taken over the centred fundamental
//! cell split into four triangles with apex at the singular point; the
//! radial Jacobian cancels the `1/u` singularity so a tensor Gauss rule
//! converges spectrally.

use holo_numerics::{gauss_legendre, pairwise_sum_complex};
use num_complex::Complex64;

use crate::{HeatError, LegDerivs, PropagatorKernel};

/// `α(u) = Σ a_k e^{i⟨μ_k, u⟩}` with `μ_k` given by integer coordinates in
/// the dual basis.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierTestForm {
    pub modes: Vec<(Vec<i64>, Complex64)>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeakCheck {
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub residual: f64,
}

fn dual_vector(kernel: &PropagatorKernel, k: &[i64]) -> Vec<f64> {
    let c: Vec<f64> = k.iter().map(|&v| v as f64).collect();
    kernel.lattice().dual().from_cell(&c)
}

/// Evaluates both sides of the weak equation with an `order × order` Gauss
/// rule on each triangle.
pub fn defining_equation_check(
    kernel: &PropagatorKernel,
    form: &FourierTestForm,
    order: usize,
) -> Result<WeakCheck, HeatError> {
    if kernel.n() != 1 {
        return Err(HeatError::Config("weak-equation check is implemented for n = 1".into()));
    }
    let mus: Vec<(Vec<f64>, Complex64)> = form.modes.iter().map(|(k, a)| (dual_vector(kernel, k), *a)).collect();
    let minus_dbar_alpha = |u: &[f64]| -> Complex64 {
        mus.iter()
            .map(|(mu, a)| {
                let phase = mu[0] * u[0] + mu[1] * u[1];
                let mu_c = Complex64::new(mu[0], mu[1]);
                -(a * Complex64::new(0.0, 0.5) * mu_c * Complex64::from_polar(1.0, phase))
            })
            .sum()
    };
    let rows = kernel.lattice().basis().rows();
    let (b1, b2) = (&rows[0], &rows[1]);
    let corner = |s1: f64, s2: f64| [0.5 * (s1 * b1[0] + s2 * b2[0]), 0.5 * (s1 * b1[1] + s2 * b2[1])];
    let corners = [corner(1.0, 1.0), corner(-1.0, 1.0), corner(-1.0, -1.0), corner(1.0, -1.0)];
    let rule = gauss_legendre(order).mapped(0.0, 1.0);
    let mut parts = Vec::with_capacity(4 * order * order);
    for e in 0..4 {
        let (pa, pb) = (corners[e], corners[(e + 1) % 4]);
        let det = (pa[0] * pb[1] - pa[1] * pb[0]).abs();
        for (&s, &ws) in rule.nodes.iter().zip(&rule.weights) {
            for (&tau, &wt) in rule.nodes.iter().zip(&rule.weights) {
                let u = [
                    s * ((1.0 - tau) * pa[0] + tau * pb[0]),
                    s * ((1.0 - tau) * pa[1] + tau * pb[1]),
                ];
                let c = kernel.coefficients_real(&u, &LegDerivs::none())?.coeffs[0];
                parts.push(c * minus_dbar_alpha(&u) * (ws * wt * s * det));
            }
        }
    }
    let lhs = pairwise_sum_complex(&parts);
    let alpha0: Complex64 = form.modes.iter().map(|(_, a)| *a).sum();
    let mean: Complex64 = form.modes.iter().filter(|(k, _)| k.iter().all(|&v| v == 0)).map(|(_, a)| *a).sum();
    let rhs = alpha0 - mean;
    Ok(WeakCheck { lhs, rhs, residual: (lhs - rhs).norm() })
}
