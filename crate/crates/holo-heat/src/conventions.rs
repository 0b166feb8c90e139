//! Normalisations shared by every kernel in this crate.
//!
//! Real coordinates are `x = (Re z₁, Im z₁, …)`; the metric `g_{ij̄} = ½δ_{ij}`
//! makes the Riemannian norm the Euclidean norm of `x`.
//!
//! * Laplacian on functions: `Δ = −2 Σ ∂_{zᵢ}∂_{z̄ᵢ} = −½ ∇²`. The heat
//!   equation `(∂_t + Δ)H = 0` is solved by `(2πt)^{−n} e^{−|x|²/2t}`, whose
//!   total mass over `R^{2n}` is 1.
//! * Adjoint: `∂̄* = −2 Σ ι_{∂/∂z̄ᵢ} ∂_{zᵢ}` acting on the head point.
//! * Characters: with `μ_j = μ_{2j} + iμ_{2j+1}`,
//!   `⟨μ, x⟩ = Re Σ μ̄_j z_j` and `∂_{z_j} e^{i⟨μ,x⟩} = (i μ̄_j / 2) e^{i⟨μ,x⟩}`.
//! * Gaussian derivatives: `∂_{u_j} e^{−|u|²/2t} = −(ū_j / 2t) e^{−|u|²/2t}`.
//! * Orientation: `dz ∧ dz̄ = −2i dx ∧ dy`.
//! * Propagator: `P = ∫₀^∞ ∂̄* H_t dt`, so on `C/(Z + iZ)` its leading part is
//!   `1 / (π (z − w))`.

use num_complex::Complex64;

pub const DBAR_STAR_SCALE: f64 = -2.0;

/// Per-coordinate factor of `∂_{z_j}` on the character `e^{i⟨μ,x⟩}`.
pub fn character_derivative(mu_bar_j: Complex64) -> Complex64 {
    Complex64::new(0.0, 0.5) * mu_bar_j
}

/// `dz ∧ dz̄` in units of `dx ∧ dy`.
pub fn orientation() -> Complex64 {
    Complex64::new(0.0, -2.0)
}

/// `v̄_j` for a real-coordinate vector.
#[inline]
pub fn conj_component(v: &[f64], j: usize) -> Complex64 {
    Complex64::new(v[2 * j], -v[2 * j + 1])
}

/// `Π_j v̄_j^{α_j}`.
#[inline]
pub fn conj_power(v: &[f64], alpha: &[u32]) -> Complex64 {
    alpha.iter().enumerate().fold(Complex64::new(1.0, 0.0), |acc, (j, &a)| {
        if a == 0 {
            acc
        } else {
            acc * conj_component(v, j).powu(a)
        }
    })
}
