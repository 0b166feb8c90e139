//! Gamma-function helpers and certified tail bounds for Gaussian sums over
//! lattices.

use statrs::function::gamma as sg;

use crate::NumericsError;

pub fn gamma(x: f64) -> f64 {
    sg::gamma(x)
}

/// Upper incomplete gamma `Γ(k, x)` for integer `k ≥ 1`, in closed form
/// `(k−1)! e^{−x} Σ_{j<k} x^j/j!`.
pub fn upper_gamma_int(k: u32, x: f64) -> f64 {
    assert!(k >= 1, "integer upper gamma needs k >= 1");
    let mut term = 1.0;
    let mut sum = 1.0;
    for j in 1..k {
        term *= x / j as f64;
        sum += term;
    }
    let fact: f64 = (1..k).map(f64::from).product();
    fact * (-x).exp() * sum
}

/// Closed form of `∫₀^∞ e^{−u/2t} t^{−m} dt = Γ(m−1)(u/2)^{1−m}`.
pub fn schwinger_moment(m: u32, u: f64) -> Result<f64, NumericsError> {
    if m < 2 {
        return Err(NumericsError::Domain(format!("moment order {m} must be at least 2")));
    }
    if !(u > 0.0) || !u.is_finite() {
        return Err(NumericsError::Domain(format!("moment argument {u} must be positive")));
    }
    let fact: f64 = (1..m - 1).map(f64::from).product();
    Ok(fact * (0.5 * u).powi(1 - m as i32))
}

fn upper_gamma(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return sg::gamma(a);
    }
    sg::gamma_ur(a, x) * sg::gamma(a)
}

/// Bound on `Σ_{y ∈ x+Λ, |y| ≥ radius} |y|^p e^{−|y|²/(2v)}` in `d` real
/// dimensions, for a lattice whose points are at least `2·packing` apart.
///
/// Each point owns a disjoint ball of radius `packing`; on that ball the
/// summand is dominated by its value at the inner radius, which turns the
/// sum into a radial integral. Returns `None` when `radius` is still inside
/// the region where the summand increases.
pub fn lattice_gaussian_tail(d: usize, p: u32, v: f64, radius: f64, packing: f64) -> Option<f64> {
    let a = radius - 2.0 * packing;
    if a < (p as f64 * v).sqrt() || a < 0.0 {
        return None;
    }
    let rho = packing;
    let mut total = 0.0;
    let mut binom = 1.0;
    for q in 0..d {
        if q > 0 {
            binom *= (d - q) as f64 / q as f64;
        }
        let m = (p as usize + q) as f64;
        let s = 0.5 * (m + 1.0);
        let moment = 0.5 * (2.0 * v).powf(s) * upper_gamma(s, a * a / (2.0 * v));
        total += binom * rho.powi((d - 1 - q) as i32) * moment;
    }
    Some(d as f64 / rho.powi(d as i32) * total)
}

/// Smallest radius (on a geometric search) at which `prefactor` times the
/// tail bound is below `tol`, with the bound itself.
pub fn tail_radius(d: usize, p: u32, v: f64, packing: f64, prefactor: f64, tol: f64) -> (f64, f64) {
    let mut r = 2.0 * packing + (p.max(1) as f64 * v).sqrt();
    loop {
        if let Some(b) = lattice_gaussian_tail(d, p, v, r, packing) {
            if prefactor * b <= tol {
                return (r, prefactor * b);
            }
        }
        r += 0.25 * (v.sqrt() + packing);
    }
}
