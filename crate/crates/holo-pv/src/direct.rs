//! Cutoff integrals over `{Φ > δ}` in polar coordinates and their
//! extrapolation to `δ → 0`.

use std::f64::consts::PI;

use holo_numerics::{gauss_legendre, weighted_lstsq, GaussRule};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::domain::{DeltaSchedule, PvDomain};
use crate::integrand::PVIntegrand;
use crate::PvError;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Tensor rule for cutoff integrals: trapezoid in every angle, Gauss
/// panels of fixed width in `ln r` for singular radii, Gauss–Legendre in
/// `r` for spectator radii.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectQuadrature {
    pub theta: usize,
    pub panel_width: f64,
    pub panel_nodes: usize,
    pub spectator_radial: usize,
    pub spectator_theta: usize,
}

impl Default for DirectQuadrature {
    fn default() -> Self {
        Self { theta: 16, panel_width: 1.0, panel_nodes: 8, spectator_radial: 12, spectator_theta: 16 }
    }
}

/// An extrapolated principal value.
#[derive(Debug, Clone, PartialEq)]
pub struct PvEstimate {
    pub value: Complex64,
    /// Standard error of the extrapolated constant from the fit residuals,
    /// or the refinement difference for the desingularized route.
    pub error: f64,
    /// `(δ, cutoff integral)` per schedule point.
    pub samples: Vec<(f64, Complex64)>,
    /// RMS fit residual.
    pub residual: f64,
    /// Number of fitted correction terms.
    pub terms: usize,
}

/// Largest power of `ln x` in the correction terms.
pub(crate) fn log_power(itg: &PVIntegrand) -> u32 {
    itg.logs.iter().sum::<u32>() + itg.m() as u32 - 1
}

/// Cancellation noise of a cutoff integral grows like `x^{2−i_max} |ln x|^K`
/// as the inner radius `x` shrinks; normalised to 1 at the largest cutoff.
fn roundoff_profile(itg: &PVIntegrand, xs: &[f64]) -> Vec<f64> {
    let p = itg.pole.iter().copied().max().unwrap_or(0).saturating_sub(2) as i32;
    let k = log_power(itg) as i32;
    let raw = |x: f64| x.powi(-p) * (1.0 + x.ln().abs()).powi(k);
    let top = raw(xs[0]);
    xs.iter().map(|&x| raw(x) / top).collect()
}

/// Lowest correction power and the cap on `p`-groups in [`extrapolate`].
const FIRST_POWER: u32 = 2;
const MAX_GROUPS: usize = 6;

/// Fits `c₀ + Σ_{p≥2, q≤q_max} c_{p,q} x^p (ln x)^q` and returns `c₀`.
/// Whole `p`-groups are used, as many as `len − 2` unknowns allow.
/// `sigma` gives relative noise levels per sample.
pub fn extrapolate(
    xs: &[f64],
    vals: &[Complex64],
    sigma: Option<&[f64]>,
    q_max: u32,
    fit_tol: f64,
) -> Result<(Complex64, f64, f64, usize), PvError> {
    let s = xs.len();
    let group = q_max as usize + 1;
    let groups = ((s.saturating_sub(2)) / group).min(MAX_GROUPS);
    if groups == 0 {
        return Err(PvError::Invalid(format!("{s} cutoffs cannot fit correction terms up to (ln x)^{q_max}")));
    }
    let design: Vec<Vec<f64>> = xs
        .iter()
        .map(|&x| {
            let lx = x.ln();
            let mut row = vec![1.0];
            for g in 0..groups {
                let p = FIRST_POWER as i32 + g as i32;
                for q in (0..=q_max).rev() {
                    row.push(x.powi(p) * lx.powi(q as i32));
                }
            }
            row
        })
        .collect();
    let re: Vec<f64> = vals.iter().map(|v| v.re).collect();
    let im: Vec<f64> = vals.iter().map(|v| v.im).collect();
    let fr = weighted_lstsq(&design, &re, sigma)?;
    let fi = weighted_lstsq(&design, &im, sigma)?;
    let cols = design[0].len();
    let dof = (s as f64 / (s - cols).max(1) as f64).sqrt();
    let rms = fr.residual_rms.hypot(fi.residual_rms);
    let error = fr.cov_diag[0].sqrt() * rms * dof;
    let scale = 1.0 + vals.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if rms > fit_tol * scale {
        return Err(PvError::NoConvergence { residual: rms, tolerance: fit_tol * scale });
    }
    Ok((Complex64::new(fr.coef[0], fi.coef[0]), error, rms, cols - 1))
}

/// Root of an increasing `g` on `(−∞, 0]`; `None` when `g(0) ≤ 0`.
fn increasing_root(mut g: impl FnMut(f64) -> f64) -> Option<f64> {
    let mut hi = 0.0;
    let mut ghi = g(hi);
    if ghi <= 0.0 {
        return None;
    }
    let mut lo = -1.0;
    let mut glo = g(lo);
    while glo > 0.0 {
        hi = lo;
        ghi = glo;
        lo *= 2.0;
        if lo < -1400.0 {
            return Some(lo);
        }
        glo = g(lo);
    }
    // Illinois false position
    let mut side = 0;
    for _ in 0..200 {
        let s = (lo * ghi - hi * glo) / (ghi - glo);
        let gs = g(s);
        if gs.abs() < 1e-15 || (hi - lo).abs() < 1e-15 {
            return Some(s);
        }
        if gs > 0.0 {
            hi = s;
            ghi = gs;
            if side == 1 {
                glo *= 0.5;
            }
            side = 1;
        } else {
            lo = s;
            glo = gs;
            if side == -1 {
                ghi *= 0.5;
            }
            side = -1;
        }
    }
    Some(0.5 * (lo + hi))
}

struct CutoffEngine<'a> {
    itg: &'a PVIntegrand,
    phi: &'a (dyn Fn(&[Complex64]) -> f64 + Sync),
    log_delta: f64,
    quad: DirectQuadrature,
    panel: GaussRule,
    thetas: Vec<f64>,
}

impl CutoffEngine<'_> {
    /// Integral over the singular radii `0..l`, outer coordinates fixed in `z`.
    fn radial(&self, l: usize, angles: &[f64], z: &mut [Complex64]) -> Complex64 {
        let c = l - 1;
        let theta = angles[c];
        let mut probe = z.to_vec();
        for q in 0..c {
            probe[q] = Complex64::from_polar(1.0, angles[q]);
        }
        let root = increasing_root(|s| {
            probe[c] = Complex64::from_polar(s.exp(), theta);
            (self.phi)(&probe).ln() - self.log_delta
        });
        let Some(s_min) = root else {
            return ZERO;
        };
        let panels = ((-s_min) / self.quad.panel_width).ceil().max(1.0) as usize;
        let width = -s_min / panels as f64;
        let mut acc = ZERO;
        for p in 0..panels {
            let a = s_min + p as f64 * width;
            for (&x, &w) in self.panel.nodes.iter().zip(&self.panel.weights) {
                let s = a + x * width;
                let r = s.exp();
                z[c] = Complex64::from_polar(r, theta);
                let factor = self.itg.pole_factor(c, r, theta) * (self.itg.log_factor(c, r) * r * r * w * width);
                let inner = if c == 0 { self.itg.beta.eval(z) } else { self.radial(c, angles, z) };
                acc += factor * inner;
            }
        }
        acc
    }
}

/// `∫_{Φ > δ} α` over the unit polydisc. `Φ` must increase along each
/// singular radius and vanish on the divisor.
pub fn cutoff_integral(
    itg: &PVIntegrand,
    phi: &(dyn Fn(&[Complex64]) -> f64 + Sync),
    delta: f64,
    quad: DirectQuadrature,
) -> Complex64 {
    let m = itg.m();
    let n = itg.spectators;
    let nt = quad.theta;
    let thetas: Vec<f64> = (0..nt).map(|k| 2.0 * PI * k as f64 / nt as f64).collect();
    let engine = CutoffEngine {
        itg,
        phi,
        log_delta: delta.ln(),
        quad,
        panel: gauss_legendre(quad.panel_nodes).mapped(0.0, 1.0),
        thetas,
    };
    let spectators = spectator_nodes(n, quad.spectator_radial, quad.spectator_theta);
    let tuples = nt.pow(m as u32);
    let mut z = vec![ZERO; m + n];
    let mut angles = vec![0.0; m];
    let mut acc = ZERO;
    for t in 0..tuples {
        let mut rest = t;
        for a in angles.iter_mut() {
            *a = engine.thetas[rest % nt];
            rest /= nt;
        }
        for (zs, ws) in &spectators {
            z[m..].copy_from_slice(zs);
            acc += engine.radial(m, &angles, &mut z) * *ws;
        }
    }
    acc * itg.orientation() * (2.0 * PI / nt as f64).powi(m as i32)
}

/// Tensor nodes on the spectator polydisc with weights for `dx dy`.
pub(crate) fn spectator_nodes(n: usize, radial: usize, angular: usize) -> Vec<(Vec<Complex64>, f64)> {
    let rule = gauss_legendre(radial).mapped(0.0, 1.0);
    let one: Vec<(Complex64, f64)> = rule
        .nodes
        .iter()
        .zip(&rule.weights)
        .flat_map(|(&r, &w)| {
            (0..angular).map(move |k| {
                let th = 2.0 * PI * k as f64 / angular as f64;
                (Complex64::from_polar(r, th), r * w * 2.0 * PI / angular as f64)
            })
        })
        .collect();
    let mut out = vec![(Vec::new(), 1.0)];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|(v, w)| one.iter().map(move |&(z, wz)| {
                let mut v2 = v.clone();
                v2.push(z);
                (v2, w * wz)
            }))
            .collect();
    }
    out
}

fn sweep(
    itg: &PVIntegrand,
    phi: &(dyn Fn(&[Complex64]) -> f64 + Sync),
    schedule: &DeltaSchedule,
    delta_power: f64,
    quad: DirectQuadrature,
    fit_tol: f64,
) -> Result<PvEstimate, PvError> {
    schedule.validate()?;
    let xs = schedule.xs();
    let vals: Vec<Complex64> =
        xs.par_iter().map(|&x| cutoff_integral(itg, phi, x.powf(delta_power), quad)).collect();
    let sigma = roundoff_profile(itg, &xs);
    let (value, error, residual, terms) = extrapolate(&xs, &vals, Some(&sigma), log_power(itg), fit_tol)?;
    let samples = xs.iter().map(|&x| x.powf(delta_power)).zip(vals).collect();
    Ok(PvEstimate { value, error, samples, residual, terms })
}

/// Default bound on the RMS fit residual relative to `1 + max|I(δ)|`.
pub const FIT_TOLERANCE: f64 = 1e-7;

/// `lim_{δ→0} ∫_{|f z^j| > δ} α`.
pub fn pv_direct(itg: &PVIntegrand, domain: &PvDomain, quad: DirectQuadrature) -> Result<PvEstimate, PvError> {
    if domain.j.len() != itg.m() || domain.j.iter().any(|&j| j == 0) {
        return Err(PvError::Invalid(format!("exclusion exponents {:?} do not fit m = {}", domain.j, itg.m())));
    }
    let j = domain.j.clone();
    let f_abs = domain.f_abs.clone();
    let phi = move |z: &[Complex64]| f_abs(z) * j.iter().zip(z).map(|(&e, zl)| zl.norm().powi(e as i32)).product::<f64>();
    sweep(itg, &phi, &domain.schedule, domain.lcm() as f64, quad, FIT_TOLERANCE)
}

/// `lim_{δ→0} ∫_{h > δ} α` for `h = u·|z^j|²` with `u > 0` smooth.
pub fn cutoff_by_defining_function(
    itg: &PVIntegrand,
    h: &(dyn Fn(&[Complex64]) -> f64 + Sync),
    j: &[u32],
    schedule: &DeltaSchedule,
    quad: DirectQuadrature,
) -> Result<PvEstimate, PvError> {
    if j.len() != itg.m() || j.iter().any(|&e| e == 0) {
        return Err(PvError::Invalid(format!("divisor exponents {j:?} do not fit m = {}", itg.m())));
    }
    let lcm = j.iter().fold(1, |a, &b| a / crate::domain::gcd(a, b) * b);
    sweep(itg, h, schedule, 2.0 * lcm as f64, quad, FIT_TOLERANCE)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn root_of_linear_function() {
        let s = increasing_root(|s| 2.0 * s + 9.0).unwrap();
        assert!((s + 4.5).abs() < 1e-13);
        assert!(increasing_root(|s| s - 1.0).is_none());
    }

    #[test]
    fn extrapolation_recovers_constant() {
        let xs: Vec<f64> = (0..12).map(|k| 0.2 * 0.5f64.powi(k)).collect();
        let vals: Vec<Complex64> = xs
            .iter()
            .map(|&x| Complex64::new(1.5 + 3.0 * x * x * x.ln() - x.powi(3), -2.0 + x * x))
            .collect();
        let (v, err, _, _) = extrapolate(&xs, &vals, None, 1, 1e-9).unwrap();
        assert!((v - Complex64::new(1.5, -2.0)).norm() < 1e-10, "{v}");
        assert!(err < 1e-8);
    }
}
