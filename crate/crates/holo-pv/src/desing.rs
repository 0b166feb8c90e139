//! Taylor desingularization: `β = Σ_{r+s<i_l} z_l^r z̄_l^s g_{r,s} + K` in
//! every singular coordinate. The removed terms integrate to zero over
//! every rotation-invariant region, and `K z^{−i}` is bounded.

use std::f64::consts::PI;

use holo_numerics::{log_weighted_rule, GaussRule};
use num_complex::Complex64;

use crate::direct::{spectator_nodes, PvEstimate};
use crate::integrand::PVIntegrand;
use crate::smooth::{Beta, Derivative};
use crate::PvError;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesingQuadrature {
    pub theta: usize,
    /// Nodes of the log-weighted radial rule per singular coordinate.
    pub radial: usize,
    /// Radial nodes of the comparison rule that sets the error estimate.
    pub coarse_radial: usize,
    pub spectator_radial: usize,
    pub spectator_theta: usize,
    /// Central-difference step for closure evaluators.
    pub fd_step: f64,
}

impl Default for DesingQuadrature {
    fn default() -> Self {
        Self { theta: 16, radial: 24, coarse_radial: 18, spectator_radial: 12, spectator_theta: 16, fd_step: 1e-4 }
    }
}

/// One subtracted Taylor term `sign · ∏_{l} z_l^{r} z̄_l^{s} g(z_{l̂})`.
#[derive(Debug, Clone, PartialEq)]
pub struct RemovedTerm {
    /// `(l, r, s)` per coordinate in the term.
    pub orders: Vec<(usize, u32, u32)>,
    pub sign: f64,
    /// Angular frequency of the term times the pole in each listed coordinate;
    /// all nonzero, so the term integrates to zero over rotation-invariant regions.
    pub harmonics: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub removed: Vec<RemovedTerm>,
    /// `None` for exact derivatives, otherwise the finite-difference step.
    pub fd_step: Option<f64>,
    /// Largest `|K|` seen on the probe points.
    pub probe_max: f64,
    /// `K` vanished on every probe: the principal value is 0 without quadrature.
    pub vanishes: bool,
}

/// The absolutely integrable remainder of a [`PVIntegrand`].
#[derive(Clone)]
pub struct Desingularized {
    itg: PVIntegrand,
    terms: Vec<(RemovedTerm, Derivative, f64)>,
    pub certificate: Certificate,
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// All `(r, s)` with `r + s < i`.
fn low_orders(i: u32) -> Vec<(u32, u32)> {
    (0..i).flat_map(|t| (0..=t).map(move |s| (t - s, s))).collect()
}

fn probe_points(d: usize) -> Vec<Vec<Complex64>> {
    (0..12)
        .map(|k| {
            (0..d)
                .map(|l| {
                    let r = 0.05 + 0.9 * (((k * 7 + l * 3) % 11) as f64 / 10.0);
                    Complex64::from_polar(r, 0.37 + 1.3 * k as f64 + 0.9 * l as f64)
                })
                .collect()
        })
        .collect()
}

/// Builds the remainder evaluator; Taylor data come from exact derivatives
/// for exponential polynomials and from central differences otherwise.
pub fn desingularize(itg: &PVIntegrand, quad: &DesingQuadrature) -> Result<Desingularized, PvError> {
    let need = itg.pole.iter().copied().max().unwrap_or(0) + 2;
    if itg.derivative_order < need {
        return Err(PvError::InsufficientDerivatives { declared: itg.derivative_order, required: need });
    }
    let d = itg.dim();
    let singular: Vec<usize> = (0..itg.m()).filter(|&l| itg.pole[l] > 0).collect();
    let mut terms = Vec::new();
    for mask in 1u32..(1 << singular.len()) {
        let coords: Vec<usize> = singular.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, &l)| l).collect();
        let sign = if coords.len() % 2 == 1 { -1.0 } else { 1.0 };
        let mut combos: Vec<Vec<(usize, u32, u32)>> = vec![Vec::new()];
        for &l in &coords {
            combos = combos
                .into_iter()
                .flat_map(|c| {
                    low_orders(itg.pole[l]).into_iter().map(move |(r, s)| {
                        let mut c2 = c.clone();
                        c2.push((l, r, s));
                        c2
                    })
                })
                .collect();
        }
        for orders in combos {
            let deriv = itg.beta.derivative(&orders, d, quad.fd_step)?;
            let norm: f64 = orders.iter().map(|&(_, r, s)| factorial(r) * factorial(s)).product();
            let harmonics = orders
                .iter()
                .map(|&(l, r, s)| {
                    let i = itg.pole[l] as i64;
                    r as i64 - s as i64 + if itg.conjugate_pole { i } else { -i }
                })
                .collect();
            terms.push((RemovedTerm { orders, sign, harmonics }, deriv, sign / norm));
        }
    }
    let mut out = Desingularized {
        itg: itg.clone(),
        terms,
        certificate: Certificate {
            removed: Vec::new(),
            fd_step: matches!(itg.beta, Beta::Closure { .. }).then_some(quad.fd_step),
            probe_max: 0.0,
            vanishes: false,
        },
    };
    out.certificate.removed = out.terms.iter().map(|t| t.0.clone()).collect();
    if out.certificate.removed.iter().any(|t| t.harmonics.contains(&0)) {
        return Err(PvError::Invalid("a removed term carries zero angular frequency".into()));
    }
    let probes = probe_points(d);
    let scale = probes.iter().map(|z| itg.beta.eval(z).norm()).fold(0.0, f64::max);
    out.certificate.probe_max = probes.iter().map(|z| out.k_part(z).norm()).fold(0.0, f64::max);
    out.certificate.vanishes = out.certificate.probe_max <= 1e-13 * (1.0 + scale);
    Ok(out)
}

impl Desingularized {
    pub fn integrand(&self) -> &PVIntegrand {
        &self.itg
    }

    /// `K(z)`.
    pub fn k_part(&self, z: &[Complex64]) -> Complex64 {
        let mut acc = self.itg.beta.eval(z);
        let mut zero = z.to_vec();
        for (term, deriv, c) in &self.terms {
            zero.copy_from_slice(z);
            let mut mono = Complex64::new(*c, 0.0);
            for &(l, r, s) in &term.orders {
                zero[l] = ZERO;
                mono *= z[l].powu(r) * z[l].conj().powu(s);
            }
            acc += mono * deriv.eval(&zero);
        }
        acc
    }

    /// `K · z^{−i} · ln(z, k)`, bounded up to the logarithms.
    pub fn density(&self, z: &[Complex64]) -> Complex64 {
        let mut v = self.k_part(z);
        for l in 0..self.itg.m() {
            let (r, th) = z[l].to_polar();
            v *= self.itg.pole_factor(l, r, th) * self.itg.log_factor(l, r);
        }
        v
    }

    fn tensor_sum(&self, quad: &DesingQuadrature, radial: usize) -> (Complex64, usize) {
        let itg = &self.itg;
        let m = itg.m();
        let nt = quad.theta;
        let rules: Vec<GaussRule> = itg.logs.iter().map(|&k| log_weighted_rule(k, radial)).collect();
        // per coordinate: (z_l, weight including r dr dθ, pole and log factors)
        let per_coord: Vec<Vec<(Complex64, Complex64)>> = (0..m)
            .map(|l| {
                let k = itg.logs[l] as i32;
                let mut v = Vec::new();
                for (&r, &w) in rules[l].nodes.iter().zip(&rules[l].weights) {
                    for t in 0..nt {
                        let th = 2.0 * PI * t as f64 / nt as f64;
                        let weight = w * (-2.0f64).powi(k) * r * 2.0 * PI / nt as f64;
                        v.push((Complex64::from_polar(r, th), itg.pole_factor(l, r, th) * weight));
                    }
                }
                v
            })
            .collect();
        let spectators = spectator_nodes(itg.spectators, quad.spectator_radial, quad.spectator_theta);
        let sizes: Vec<usize> = per_coord.iter().map(Vec::len).collect();
        let total: usize = sizes.iter().product();
        let mut z = vec![ZERO; itg.dim()];
        let mut acc = ZERO;
        let mut evals = 0;
        for idx in 0..total {
            let mut rest = idx;
            let mut w = Complex64::new(1.0, 0.0);
            for l in 0..m {
                let (zl, wl) = per_coord[l][rest % sizes[l]];
                rest /= sizes[l];
                z[l] = zl;
                w *= wl;
            }
            for (zs, ws) in &spectators {
                z[m..].copy_from_slice(zs);
                acc += self.k_part(&z) * w * *ws;
                evals += 1;
            }
        }
        (acc * itg.orientation(), evals)
    }

    /// Tensor quadrature of `K z^{−i} ln(z,k) ∏ dz∧dz̄`; the error is the
    /// difference from a rule with fewer radial nodes.
    pub fn integrate(&self, quad: &DesingQuadrature) -> PvEstimate {
        if self.certificate.vanishes {
            return PvEstimate { value: ZERO, error: 0.0, samples: Vec::new(), residual: 0.0, terms: 0 };
        }
        let (fine, _) = self.tensor_sum(quad, quad.radial);
        let (coarse, _) = self.tensor_sum(quad, quad.coarse_radial);
        PvEstimate { value: fine, error: (fine - coarse).norm(), samples: Vec::new(), residual: 0.0, terms: self.terms.len() }
    }
}
