use std::f64::consts::PI;

use holo_forms::{difference_minor, GradedKernelValue, MultiPointForm};
use holo_lattice::{complex_to_real, Lattice};
use holo_numerics::{integrate_adaptive, upper_gamma_int, AdaptiveOptions};
use num_complex::Complex64;

use crate::conventions::{character_derivative, conj_component, conj_power, DBAR_STAR_SCALE};
use crate::heat::{displacement, truncation_radius};
use crate::HeatError;

/// How `∫₀^L` of the image sum is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeQuadrature {
    /// Adaptive Gauss–Kronrod in `ln t`.
    Adaptive,
    /// Termwise `∫₀^L t^{−m} e^{−a/t} dt = a^{1−m} Γ(m−1, a/L)`.
    ClosedForm,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropagatorConfig {
    /// Split point `L` between image and spectral parts; `None` picks the
    /// crossover `s²/8` with `s` the shortest lattice vector.
    pub split_l: Option<f64>,
    /// Largest total holomorphic derivative order.
    pub max_deriv: u32,
    pub quadrature: TimeQuadrature,
    /// Absolute bound on the omitted image and spectral terms together.
    pub tol: f64,
    pub adaptive: AdaptiveOptions,
}

impl Default for PropagatorConfig {
    fn default() -> Self {
        Self {
            split_l: None,
            max_deriv: 4,
            quadrature: TimeQuadrature::ClosedForm,
            tol: 1e-14,
            adaptive: AdaptiveOptions::default(),
        }
    }
}

/// Holomorphic multi-indices on the head (`∂_z`) and tail (`∂_w`) legs.
/// Missing trailing entries count as zero.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LegDerivs {
    pub head: Vec<u32>,
    pub tail: Vec<u32>,
}

impl LegDerivs {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn new(head: Vec<u32>, tail: Vec<u32>) -> Self {
        Self { head, tail }
    }

    pub fn order(&self) -> u32 {
        self.head.iter().sum::<u32>() + self.tail.iter().sum::<u32>()
    }

    /// Multi-index acting on `u = z − w`; `∂_w = −∂_u`.
    pub fn combined(&self, n: usize) -> Vec<u32> {
        (0..n).map(|j| self.head.get(j).copied().unwrap_or(0) + self.tail.get(j).copied().unwrap_or(0)).collect()
    }

    pub fn sign(&self) -> f64 {
        if self.tail.iter().sum::<u32>() % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }
}

/// Coefficients `cᵢ` of `Σᵢ cᵢ ωᵢ` with error accounting.
#[derive(Debug, Clone, PartialEq)]
pub struct PropagatorValue {
    pub coeffs: Vec<Complex64>,
    /// Certified bound on omitted image and spectral terms.
    pub truncation_bound: f64,
    /// Quadrature error estimate (zero for the closed-form route).
    pub quadrature_error: f64,
}

/// One representative of a pair `±μ` of nonzero dual vectors.
#[derive(Debug, Clone)]
struct SpectralMode {
    /// Coordinates in the dual basis.
    k: Vec<i32>,
    mu_bar: Vec<Complex64>,
    /// `−iμ̄ᵢ · e^{−L|μ|²/2} / (|μ|²/2) / covol`
    coef: Vec<Complex64>,
}

/// `P(z, w)` and its holomorphic derivatives on a flat torus.
#[derive(Debug, Clone)]
pub struct PropagatorKernel {
    lattice: Lattice,
    config: PropagatorConfig,
    split_l: f64,
    /// Image-sum radius and bound per total derivative order.
    image: Vec<(f64, f64)>,
    /// Lattice vectors within `max radius + ½ diameter`, flattened, sorted
    /// by norm; with the displacement reduced to the centred cell these
    /// contain every image inside the truncation radius.
    candidates: Vec<f64>,
    candidate_norms: Vec<f64>,
    /// Number of leading candidates needed per derivative order.
    candidate_cut: Vec<usize>,
    /// Nonzero dual vectors up to sign, sorted by norm.
    modes: Vec<SpectralMode>,
    /// Number of leading modes used and the tail bound, per derivative order.
    spectral: Vec<(usize, f64)>,
    max_k: i32,
}

impl PropagatorKernel {
    pub fn new(lattice: Lattice, config: PropagatorConfig) -> Result<Self, HeatError> {
        let n = lattice.n();
        let s = lattice.shortest_vector();
        let split_l = config.split_l.unwrap_or(s * s / 8.0);
        if n > 8 {
            return Err(HeatError::Config(format!("complex dimension {n} exceeds the supported maximum 8")));
        }
        if !(split_l > 0.0 && split_l.is_finite()) {
            return Err(HeatError::Config(format!("split point must be positive, got {split_l}")));
        }
        let tol = config.tol;
        let packing = lattice.injectivity_radius();
        let mut image = Vec::new();
        for o in 0..=config.max_deriv {
            let m = n as i32 + 1 + o as i32;
            // For a/L ≥ m the t-integrand is increasing on [0, L], so each
            // image term is at most (2π)^{−n} 2^{−o} L^{1−m} |y|^{1+o} e^{−|y|²/2L}.
            let pref = (2.0 * PI).powi(-(n as i32)) * 0.5f64.powi(o as i32) * split_l.powi(1 - m);
            let (r, b) = truncation_radius(&lattice, false, 1 + o, split_l, pref, 0.5 * tol)?;
            let r_min = (2.0 * m as f64 * split_l).sqrt() + 2.0 * packing;
            let (r, b) = if r >= r_min {
                (r, b)
            } else {
                let b = holo_numerics::lattice_gaussian_tail(2 * n, 1 + o, split_l, r_min, packing).map_or(b, |x| x * pref);
                (r_min, b)
            };
            image.push((r, b));
        }

        let half_diam = 0.5 * lattice.cell_diameter();
        let r_img = image.iter().map(|x| x.0).fold(0.0, f64::max);
        let shell = lattice.basis().vectors_within(r_img + half_diam);
        let norms: Vec<f64> = shell.iter().map(|v| v.iter().map(|x| x * x).sum::<f64>().sqrt()).collect();
        let candidate_cut = image.iter().map(|(r, _)| norms.partition_point(|&x| x <= r + half_diam)).collect();
        let candidate_norms = norms;
        let candidates: Vec<f64> = shell.into_iter().flatten().collect();

        // Spectral terms are bounded by |μ|^{1+o} 2^{−o} e^{−L|μ|²/2} / (|μ|²/2) / covol.
        // The image part gets half the tolerance; the spectral part splits the rest evenly
        // between an analytic bound beyond an enumeration radius and the exact tail inside it.
        let covol = lattice.covolume();
        let mu_min = lattice.dual().shortest_vector_norm();
        let mut r_spec: f64 = 0.0;
        let mut outer = Vec::new();
        for o in 0..=config.max_deriv {
            let pref = 2.0 * 0.5f64.powi(o as i32) / (mu_min * mu_min * covol);
            let (r, b) = truncation_radius(&lattice, true, 1 + o, 1.0 / split_l, pref, 0.25 * tol)?;
            r_spec = r_spec.max(r);
            outer.push(b);
        }
        let zero = vec![0.0; 2 * n];
        let mut found: Vec<(f64, f64, SpectralMode)> = Vec::new();
        let dual = lattice.dual();
        dual.for_each_near(&zero, r_spec, |mu| {
            let m2: f64 = mu.iter().map(|x| x * x).sum();
            let k: Vec<i32> = dual.cell_coords(mu).iter().map(|c| c.round() as i32).collect();
            let leading = k.iter().find(|&&v| v != 0).copied().unwrap_or(0);
            if leading > 0 {
                let weight = (-0.5 * split_l * m2).exp() / (0.5 * m2) / covol;
                let mu_bar: Vec<Complex64> = (0..n).map(|j| conj_component(mu, j)).collect();
                let coef = mu_bar.iter().map(|&b| character_derivative(b) * DBAR_STAR_SCALE * weight).collect();
                found.push((m2.sqrt(), weight, SpectralMode { k, mu_bar, coef }));
            }
        });
        found.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.2.k.cmp(&b.2.k)));
        let mut spectral = Vec::new();
        for (o, b_out) in outer.iter().enumerate() {
            let mags: Vec<f64> =
                found.iter().map(|(r, w, _)| 2.0 * r.powi(1 + o as i32) * 0.5f64.powi(o as i32) * w).collect();
            let mut tail = 0.0;
            let mut cut = mags.len();
            while cut > 0 && tail + mags[cut - 1] <= 0.25 * tol {
                tail += mags[cut - 1];
                cut -= 1;
            }
            spectral.push((cut, b_out + tail));
        }
        let used = spectral.iter().map(|s| s.0).max().unwrap_or(0);
        found.truncate(used);
        let max_k = found.iter().flat_map(|(_, _, m)| m.k.iter().map(|v| v.abs())).max().unwrap_or(0);
        let modes = found.into_iter().map(|(_, _, m)| m).collect();
        Ok(Self { lattice, config, split_l, image, candidates, candidate_norms, candidate_cut, modes, spectral, max_k })
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn config(&self) -> &PropagatorConfig {
        &self.config
    }

    /// Image radius for a total derivative order and the number of spectral modes.
    pub fn truncation_summary(&self, order: u32) -> (f64, usize) {
        (self.image[order as usize].0, self.spectral[order as usize].0)
    }

    pub fn split_l(&self) -> f64 {
        self.split_l
    }

    pub fn n(&self) -> usize {
        self.lattice.n()
    }

    fn check_derivs(&self, d: &LegDerivs) -> Result<Vec<u32>, HeatError> {
        let n = self.n();
        if d.head.len() > n || d.tail.len() > n {
            return Err(HeatError::Dimension { expected: n, got: d.head.len().max(d.tail.len()) });
        }
        if d.order() > self.config.max_deriv {
            return Err(HeatError::DerivativeOrder { requested: d.order(), max: self.config.max_deriv });
        }
        Ok(d.combined(n))
    }

    /// Coefficients of `∂_z^a ∂_w^b P` at displacement `u = x_z − x_w`.
    pub fn coefficients_real(&self, u: &[f64], derivs: &LegDerivs) -> Result<PropagatorValue, HeatError> {
        let alpha = self.check_derivs(derivs)?;
        if u.len() != self.lattice.real_dim() {
            return Err(HeatError::Dimension { expected: self.lattice.real_dim(), got: u.len() });
        }
        let rho2 = self.lattice.min_image_norm2(u);
        if rho2 < 1e-24 {
            return Err(HeatError::Coincident(rho2));
        }
        let mut v = self.accumulate(u, &alpha, false, 0.0)?;
        for c in &mut v.coeffs {
            *c *= derivs.sign();
        }
        Ok(v)
    }

    /// `∂_z^a ∂_w^b P(z, w)` as a form on the labels `head = 0`, `tail = 1`.
    pub fn eval(&self, z: &[Complex64], w: &[Complex64], derivs: &LegDerivs) -> Result<GradedKernelValue, HeatError> {
        let v = self.coefficients_real(&displacement(z, w), derivs)?;
        Ok(GradedKernelValue::from_minor_coefficients(0, 1, &v.coeffs))
    }

    /// Coefficients of `∂_z^a ∂_w^b P` restricted to `z = w`, defined as the
    /// limit of `∫_ε^∞`. With `eps = Some(ε)` the cutoff integral itself is
    /// returned.
    pub fn diagonal_coefficients(&self, derivs: &LegDerivs, eps: Option<f64>) -> Result<PropagatorValue, HeatError> {
        let alpha = self.check_derivs(derivs)?;
        if let Some(e) = eps {
            if !(e > 0.0 && e < self.split_l) {
                return Err(HeatError::Config(format!("cutoff {e} must lie in (0, L)")));
            }
        }
        let u = vec![0.0; self.lattice.real_dim()];
        let mut v = self.accumulate(&u, &alpha, true, eps.unwrap_or(0.0))?;
        for c in &mut v.coeffs {
            *c *= derivs.sign();
        }
        Ok(v)
    }

    /// `Δ*(∂_z^a ∂_w^b P)` at the point `z`, as a form on the label `point`.
    /// For `n ≥ 2` every `ωᵢ` pulls back to zero.
    pub fn diagonal_pullback(&self, z: &[Complex64], derivs: &LegDerivs, point: usize) -> Result<MultiPointForm, HeatError> {
        if z.len() != self.n() {
            return Err(HeatError::Dimension { expected: self.n(), got: z.len() });
        }
        let v = self.diagonal_coefficients(derivs, None)?;
        let n = self.n();
        let other = point + 1;
        let mut f = MultiPointForm::zero();
        for (i, c) in v.coeffs.iter().enumerate() {
            f = f.add(&difference_minor(point, other, n, i).scale(*c));
        }
        Ok(f.map_points(|_| point))
    }

    fn accumulate(&self, u: &[f64], alpha: &[u32], skip_origin: bool, eps: f64) -> Result<PropagatorValue, HeatError> {
        let n = self.n();
        let order: u32 = alpha.iter().sum();
        let (radius, img_bound) = self.image[order as usize];
        let m = n as u32 + 1 + order;
        let factor = (2.0 * PI).powi(-(n as i32)) * (-0.5f64).powi(order as i32);
        let l = self.split_l;

        let mut coeffs = vec![Complex64::new(0.0, 0.0); n];
        let mut quadrature_error = 0.0;
        let d = u.len();
        let uc = self.lattice.reduce_centered(u);
        let r2_max = radius * radius;
        // Candidates are sorted by norm; beyond |λ| > R + |u_c| no image is inside the radius.
        let stop = {
            let reach = radius + uc.iter().map(|x| x * x).sum::<f64>().sqrt();
            let cut = self.candidate_cut[order as usize];
            self.candidate_norms[..cut].partition_point(|&r| r <= reach)
        };
        let images = || {
            self.candidates[..stop * d].chunks_exact(d).filter_map(|lam| {
                let mut y = [0.0; 16];
                let mut r2 = 0.0;
                for k in 0..d {
                    y[k] = uc[k] - lam[k];
                    r2 += y[k] * y[k];
                }
                (r2 <= r2_max && !(skip_origin && r2 == 0.0)).then_some((y, 0.5 * r2))
            })
        };
        match self.config.quadrature {
            TimeQuadrature::ClosedForm => {
                for (y, a) in images() {
                    let mut k = upper_gamma_int(m - 1, a / l);
                    if eps > 0.0 {
                        k -= upper_gamma_int(m - 1, a / eps);
                    }
                    let p = conj_power(&y, alpha) * (factor * k * a.powi(1 - m as i32));
                    for (i, c) in coeffs.iter_mut().enumerate() {
                        *c += conj_component(&y, i) * p;
                    }
                }
            }
            TimeQuadrature::Adaptive => {
                // ȳᵢ ȳ^α for each image, with a = |y|²/2.
                let weights: Vec<(f64, Vec<Complex64>)> = images()
                    .map(|(y, a)| {
                        let p = conj_power(&y, alpha) * factor;
                        (a, (0..n).map(|i| conj_component(&y, i) * p).collect())
                    })
                    .collect();
                if !weights.is_empty() {
                    let a_min = weights.iter().map(|(a, _)| *a).fold(f64::INFINITY, f64::min);
                    let t_lo = (a_min / (60.0 + 4.0 * m as f64)).max(eps);
                    let f = |s: f64| {
                        let t = s.exp();
                        let mut out = vec![Complex64::new(0.0, 0.0); n];
                        for (a, w) in &weights {
                            let g = t.powi(1 - m as i32) * (-a / t).exp();
                            for (o, wi) in out.iter_mut().zip(w) {
                                *o += wi * g;
                            }
                        }
                        out
                    };
                    let r = integrate_adaptive(f, t_lo.ln(), l.ln(), self.config.adaptive)?;
                    coeffs = r.value;
                    quadrature_error = r.error;
                }
            }
        }

        let (used, spec_bound) = self.spectral[order as usize];
        let kmax = self.max_k;
        let width = (2 * kmax + 1) as usize;
        let dual_rows = self.lattice.dual().rows();
        // e^{i k ⟨d_j, u⟩} for every dual basis vector d_j and |k| ≤ kmax.
        let mut powers = vec![Complex64::new(0.0, 0.0); dual_rows.len() * width];
        for (j, d) in dual_rows.iter().enumerate() {
            let theta: f64 = d.iter().zip(&uc).map(|(a, b)| a * b).sum();
            for k in -kmax..=kmax {
                powers[j * width + (k + kmax) as usize] = Complex64::from_polar(1.0, k as f64 * theta);
            }
        }
        // The ±μ pair contributes cᵢ D (e^{iθ} − (−1)^{|α|} e^{−iθ}), with
        // D the derivative factor of μ.
        let even = order % 2 == 0;
        let mut phase_sum = vec![Complex64::new(0.0, 0.0); n];
        for mode in &self.modes[..used] {
            let mut e = Complex64::new(1.0, 0.0);
            for (j, &k) in mode.k.iter().enumerate() {
                if k != 0 {
                    e *= powers[j * width + (k + kmax) as usize];
                }
            }
            let mut f = if even { Complex64::new(0.0, 2.0 * e.im) } else { Complex64::new(2.0 * e.re, 0.0) };
            for (j, &aj) in alpha.iter().enumerate() {
                if aj > 0 {
                    f *= character_derivative(mode.mu_bar[j]).powu(aj);
                }
            }
            for (p, c) in phase_sum.iter_mut().zip(&mode.coef) {
                *p += f * c;
            }
        }
        for (c, p) in coeffs.iter_mut().zip(phase_sum) {
            *c += p;
        }
        Ok(PropagatorValue { coeffs, truncation_bound: img_bound + spec_bound, quadrature_error })
    }

    pub fn fingerprint(&self) -> String {
        let mut v = vec![self.split_l, self.config.tol, self.config.max_deriv as f64];
        v.push(match self.config.quadrature {
            TimeQuadrature::Adaptive => 0.0,
            TimeQuadrature::ClosedForm => 1.0,
        });
        let tag = format!("propagator/v1/{}", self.lattice.fingerprint());
        use sha2::{Digest, Sha256};
        let mut h = Sha256::new();
        h.update(tag.as_bytes());
        for x in v {
            h.update(x.to_bits().to_le_bytes());
        }
        hex::encode(h.finalize())
    }
}

/// Flat-space part `(n−1)! ūᵢ / (πⁿ |u|^{2n})` of the coefficients, for the
/// displacement `u` taken as given.
pub fn bm_singular_part(u: &[Complex64]) -> Result<Vec<Complex64>, HeatError> {
    let n = u.len();
    let x = complex_to_real(u);
    let r2: f64 = x.iter().map(|v| v * v).sum();
    if r2 == 0.0 {
        return Err(HeatError::Coincident(0.0));
    }
    let fact: f64 = (1..n).map(|k| k as f64).product();
    let c = fact / (PI.powi(n as i32) * r2.powi(n as i32));
    Ok(u.iter().map(|ui| ui.conj() * c).collect())
}
