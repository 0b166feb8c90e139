use holo_forms::GradedKernelValue;
use holo_lattice::{complex_to_real, Lattice};
use holo_numerics::{lattice_gaussian_tail, tail_radius};
use num_complex::Complex64;

use crate::conventions::{conj_component, DBAR_STAR_SCALE};
use crate::{unit_ball_volume, HeatError, MAX_TERMS};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeatMethod {
    /// `(2πt)^{−n} Σ_λ e^{−|u−λ|²/2t}`
    Image,
    /// `covol^{−1} Σ_μ e^{−t|μ|²/2} e^{i⟨μ,u⟩}`
    Spectral,
    /// Image sum below the crossover time, spectral above.
    Auto,
}

/// A truncated lattice sum with a certified bound on the omitted terms.
#[derive(Debug, Clone, PartialEq)]
pub struct Truncated<T> {
    pub value: T,
    pub bound: f64,
    pub terms: usize,
}

/// Radius and bound for `prefactor · Σ_{|y|>R} |y|^p e^{−|y|²/2v}` over a
/// translate of the lattice (or of its dual).
pub(crate) fn truncation_radius(
    lattice: &Lattice,
    dual: bool,
    p: u32,
    v: f64,
    prefactor: f64,
    tol: f64,
) -> Result<(f64, f64), HeatError> {
    let d = lattice.real_dim();
    let (packing, covol) = if dual {
        let b = lattice.dual();
        (0.5 * b.shortest_vector_norm(), b.det_abs())
    } else {
        (lattice.injectivity_radius(), lattice.covolume())
    };
    let r_max = (MAX_TERMS * covol / unit_ball_volume(d)).powf(1.0 / d as f64) - 2.0 * packing;
    let probe = lattice_gaussian_tail(d, p, v, r_max, packing);
    if probe.map_or(true, |b| !(prefactor * b <= tol)) {
        return Err(HeatError::TruncationInfeasible(format!(
            "tolerance {tol:e} not reached within {MAX_TERMS:e} lattice terms"
        )));
    }
    Ok(tail_radius(d, p, v, packing, prefactor, tol))
}

#[derive(Debug, Clone)]
pub struct HeatKernelEval {
    lattice: Lattice,
    tol: f64,
    crossover_t: f64,
}

impl HeatKernelEval {
    pub fn new(lattice: Lattice) -> Self {
        let s = lattice.shortest_vector();
        Self { lattice, tol: 1e-14, crossover_t: s * s / 8.0 }
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    pub fn crossover_t(&self) -> f64 {
        self.crossover_t
    }

    fn resolve(&self, method: HeatMethod, t: f64) -> HeatMethod {
        match method {
            HeatMethod::Auto if t <= self.crossover_t => HeatMethod::Image,
            HeatMethod::Auto => HeatMethod::Spectral,
            m => m,
        }
    }

    fn check(&self, u: &[f64], t: f64) -> Result<(), HeatError> {
        if !(t > 0.0) {
            return Err(HeatError::NonPositiveTime(t));
        }
        if u.len() != self.lattice.real_dim() {
            return Err(HeatError::Dimension { expected: self.lattice.real_dim(), got: u.len() });
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(HeatError::TruncationInfeasible(format!("tolerance {} is not a positive number", self.tol)));
        }
        Ok(())
    }

    fn radius(&self, dual: bool, p: u32, v: f64, prefactor: f64) -> Result<(f64, f64), HeatError> {
        truncation_radius(&self.lattice, dual, p, v, prefactor, self.tol)
    }

    /// Scalar coefficient of `H_t` at displacement `u = x_z − x_w`.
    pub fn scalar_real(&self, u: &[f64], t: f64, method: HeatMethod) -> Result<Truncated<f64>, HeatError> {
        self.check(u, t)?;
        let n = self.lattice.n();
        match self.resolve(method, t) {
            HeatMethod::Image => {
                let pref = (2.0 * std::f64::consts::PI * t).powi(-(n as i32));
                let (r, bound) = self.radius(false, 0, t, pref)?;
                let mut sum = 0.0;
                let mut terms = 0;
                self.lattice.basis().for_each_near(u, r, |lam| {
                    let y2: f64 = u.iter().zip(lam).map(|(a, b)| (a - b) * (a - b)).sum();
                    sum += (-y2 / (2.0 * t)).exp();
                    terms += 1;
                });
                Ok(Truncated { value: pref * sum, bound, terms })
            }
            _ => {
                let pref = 1.0 / self.lattice.covolume();
                let (r, bound) = self.radius(true, 0, 1.0 / t, pref)?;
                let zero = vec![0.0; u.len()];
                let mut sum = 0.0;
                let mut terms = 0;
                self.lattice.dual().for_each_near(&zero, r, |mu| {
                    let m2: f64 = mu.iter().map(|x| x * x).sum();
                    let phase: f64 = mu.iter().zip(u).map(|(a, b)| a * b).sum();
                    sum += (-0.5 * t * m2).exp() * phase.cos();
                    terms += 1;
                });
                Ok(Truncated { value: pref * sum, bound, terms })
            }
        }
    }

    /// Spectral coefficients `e^{−t|μ|²/2} / covol` for `|μ| ≤ radius`,
    /// with the dual vectors.
    pub fn spectral_modes(&self, t: f64) -> Result<Truncated<Vec<(Vec<f64>, f64)>>, HeatError> {
        self.check(&vec![0.0; self.lattice.real_dim()], t)?;
        let pref = 1.0 / self.lattice.covolume();
        let (r, bound) = self.radius(true, 0, 1.0 / t, pref)?;
        let zero = vec![0.0; self.lattice.real_dim()];
        let mut modes = Vec::new();
        self.lattice.dual().for_each_near(&zero, r, |mu| {
            let m2: f64 = mu.iter().map(|x| x * x).sum();
            modes.push((mu.to_vec(), pref * (-0.5 * t * m2).exp()));
        });
        let terms = modes.len();
        Ok(Truncated { value: modes, bound, terms })
    }

    /// Coefficients `cᵢ` of `∂̄* H_t = Σᵢ cᵢ ωᵢ` at displacement `u`.
    pub fn dbar_star_real(&self, u: &[f64], t: f64, method: HeatMethod) -> Result<Truncated<Vec<Complex64>>, HeatError> {
        self.check(u, t)?;
        let n = self.lattice.n();
        let mut c = vec![Complex64::new(0.0, 0.0); n];
        match self.resolve(method, t) {
            HeatMethod::Image => {
                // −2 ∂_{uᵢ} of the Gaussian gives ȳᵢ / t.
                let pref = (2.0 * std::f64::consts::PI * t).powi(-(n as i32)) / t;
                let (r, bound) = self.radius(false, 1, t, pref)?;
                let mut terms = 0;
                let mut y = vec![0.0; u.len()];
                self.lattice.basis().for_each_near(u, r, |lam| {
                    for ((yi, a), b) in y.iter_mut().zip(u).zip(lam) {
                        *yi = a - b;
                    }
                    let g = (-y.iter().map(|v| v * v).sum::<f64>() / (2.0 * t)).exp();
                    for (i, ci) in c.iter_mut().enumerate() {
                        *ci += conj_component(&y, i) * g;
                    }
                    terms += 1;
                });
                Ok(Truncated { value: c.into_iter().map(|v| v * pref).collect(), bound, terms })
            }
            _ => {
                let pref = 1.0 / self.lattice.covolume();
                let (r, bound) = self.radius(true, 1, 1.0 / t, pref)?;
                let zero = vec![0.0; u.len()];
                let mut terms = 0;
                self.lattice.dual().for_each_near(&zero, r, |mu| {
                    let m2: f64 = mu.iter().map(|x| x * x).sum();
                    let phase: f64 = mu.iter().zip(u).map(|(a, b)| a * b).sum();
                    let e = Complex64::from_polar((-0.5 * t * m2).exp(), phase);
                    for (i, ci) in c.iter_mut().enumerate() {
                        let d = crate::conventions::character_derivative(conj_component(mu, i));
                        *ci += d * e * DBAR_STAR_SCALE;
                    }
                    terms += 1;
                });
                Ok(Truncated { value: c.into_iter().map(|v| v * pref).collect(), bound, terms })
            }
        }
    }

    /// `H_t(z, w)` as a form on the labels `head = 0`, `tail = 1`.
    pub fn heat_eval(
        &self,
        z: &[Complex64],
        w: &[Complex64],
        t: f64,
        method: HeatMethod,
    ) -> Result<Truncated<GradedKernelValue>, HeatError> {
        let u = displacement(z, w);
        let s = self.scalar_real(&u, t, method)?;
        let v = GradedKernelValue::from_top_coefficient(0, 1, self.lattice.n(), Complex64::new(s.value, 0.0));
        Ok(Truncated { value: v, bound: s.bound, terms: s.terms })
    }

    /// `∂̄* H_t(z, w)` as a form on the labels `head = 0`, `tail = 1`.
    pub fn dbar_star_heat(
        &self,
        z: &[Complex64],
        w: &[Complex64],
        t: f64,
        method: HeatMethod,
    ) -> Result<Truncated<GradedKernelValue>, HeatError> {
        let u = displacement(z, w);
        let s = self.dbar_star_real(&u, t, method)?;
        let mut v = GradedKernelValue::from_minor_coefficients(0, 1, &s.value);
        v.dt = true;
        Ok(Truncated { value: v, bound: s.bound, terms: s.terms })
    }
}

pub(crate) fn displacement(z: &[Complex64], w: &[Complex64]) -> Vec<f64> {
    complex_to_real(z).iter().zip(complex_to_real(w)).map(|(a, b)| a - b).collect()
}
