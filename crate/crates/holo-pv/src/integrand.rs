use num_complex::Complex64;

use crate::smooth::Beta;
use crate::PvError;

/// `z^{−i} · ∏_l (ln|z_l|²)^{k_l} · β · ∏ dz ∧ dz̄` on the closed unit
/// polydisc in `C^{m+n}`; the first `m` coordinates are singular.
///
/// With `conjugate_pole` the factor `z^{−i}` is replaced by `z̄^{−i}`.
#[derive(Debug, Clone)]
pub struct PVIntegrand {
    pub name: String,
    pub pole: Vec<u32>,
    pub logs: Vec<u32>,
    pub spectators: usize,
    pub beta: Beta,
    /// Order to which `β` has bounded derivatives.
    pub derivative_order: u32,
    pub conjugate_pole: bool,
}

impl PVIntegrand {
    pub fn new(name: impl Into<String>, pole: Vec<u32>, logs: Vec<u32>, spectators: usize, beta: Beta) -> Result<Self, PvError> {
        if pole.len() != logs.len() {
            return Err(PvError::Invalid(format!("pole has {} entries, logs {}", pole.len(), logs.len())));
        }
        if pole.is_empty() {
            return Err(PvError::Invalid("at least one singular coordinate is required".into()));
        }
        if let Beta::Closure { dim, .. } = &beta {
            if *dim != pole.len() + spectators {
                return Err(PvError::Invalid(format!("β has {dim} variables, expected {}", pole.len() + spectators)));
            }
        }
        let derivative_order = pole.iter().copied().max().unwrap_or(0) + 2;
        Ok(Self { name: name.into(), pole, logs, spectators, beta, derivative_order, conjugate_pole: false })
    }

    pub fn with_derivative_order(mut self, order: u32) -> Self {
        self.derivative_order = order;
        self
    }

    pub fn m(&self) -> usize {
        self.pole.len()
    }

    pub fn dim(&self) -> usize {
        self.pole.len() + self.spectators
    }

    /// Integrand whose principal value is the complex conjugate of this one's.
    pub fn conjugate(&self) -> Self {
        let sign = if self.dim() % 2 == 0 { 1.0 } else { -1.0 };
        Self {
            name: format!("conj({})", self.name),
            beta: self.beta.conj_scaled(Complex64::new(sign, 0.0)),
            conjugate_pole: !self.conjugate_pole,
            ..self.clone()
        }
    }

    /// Same singularity data with `β` replaced.
    pub fn with_beta(&self, beta: Beta) -> Self {
        Self { beta, ..self.clone() }
    }

    /// `(−2i)^{m+n}`: the density of `∏ dz ∧ dz̄` against Lebesgue measure.
    pub(crate) fn orientation(&self) -> Complex64 {
        Complex64::new(0.0, -2.0).powu(self.dim() as u32)
    }

    /// `z_l^{−i_l}` or its conjugate at polar point `(r, θ)`.
    pub(crate) fn pole_factor(&self, l: usize, r: f64, theta: f64) -> Complex64 {
        let i = self.pole[l] as i32;
        let phase = if self.conjugate_pole { i as f64 * theta } else { -(i as f64) * theta };
        Complex64::from_polar(r.powi(-i), phase)
    }

    /// `(ln r²)^{k_l}`.
    pub(crate) fn log_factor(&self, l: usize, r: f64) -> f64 {
        (2.0 * r.ln()).powi(self.logs[l] as i32)
    }
}
