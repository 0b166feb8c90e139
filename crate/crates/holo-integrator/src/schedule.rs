use serde::{Deserialize, Serialize};

use crate::IntegratorError;

/// Geometric cutoffs `ε_k = eps_max · ratio^k` for `k < count`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CutoffSchedule {
    pub eps_max: f64,
    pub ratio: f64,
    pub count: usize,
}

impl Default for CutoffSchedule {
    fn default() -> Self {
        Self { eps_max: 0.1, ratio: 0.5, count: 6 }
    }
}

impl CutoffSchedule {
    pub fn values(&self) -> Vec<f64> {
        (0..self.count).map(|k| self.eps_max * self.ratio.powi(k as i32)).collect()
    }

    pub fn validate(&self) -> Result<(), IntegratorError> {
        if !(self.eps_max > 0.0 && self.ratio > 0.0 && self.ratio < 1.0) {
            return Err(IntegratorError::Invalid(format!("schedule {self:?} is not strictly decreasing and positive")));
        }
        if self.count < 4 {
            return Err(IntegratorError::Invalid(format!("schedule has {} cutoffs, at least 4 are needed", self.count)));
        }
        Ok(())
    }
}

/// Three-term models for the approach of the cutoff integral to its limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExtrapolationModel {
    /// `c₀ + c₁√ε + c₂ε`
    SqrtEps,
    /// `c₀ + c₁ ε ln ε + c₂ε`
    EpsLogEps,
}

impl ExtrapolationModel {
    pub const ALL: [ExtrapolationModel; 2] = [ExtrapolationModel::SqrtEps, ExtrapolationModel::EpsLogEps];

    pub fn basis(&self, eps: f64) -> [f64; 3] {
        match self {
            ExtrapolationModel::SqrtEps => [1.0, eps.sqrt(), eps],
            ExtrapolationModel::EpsLogEps => [1.0, eps * eps.ln(), eps],
        }
    }
}
