use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

type ScalarFn = Arc<dyn Fn(&[Complex64]) -> f64 + Send + Sync>;

/// Geometric cutoff schedule in the reduced variable `x = δ^{1/(scale·L)}`
/// (`L` the lcm of the exclusion exponents).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaSchedule {
    pub x_max: f64,
    pub ratio: f64,
    pub count: usize,
}

impl Default for DeltaSchedule {
    fn default() -> Self {
        Self { x_max: 0.2, ratio: 0.7, count: 20 }
    }
}

impl DeltaSchedule {
    pub fn xs(&self) -> Vec<f64> {
        (0..self.count).map(|s| self.x_max * self.ratio.powi(s as i32)).collect()
    }

    pub fn validate(&self) -> Result<(), crate::PvError> {
        if !(self.x_max > 0.0 && self.x_max < 1.0 && self.ratio > 0.0 && self.ratio < 1.0) {
            return Err(crate::PvError::Invalid(format!("schedule {self:?} is not strictly decreasing in (0, 1)")));
        }
        if self.count < 4 {
            return Err(crate::PvError::Invalid("schedule needs at least 4 cutoffs".into()));
        }
        Ok(())
    }
}

/// The region `|f · z^j| > δ` inside the unit polydisc.
#[derive(Clone)]
pub struct PvDomain {
    pub name: String,
    pub j: Vec<u32>,
    /// `|f|`; must stay bounded away from zero on the polydisc.
    pub f_abs: ScalarFn,
    pub schedule: DeltaSchedule,
}

impl fmt::Debug for PvDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PvDomain").field("name", &self.name).field("j", &self.j).field("schedule", &self.schedule).finish()
    }
}

impl PvDomain {
    /// `j = (1, …, 1)`, `f ≡ 1`.
    pub fn standard(m: usize) -> Self {
        Self::with_exponents(vec![1; m])
    }

    pub fn with_exponents(j: Vec<u32>) -> Self {
        Self { name: format!("j={j:?}, f=1"), j, f_abs: Arc::new(|_| 1.0), schedule: DeltaSchedule::default() }
    }

    pub fn with_scaling(mut self, name: &str, f_abs: impl Fn(&[Complex64]) -> f64 + Send + Sync + 'static) -> Self {
        self.name = format!("j={:?}, f={name}", self.j);
        self.f_abs = Arc::new(f_abs);
        self
    }

    pub fn with_schedule(mut self, schedule: DeltaSchedule) -> Self {
        self.schedule = schedule;
        self
    }

    pub(crate) fn lcm(&self) -> u32 {
        self.j.iter().fold(1, |a, &b| a / gcd(a, b) * b)
    }
}

pub(crate) fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}
