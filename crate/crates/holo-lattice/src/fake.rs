use serde::{Deserialize, Serialize};

use crate::lattice::Lattice;
use crate::{fingerprint_f64s, GeometryError};

/// Smooth step on `[0, 1]`: `e^{−1/s} / (e^{−1/s} + e^{−1/(1−s)})`.
fn smoothstep(s: f64) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    if s >= 1.0 {
        return 1.0;
    }
    let a = (-1.0 / s).exp();
    let b = (-1.0 / (1.0 - s)).exp();
    a / (a + b)
}

fn smoothstep_deriv(s: f64) -> f64 {
    if s <= 0.0 || s >= 1.0 {
        return 0.0;
    }
    let a = (-1.0 / s).exp();
    let b = (-1.0 / (1.0 - s)).exp();
    let da = a / (s * s);
    let db = -b / ((1.0 - s) * (1.0 - s));
    (da * (a + b) - a * (da + db)) / ((a + b) * (a + b))
}

/// Positive perturbation `amplitude · ψ(ρ²) · (1 + ½ cos⟨μ, z − w⟩)` where
/// `ψ` rises from 0 at `ρ² = r₁²` to 1 at `ρ² = r₂²`, `r₂` nine tenths of the way from
/// `r₁` to the injectivity radius, and `μ` is the first dual basis vector.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Bump {
    pub amplitude: f64,
}

/// `ρ̃² = φ(ρ²)ρ² + (1 − φ(ρ²))c (+ bump)`, with `φ = 1` below `r₀²` and
/// `φ = 0` above `r₁²`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct FakeDistance {
    pub r0: f64,
    pub r1: f64,
    pub plateau: f64,
    #[serde(default)]
    pub bump: Option<Bump>,
}

impl FakeDistance {
    pub fn new(lattice: &Lattice, r0: f64, r1: f64, plateau: f64, bump: Option<Bump>) -> Result<Self, GeometryError> {
        let fd = Self { r0, r1, plateau, bump };
        fd.validate(lattice)?;
        Ok(fd)
    }

    pub fn validate(&self, lattice: &Lattice) -> Result<(), GeometryError> {
        let inj = lattice.injectivity_radius();
        let bad = |m: String| Err(GeometryError::FakeDistance(m));
        if !(self.r0 > 0.0 && self.r0 < self.r1) {
            return bad(format!("need 0 < r0 < r1, got r0={}, r1={}", self.r0, self.r1));
        }
        if self.r1 >= inj {
            return bad(format!("r1={} is not below the injectivity radius {inj}", self.r1));
        }
        if !(self.plateau > 0.0) {
            return bad(format!("plateau must be positive, got {}", self.plateau));
        }
        if let Some(b) = self.bump {
            if !(b.amplitude >= 0.0) {
                return bad(format!("bump amplitude must be non-negative, got {}", b.amplitude));
            }
        }
        Ok(())
    }

    /// Cutoff `φ` as a function of `x = ρ²`.
    pub fn phi(&self, x: f64) -> f64 {
        let (a, b) = (self.r0 * self.r0, self.r1 * self.r1);
        smoothstep((b - x) / (b - a))
    }

    /// Radial profile without bump and its derivative in `x = ρ²`.
    pub fn profile(&self, x: f64) -> (f64, f64) {
        let (a, b) = (self.r0 * self.r0, self.r1 * self.r1);
        let phi = self.phi(x);
        let dphi = -smoothstep_deriv((b - x) / (b - a)) / (b - a);
        (phi * x + (1.0 - phi) * self.plateau, dphi * (x - self.plateau) + phi)
    }

    /// `ρ̃²` for a displacement `d = z − w` in real coordinates.
    pub fn eval_displacement(&self, lattice: &Lattice, d: &[f64]) -> f64 {
        let x = lattice.min_image_norm2(d);
        let mut v = self.profile(x).0;
        if let Some(b) = self.bump {
            let r2 = self.r1 + 0.9 * (lattice.injectivity_radius() - self.r1);
            let (lo, hi) = (self.r1 * self.r1, r2 * r2);
            let psi = smoothstep((x - lo) / (hi - lo));
            if psi > 0.0 {
                let mu = &lattice.dual().rows()[0];
                let phase: f64 = mu.iter().zip(d).map(|(m, y)| m * y).sum();
                v += b.amplitude * psi * (1.0 + 0.5 * phase.cos());
            }
        }
        v
    }

    /// Gradient of `ρ̃²` with respect to the displacement, valid away from
    /// the cut locus (where every term is locally constant anyway).
    pub fn gradient_displacement(&self, lattice: &Lattice, d: &[f64]) -> Vec<f64> {
        let y = lattice.min_image(d);
        let x: f64 = y.iter().map(|v| v * v).sum();
        let (_, dprof) = self.profile(x);
        let mut g: Vec<f64> = y.iter().map(|v| 2.0 * dprof * v).collect();
        if let Some(b) = self.bump {
            let r2 = self.r1 + 0.9 * (lattice.injectivity_radius() - self.r1);
            let (lo, hi) = (self.r1 * self.r1, r2 * r2);
            let s = (x - lo) / (hi - lo);
            let (psi, dpsi) = (smoothstep(s), smoothstep_deriv(s) / (hi - lo));
            let mu = &lattice.dual().rows()[0];
            let phase: f64 = mu.iter().zip(d).map(|(m, v)| m * v).sum();
            for ((gi, yi), mi) in g.iter_mut().zip(&y).zip(mu) {
                *gi += b.amplitude * (dpsi * 2.0 * yi * (1.0 + 0.5 * phase.cos()) - psi * 0.5 * phase.sin() * mi);
            }
        }
        g
    }

    pub fn eval(&self, lattice: &Lattice, z: &[f64], w: &[f64]) -> f64 {
        let d: Vec<f64> = z.iter().zip(w).map(|(a, b)| a - b).collect();
        self.eval_displacement(lattice, &d)
    }

    /// Upper bound for `ρ̃²` over the torus.
    pub fn sup(&self) -> f64 {
        let base = self.plateau.max(self.r1 * self.r1);
        base + self.bump.map_or(0.0, |b| 1.5 * b.amplitude)
    }

    pub fn fingerprint(&self) -> String {
        let amp = self.bump.map_or(-1.0, |b| b.amplitude);
        fingerprint_f64s("fake-distance/exp-smoothstep/v1", &[self.r0, self.r1, self.plateau, amp])
    }
}
