use holo_lattice::Lattice;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Coefficient function of a vertex density.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum VertexCoefficient {
    Constant { value: Complex64 },
    /// `amplitude · e^{i⟨μ, x⟩}` with `μ = Σ dual[j]·μⱼ` over the dual basis.
    Character { amplitude: Complex64, dual: Vec<i64> },
}

impl Default for VertexCoefficient {
    fn default() -> Self {
        Self::Constant { value: Complex64::new(1.0, 0.0) }
    }
}

impl VertexCoefficient {
    /// Value at the point with real coordinates `x`.
    pub fn eval(&self, lattice: &Lattice, x: &[f64]) -> Complex64 {
        match self {
            Self::Constant { value } => *value,
            Self::Character { amplitude, dual } => {
                let rows = lattice.dual().rows();
                let phase: f64 = dual
                    .iter()
                    .zip(rows)
                    .map(|(&k, mu)| k as f64 * mu.iter().zip(x).map(|(a, b)| a * b).sum::<f64>())
                    .sum();
                amplitude * Complex64::from_polar(1.0, phase)
            }
        }
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        match self {
            Self::Constant { value } => Self::Constant { value: value * c },
            Self::Character { amplitude, dual } => Self::Character { amplitude: amplitude * c, dual: dual.clone() },
        }
    }
}

/// Degree-`k` density: one holomorphic multi-index per slot and a coefficient.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LagrangianDensity {
    pub slots: Vec<Vec<u32>>,
    #[serde(default)]
    pub coefficient: VertexCoefficient,
}

impl LagrangianDensity {
    /// `k` slots without derivatives, coefficient 1.
    pub fn trivial(k: usize, n: usize) -> Self {
        Self { slots: vec![vec![0; n]; k], coefficient: VertexCoefficient::default() }
    }

    pub fn degree(&self) -> usize {
        self.slots.len()
    }

    pub fn with_coefficient(mut self, c: VertexCoefficient) -> Self {
        self.coefficient = c;
        self
    }
}
