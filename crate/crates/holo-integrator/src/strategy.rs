use serde::{Deserialize, Serialize};

/// How the configuration integral is sampled.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Backend {
    /// Importance-sampled Monte Carlo. Chunk `c` draws from the ChaCha8
    /// stream `c` of `seed`, so results do not depend on thread count.
    MonteCarlo {
        samples: u64,
        seed: u64,
        #[serde(default = "default_chunk")]
        chunk: u64,
        /// Probability of drawing a vertex uniformly rather than near its anchor.
        #[serde(default = "default_uniform_weight")]
        uniform_weight: f64,
    },
    /// Gauss–Legendre product rule in cell coordinates of the free vertices,
    /// `panels` equal panels of `order` nodes per axis.
    TensorQuadrature {
        order: usize,
        #[serde(default = "default_panels")]
        panels: usize,
    },
}

fn default_chunk() -> u64 {
    4096
}

fn default_uniform_weight() -> f64 {
    0.25
}

fn default_panels() -> usize {
    1
}

/// Whether vertex 0 is fixed at the origin, with the covolume as factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pinning {
    /// Pin exactly when the integrand is translation-invariant.
    #[default]
    Auto,
    On,
    Off,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegrationStrategy {
    pub backend: Backend,
    #[serde(default)]
    pub pinning: Pinning,
}

impl IntegrationStrategy {
    pub fn monte_carlo(samples: u64, seed: u64) -> Self {
        Self {
            backend: Backend::MonteCarlo {
                samples,
                seed,
                chunk: default_chunk(),
                uniform_weight: default_uniform_weight(),
            },
            pinning: Pinning::Auto,
        }
    }

    pub fn quadrature(order: usize, panels: usize) -> Self {
        Self { backend: Backend::TensorQuadrature { order, panels }, pinning: Pinning::Auto }
    }

    pub fn with_pinning(mut self, pinning: Pinning) -> Self {
        self.pinning = pinning;
        self
    }

    pub fn seed(&self) -> Option<u64> {
        match self.backend {
            Backend::MonteCarlo { seed, .. } => Some(seed),
            Backend::TensorQuadrature { .. } => None,
        }
    }
}
