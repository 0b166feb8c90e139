//! Versioned TOML run configuration.

use std::path::{Path, PathBuf};

use holo_graph::{DirectedGraph, LagrangianDensity};
use holo_heat::{PropagatorConfig, TimeQuadrature};
use holo_integrator::{CutoffSchedule, IntegrationStrategy, Pinning};
use holo_lattice::{FakeDistance, Lattice};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Target {
    Heat,
    Prop,
    Pv,
    GraphInt,
    Jets,
}

impl Target {
    pub fn name(self) -> &'static str {
        match self {
            Target::Heat => "heat",
            Target::Prop => "prop",
            Target::Pv => "pv",
            Target::GraphInt => "graph-int",
            Target::Jets => "jets",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    pub target: Target,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub heat: Option<HeatBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prop: Option<PropBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pv: Option<PvBlock>,
    #[serde(default, rename = "graph-int", skip_serializing_if = "Option::is_none")]
    pub graph_int: Option<GraphIntBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jets: Option<JetsBlock>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    #[serde(default)]
    pub dir: Option<PathBuf>,
    /// File stem for the JSON and CSV outputs; defaults to the target name.
    #[serde(default)]
    pub stem: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum LatticeBlock {
    /// `scale · (Z + iZ)ⁿ`
    Square { n: usize, scale: f64 },
    /// `2n` real basis rows.
    Basis { rows: Vec<Vec<f64>> },
}

impl LatticeBlock {
    pub fn build(&self) -> Result<Lattice, CliError> {
        match self {
            LatticeBlock::Square { n, scale } => {
                if *n == 0 || !(*scale > 0.0) {
                    return Err(CliError::Config(format!("square lattice needs n ≥ 1 and scale > 0, got {n}, {scale}")));
                }
                Ok(Lattice::square(*n, *scale))
            }
            LatticeBlock::Basis { rows } => Ok(Lattice::new(rows.clone())?),
        }
    }
}

fn square(n: usize) -> LatticeBlock {
    LatticeBlock::Square { n, scale: 1.0 }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HeatBlock {
    pub lattice: LatticeBlock,
    pub times: Vec<f64>,
    /// Random point pairs per time.
    pub pairs: usize,
    /// Absolute image/spectral agreement bound.
    pub tolerance: f64,
    pub mass_times: Vec<f64>,
    /// Trapezoid nodes per cell axis for the mass integral.
    pub mass_grid: usize,
    pub mass_tolerance: f64,
}

impl Default for HeatBlock {
    fn default() -> Self {
        Self {
            lattice: square(1),
            times: vec![0.05, 0.2, 1.0, 5.0],
            pairs: 20,
            tolerance: 1e-11,
            mass_times: vec![0.1, 1.0],
            mass_grid: 48,
            mass_tolerance: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuadratureBlock {
    ClosedForm,
    Adaptive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropagatorBlock {
    #[serde(default)]
    pub split_l: Option<f64>,
    #[serde(default = "default_max_deriv")]
    pub max_deriv: u32,
    #[serde(default = "default_quadrature")]
    pub quadrature: QuadratureBlock,
    #[serde(default = "default_prop_tol")]
    pub tol: f64,
}

fn default_max_deriv() -> u32 {
    4
}

fn default_quadrature() -> QuadratureBlock {
    QuadratureBlock::ClosedForm
}

fn default_prop_tol() -> f64 {
    1e-14
}

impl Default for PropagatorBlock {
    fn default() -> Self {
        Self { split_l: None, max_deriv: default_max_deriv(), quadrature: default_quadrature(), tol: default_prop_tol() }
    }
}

impl PropagatorBlock {
    pub fn build(&self) -> PropagatorConfig {
        PropagatorConfig {
            split_l: self.split_l,
            max_deriv: self.max_deriv,
            quadrature: match self.quadrature {
                QuadratureBlock::ClosedForm => TimeQuadrature::ClosedForm,
                QuadratureBlock::Adaptive => TimeQuadrature::Adaptive,
            },
            tol: self.tol,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DerivBlock {
    #[serde(default)]
    pub head: Vec<u32>,
    #[serde(default)]
    pub tail: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PropBlock {
    pub lattice: LatticeBlock,
    #[serde(default)]
    pub propagator: PropagatorBlock,
    /// Random point pairs to sample.
    pub samples: usize,
    pub derivs: Vec<DerivBlock>,
    /// Richardson check of `lim (z − w)P` (one-dimensional tori only).
    pub residue_check: bool,
    /// Weak-form check against low Fourier modes (one-dimensional tori only).
    pub weak_check: bool,
    pub tolerance: f64,
}

impl Default for PropBlock {
    fn default() -> Self {
        Self {
            lattice: square(1),
            propagator: PropagatorBlock::default(),
            samples: 32,
            derivs: vec![DerivBlock { head: vec![], tail: vec![] }],
            residue_check: true,
            weak_check: true,
            tolerance: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PvBlock {
    /// JSON corpus file; the builtin corpus when absent.
    #[serde(default)]
    pub corpus: Option<PathBuf>,
    /// Seeded random cases appended to the corpus.
    pub random: usize,
    /// Bound against closed-form values.
    pub tolerance: f64,
    /// Bound between the direct and desingularized routes.
    pub route_tolerance: f64,
    /// Compare three cutoff domains per case.
    pub independence: bool,
    pub independence_tolerance: f64,
}

impl Default for PvBlock {
    fn default() -> Self {
        Self {
            corpus: None,
            random: 0,
            tolerance: 1e-8,
            route_tolerance: 1e-7,
            independence: false,
            independence_tolerance: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GraphBlock {
    Bouquet { loops: usize },
    Banana { edges: usize },
    Explicit { vertices: usize, edges: Vec<(usize, usize)> },
}

impl GraphBlock {
    pub fn build(&self) -> DirectedGraph {
        match self {
            GraphBlock::Bouquet { loops } => DirectedGraph::bouquet(*loops),
            GraphBlock::Banana { edges } => DirectedGraph::banana(*edges),
            GraphBlock::Explicit { vertices, edges } => DirectedGraph::new(*vertices, edges.clone()),
        }
    }
}

/// Sampling backend; Monte Carlo draws from the run seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum StrategyBlock {
    MonteCarlo {
        samples: u64,
        #[serde(default)]
        pinning: Pinning,
    },
    TensorQuadrature {
        order: usize,
        #[serde(default = "one")]
        panels: usize,
        #[serde(default)]
        pinning: Pinning,
    },
}

fn one() -> usize {
    1
}

impl StrategyBlock {
    pub fn build(&self, seed: u64) -> IntegrationStrategy {
        match self {
            StrategyBlock::MonteCarlo { samples, pinning } => {
                IntegrationStrategy::monte_carlo(*samples, seed).with_pinning(*pinning)
            }
            StrategyBlock::TensorQuadrature { order, panels, pinning } => {
                IntegrationStrategy::quadrature(*order, *panels).with_pinning(*pinning)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GraphIntBlock {
    pub lattice: LatticeBlock,
    pub graph: GraphBlock,
    /// One density per vertex; trivial densities when absent.
    #[serde(default)]
    pub densities: Option<Vec<LagrangianDensity>>,
    #[serde(default)]
    pub propagator: PropagatorBlock,
    /// One run, or the invariance suite when two or more are given.
    pub fake_distances: Vec<FakeDistance>,
    #[serde(default)]
    pub schedule: CutoffSchedule,
    pub strategy: StrategyBlock,
}

impl Default for GraphIntBlock {
    fn default() -> Self {
        Self {
            lattice: square(2),
            graph: GraphBlock::Bouquet { loops: 2 },
            densities: None,
            propagator: PropagatorBlock::default(),
            fake_distances: vec![FakeDistance { r0: 0.2, r1: 0.4, plateau: 0.25, bump: None }],
            schedule: CutoffSchedule::default(),
            strategy: StrategyBlock::MonteCarlo { samples: 2000, pinning: Pinning::Auto },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct JetsBlock {
    /// Checks run for every complex dimension `1..=n_max`.
    pub n_max: usize,
    pub order: u32,
    /// Random metrics per dimension.
    pub metrics: usize,
}

impl Default for JetsBlock {
    fn default() -> Self {
        Self { n_max: 2, order: 6, metrics: 3 }
    }
}

impl RunConfig {
    /// Defaults for `target` with no module block written out.
    pub fn default_for(target: Target) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            target,
            seed: None,
            output: None,
            heat: None,
            prop: None,
            pv: None,
            graph_int: None,
            jets: None,
        }
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(CliError::Config(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        let present = [
            (Target::Heat, self.heat.is_some()),
            (Target::Prop, self.prop.is_some()),
            (Target::Pv, self.pv.is_some()),
            (Target::GraphInt, self.graph_int.is_some()),
            (Target::Jets, self.jets.is_some()),
        ];
        for (t, p) in present {
            if p && t != self.target {
                return Err(CliError::Config(format!("block [{}] does not apply to target {}", t.name(), self.target.name())));
            }
        }
        Ok(())
    }

    /// The same configuration with the target block written out.
    pub fn resolved(&self) -> Self {
        let mut c = self.clone();
        match self.target {
            Target::Heat => c.heat = Some(self.heat_block()),
            Target::Prop => c.prop = Some(self.prop_block()),
            Target::Pv => c.pv = Some(self.pv_block()),
            Target::GraphInt => c.graph_int = Some(self.graph_int_block()),
            Target::Jets => c.jets = Some(self.jets_block()),
        }
        c
    }

    /// SHA-256 of the canonical JSON form of the resolved configuration,
    /// with the seed and output paths removed.
    pub fn hash(&self) -> String {
        let mut c = self.resolved();
        c.seed = None;
        c.output = None;
        let text = serde_json::to_string(&c).expect("config serializes");
        hex::encode(Sha256::digest(text.as_bytes()))
    }

    pub fn heat_block(&self) -> HeatBlock {
        self.heat.clone().unwrap_or_default()
    }

    pub fn prop_block(&self) -> PropBlock {
        self.prop.clone().unwrap_or_default()
    }

    pub fn pv_block(&self) -> PvBlock {
        self.pv.clone().unwrap_or_default()
    }

    pub fn graph_int_block(&self) -> GraphIntBlock {
        self.graph_int.clone().unwrap_or_default()
    }

    pub fn jets_block(&self) -> JetsBlock {
        self.jets.clone().unwrap_or_default()
    }
}
