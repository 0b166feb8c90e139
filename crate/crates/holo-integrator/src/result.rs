use std::path::Path;

use holo_graph::{EdgeKernel, GraphIntegrand, TypeVerdict};
use holo_lattice::FakeDistance;
use holo_numerics::weighted_lstsq;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::schedule::{CutoffSchedule, ExtrapolationModel};
use crate::strategy::IntegrationStrategy;
use crate::sweep::{cutoff_sweep, CutoffEstimate};
use crate::IntegratorError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFit {
    pub model: ExtrapolationModel,
    pub coefficients: Vec<Complex64>,
    pub c0_err: f64,
    /// Weighted residual sum of squares per degree of freedom.
    pub chi2_per_dof: f64,
}

impl ModelFit {
    pub fn c0(&self) -> Complex64 {
        self.coefficients[0]
    }

    /// Change of the fitted non-constant terms between two cutoffs.
    pub fn step(&self, a: f64, b: f64) -> Complex64 {
        let (ba, bb) = (self.model.basis(a), self.model.basis(b));
        (1..3).map(|i| self.coefficients[i] * (ba[i] - bb[i])).sum()
    }
}

/// Successive differences `dₖ = |I(ε_{k+1}) − I(ε_k)|` must not grow by
/// more than three standard errors, and the last must sit below the first
/// by more than three standard errors unless it is already noise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CauchyCheck {
    pub differences: Vec<f64>,
    pub errors: Vec<f64>,
    /// Largest `d_{k+1} − d_k − 3σ`; nonpositive when no step grows.
    pub worst_excess: f64,
    pub contracting: bool,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub graph_hash: String,
    pub lattice_hash: String,
    pub fake_distance_hash: String,
    pub kernel_hash: String,
    pub strategy: IntegrationStrategy,
    pub schedule: CutoffSchedule,
    pub seed: Option<u64>,
    pub pinned: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphIntegralResult {
    pub verdict: TypeVerdict,
    pub estimates: Vec<CutoffEstimate>,
    pub value: Complex64,
    pub stat_error: f64,
    /// Spread of the limit between the two extrapolation models.
    pub systematic: f64,
    /// `stat_error` relative to `max(|value|, ∫|density|)` at the smallest cutoff.
    pub relative_error: f64,
    pub fits: Vec<ModelFit>,
    pub cauchy: CauchyCheck,
    /// No step moves the estimate by more than the fitted change plus 3σ.
    pub monotone: bool,
    /// Every cutoff integral is bitwise identical.
    pub flat: bool,
    pub evaluations: u64,
    pub coincident: u64,
    pub notes: Vec<String>,
    pub flagged: bool,
    pub metadata: RunMetadata,
}

fn fit(model: ExtrapolationModel, est: &[CutoffEstimate]) -> Result<ModelFit, IntegratorError> {
    let design: Vec<Vec<f64>> = est.iter().map(|e| model.basis(e.eps).to_vec()).collect();
    let floor = est.iter().map(|e| e.stat_err).filter(|&s| s > 0.0).fold(f64::INFINITY, f64::min);
    let sigma: Option<Vec<f64>> = floor.is_finite().then(|| est.iter().map(|e| e.stat_err.max(floor)).collect());
    let re: Vec<f64> = est.iter().map(|e| e.value.re).collect();
    let im: Vec<f64> = est.iter().map(|e| e.value.im).collect();
    let fr = weighted_lstsq(&design, &re, sigma.as_deref())?;
    let fi = weighted_lstsq(&design, &im, sigma.as_deref())?;
    let rows = est.len() as f64;
    let dof = (rows - 3.0).max(1.0);
    let rss = fr.residuals.iter().chain(&fi.residuals).map(|r| r * r).sum::<f64>();
    let chi2 = rss / (2.0 * dof);
    let c0_err = if sigma.is_some() {
        (fr.cov_diag[0] * chi2.max(1.0)).sqrt()
    } else {
        (fr.cov_diag[0] * rss / (2.0 * dof)).sqrt()
    };
    let coefficients = fr.coef.iter().zip(&fi.coef).map(|(&a, &b)| Complex64::new(a, b)).collect();
    Ok(ModelFit { model, coefficients, c0_err, chi2_per_dof: chi2 })
}

fn cauchy(est: &[CutoffEstimate], step_errors: &[f64], floor: f64) -> CauchyCheck {
    let differences: Vec<f64> = est.windows(2).map(|w| (w[1].value - w[0].value).norm()).collect();
    let mut worst = f64::NEG_INFINITY;
    for k in 1..differences.len() {
        let sigma = step_errors[k].hypot(step_errors[k - 1]);
        worst = worst.max(differences[k] - differences[k - 1] - 3.0 * sigma - floor);
    }
    let worst_excess = if worst.is_finite() { worst } else { 0.0 };
    let contracting = match (differences.first(), differences.last()) {
        (Some(&first), Some(&last)) if differences.len() >= 2 => {
            let (s0, s1) = (step_errors[0], step_errors[differences.len() - 1]);
            last <= 3.0 * s1 + floor || last < first - 3.0 * s0.hypot(s1) - floor
        }
        _ => true,
    };
    CauchyCheck {
        differences,
        errors: step_errors.to_vec(),
        ok: worst_excess <= 0.0 && contracting,
        worst_excess,
        contracting,
    }
}

/// `lim_{ε→0}` of the cutoff integrals over `schedule`, extrapolated with
/// both models.
pub fn graph_integral<K: EdgeKernel + Sync>(
    itg: &GraphIntegrand<'_, K>,
    fd: &FakeDistance,
    schedule: &CutoffSchedule,
    strategy: &IntegrationStrategy,
) -> Result<GraphIntegralResult, IntegratorError> {
    schedule.validate()?;
    let sweep = cutoff_sweep(itg, fd, &schedule.values(), strategy)?;
    let est = sweep.estimates;
    let fits = ExtrapolationModel::ALL.iter().map(|&m| fit(m, &est)).collect::<Result<Vec<_>, _>>()?;
    let value = fits[0].c0();
    let stat_error = fits[0].c0_err;
    let systematic = (fits[0].c0() - fits[1].c0()).norm();
    let scale = est.iter().map(|e| e.value.norm().max(e.abs_integral)).fold(0.0, f64::max);
    let floor = 1e-13 * scale;
    let cauchy = cauchy(&est, &sweep.step_errors, floor);
    let monotone = est.windows(2).zip(&sweep.step_errors).all(|(w, &s)| {
        (w[1].value - w[0].value).norm() <= fits[0].step(w[1].eps, w[0].eps).norm() + 3.0 * s + floor
    });
    let flat = est.windows(2).all(|w| w[0].value == w[1].value);
    let reference = value.norm().max(est.last().map_or(0.0, |e| e.abs_integral));
    let relative_error = if reference > 0.0 { stat_error / reference } else { 0.0 };
    let mut notes = sweep.notes;
    if !cauchy.ok {
        notes.push(format!(
            "cutoff sequence is not Cauchy: growth excess {:.3e}, contracting {}",
            cauchy.worst_excess, cauchy.contracting
        ));
    }
    let lattice = itg.kernel().lattice();
    let metadata = RunMetadata {
        graph_hash: itg.assignment().fingerprint(),
        lattice_hash: lattice.fingerprint(),
        fake_distance_hash: fd.fingerprint(),
        kernel_hash: itg.kernel().fingerprint(),
        strategy: strategy.clone(),
        schedule: *schedule,
        seed: strategy.seed(),
        pinned: sweep.pinned,
    };
    Ok(GraphIntegralResult {
        verdict: itg.verdict(),
        estimates: est,
        value,
        stat_error,
        systematic,
        relative_error,
        flagged: !cauchy.ok,
        fits,
        cauchy,
        monotone,
        flat,
        evaluations: sweep.evaluations,
        coincident: sweep.coincident,
        notes,
        metadata,
    })
}

impl GraphIntegralResult {
    /// `√(stat² + systematic²)`.
    pub fn total_error(&self) -> f64 {
        self.stat_error.hypot(self.systematic)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("result serializes")
    }

    pub fn write_json(&self, path: &Path) -> Result<(), IntegratorError> {
        std::fs::write(path, self.to_json()).map_err(|e| IntegratorError::Io(format!("{}: {e}", path.display())))
    }

    /// Columns `eps, re, im, stat_err, wall_time`.
    pub fn write_csv(&self, path: &Path) -> Result<(), IntegratorError> {
        let io = |e: csv::Error| IntegratorError::Io(format!("{}: {e}", path.display()));
        let mut w = csv::Writer::from_path(path).map_err(io)?;
        w.write_record(["eps", "re", "im", "stat_err", "wall_time"]).map_err(io)?;
        for e in &self.estimates {
            w.write_record([
                e.eps.to_string(),
                e.value.re.to_string(),
                e.value.im.to_string(),
                e.stat_err.to_string(),
                e.wall_time.to_string(),
            ])
            .map_err(io)?;
        }
        w.flush().map_err(|e| IntegratorError::Io(e.to_string()))
    }
}
