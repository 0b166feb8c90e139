use std::f64::consts::PI;
use std::time::Instant;

use holo_graph::{EdgeKernel, GraphError, GraphIntegrand, TypeVerdict};
use holo_heat::bm_singular_part;
use holo_lattice::{FakeDistance, Lattice};
use holo_numerics::{gauss_legendre, pairwise_sum, pairwise_sum_complex};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::strategy::{Backend, IntegrationStrategy, Pinning};
use crate::IntegratorError;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const MAX_NODES: u128 = 200_000_000;
const BLOCK: usize = 4096;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutoffEstimate {
    pub eps: f64,
    pub value: Complex64,
    /// 1σ error for Monte Carlo; fine-minus-coarse difference for quadrature.
    pub stat_err: f64,
    /// Estimate of `∫ |density|` over the same region.
    pub abs_integral: f64,
    /// Seconds spent on the pass that produced this row. One pass serves a whole sweep.
    pub wall_time: f64,
}

/// Cutoff integrals for a decreasing list of `ε` from one sampling pass.
#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub estimates: Vec<CutoffEstimate>,
    /// Errors of `I(ε_{k+1}) − I(ε_k)`.
    pub step_errors: Vec<f64>,
    pub notes: Vec<String>,
    pub pinned: bool,
    pub evaluations: u64,
    /// Samples dropped because an edge joined coincident points.
    pub coincident: u64,
}

/// Degree `a` with `|s(λu)| = λ^{−a} |s(u)|` for the flat-space singular
/// part `s` of the propagator on `Cⁿ`.
pub fn singular_homogeneity(n: usize) -> f64 {
    let u: Vec<Complex64> = (0..n).map(|i| Complex64::new(0.3 + 0.1 * i as f64, -0.2)).collect();
    let u2: Vec<Complex64> = u.iter().map(|z| z * 2.0).collect();
    let norm = |v: &[Complex64]| v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let a = norm(&bm_singular_part(&u).expect("nonzero displacement"));
    let b = norm(&bm_singular_part(&u2).expect("nonzero displacement"));
    (a / b).log2().round()
}

/// Per-vertex proposal: uniform on the torus, mixed with a radial law
/// `∝ |u|^{−a}` around the first earlier neighbour.
struct Proposal {
    dim: usize,
    covol: f64,
    radius: f64,
    uniform_weight: f64,
    sphere: f64,
    anchors: Vec<Option<usize>>,
    exponents: Vec<f64>,
    pinned: bool,
}

impl Proposal {
    fn new<K: EdgeKernel>(itg: &GraphIntegrand<'_, K>, lattice: &Lattice, uniform_weight: f64, pinned: bool) -> Self {
        let graph = &itg.assignment().graph;
        let n = lattice.n();
        let dim = 2 * n;
        let homogeneity = singular_homogeneity(n);
        let joins = |a: usize, b: usize| graph.edges.iter().filter(|&&(t, h)| (t == a && h == b) || (t == b && h == a)).count();
        let anchors: Vec<Option<usize>> =
            (0..graph.vertices).map(|v| (0..v).find(|&u| joins(u, v) > 0)).collect();
        let exponents = anchors
            .iter()
            .enumerate()
            .map(|(v, a)| a.map_or(0.0, |a| (joins(a, v) as f64 * homogeneity).min(dim as f64 - 0.25)))
            .collect();
        let fact: f64 = (1..n).map(|k| k as f64).product();
        Self {
            dim,
            covol: lattice.covolume(),
            radius: 0.9 * lattice.injectivity_radius(),
            uniform_weight,
            sphere: 2.0 * PI.powi(n as i32) / fact,
            anchors,
            exponents,
            pinned,
        }
    }

    fn radial_density(&self, v: usize, s: f64) -> f64 {
        if s >= self.radius {
            return 0.0;
        }
        let q = self.dim as f64 - self.exponents[v];
        q / (self.sphere * self.radius.powf(q)) * s.powf(-self.exponents[v])
    }

    fn uniform(&self, lattice: &Lattice, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let c: Vec<f64> = (0..self.dim).map(|_| rng.random::<f64>()).collect();
        lattice.basis().from_cell(&c)
    }

    /// Fills `points` and returns the joint proposal density.
    fn draw(&self, lattice: &Lattice, rng: &mut ChaCha8Rng, points: &mut [Vec<f64>]) -> f64 {
        let mut density = 1.0;
        for v in 0..points.len() {
            if v == 0 && self.pinned {
                points[0].iter_mut().for_each(|x| *x = 0.0);
                continue;
            }
            let Some(a) = self.anchors[v] else {
                points[v] = self.uniform(lattice, rng);
                density /= self.covol;
                continue;
            };
            let x = if rng.random::<f64>() < self.uniform_weight {
                self.uniform(lattice, rng)
            } else {
                let q = self.dim as f64 - self.exponents[v];
                let r = self.radius * rng.random::<f64>().powf(1.0 / q);
                let dir: Vec<f64> = (0..self.dim).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
                let len = dir.iter().map(|x| x * x).sum::<f64>().sqrt();
                let y: Vec<f64> = points[a].iter().zip(&dir).map(|(p, d)| p + r * d / len).collect();
                lattice.reduce_real(&y)
            };
            let u: Vec<f64> = x.iter().zip(&points[a]).map(|(p, q)| p - q).collect();
            let s = lattice.min_image_norm2(&u).sqrt();
            density *= self.uniform_weight / self.covol + (1.0 - self.uniform_weight) * self.radial_density(v, s);
            points[v] = x;
        }
        density
    }
}

/// `∏_{i<j} ρ̃²(pᵢ, pⱼ)`.
fn pair_product(fd: &FakeDistance, lattice: &Lattice, points: &[Vec<f64>]) -> f64 {
    let mut p = 1.0;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            p *= fd.eval(lattice, &points[i], &points[j]);
        }
    }
    p
}

/// First cutoff whose region contains a point with pair product `p`.
fn band(eps: &[f64], p: f64) -> usize {
    eps.iter().position(|&e| p > e).unwrap_or(eps.len())
}

#[derive(Clone)]
struct Bands {
    sum: Vec<Complex64>,
    sq: Vec<f64>,
    abs: Vec<f64>,
    evaluations: u64,
    coincident: u64,
}

impl Bands {
    fn new(k: usize) -> Self {
        Self { sum: vec![ZERO; k + 1], sq: vec![0.0; k + 1], abs: vec![0.0; k + 1], evaluations: 0, coincident: 0 }
    }

    fn add(&mut self, b: usize, x: Complex64) {
        self.sum[b] += x;
        self.sq[b] += x.norm_sqr();
        self.abs[b] += x.norm();
    }

    /// Combines per-block partials band by band with pairwise summation.
    fn merge(parts: &[Bands], k: usize) -> Bands {
        let mut out = Bands::new(k);
        for b in 0..=k {
            out.sum[b] = pairwise_sum_complex(&parts.iter().map(|p| p.sum[b]).collect::<Vec<_>>());
            out.sq[b] = pairwise_sum(&parts.iter().map(|p| p.sq[b]).collect::<Vec<_>>());
            out.abs[b] = pairwise_sum(&parts.iter().map(|p| p.abs[b]).collect::<Vec<_>>());
        }
        out.evaluations = parts.iter().map(|p| p.evaluations).sum();
        out.coincident = parts.iter().map(|p| p.coincident).sum();
        out
    }
}

fn evaluate<K: EdgeKernel>(
    itg: &GraphIntegrand<'_, K>,
    points: &[Vec<f64>],
    acc: &mut Bands,
) -> Result<Option<Complex64>, IntegratorError> {
    acc.evaluations += 1;
    match itg.eval(points) {
        Ok(f) => Ok(Some(f)),
        Err(GraphError::Coincident { .. }) => {
            acc.coincident += 1;
            Ok(None)
        }
        Err(e) => Err(e.into()),
    }
}

#[allow(clippy::too_many_arguments)]
fn monte_carlo<K: EdgeKernel + Sync>(
    itg: &GraphIntegrand<'_, K>,
    fd: &FakeDistance,
    eps: &[f64],
    samples: u64,
    seed: u64,
    chunk: u64,
    uniform_weight: f64,
    pinned: bool,
) -> Result<(Vec<CutoffEstimate>, Vec<f64>, Bands), IntegratorError> {
    let lattice = itg.kernel().lattice();
    let proposal = Proposal::new(itg, lattice, uniform_weight, pinned);
    let factor = if pinned { lattice.covolume() } else { 1.0 };
    let k = eps.len();
    let chunks = samples.div_ceil(chunk);
    let parts = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c);
            let count = chunk.min(samples - c * chunk);
            let mut acc = Bands::new(k);
            let mut points = vec![vec![0.0; proposal.dim]; itg.vertex_count()];
            for _ in 0..count {
                let density = proposal.draw(lattice, &mut rng, &mut points);
                let b = band(eps, pair_product(fd, lattice, &points));
                if b == k || density == 0.0 || !density.is_finite() {
                    continue;
                }
                if let Some(f) = evaluate(itg, &points, &mut acc)? {
                    acc.add(b, f * (factor / density));
                }
            }
            Ok(acc)
        })
        .collect::<Result<Vec<_>, IntegratorError>>()?;
    let bands = Bands::merge(&parts, k);
    let n = samples as f64;
    let stat = |mean: Complex64, second: f64| {
        let var = (second - mean.norm_sqr()).max(0.0) * n / (n - 1.0).max(1.0);
        (var / n).sqrt()
    };
    let mut estimates = Vec::with_capacity(k);
    let (mut s, mut q, mut a) = (ZERO, 0.0, 0.0);
    for (i, &e) in eps.iter().enumerate() {
        s += bands.sum[i];
        q += bands.sq[i];
        a += bands.abs[i];
        estimates.push(CutoffEstimate { eps: e, value: s / n, stat_err: stat(s / n, q / n), abs_integral: a / n, wall_time: 0.0 });
    }
    let steps = (1..k).map(|i| stat(bands.sum[i] / n, bands.sq[i] / n)).collect();
    Ok((estimates, steps, bands))
}

/// Composite Gauss–Legendre rule on `[−½, ½]`.
fn axis_rule(order: usize, panels: usize) -> (Vec<f64>, Vec<f64>) {
    let base = gauss_legendre(order);
    let width = 1.0 / panels as f64;
    let mut nodes = Vec::with_capacity(order * panels);
    let mut weights = Vec::with_capacity(order * panels);
    for p in 0..panels {
        let a = -0.5 + p as f64 * width;
        let rule = base.mapped(a, a + width);
        nodes.extend_from_slice(&rule.nodes);
        weights.extend_from_slice(&rule.weights);
    }
    (nodes, weights)
}

fn quadrature_pass<K: EdgeKernel + Sync>(
    itg: &GraphIntegrand<'_, K>,
    fd: &FakeDistance,
    eps: &[f64],
    rule: &(Vec<f64>, Vec<f64>),
    pinned: bool,
) -> Result<Bands, IntegratorError> {
    let lattice = itg.kernel().lattice();
    let dim = itg.real_dim();
    let vertices = itg.vertex_count();
    let free = vertices - usize::from(pinned);
    let axes = dim * free;
    let per = rule.0.len();
    let total = (per as u128).pow(axes as u32);
    if total > MAX_NODES {
        return Err(IntegratorError::Invalid(format!("product rule needs {total} nodes")));
    }
    let total = total as usize;
    let covol = lattice.covolume();
    let scale = covol.powi(free as i32) * if pinned { covol } else { 1.0 };
    let k = eps.len();
    let parts = (0..total.div_ceil(BLOCK))
        .into_par_iter()
        .map(|blk| {
            let mut acc = Bands::new(k);
            let mut points = vec![vec![0.0; dim]; vertices];
            let mut cell = vec![0.0; dim];
            for idx in blk * BLOCK..((blk + 1) * BLOCK).min(total) {
                let mut rest = idx;
                let mut w = scale;
                for point in points.iter_mut().skip(usize::from(pinned)) {
                    for c in cell.iter_mut() {
                        let d = rest % per;
                        rest /= per;
                        *c = rule.0[d];
                        w *= rule.1[d];
                    }
                    *point = lattice.basis().from_cell(&cell);
                }
                let b = band(eps, pair_product(fd, lattice, &points));
                if b == k {
                    continue;
                }
                if let Some(f) = evaluate(itg, &points, &mut acc)? {
                    acc.add(b, f * w);
                }
            }
            Ok(acc)
        })
        .collect::<Result<Vec<_>, IntegratorError>>()?;
    Ok(Bands::merge(&parts, k))
}

fn quadrature<K: EdgeKernel + Sync>(
    itg: &GraphIntegrand<'_, K>,
    fd: &FakeDistance,
    eps: &[f64],
    order: usize,
    panels: usize,
    pinned: bool,
) -> Result<(Vec<CutoffEstimate>, Vec<f64>, Bands), IntegratorError> {
    if order == 0 || panels == 0 {
        return Err(IntegratorError::Invalid("quadrature order and panel count must be positive".into()));
    }
    let fine = quadrature_pass(itg, fd, eps, &axis_rule(order, panels), pinned)?;
    let coarse_rule = if panels >= 2 { axis_rule(order, panels / 2) } else { axis_rule((order / 2).max(1), 1) };
    let coarse = quadrature_pass(itg, fd, eps, &coarse_rule, pinned)?;
    let k = eps.len();
    let mut estimates = Vec::with_capacity(k);
    let (mut s, mut c, mut a) = (ZERO, ZERO, 0.0);
    for (i, &e) in eps.iter().enumerate() {
        s += fine.sum[i];
        c += coarse.sum[i];
        a += fine.abs[i];
        estimates.push(CutoffEstimate { eps: e, value: s, stat_err: (s - c).norm(), abs_integral: a, wall_time: 0.0 });
    }
    let steps = (1..k).map(|i| (fine.sum[i] - coarse.sum[i]).norm()).collect();
    let mut bands = fine;
    bands.evaluations += coarse.evaluations;
    bands.coincident += coarse.coincident;
    Ok((estimates, steps, bands))
}

pub(crate) fn resolve_pinning<K: EdgeKernel>(
    itg: &GraphIntegrand<'_, K>,
    pinning: Pinning,
) -> Result<bool, IntegratorError> {
    let invariant = itg.translation_invariant();
    match pinning {
        Pinning::Auto => Ok(invariant),
        Pinning::Off => Ok(false),
        Pinning::On if invariant => Ok(true),
        Pinning::On => Err(IntegratorError::Invalid("vertex pinning needs a translation-invariant integrand".into())),
    }
}

/// Integrals of the density over `{∏_{i<j} ρ̃²(pᵢ, pⱼ) > ε}` for every `ε`
/// in the strictly decreasing list `eps`.
pub fn cutoff_sweep<K: EdgeKernel + Sync>(
    itg: &GraphIntegrand<'_, K>,
    fd: &FakeDistance,
    eps: &[f64],
    strategy: &IntegrationStrategy,
) -> Result<Sweep, IntegratorError> {
    if eps.is_empty() || eps.iter().any(|&e| !(e > 0.0)) || eps.windows(2).any(|w| w[1] >= w[0]) {
        return Err(IntegratorError::Invalid(format!("cutoffs {eps:?} are not positive and strictly decreasing")));
    }
    let lattice = itg.kernel().lattice();
    fd.validate(lattice).map_err(|e| IntegratorError::Invalid(e.to_string()))?;
    let pinned = resolve_pinning(itg, strategy.pinning)?;
    let k = eps.len();
    let zeros = |notes: Vec<String>| Sweep {
        estimates: eps
            .iter()
            .map(|&e| CutoffEstimate { eps: e, value: ZERO, stat_err: 0.0, abs_integral: 0.0, wall_time: 0.0 })
            .collect(),
        step_errors: vec![0.0; k - 1],
        notes,
        pinned,
        evaluations: 0,
        coincident: 0,
    };
    if itg.verdict() == TypeVerdict::ZeroByType {
        return Ok(zeros(vec!["zero-by-type: the integrand vanishes identically".into()]));
    }
    let v = itg.vertex_count();
    let sup = fd.sup().powi((v * v.saturating_sub(1) / 2) as i32);
    let notes: Vec<String> = eps
        .iter()
        .filter(|&&e| e >= sup)
        .map(|e| format!("cutoff region empty: ε = {e:e} ≥ sup ∏ρ̃² = {sup:e}"))
        .collect();
    if notes.len() == k {
        return Ok(zeros(notes));
    }
    let start = Instant::now();
    let (mut estimates, step_errors, bands) = match strategy.backend {
        Backend::MonteCarlo { samples, seed, chunk, uniform_weight } => {
            if samples < 2 || chunk == 0 || !(0.0..=1.0).contains(&uniform_weight) {
                return Err(IntegratorError::Invalid("Monte Carlo needs ≥ 2 samples, a positive chunk and a weight in [0, 1]".into()));
            }
            monte_carlo(itg, fd, eps, samples, seed, chunk, uniform_weight, pinned)?
        }
        Backend::TensorQuadrature { order, panels } => quadrature(itg, fd, eps, order, panels, pinned)?,
    };
    let elapsed = start.elapsed().as_secs_f64();
    estimates.iter_mut().for_each(|e| e.wall_time = elapsed);
    Ok(Sweep { estimates, step_errors, notes, pinned, evaluations: bands.evaluations, coincident: bands.coincident })
}

/// Single cutoff integral with any notes raised (zero-by-type, empty region).
pub fn cutoff_integral<K: EdgeKernel + Sync>(
    itg: &GraphIntegrand<'_, K>,
    fd: &FakeDistance,
    eps: f64,
    strategy: &IntegrationStrategy,
) -> Result<(CutoffEstimate, Vec<String>), IntegratorError> {
    let mut sweep = cutoff_sweep(itg, fd, &[eps], strategy)?;
    Ok((sweep.estimates.remove(0), sweep.notes))
}
