use std::f64::consts::PI;

use holo_forms::{AntiholoGenerator, GradedKernelValue, MultiPointForm};
use holo_graph::{
    assemble_integrand, DirectedGraph, EdgeKernel, GraphAssignment, LagrangianDensity, TypeVerdict, VertexCoefficient,
};
use holo_heat::{HeatError, LegDerivs, PropagatorConfig, PropagatorKernel};
use holo_integrator::{
    cutoff_integral, cutoff_sweep, graph_integral, invariance_suite, singular_homogeneity, CutoffSchedule,
    ExtrapolationModel, GraphIntegralResult, IntegrationStrategy, IntegratorError, Pinning,
};
use holo_lattice::{FakeDistance, Lattice};
use holo_pv::{cutoff_by_defining_function, Beta, DeltaSchedule, DirectQuadrature, PVIntegrand};
use num_complex::Complex64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

type Profile = dyn Fn(Complex64) -> Complex64 + Send + Sync;

/// `n = 1`, one edge value `g(u) dz̄_head ∧ dz̄_tail` with `u` the
/// minimal-image difference head − tail.
struct ScalarEdge {
    lattice: Lattice,
    g: Box<Profile>,
}

impl EdgeKernel for ScalarEdge {
    fn n(&self) -> usize {
        1
    }

    fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    fn form_degree(&self) -> usize {
        2
    }

    fn edge_form(&self, head: &[f64], tail: &[f64], _: &LegDerivs) -> Result<GradedKernelValue, HeatError> {
        let d: Vec<f64> = head.iter().zip(tail).map(|(a, b)| a - b).collect();
        let u = self.lattice.min_image(&d);
        let gens = [AntiholoGenerator::new(0, 0), AntiholoGenerator::new(1, 0)];
        let form = MultiPointForm::monomial((self.g)(c(u[0], u[1])), &gens);
        Ok(GradedKernelValue { form, head: 0, tail: 1, dt: false })
    }

    fn diagonal_form(&self, _: &[f64], _: &LegDerivs, _: usize) -> Result<MultiPointForm, HeatError> {
        Ok(MultiPointForm::zero())
    }

    fn translation_invariant(&self) -> bool {
        true
    }
}

fn derivs_seed(d: &LegDerivs) -> f64 {
    d.head.iter().enumerate().map(|(j, &k)| 0.61 * (j as f64 + 1.3) * k as f64).sum::<f64>()
        + d.tail.iter().enumerate().map(|(j, &k)| 0.37 * (j as f64 + 2.1) * k as f64).sum::<f64>()
}

/// `n = 2` one-form edge values with coefficients `|u|^{−3/4}` times smooth
/// periodic functions that depend on the edge derivatives, so the banana
/// density behaves like `|u|^{−3}`.
struct SingularBanana {
    lattice: Lattice,
}

impl EdgeKernel for SingularBanana {
    fn n(&self) -> usize {
        2
    }

    fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    fn edge_form(&self, head: &[f64], tail: &[f64], d: &LegDerivs) -> Result<GradedKernelValue, HeatError> {
        let diff: Vec<f64> = head.iter().zip(tail).map(|(a, b)| a - b).collect();
        let u = self.lattice.min_image(&diff);
        let r2 = u.iter().map(|x| x * x).sum::<f64>();
        if r2 == 0.0 {
            return Err(HeatError::Coincident(0.0));
        }
        let s = derivs_seed(d);
        let scale = self.lattice.shortest_vector();
        let weight = r2.powf(-0.375);
        let mut form = MultiPointForm::zero();
        for m in 0..4 {
            let phase = 2.0 * PI * u[m] / scale + 1.3 * m as f64 * s + 0.5 * s;
            let coef = c(1.0 + 0.4 * phase.cos() + 0.2 * m as f64, 0.3 * (phase + s).sin()) * weight;
            form = form.add(&MultiPointForm::monomial(coef, &[AntiholoGenerator::new(m / 2, m % 2)]));
        }
        Ok(GradedKernelValue { form, head: 0, tail: 1, dt: false })
    }

    fn diagonal_form(&self, _: &[f64], _: &LegDerivs, _: usize) -> Result<MultiPointForm, HeatError> {
        Ok(MultiPointForm::zero())
    }

    fn translation_invariant(&self) -> bool {
        true
    }
}

/// `n = 2` kernel whose diagonal value is a constant one-form
/// `a dz̄₀ + b dz̄₁` chosen by the edge derivatives.
struct ConstantLoop {
    lattice: Lattice,
}

fn loop_coefficients(d: &LegDerivs) -> (Complex64, Complex64) {
    let s = derivs_seed(d);
    (c(1.0 + 0.5 * s.cos(), 0.3 * (2.0 * s).sin()), c(0.2 - 0.4 * s.sin(), 0.7 * s.cos()))
}

impl EdgeKernel for ConstantLoop {
    fn n(&self) -> usize {
        2
    }

    fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    fn edge_form(&self, _: &[f64], _: &[f64], _: &LegDerivs) -> Result<GradedKernelValue, HeatError> {
        Ok(GradedKernelValue { form: MultiPointForm::zero(), head: 0, tail: 1, dt: false })
    }

    fn diagonal_form(&self, _: &[f64], d: &LegDerivs, point: usize) -> Result<MultiPointForm, HeatError> {
        let (a, b) = loop_coefficients(d);
        Ok(MultiPointForm::monomial(a, &[AntiholoGenerator::new(point, 0)])
            .add(&MultiPointForm::monomial(b, &[AntiholoGenerator::new(point, 1)])))
    }

    fn translation_invariant(&self) -> bool {
        true
    }
}

fn banana_assignment() -> GraphAssignment {
    let slots_a = vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![2, 0]];
    let slots_b = vec![vec![0, 2], vec![1, 1], vec![0, 0], vec![1, 0]];
    GraphAssignment::new(
        2,
        DirectedGraph::banana(4),
        vec![
            LagrangianDensity { slots: slots_a, coefficient: VertexCoefficient::default() },
            LagrangianDensity { slots: slots_b, coefficient: VertexCoefficient::default() },
        ],
    )
}

fn bouquet_assignment() -> GraphAssignment {
    let slots = vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![2, 1]];
    GraphAssignment::new(
        2,
        DirectedGraph::bouquet(2),
        vec![LagrangianDensity { slots, coefficient: VertexCoefficient::default() }],
    )
}

fn unit_torus(n: usize) -> Lattice {
    Lattice::square(n, 1.0)
}

fn fd_a(l: &Lattice) -> FakeDistance {
    FakeDistance::new(l, 0.2, 0.4, 0.25, None).unwrap()
}

fn fd_b(l: &Lattice) -> FakeDistance {
    FakeDistance::new(l, 0.15, 0.45, 0.1, None).unwrap()
}

fn without_wall_time(r: &GraphIntegralResult) -> GraphIntegralResult {
    let mut r = r.clone();
    r.estimates.iter_mut().for_each(|e| e.wall_time = 0.0);
    r
}

#[test]
fn singular_homogeneity_matches_the_flat_kernel() {
    for n in 1..=3 {
        assert_eq!(singular_homogeneity(n), (2 * n - 1) as f64);
    }
}

#[test]
fn schedule_values_and_validation() {
    let s = CutoffSchedule { eps_max: 0.2, ratio: 0.5, count: 4 };
    assert_eq!(s.values(), vec![0.2, 0.1, 0.05, 0.025]);
    assert!(s.validate().is_ok());
    assert!(CutoffSchedule { count: 3, ..s }.validate().is_err());
    assert!(CutoffSchedule { ratio: 1.0, ..s }.validate().is_err());
    assert!(CutoffSchedule { eps_max: -1.0, ..s }.validate().is_err());
    let basis = ExtrapolationModel::EpsLogEps.basis(0.25);
    assert_eq!(basis, [1.0, 0.25 * 0.25f64.ln(), 0.25]);
}

#[test]
fn zero_by_type_gives_exact_zero_with_note() {
    let lattice = unit_torus(1);
    let kernel = PropagatorKernel::new(lattice.clone(), PropagatorConfig::default()).unwrap();
    let a = GraphAssignment::trivial(1, DirectedGraph::banana(3));
    let itg = assemble_integrand(&a, &kernel).unwrap();
    assert_eq!(itg.verdict(), TypeVerdict::ZeroByType);
    let fd = FakeDistance::new(&lattice, 0.2, 0.4, 0.25, None).unwrap();
    let r = graph_integral(&itg, &fd, &CutoffSchedule::default(), &IntegrationStrategy::monte_carlo(1000, 1)).unwrap();
    assert_eq!(r.value, c(0.0, 0.0));
    assert_eq!(r.stat_error, 0.0);
    assert_eq!(r.systematic, 0.0);
    assert!(r.flat && !r.flagged && r.cauchy.ok);
    assert_eq!(r.evaluations, 0);
    assert!(r.notes.iter().any(|n| n.contains("zero-by-type")));
}

#[test]
fn empty_cutoff_region_gives_zero_with_warning() {
    let lattice = unit_torus(2);
    let kernel = SingularBanana { lattice: lattice.clone() };
    let itg = assemble_integrand(&banana_assignment(), &kernel).unwrap();
    let fd = fd_a(&lattice);
    let (e, notes) = cutoff_integral(&itg, &fd, 10.0 * fd.sup(), &IntegrationStrategy::monte_carlo(1000, 3)).unwrap();
    assert_eq!(e.value, c(0.0, 0.0));
    assert_eq!(e.stat_err, 0.0);
    assert!(notes.iter().any(|n| n.contains("empty")), "{notes:?}");
    assert!(cutoff_integral(&itg, &fd, 0.0, &IntegrationStrategy::monte_carlo(1000, 3)).is_err());
}

#[test]
fn propagator_self_loops_sweep_is_exactly_flat_zero() {
    let lattice = unit_torus(2);
    let kernel = PropagatorKernel::new(lattice.clone(), PropagatorConfig::default()).unwrap();
    let itg = assemble_integrand(&GraphAssignment::trivial(2, DirectedGraph::bouquet(2)), &kernel).unwrap();
    let fd = fd_a(&lattice);
    let r = graph_integral(&itg, &fd, &CutoffSchedule::default(), &IntegrationStrategy::monte_carlo(2000, 5)).unwrap();
    assert!(r.flat);
    assert!(r.estimates.iter().all(|e| e.value == c(0.0, 0.0)));
    assert_eq!(r.value, c(0.0, 0.0));
    assert!(r.cauchy.ok && !r.flagged);
}

/// `−4(a₁b₂ − a₂b₁)` from the two loop one-forms, then times the covolume.
fn constant_loop_oracle(kernel: &ConstantLoop, derivs: &[LegDerivs]) -> Complex64 {
    let (a1, b1) = loop_coefficients(&derivs[0]);
    let (a2, b2) = loop_coefficients(&derivs[1]);
    (a1 * b2 - a2 * b1) * -4.0 * kernel.lattice.covolume()
}

#[test]
fn constant_self_loop_integrand_is_covolume_times_density() {
    let lattice = Lattice::new(vec![
        vec![1.0, 0.0, 0.0, 0.0],
        vec![0.3, 1.2, 0.0, 0.0],
        vec![0.0, 0.0, 0.9, 0.1],
        vec![0.0, 0.1, 0.0, 1.1],
    ])
    .unwrap();
    let kernel = ConstantLoop { lattice: lattice.clone() };
    let a = bouquet_assignment();
    let itg = assemble_integrand(&a, &kernel).unwrap();
    assert_ne!(itg.edge_derivs()[0], itg.edge_derivs()[1]);
    let want = constant_loop_oracle(&kernel, itg.edge_derivs());
    assert!(want.norm() > 0.1);
    let fd = FakeDistance::new(&lattice, 0.1, 0.3, 0.2, None).unwrap();
    let schedule = CutoffSchedule::default();
    for strategy in [
        IntegrationStrategy::monte_carlo(3000, 11),
        IntegrationStrategy::monte_carlo(3000, 11).with_pinning(Pinning::Off),
        IntegrationStrategy::quadrature(2, 1),
    ] {
        let r = graph_integral(&itg, &fd, &schedule, &strategy).unwrap();
        assert!(r.flat, "{strategy:?}");
        assert!((r.value - want).norm() <= 1e-12 * want.norm(), "{strategy:?}: {} vs {want}", r.value);
        assert!(r.systematic <= 1e-12 * want.norm());
        assert!(!r.flagged);
    }
}

#[test]
fn pinned_and_unpinned_self_loop_runs_agree() {
    let lattice = unit_torus(2).scaled(1.3);
    let kernel = ConstantLoop { lattice: lattice.clone() };
    let a = bouquet_assignment();
    let fds = [FakeDistance::new(&lattice, 0.2, 0.5, 0.3, None).unwrap(), FakeDistance::new(&lattice, 0.1, 0.6, 0.05, None).unwrap()];
    let report =
        invariance_suite(&a, &kernel, &fds, &CutoffSchedule::default(), &IntegrationStrategy::monte_carlo(2000, 2))
            .unwrap();
    assert!(!report.flagged);
    let p = report.pinning.as_ref().expect("translation-invariant");
    assert!(p.discrepancy <= 1e-12 * p.a.norm(), "{p:?}");
    for cmp in &report.fake_distance {
        assert!(cmp.discrepancy <= 1e-12 * cmp.a.norm(), "{cmp:?}");
    }
}

#[test]
fn pinning_requires_translation_invariance() {
    let lattice = unit_torus(1);
    let kernel = ScalarEdge { lattice: lattice.clone(), g: Box::new(|u: Complex64| (-u.norm_sqr()).exp().into()) };
    let mut a = GraphAssignment::trivial(1, DirectedGraph::banana(1));
    a.densities[0].coefficient = VertexCoefficient::Character { amplitude: c(1.0, 0.0), dual: vec![1, 0] };
    let itg = assemble_integrand(&a, &kernel).unwrap();
    let fd = FakeDistance::new(&lattice, 0.2, 0.4, 0.25, None).unwrap();
    let on = IntegrationStrategy::quadrature(4, 1).with_pinning(Pinning::On);
    assert!(matches!(cutoff_sweep(&itg, &fd, &[0.1, 0.05], &on), Err(IntegratorError::Invalid(_))));
    let auto = cutoff_sweep(&itg, &fd, &[0.1, 0.05], &IntegrationStrategy::quadrature(4, 1)).unwrap();
    assert!(!auto.pinned);
}

#[test]
fn monte_carlo_is_deterministic_across_thread_counts() {
    let lattice = unit_torus(2);
    let kernel = SingularBanana { lattice: lattice.clone() };
    let itg = assemble_integrand(&banana_assignment(), &kernel).unwrap();
    let fd = fd_a(&lattice);
    let strategy = IntegrationStrategy::monte_carlo(20_000, 42);
    let schedule = CutoffSchedule::default();
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| graph_integral(&itg, &fd, &schedule, &strategy).unwrap())
    };
    let one = without_wall_time(&run(1));
    let three = without_wall_time(&run(3));
    assert_eq!(one.to_json(), three.to_json());
    assert_eq!(one.metadata.seed, Some(42));
    let other = graph_integral(&itg, &fd, &schedule, &IntegrationStrategy::monte_carlo(20_000, 43)).unwrap();
    assert_ne!(other.value, one.value);
}

#[test]
fn doubled_samples_agree_within_three_sigma() {
    let lattice = unit_torus(2);
    let kernel = SingularBanana { lattice: lattice.clone() };
    let itg = assemble_integrand(&banana_assignment(), &kernel).unwrap();
    let fd = fd_a(&lattice);
    let (a, _) = cutoff_integral(&itg, &fd, 1e-2, &IntegrationStrategy::monte_carlo(100_000, 7)).unwrap();
    let (b, _) = cutoff_integral(&itg, &fd, 1e-2, &IntegrationStrategy::monte_carlo(200_000, 8)).unwrap();
    let sigma = a.stat_err.hypot(b.stat_err);
    println!("ε = 1e-2: {} ± {:.2e} vs {} ± {:.2e}", a.value, a.stat_err, b.value, b.stat_err);
    assert!(a.value.norm() > 10.0 * sigma, "estimate is noise");
    assert!((a.value - b.value).norm() <= 3.0 * sigma);
    assert!(b.stat_err < a.stat_err);
}

#[test]
fn singular_banana_sweep_is_cauchy_and_independent_of_fake_distance() {
    let lattice = unit_torus(2);
    let kernel = SingularBanana { lattice: lattice.clone() };
    let fds = [fd_a(&lattice), fd_b(&lattice)];
    let schedule = CutoffSchedule { eps_max: 0.05, ratio: 0.5, count: 6 };
    let report =
        invariance_suite(&banana_assignment(), &kernel, &fds, &schedule, &IntegrationStrategy::monte_carlo(150_000, 9))
            .unwrap();
    for r in &report.runs {
        println!(
            "banana: {} ± {:.2e} (sys {:.2e}), differences {:?}",
            r.value, r.stat_error, r.systematic, r.cauchy.differences
        );
        assert!(r.cauchy.ok, "{:?}", r.cauchy);
        assert!(r.monotone);
        assert!(!r.flat);
        assert!(r.value.norm() > 3.0 * r.total_error());
    }
    for cmp in report.fake_distance.iter().chain(report.pinning.iter()).chain([&report.permutation]) {
        println!("{}: discrepancy {:.2e}, tolerance {:.2e}", cmp.label, cmp.discrepancy, cmp.tolerance);
        assert!(cmp.pass, "{cmp:?}");
    }
    // statistical errors alone, on the √ε model the sweep follows
    let stat = report.runs[0].stat_error * 2f64.sqrt();
    let (a, b) = (&report.runs[0], &report.runs[1]);
    assert!((a.fits[0].c0() - b.fits[0].c0()).norm() <= 3.0 * a.stat_error.hypot(b.stat_error));
    assert!(report.pinning.as_ref().unwrap().discrepancy <= 3.0 * stat);
    assert!(report.permutation.discrepancy <= 3.0 * stat);
    assert!(a.fits[0].chi2_per_dof < a.fits[1].chi2_per_dof);
    assert_eq!(report.permutation.expected_factor, 1.0);
    assert!(!report.flagged);
}

#[test]
fn log_divergent_sequence_is_flagged() {
    let lattice = unit_torus(1);
    let kernel = ScalarEdge { lattice: lattice.clone(), g: Box::new(|u: Complex64| c(1.0 / u.norm_sqr(), 0.0)) };
    let itg = assemble_integrand(&GraphAssignment::trivial(1, DirectedGraph::banana(1)), &kernel).unwrap();
    let fd = FakeDistance::new(&lattice, 0.3, 0.45, 0.2, None).unwrap();
    let schedule = CutoffSchedule { eps_max: 0.02, ratio: 0.5, count: 6 };
    let r = graph_integral(&itg, &fd, &schedule, &IntegrationStrategy::monte_carlo(200_000, 4)).unwrap();
    println!("differences {:?}, errors {:?}", r.cauchy.differences, r.cauchy.errors);
    // each halving adds 4π ln 2 for the density 4/|u|²
    let step = 4.0 * PI * 2f64.ln();
    for (d, s) in r.cauchy.differences.iter().zip(&r.cauchy.errors) {
        assert!((d - step).abs() <= 4.0 * s + 1e-9, "{d} vs {step} ± {s}");
    }
    assert!(!r.cauchy.contracting);
    assert!(r.flagged);
    assert!(r.notes.iter().any(|n| n.contains("not Cauchy")));
}

/// Smooth part of the single-pole integrand: `A u² |u|⁴ e^{−20|u|²}` gives
/// the value, the other terms cancel under rotation by a quarter turn.
const AMPLITUDE: f64 = 1000.0;

fn equivalence_beta(z: Complex64) -> Complex64 {
    let r2 = z.norm_sqr();
    let gauss = (-20.0 * r2).exp();
    z * z * (AMPLITUDE * r2 * r2 * gauss) + (c(0.7, -0.2) + z.conj() * c(-0.4, 1.1) + z * c(0.3, 0.5)) * gauss
}

#[test]
fn single_pair_graph_matches_defining_function_principal_value() {
    let lattice = Lattice::square(1, 4.0);
    let kernel = ScalarEdge { lattice: lattice.clone(), g: Box::new(|u: Complex64| equivalence_beta(u) / (u * u)) };
    let itg = assemble_integrand(&GraphAssignment::trivial(1, DirectedGraph::banana(1)), &kernel).unwrap();
    // density 4g(u) against Lebesgue measure on both points
    let pts = vec![vec![0.3, -0.2], vec![0.55, 0.1]];
    let u = c(0.25, 0.3);
    let g = equivalence_beta(u) / (u * u);
    assert!((itg.eval(&pts).unwrap() - g * 4.0).norm() <= 1e-12 * g.norm());

    let fd = FakeDistance::new(&lattice, 1.2, 1.8, 1.0, None).unwrap();
    let schedule = CutoffSchedule { eps_max: 1e-3, ratio: 0.5, count: 6 };
    let graph = graph_integral(&itg, &fd, &schedule, &IntegrationStrategy::quadrature(16, 16)).unwrap();
    assert!(graph.metadata.pinned);

    let pv_itg = PVIntegrand::new("single-pair", vec![2], vec![0], 0, Beta::closure(1, |z: &[Complex64]| equivalence_beta(z[0])))
        .unwrap();
    let pv = cutoff_by_defining_function(
        &pv_itg,
        &|z: &[Complex64]| z[0].norm_sqr(),
        &[1],
        &DeltaSchedule::default(),
        DirectQuadrature::default(),
    )
    .unwrap();
    // ∫ A|u|⁴e^{−20|u|²} dz∧dz̄ = −2i · 2πA/20³
    let oracle = c(0.0, -2.0 * 2.0 * PI * AMPLITUDE / 8000.0);
    let from_graph = graph.value / (4.0 * lattice.covolume()) * c(0.0, -2.0);
    println!("graph {from_graph}, pv {}, oracle {oracle}", pv.value);
    assert!((from_graph - pv.value).norm() <= 1e-4, "{from_graph} vs {}", pv.value);
    assert!((pv.value - oracle).norm() <= 1e-4);
    assert!((from_graph - oracle).norm() <= 1e-4);
}

#[test]
fn results_write_json_and_csv() {
    let lattice = unit_torus(1);
    let kernel = ScalarEdge {
        lattice: lattice.clone(),
        g: Box::new(|u: Complex64| c((-4.0 * u.norm_sqr()).exp(), 0.0)),
    };
    let itg = assemble_integrand(&GraphAssignment::trivial(1, DirectedGraph::banana(1)), &kernel).unwrap();
    let fd = FakeDistance::new(&lattice, 0.2, 0.4, 0.25, None).unwrap();
    let r = graph_integral(&itg, &fd, &CutoffSchedule::default(), &IntegrationStrategy::quadrature(8, 2)).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("run.json");
    let csv_path = dir.path().join("sweep.csv");
    r.write_json(&json).unwrap();
    r.write_csv(&csv_path).unwrap();
    let back: GraphIntegralResult = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(back, r);
    assert_eq!(back.metadata.graph_hash, itg.assignment().fingerprint());
    assert_eq!(back.metadata.fake_distance_hash, fd.fingerprint());
    let text = std::fs::read_to_string(&csv_path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("eps,re,im,stat_err,wall_time"));
    assert_eq!(lines.count(), r.estimates.len());
}

#[test]
fn invalid_strategies_are_rejected() {
    let lattice = unit_torus(1);
    let kernel = ScalarEdge { lattice: lattice.clone(), g: Box::new(|_| c(1.0, 0.0)) };
    let itg = assemble_integrand(&GraphAssignment::trivial(1, DirectedGraph::banana(1)), &kernel).unwrap();
    let fd = FakeDistance::new(&lattice, 0.2, 0.4, 0.25, None).unwrap();
    let eps = [0.1, 0.05];
    assert!(cutoff_sweep(&itg, &fd, &[0.05, 0.1], &IntegrationStrategy::quadrature(4, 1)).is_err());
    assert!(cutoff_sweep(&itg, &fd, &eps, &IntegrationStrategy::quadrature(0, 1)).is_err());
    assert!(cutoff_sweep(&itg, &fd, &eps, &IntegrationStrategy::monte_carlo(1, 1)).is_err());
    let huge = IntegrationStrategy::quadrature(200, 10).with_pinning(Pinning::Off);
    assert!(cutoff_sweep(&itg, &fd, &eps, &huge).is_err());
    let bad_fd = FakeDistance { r0: 0.3, r1: 0.9, plateau: 0.2, bump: None };
    assert!(cutoff_sweep(&itg, &bad_fd, &eps, &IntegrationStrategy::quadrature(4, 1)).is_err());
}

#[test]
fn strategy_serializes_with_defaults() {
    let s: IntegrationStrategy = serde_json::from_str(r#"{"backend":{"kind":"monte-carlo","samples":10,"seed":3}}"#).unwrap();
    assert_eq!(s, IntegrationStrategy::monte_carlo(10, 3));
    let q: IntegrationStrategy =
        serde_json::from_str(r#"{"backend":{"kind":"tensor-quadrature","order":6},"pinning":"off"}"#).unwrap();
    assert_eq!(q, IntegrationStrategy::quadrature(6, 1).with_pinning(Pinning::Off));
    assert!(serde_json::from_str::<IntegrationStrategy>(r#"{"backend":{"kind":"monte-carlo","samples":1,"seed":1,"x":0}}"#).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn one_pass_sweep_matches_separate_cutoffs(
        e0 in 0.01f64..0.2,
        ratios in proptest::collection::vec(0.2f64..0.9, 1..4),
        order in 4usize..10,
    ) {
        let lattice = unit_torus(1);
        let kernel = ScalarEdge {
            lattice: lattice.clone(),
            g: Box::new(|u: Complex64| c(1.0 / u.norm(), (u.re * 3.0).sin())),
        };
        let itg = assemble_integrand(&GraphAssignment::trivial(1, DirectedGraph::banana(1)), &kernel).unwrap();
        let fd = FakeDistance::new(&lattice, 0.2, 0.4, 0.25, None).unwrap();
        let mut eps = vec![e0];
        for r in &ratios {
            eps.push(eps.last().unwrap() * r);
        }
        for strategy in [IntegrationStrategy::quadrature(order, 2), IntegrationStrategy::monte_carlo(3000, order as u64)] {
            let sweep = cutoff_sweep(&itg, &fd, &eps, &strategy).unwrap();
            for (est, &e) in sweep.estimates.iter().zip(&eps) {
                let (single, _) = cutoff_integral(&itg, &fd, e, &strategy).unwrap();
                prop_assert!((single.value - est.value).norm() <= 1e-12 * (1.0 + est.abs_integral));
            }
        }
    }

    #[test]
    fn nonnegative_density_grows_as_cutoff_shrinks(seed in 0u64..1000) {
        let lattice = unit_torus(1);
        let kernel = ScalarEdge { lattice: lattice.clone(), g: Box::new(|u: Complex64| c(1.0 / u.norm(), 0.0)) };
        let itg = assemble_integrand(&GraphAssignment::trivial(1, DirectedGraph::banana(1)), &kernel).unwrap();
        let fd = FakeDistance::new(&lattice, 0.2, 0.4, 0.25, None).unwrap();
        let sweep = cutoff_sweep(&itg, &fd, &[0.1, 0.05, 0.02, 0.01], &IntegrationStrategy::monte_carlo(2000, seed)).unwrap();
        for w in sweep.estimates.windows(2) {
            prop_assert!(w[1].value.re >= w[0].value.re);
            prop_assert!(w[1].abs_integral >= w[0].abs_integral);
        }
    }
}
