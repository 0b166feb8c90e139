use holo_forms::{AntiholoGenerator, GradedKernelValue, MultiPointForm};
use holo_graph::{
    assemble_integrand, degree_selection, Diagnostic, DirectedGraph, EdgeKernel, End, GraphAssignment, GraphError,
    LagrangianDensity, TypeVerdict, VertexCoefficient,
};
use holo_heat::{HeatError, LegDerivs, PropagatorConfig, PropagatorKernel};
use holo_lattice::Lattice;
use num_complex::Complex64;
use proptest::prelude::*;

/// Kernel with a generic two-point value of a chosen degree; not
/// annihilated by total contraction, so top densities are nonzero.
struct Synthetic {
    lattice: Lattice,
    degree: usize,
}

fn seed(x: &[f64], d: &[u32]) -> f64 {
    x.iter().enumerate().map(|(j, v)| (j as f64 + 1.0) * v).sum::<f64>()
        + d.iter().enumerate().map(|(j, &k)| 0.61 * (j as f64 + 1.3) * k as f64).sum::<f64>()
}

fn wave(s: f64, k: usize) -> Complex64 {
    let k = k as f64 + 1.0;
    Complex64::new((1.7 * k * s + 0.2).cos() + 0.1 * k, (0.9 * k * s - 0.4 * k).sin())
}

impl EdgeKernel for Synthetic {
    fn n(&self) -> usize {
        self.lattice.n()
    }

    fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    fn form_degree(&self) -> usize {
        self.degree
    }

    fn edge_form(&self, head: &[f64], tail: &[f64], d: &LegDerivs) -> Result<GradedKernelValue, HeatError> {
        let n = self.n();
        let (sh, st) = (seed(head, &d.head), seed(tail, &d.tail) + 0.37);
        let gens: Vec<AntiholoGenerator> =
            (0..2).flat_map(|p| (0..n).map(move |i| AntiholoGenerator::new(p, i))).collect();
        let mut form = MultiPointForm::zero();
        // every increasing choice of `degree` generators among the 2n
        let m = gens.len();
        for mask in 0u32..(1 << m) {
            if mask.count_ones() as usize != self.degree {
                continue;
            }
            let mono: Vec<AntiholoGenerator> = (0..m).filter(|b| mask >> b & 1 == 1).map(|b| gens[b]).collect();
            let c = wave(sh, mask as usize) * wave(st, 2 * mask as usize + 1);
            form = form.add(&MultiPointForm::monomial(c, &mono));
        }
        Ok(GradedKernelValue { form, head: 0, tail: 1, dt: false })
    }

    fn diagonal_form(&self, x: &[f64], d: &LegDerivs, point: usize) -> Result<MultiPointForm, HeatError> {
        Ok(self.edge_form(x, x, d)?.form.map_points(|_| point))
    }
}

fn synthetic(n: usize, degree: usize) -> Synthetic {
    Synthetic { lattice: Lattice::square(n, 1.0), degree }
}

/// Banana with four distinct slot multi-indices at each end.
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

fn points2(a: [f64; 4], b: [f64; 4]) -> Vec<Vec<f64>> {
    vec![a.to_vec(), b.to_vec()]
}

fn permutation_sign(p: &[usize]) -> f64 {
    let mut inv = 0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                inv += 1;
            }
        }
    }
    if inv % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, k - 1);
            out.push(q);
        }
    }
    out
}

/// Leibniz expansion of a square complex determinant.
fn leibniz_det(a: &[Vec<Complex64>]) -> Complex64 {
    permutations(a.len())
        .iter()
        .map(|p| p.iter().enumerate().map(|(r, &c)| a[r][c]).product::<Complex64>() * permutation_sign(p))
        .sum()
}

/// Top density of the banana built independently: row `e` holds the
/// one-form of edge `e` on the generators `(0,0), (0,1), (1,0), (1,1)`.
fn banana_oracle(kernel: &Synthetic, a: &GraphAssignment, pts: &[Vec<f64>]) -> Complex64 {
    let idx = a.edge_multi_indices();
    let gens = [(0, 0), (0, 1), (1, 0), (1, 1)];
    let rows: Vec<Vec<Complex64>> = a
        .graph
        .edges
        .iter()
        .zip(&idx)
        .map(|(&(t, h), (jt, jh))| {
            let d = LegDerivs::new(jh.clone(), jt.clone());
            let f = kernel.edge_form(&pts[h], &pts[t], &d).unwrap();
            gens.iter()
                .map(|&(p, i)| {
                    // label 0 is the head, label 1 the tail
                    let label = if p == h { 0 } else { 1 };
                    f.form.coefficient(&[AntiholoGenerator::new(label, i)])
                })
                .collect()
        })
        .collect();
    leibniz_det(&rows) * Complex64::new(0.0, -2.0).powu(4)
}

#[test]
fn validate_accepts_banana_with_degree_four_densities() {
    assert_eq!(GraphAssignment::trivial(2, DirectedGraph::banana(4)).validate(), None);
    assert_eq!(banana_assignment().validate(), None);
}

#[test]
fn validate_reports_degree_mismatch() {
    let mut a = GraphAssignment::trivial(2, DirectedGraph::banana(4));
    a.densities[1] = LagrangianDensity::trivial(3, 2);
    assert_eq!(a.validate(), Some(Diagnostic::DegreeMismatch { vertex: 1, density: 3, graph: 4 }));
}

#[test]
fn validate_reports_dangling_head() {
    let a = GraphAssignment::new(2, DirectedGraph::new(2, vec![(0, 1), (1, 5)]), vec![]);
    assert_eq!(a.validate(), Some(Diagnostic::DanglingEndpoint { edge: 1, end: End::Head, vertex: 5 }));
}

#[test]
fn validate_reports_slot_problems() {
    let mut a = GraphAssignment::trivial(2, DirectedGraph::banana(2));
    a.densities[0].slots[1] = vec![0];
    assert_eq!(a.validate(), Some(Diagnostic::SlotDimension { vertex: 0, slot: 1, expected: 2, got: 1 }));
    let a = GraphAssignment::trivial(2, DirectedGraph::banana(2)).with_slot_maps(vec![vec![0, 0], vec![0, 1]]);
    assert_eq!(a.validate(), Some(Diagnostic::SlotMapNotBijective { vertex: 0 }));
    let a = GraphAssignment::trivial(2, DirectedGraph::banana(2)).with_slot_maps(vec![vec![0], vec![0, 1]]);
    assert_eq!(a.validate(), Some(Diagnostic::SlotMapLength { vertex: 0, expected: 2, got: 1 }));
}

#[test]
fn invalid_assignment_is_rejected_by_assembly() {
    let k = synthetic(2, 1);
    let a = GraphAssignment::new(2, DirectedGraph::banana(1), vec![]);
    assert!(matches!(assemble_integrand(&a, &k), Err(GraphError::Invalid(_))));
}

#[test]
fn zero_by_type_evaluator_is_identically_zero() {
    let kernel = PropagatorKernel::new(Lattice::square(1, 1.0), PropagatorConfig::default()).unwrap();
    for g in [DirectedGraph::banana(1), DirectedGraph::banana(3), DirectedGraph::new(3, vec![(0, 1), (1, 2), (2, 0)])] {
        let a = GraphAssignment::trivial(1, g.clone());
        let f = assemble_integrand(&a, &kernel).unwrap();
        assert_eq!(f.verdict(), TypeVerdict::ZeroByType);
        let pts: Vec<Vec<f64>> = (0..g.vertices).map(|v| vec![0.1 + 0.23 * v as f64, 0.05 * v as f64]).collect();
        assert_eq!(f.eval(&pts).unwrap(), Complex64::new(0.0, 0.0));
    }
}

#[test]
fn single_edge_assembly_is_the_top_projected_kernel() {
    let pts = points2([0.1, 0.2, 0.0, 0.0], [0.4, -0.3, 0.0, 0.0]);
    let kernel = synthetic(1, 2);
    let a = GraphAssignment::trivial(1, DirectedGraph::banana(1));
    let f = assemble_integrand(&a, &kernel).unwrap();
    assert_eq!(f.verdict(), TypeVerdict::Admissible);
    let p: Vec<Vec<f64>> = pts.iter().map(|x| x[..2].to_vec()).collect();
    let direct = kernel.edge_form(&p[1], &p[0], &LegDerivs::new(vec![0], vec![0])).unwrap().relabel(1, 0);
    let expect = direct.form.top_density(2, 1);
    assert!(expect.norm() > 1e-3);
    assert_eq!(f.eval(&p).unwrap(), expect);

    let prop = PropagatorKernel::new(Lattice::square(1, 1.0), PropagatorConfig::default()).unwrap();
    let f = assemble_integrand(&a, &prop).unwrap();
    let v = prop.eval(&[Complex64::new(0.4, -0.3)], &[Complex64::new(0.1, 0.2)], &LegDerivs::none()).unwrap();
    assert_eq!(f.eval(&p).unwrap(), v.form.top_density(2, 1));
}

#[test]
fn banana_density_matches_determinant_oracle() {
    let kernel = synthetic(2, 1);
    let a = banana_assignment();
    let f = assemble_integrand(&a, &kernel).unwrap();
    let pts = points2([0.11, 0.27, -0.3, 0.05], [0.41, -0.13, 0.22, 0.37]);
    let got = f.eval(&pts).unwrap();
    let want = banana_oracle(&kernel, &a, &pts);
    assert!(want.norm() > 1e-2, "oracle degenerate: {want}");
    assert!((got - want).norm() <= 1e-12 * want.norm(), "{got} vs {want}");
}

#[test]
fn every_edge_permutation_flips_by_its_sign() {
    let kernel = synthetic(2, 1);
    let a = banana_assignment();
    let pts = points2([0.11, 0.27, -0.3, 0.05], [0.41, -0.13, 0.22, 0.37]);
    let base = assemble_integrand(&a, &kernel).unwrap().eval(&pts).unwrap();
    for order in permutations(4) {
        let b = a.reorder_edges(&order);
        let v = assemble_integrand(&b, &kernel).unwrap().eval(&pts).unwrap();
        let want = base * permutation_sign(&order);
        assert!((v - want).norm() <= 1e-12 * base.norm(), "{order:?}: {v} vs {want}");
        assert!((banana_oracle(&kernel, &b, &pts) - want).norm() <= 1e-12 * base.norm());
    }
}

#[test]
fn vertex_relabel_preserves_value_in_even_dimension() {
    let kernel = synthetic(2, 1);
    let a = banana_assignment();
    let pts = points2([0.11, 0.27, -0.3, 0.05], [0.41, -0.13, 0.22, 0.37]);
    let base = assemble_integrand(&a, &kernel).unwrap().eval(&pts).unwrap();
    let b = a.relabel(&[1, 0]);
    let swapped = vec![pts[1].clone(), pts[0].clone()];
    let v = assemble_integrand(&b, &kernel).unwrap().eval(&swapped).unwrap();
    assert!((v - base).norm() <= 1e-12 * base.norm());
}

#[test]
fn vertex_relabel_sign_in_odd_dimension() {
    // n = 1, two vertices, one edge carrying a top two-point form
    let kernel = synthetic(1, 2);
    let a = GraphAssignment::trivial(1, DirectedGraph::banana(1));
    let pts = vec![vec![0.1, 0.2], vec![0.35, -0.1]];
    let base = assemble_integrand(&a, &kernel).unwrap().eval(&pts).unwrap();
    let b = a.relabel(&[1, 0]);
    let v = assemble_integrand(&b, &kernel).unwrap().eval(&[pts[1].clone(), pts[0].clone()]).unwrap();
    assert!((v + base).norm() <= 1e-12 * base.norm());
    assert!((v.norm() - base.norm()).abs() <= 1e-12 * base.norm());
}

#[test]
fn linear_in_each_vertex_coefficient() {
    let kernel = synthetic(2, 1);
    let a = banana_assignment();
    let pts = points2([0.11, 0.27, -0.3, 0.05], [0.41, -0.13, 0.22, 0.37]);
    let base = assemble_integrand(&a, &kernel).unwrap().eval(&pts).unwrap();
    let c = Complex64::new(-0.7, 2.1);
    let mut b = a.clone();
    b.densities[1].coefficient = b.densities[1].coefficient.scaled(c);
    let v = assemble_integrand(&b, &kernel).unwrap().eval(&pts).unwrap();
    assert!((v - base * c).norm() <= 1e-12 * base.norm());

    let mut ch = a.clone();
    ch.densities[0].coefficient = VertexCoefficient::Character { amplitude: c, dual: vec![1, 0, 0, 2] };
    let f = assemble_integrand(&ch, &kernel).unwrap();
    assert!(!f.translation_invariant());
    let phase = 2.0 * std::f64::consts::PI * (pts[0][0] + 2.0 * pts[0][3]);
    let want = base * c * Complex64::from_polar(1.0, phase);
    assert!((f.eval(&pts).unwrap() - want).norm() <= 1e-12 * base.norm());
}

#[test]
fn slot_map_routes_derivatives_to_edges() {
    let a = banana_assignment();
    let idx = a.edge_multi_indices();
    assert_eq!(idx[0], (vec![0, 0], vec![0, 2]));
    assert_eq!(idx[3], (vec![2, 0], vec![1, 0]));
    let b = a.clone().with_slot_maps(vec![vec![3, 2, 1, 0], vec![0, 1, 2, 3]]);
    assert_eq!(b.edge_multi_indices()[0], (vec![2, 0], vec![0, 2]));
    let kernel = synthetic(2, 1);
    let f = assemble_integrand(&b, &kernel).unwrap();
    assert_eq!(f.edge_derivs()[0], LegDerivs::new(vec![0, 2], vec![2, 0]));
}

#[test]
fn propagator_banana_vanishes_under_total_contraction() {
    let kernel = PropagatorKernel::new(Lattice::square(2, 1.0), PropagatorConfig::default()).unwrap();
    let a = GraphAssignment::trivial(2, DirectedGraph::banana(4));
    let f = assemble_integrand(&a, &kernel).unwrap();
    assert_eq!(f.verdict(), TypeVerdict::Admissible);
    let pts = points2([0.11, 0.27, -0.3, 0.05], [0.41, -0.13, 0.22, 0.37]);
    let u: Vec<f64> = pts[1].iter().zip(&pts[0]).map(|(a, b)| a - b).collect();
    let scale = kernel.coefficients_real(&u, &LegDerivs::none()).unwrap().coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let v = f.eval(&pts).unwrap();
    assert!(v.norm() <= 1e-12 * 16.0 * scale.powi(4), "{v}");
}

#[test]
fn propagator_bouquet_is_exactly_zero_for_n2() {
    let kernel = PropagatorKernel::new(Lattice::square(2, 1.0), PropagatorConfig::default()).unwrap();
    let a = GraphAssignment::trivial(2, DirectedGraph::bouquet(2));
    let f = assemble_integrand(&a, &kernel).unwrap();
    assert_eq!(degree_selection(&a.graph, 2), TypeVerdict::Admissible);
    assert!(f.translation_invariant());
    assert_eq!(f.eval(&[vec![0.3, 0.1, -0.2, 0.4]]).unwrap(), Complex64::new(0.0, 0.0));
}

#[test]
fn coincident_points_on_an_edge_are_rejected() {
    let kernel = PropagatorKernel::new(Lattice::square(2, 1.0), PropagatorConfig::default()).unwrap();
    let a = GraphAssignment::trivial(2, DirectedGraph::banana(4));
    let f = assemble_integrand(&a, &kernel).unwrap();
    let p = vec![0.1, 0.2, 0.3, 0.4];
    let shifted = vec![1.1, 0.2, 0.3, -0.6];
    assert_eq!(f.eval(&[p.clone(), shifted]), Err(GraphError::Coincident { edge: 0 }));
    assert!(matches!(f.eval(&[p.clone()]), Err(GraphError::PointCount { expected: 2, got: 1 })));
}

#[test]
fn assignment_round_trips_through_json() {
    let mut a = banana_assignment();
    a.densities[0].coefficient = VertexCoefficient::Character { amplitude: Complex64::new(1.0, -0.5), dual: vec![0, 1, 0, 0] };
    let s = serde_json::to_string(&a).unwrap();
    let b: GraphAssignment = serde_json::from_str(&s).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.fingerprint(), b.fingerprint());
    assert_ne!(a.fingerprint(), a.reorder_edges(&[1, 0, 2, 3]).fingerprint());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn edge_reorder_sign_holds_at_random_points(
        x in proptest::collection::vec(-0.5f64..0.5, 8),
        perm_index in 0usize..24,
    ) {
        let kernel = synthetic(2, 1);
        let a = banana_assignment();
        let pts = vec![x[..4].to_vec(), x[4..].to_vec()];
        let base = assemble_integrand(&a, &kernel).unwrap().eval(&pts).unwrap();
        let oracle = banana_oracle(&kernel, &a, &pts);
        prop_assert!((base - oracle).norm() <= 1e-11 * (1.0 + oracle.norm()));
        let order = &permutations(4)[perm_index];
        let v = assemble_integrand(&a.reorder_edges(order), &kernel).unwrap().eval(&pts).unwrap();
        prop_assert!((v - base * permutation_sign(order)).norm() <= 1e-11 * (1.0 + base.norm()));
    }

    #[test]
    fn relabel_preserves_absolute_value(x in proptest::collection::vec(-0.5f64..0.5, 8)) {
        let kernel = synthetic(2, 1);
        let a = banana_assignment();
        let pts = vec![x[..4].to_vec(), x[4..].to_vec()];
        let base = assemble_integrand(&a, &kernel).unwrap().eval(&pts).unwrap();
        let v = assemble_integrand(&a.relabel(&[1, 0]), &kernel).unwrap().eval(&[pts[1].clone(), pts[0].clone()]).unwrap();
        prop_assert!((v.norm() - base.norm()).abs() <= 1e-11 * (1.0 + base.norm()));
    }
}
