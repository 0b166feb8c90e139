use holo_forms::{GradedKernelValue, MultiPointForm};
use holo_heat::{HeatError, LegDerivs, PropagatorKernel};
use holo_lattice::{real_to_complex, Lattice};
use num_complex::Complex64;

use crate::assignment::GraphAssignment;
use crate::density::VertexCoefficient;
use crate::graph::{degree_selection_for, TypeVerdict};
use crate::GraphError;

/// A two-point kernel placed on the edges of a graph. Points are given in
/// real coordinates of length `2n`.
pub trait EdgeKernel {
    fn n(&self) -> usize;

    fn lattice(&self) -> &Lattice;

    /// Antiholomorphic degree of every edge value.
    fn form_degree(&self) -> usize {
        self.n().saturating_sub(1)
    }

    /// Value with head label 0 and tail label 1.
    fn edge_form(&self, head: &[f64], tail: &[f64], derivs: &LegDerivs) -> Result<GradedKernelValue, HeatError>;

    /// Restriction to the diagonal at `x`, on the label `point`.
    fn diagonal_form(&self, x: &[f64], derivs: &LegDerivs, point: usize) -> Result<MultiPointForm, HeatError>;

    /// Values depend on the points only through their difference.
    fn translation_invariant(&self) -> bool {
        false
    }

    /// Hash identifying the kernel's parameters; empty when unknown.
    fn fingerprint(&self) -> String {
        String::new()
    }
}

impl EdgeKernel for PropagatorKernel {
    fn n(&self) -> usize {
        PropagatorKernel::n(self)
    }

    fn lattice(&self) -> &Lattice {
        PropagatorKernel::lattice(self)
    }

    fn edge_form(&self, head: &[f64], tail: &[f64], derivs: &LegDerivs) -> Result<GradedKernelValue, HeatError> {
        let u: Vec<f64> = head.iter().zip(tail).map(|(a, b)| a - b).collect();
        let v = self.coefficients_real(&u, derivs)?;
        Ok(GradedKernelValue::from_minor_coefficients(0, 1, &v.coeffs))
    }

    fn diagonal_form(&self, x: &[f64], derivs: &LegDerivs, point: usize) -> Result<MultiPointForm, HeatError> {
        self.diagonal_pullback(&real_to_complex(x), derivs, point)
    }

    fn translation_invariant(&self) -> bool {
        true
    }

    fn fingerprint(&self) -> String {
        PropagatorKernel::fingerprint(self)
    }
}

/// Evaluator of the top-degree density of a graph integrand.
#[derive(Debug, Clone)]
pub struct GraphIntegrand<'a, K: EdgeKernel> {
    assignment: GraphAssignment,
    kernel: &'a K,
    verdict: TypeVerdict,
    derivs: Vec<LegDerivs>,
    /// Self-loop values, fixed up front for translation-invariant kernels.
    loops: Vec<Option<MultiPointForm>>,
}

/// Validates `assignment` and binds it to `kernel`.
pub fn assemble_integrand<'a, K: EdgeKernel>(
    assignment: &GraphAssignment,
    kernel: &'a K,
) -> Result<GraphIntegrand<'a, K>, GraphError> {
    if let Some(d) = assignment.validate() {
        return Err(GraphError::Invalid(d));
    }
    let n = kernel.n();
    if assignment.n != n {
        return Err(GraphError::Dimension { expected: n, got: assignment.n });
    }
    let verdict = degree_selection_for(&assignment.graph, n, kernel.form_degree());
    let derivs: Vec<LegDerivs> = assignment
        .edge_multi_indices()
        .into_iter()
        .map(|(tail, head)| LegDerivs::new(head, tail))
        .collect();
    let origin = vec![0.0; 2 * n];
    let mut loops = vec![None; derivs.len()];
    if verdict == TypeVerdict::Admissible && kernel.translation_invariant() {
        for (e, &(t, _)) in assignment.graph.edges.iter().enumerate() {
            if assignment.graph.is_self_loop(e) {
                loops[e] = Some(kernel.diagonal_form(&origin, &derivs[e], t)?);
            }
        }
    }
    Ok(GraphIntegrand { assignment: assignment.clone(), kernel, verdict, derivs, loops })
}

impl<'a, K: EdgeKernel> GraphIntegrand<'a, K> {
    pub fn verdict(&self) -> TypeVerdict {
        self.verdict
    }

    pub fn assignment(&self) -> &GraphAssignment {
        &self.assignment
    }

    pub fn kernel(&self) -> &K {
        self.kernel
    }

    pub fn vertex_count(&self) -> usize {
        self.assignment.graph.vertices
    }

    pub fn real_dim(&self) -> usize {
        2 * self.kernel.n()
    }

    /// Derivatives placed on each edge by the slot assignment.
    pub fn edge_derivs(&self) -> &[LegDerivs] {
        &self.derivs
    }

    /// The density is unchanged by a common translation of all points.
    pub fn translation_invariant(&self) -> bool {
        self.kernel.translation_invariant()
            && self.assignment.densities.iter().all(|d| matches!(d.coefficient, VertexCoefficient::Constant { .. }))
    }

    fn check_points(&self, points: &[Vec<f64>]) -> Result<(), GraphError> {
        if points.len() != self.vertex_count() {
            return Err(GraphError::PointCount { expected: self.vertex_count(), got: points.len() });
        }
        if let Some(p) = points.iter().find(|p| p.len() != self.real_dim()) {
            return Err(GraphError::Dimension { expected: self.real_dim(), got: p.len() });
        }
        Ok(())
    }

    /// Wedge of all edge values in edge order, vertex `v` on label `v`.
    pub fn form(&self, points: &[Vec<f64>]) -> Result<MultiPointForm, GraphError> {
        self.check_points(points)?;
        let mut acc = MultiPointForm::one();
        // parallel edges with equal derivatives share one kernel evaluation
        let mut seen: Vec<(usize, MultiPointForm)> = Vec::new();
        let edges = &self.assignment.graph.edges;
        for (e, &(t, h)) in edges.iter().enumerate() {
            let repeat = seen.iter().find(|(p, _)| edges[*p] == (t, h) && self.derivs[*p] == self.derivs[e]);
            let f = if let Some((_, f)) = repeat {
                f.clone()
            } else if t == h {
                match &self.loops[e] {
                    Some(f) => f.clone(),
                    None => self.kernel.diagonal_form(&points[t], &self.derivs[e], t)?,
                }
            } else {
                match self.kernel.edge_form(&points[h], &points[t], &self.derivs[e]) {
                    Ok(v) => v.relabel(h, t).form,
                    Err(HeatError::Coincident(_)) => return Err(GraphError::Coincident { edge: e }),
                    Err(err) => return Err(err.into()),
                }
            };
            if repeat.is_none() {
                seen.push((e, f.clone()));
            }
            acc = acc.wedge(&f);
            if acc.is_zero() {
                break;
            }
        }
        Ok(acc)
    }

    /// Product of vertex coefficients.
    pub fn coefficient(&self, points: &[Vec<f64>]) -> Complex64 {
        let lattice = self.kernel.lattice();
        self.assignment
            .densities
            .iter()
            .zip(points)
            .map(|(d, x)| d.coefficient.eval(lattice, x))
            .product()
    }

    /// Top density against `∏_v ∏ᵢ dz_{v,i} ∧ dz̄_{v,i}`; exactly zero for
    /// zero-by-type assignments.
    pub fn eval(&self, points: &[Vec<f64>]) -> Result<Complex64, GraphError> {
        self.check_points(points)?;
        if self.verdict == TypeVerdict::ZeroByType {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let form = self.form(points)?;
        Ok(form.top_density(self.vertex_count(), self.kernel.n()) * self.coefficient(points))
    }
}
