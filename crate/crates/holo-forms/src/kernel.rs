use num_complex::Complex64;

use crate::form::{AntiholoGenerator, MultiPointForm};

/// `∧_{i<n} (dz̄_{head,i} − dz̄_{tail,i})`.
pub fn difference_top(head: usize, tail: usize, n: usize) -> MultiPointForm {
    (0..n).fold(MultiPointForm::one(), |acc, i| acc.wedge(&difference_one(head, tail, i)))
}

/// `(−1)^i ∧_{j≠i} (dz̄_{head,j} − dz̄_{tail,j})`, the contraction of
/// [`difference_top`] by the `i`-th head generator.
pub fn difference_minor(head: usize, tail: usize, n: usize, i: usize) -> MultiPointForm {
    let f = (0..n).filter(|&j| j != i).fold(MultiPointForm::one(), |acc, j| acc.wedge(&difference_one(head, tail, j)));
    if i % 2 == 0 {
        f
    } else {
        f.scale(Complex64::new(-1.0, 0.0))
    }
}

fn difference_one(head: usize, tail: usize, i: usize) -> MultiPointForm {
    MultiPointForm::generator(AntiholoGenerator::new(head, i))
        .sub(&MultiPointForm::generator(AntiholoGenerator::new(tail, i)))
}

/// Value of a two-point kernel: a form on the labels `head`, `tail`, with a
/// flag marking a `dt` factor for Schwinger-space values.
#[derive(Debug, Clone, PartialEq)]
pub struct GradedKernelValue {
    pub form: MultiPointForm,
    pub head: usize,
    pub tail: usize,
    pub dt: bool,
}

impl GradedKernelValue {
    /// Assembles `Σ_i cᵢ · difference_minor(head, tail, n, i)`.
    pub fn from_minor_coefficients(head: usize, tail: usize, coeffs: &[Complex64]) -> Self {
        let n = coeffs.len();
        let form = coeffs.iter().enumerate().fold(MultiPointForm::zero(), |acc, (i, c)| {
            acc.add(&difference_minor(head, tail, n, i).scale(*c))
        });
        Self { form, head, tail, dt: false }
    }

    /// `c · difference_top(head, tail, n)`.
    pub fn from_top_coefficient(head: usize, tail: usize, n: usize, c: Complex64) -> Self {
        Self { form: difference_top(head, tail, n).scale(c), head, tail, dt: false }
    }

    pub fn degree(&self) -> Option<usize> {
        self.form.degree()
    }

    /// Only generators of the two endpoint labels occur.
    pub fn is_two_point(&self) -> bool {
        self.form.points().iter().all(|&p| p == self.head || p == self.tail)
    }

    /// Same value with its endpoints relabelled.
    pub fn relabel(&self, head: usize, tail: usize) -> Self {
        let (h0, t0) = (self.head, self.tail);
        let form = self.form.map_points(|p| if p == h0 { head } else if p == t0 { tail } else { p });
        Self { form, head, tail, dt: self.dt }
    }
}
