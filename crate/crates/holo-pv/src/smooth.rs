//! Smooth evaluators `β(z, z̄)` on `C^d`: exponential polynomials with exact
//! Wirtinger derivatives, and opaque closures differentiated by central
//! finite differences.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::PvError;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// `c · z^hol · z̄^anti`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyTerm {
    pub hol: Vec<u32>,
    pub anti: Vec<u32>,
    pub c: Complex64,
}

/// `P(z, z̄) · exp(Σ_l μ_l z_l + ν_l z̄_l + λ_l z_l z̄_l)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpPolyBlock {
    pub terms: Vec<PolyTerm>,
    #[serde(default)]
    pub mu: Vec<Complex64>,
    #[serde(default)]
    pub nu: Vec<Complex64>,
    #[serde(default)]
    pub lambda: Vec<Complex64>,
}

type Exponents = (Vec<u32>, Vec<u32>);

fn coef(v: &[Complex64], l: usize) -> Complex64 {
    v.get(l).copied().unwrap_or(ZERO)
}

impl ExpPolyBlock {
    pub fn polynomial(terms: Vec<PolyTerm>) -> Self {
        Self { terms, mu: Vec::new(), nu: Vec::new(), lambda: Vec::new() }
    }

    fn dim(&self) -> usize {
        self.terms
            .iter()
            .map(|t| t.hol.len().max(t.anti.len()))
            .chain([self.mu.len(), self.nu.len(), self.lambda.len()])
            .max()
            .unwrap_or(0)
    }

    fn padded(&self, d: usize) -> BTreeMap<Exponents, Complex64> {
        let mut map = BTreeMap::new();
        for t in &self.terms {
            let mut a = t.hol.clone();
            let mut b = t.anti.clone();
            a.resize(d, 0);
            b.resize(d, 0);
            *map.entry((a, b)).or_insert(ZERO) += t.c;
        }
        map
    }

    fn with_map(&self, map: BTreeMap<Exponents, Complex64>) -> Self {
        let terms = map
            .into_iter()
            .filter(|(_, c)| *c != ZERO)
            .map(|((hol, anti), c)| PolyTerm { hol, anti, c })
            .collect();
        Self { terms, mu: self.mu.clone(), nu: self.nu.clone(), lambda: self.lambda.clone() }
    }

    /// `∂_{z_l}` (or `∂_{z̄_l}` when `anti`) of the block.
    fn derivative(&self, l: usize, anti: bool, d: usize) -> Self {
        let mut out: BTreeMap<Exponents, Complex64> = BTreeMap::new();
        let lin = if anti { coef(&self.nu, l) } else { coef(&self.mu, l) };
        let quad = coef(&self.lambda, l);
        for ((a, b), c) in self.padded(d) {
            let own = if anti { b[l] } else { a[l] };
            if own > 0 {
                let (mut a2, mut b2) = (a.clone(), b.clone());
                if anti {
                    b2[l] -= 1;
                } else {
                    a2[l] -= 1;
                }
                *out.entry((a2, b2)).or_insert(ZERO) += c * own as f64;
            }
            if lin != ZERO {
                *out.entry((a.clone(), b.clone())).or_insert(ZERO) += c * lin;
            }
            if quad != ZERO {
                let (mut a2, mut b2) = (a.clone(), b.clone());
                if anti {
                    a2[l] += 1;
                } else {
                    b2[l] += 1;
                }
                *out.entry((a2, b2)).or_insert(ZERO) += c * quad;
            }
        }
        self.with_map(out)
    }

    fn conj(&self) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|t| PolyTerm { hol: t.anti.clone(), anti: t.hol.clone(), c: t.c.conj() })
                .collect(),
            mu: self.nu.iter().map(|c| c.conj()).collect(),
            nu: self.mu.iter().map(|c| c.conj()).collect(),
            lambda: self.lambda.iter().map(|c| c.conj()).collect(),
        }
    }

    fn eval(&self, z: &[Complex64]) -> Complex64 {
        let mut e = ZERO;
        for (l, zl) in z.iter().enumerate() {
            e += coef(&self.mu, l) * zl + coef(&self.nu, l) * zl.conj() + coef(&self.lambda, l) * zl.norm_sqr();
        }
        let p: Complex64 = self
            .terms
            .iter()
            .map(|t| {
                let mut v = t.c;
                for (l, &a) in t.hol.iter().enumerate() {
                    if a > 0 {
                        v *= z[l].powu(a);
                    }
                }
                for (l, &b) in t.anti.iter().enumerate() {
                    if b > 0 {
                        v *= z[l].conj().powu(b);
                    }
                }
                v
            })
            .sum();
        if e == ZERO {
            p
        } else {
            p * e.exp()
        }
    }
}

/// Finite sum of [`ExpPolyBlock`]s; closed under Wirtinger derivatives.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpPolySum {
    pub blocks: Vec<ExpPolyBlock>,
}

impl ExpPolySum {
    pub fn new(blocks: Vec<ExpPolyBlock>) -> Self {
        Self { blocks }
    }

    /// The single monomial `c · z^hol · z̄^anti`.
    pub fn monomial(c: Complex64, hol: Vec<u32>, anti: Vec<u32>) -> Self {
        Self::new(vec![ExpPolyBlock::polynomial(vec![PolyTerm { hol, anti, c }])])
    }

    pub fn constant(c: Complex64) -> Self {
        Self::monomial(c, Vec::new(), Vec::new())
    }

    pub fn dim(&self) -> usize {
        self.blocks.iter().map(ExpPolyBlock::dim).max().unwrap_or(0)
    }

    pub fn eval(&self, z: &[Complex64]) -> Complex64 {
        self.blocks.iter().map(|b| b.eval(z)).sum()
    }

    /// Multiplies every block by `exp(Σ λ_l |z_l|²)` on top of its exponent.
    pub fn times_gaussian(mut self, lambda: &[Complex64]) -> Self {
        for b in &mut self.blocks {
            let d = b.lambda.len().max(lambda.len());
            b.lambda.resize(d, ZERO);
            for (l, c) in lambda.iter().enumerate() {
                b.lambda[l] += c;
            }
        }
        self
    }

    pub fn scale(mut self, c: Complex64) -> Self {
        for b in &mut self.blocks {
            for t in &mut b.terms {
                t.c *= c;
            }
        }
        self
    }

    pub fn plus(mut self, other: Self) -> Self {
        self.blocks.extend(other.blocks);
        self
    }

    /// `∂_{z_l}^r ∂_{z̄_l}^s` composed over the listed coordinates.
    pub fn wirtinger(&self, orders: &[(usize, u32, u32)], d: usize) -> Self {
        let mut blocks = self.blocks.clone();
        for &(l, r, s) in orders {
            for _ in 0..r {
                blocks = blocks.iter().map(|b| b.derivative(l, false, d)).collect();
            }
            for _ in 0..s {
                blocks = blocks.iter().map(|b| b.derivative(l, true, d)).collect();
            }
        }
        blocks.retain(|b| !b.terms.is_empty());
        Self { blocks }
    }

    pub fn conj(&self) -> Self {
        Self { blocks: self.blocks.iter().map(ExpPolyBlock::conj).collect() }
    }
}

type ClosureFn = Arc<dyn Fn(&[Complex64]) -> Complex64 + Send + Sync>;

/// A smooth function of `dim` complex variables.
#[derive(Clone)]
pub enum Beta {
    ExpPoly(ExpPolySum),
    Closure { dim: usize, f: ClosureFn },
}

impl fmt::Debug for Beta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::ExpPoly(e) => f.debug_tuple("ExpPoly").field(e).finish(),
            Self::Closure { dim, .. } => write!(f, "Closure {{ dim: {dim} }}"),
        }
    }
}

impl Beta {
    pub fn closure(dim: usize, f: impl Fn(&[Complex64]) -> Complex64 + Send + Sync + 'static) -> Self {
        Self::Closure { dim, f: Arc::new(f) }
    }

    pub fn eval(&self, z: &[Complex64]) -> Complex64 {
        match self {
            Self::ExpPoly(e) => e.eval(z),
            Self::Closure { f, .. } => f(z),
        }
    }

    /// Complex conjugate times `c`.
    pub fn conj_scaled(&self, c: Complex64) -> Self {
        match self {
            Self::ExpPoly(e) => Self::ExpPoly(e.conj().scale(c)),
            Self::Closure { dim, f } => {
                let f = f.clone();
                Self::closure(*dim, move |z| f(z).conj() * c)
            }
        }
    }

    /// Evaluator of `∂^orders β` at arbitrary points.
    pub fn derivative(&self, orders: &[(usize, u32, u32)], d: usize, h: f64) -> Result<Derivative, PvError> {
        match self {
            Self::ExpPoly(e) => Ok(Derivative::Exact(e.wirtinger(orders, d))),
            Self::Closure { f, .. } => Ok(Derivative::Stencil { f: f.clone(), points: wirtinger_stencil(orders, d, h)? }),
        }
    }
}

/// A derivative of a [`Beta`], exact or as a finite-difference stencil.
#[derive(Clone)]
pub enum Derivative {
    Exact(ExpPolySum),
    Stencil { f: ClosureFn, points: Vec<(Vec<Complex64>, Complex64)> },
}

impl Derivative {
    pub fn eval(&self, z: &[Complex64]) -> Complex64 {
        match self {
            Self::Exact(e) => e.eval(z),
            Self::Stencil { f, points } => {
                let mut buf = z.to_vec();
                let mut acc = ZERO;
                for (off, w) in points {
                    for ((b, zi), o) in buf.iter_mut().zip(z).zip(off) {
                        *b = zi + o;
                    }
                    acc += w * f(&buf);
                }
                acc
            }
        }
    }
}

/// Fornberg weights for the `order`-th derivative at 0 on the given nodes.
pub fn fd_weights(order: usize, nodes: &[f64]) -> Vec<f64> {
    let n = nodes.len();
    let mut c = vec![vec![0.0; order + 1]; n];
    let mut c1 = 1.0;
    let mut c4 = nodes[0];
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i];
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] *= c4 / c3;
        }
        c1 = c2;
    }
    c.iter().map(|row| row[order]).collect()
}

/// Second-order central stencil for `d^order/dx^order`: `(offset, weight)`.
fn central_stencil(order: u32, h: f64) -> Vec<(f64, f64)> {
    if order == 0 {
        return vec![(0.0, 1.0)];
    }
    let q = (order as i32 + 1) / 2;
    let nodes: Vec<f64> = (-q..=q).map(|k| k as f64).collect();
    let w = fd_weights(order as usize, &nodes);
    let scale = h.powi(order as i32);
    nodes.iter().zip(w).filter(|(_, w)| *w != 0.0).map(|(x, w)| (x * h, w / scale)).collect()
}

/// `(X − iY)^r (X + iY)^s / 2^{r+s}` as coefficients of `X^a Y^{r+s−a}`.
fn wirtinger_to_cartesian(r: u32, s: u32) -> Vec<Complex64> {
    let mut p = vec![Complex64::new(1.0, 0.0)];
    let i = Complex64::new(0.0, 1.0);
    for (count, sign) in [(r, -1.0), (s, 1.0)] {
        for _ in 0..count {
            // multiply by (X + sign·iY) / 2, indexing by the power of X
            let mut q = vec![ZERO; p.len() + 1];
            for (a, c) in p.iter().enumerate() {
                q[a + 1] += c * 0.5;
                q[a] += c * i * sign * 0.5;
            }
            p = q;
        }
    }
    p
}

fn wirtinger_stencil(
    orders: &[(usize, u32, u32)],
    d: usize,
    h: f64,
) -> Result<Vec<(Vec<Complex64>, Complex64)>, PvError> {
    let mut points: Vec<(Vec<Complex64>, Complex64)> = vec![(vec![ZERO; d], Complex64::new(1.0, 0.0))];
    for &(l, r, s) in orders {
        if l >= d {
            return Err(PvError::Invalid(format!("coordinate {l} out of range for dimension {d}")));
        }
        let total = r + s;
        let cart = wirtinger_to_cartesian(r, s);
        let mut local: BTreeMap<(i64, i64), Complex64> = BTreeMap::new();
        for (a, c) in cart.iter().enumerate() {
            if *c == ZERO {
                continue;
            }
            let a = a as u32;
            for (dx, wx) in central_stencil(a, h) {
                for (dy, wy) in central_stencil(total - a, h) {
                    let key = ((dx / h).round() as i64, (dy / h).round() as i64);
                    *local.entry(key).or_insert(ZERO) += c * wx * wy;
                }
            }
        }
        let mut next = Vec::new();
        for (off, w) in &points {
            for (&(ix, iy), lw) in &local {
                let mut o = off.clone();
                o[l] += Complex64::new(ix as f64 * h, iy as f64 * h);
                next.push((o, w * lw));
            }
        }
        points = next;
    }
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn fornberg_recovers_classic_stencils() {
        let w = fd_weights(2, &[-1.0, 0.0, 1.0]);
        assert!((w[0] - 1.0).abs() < 1e-14 && (w[1] + 2.0).abs() < 1e-14 && (w[2] - 1.0).abs() < 1e-14);
        let w = fd_weights(1, &[-1.0, 0.0, 1.0]);
        assert!((w[0] + 0.5).abs() < 1e-14 && w[1].abs() < 1e-14);
    }

    #[test]
    fn exact_wirtinger_derivatives_of_gaussian_monomial() {
        // β = z² z̄ e^{−|z|²}; ∂_z β = (2 z z̄ − z² z̄ · z̄) e^{−|z|²}
        let b = ExpPolySum::monomial(c(1.0, 0.0), vec![2], vec![1]).times_gaussian(&[c(-1.0, 0.0)]);
        let d = b.wirtinger(&[(0, 1, 0)], 1);
        let z = c(0.3, -0.4);
        let want = (2.0 * z * z.conj() - z * z * z.conj() * z.conj()) * (-z.norm_sqr()).exp();
        assert!((d.eval(&[z]) - want).norm() < 1e-15);
    }

    #[test]
    fn stencil_matches_exact_derivative() {
        let e = ExpPolySum::monomial(c(0.5, 1.0), vec![2, 1], vec![1, 0])
            .times_gaussian(&[c(-0.7, 0.0), c(-0.2, 0.0)])
            .plus(ExpPolySum::new(vec![ExpPolyBlock {
                terms: vec![PolyTerm { hol: vec![0, 1], anti: vec![0, 0], c: c(1.0, 0.0) }],
                mu: vec![c(0.3, 0.1)],
                nu: vec![c(0.0, -0.2)],
                lambda: vec![],
            }]));
        let closure = {
            let e = e.clone();
            Beta::closure(2, move |z| e.eval(z))
        };
        let z = [c(0.2, 0.1), c(-0.3, 0.25)];
        for orders in [vec![(0, 1, 0)], vec![(0, 1, 1)], vec![(0, 2, 0), (1, 0, 1)], vec![(1, 0, 2)]] {
            let exact = Beta::ExpPoly(e.clone()).derivative(&orders, 2, 1e-4).unwrap().eval(&z);
            let fd = closure.derivative(&orders, 2, 1e-3).unwrap().eval(&z);
            assert!((exact - fd).norm() < 1e-5 * (1.0 + exact.norm()), "{orders:?}: {exact} vs {fd}");
        }
    }

    #[test]
    fn conjugate_block_evaluates_to_conjugate() {
        let e = ExpPolySum::new(vec![ExpPolyBlock {
            terms: vec![PolyTerm { hol: vec![1], anti: vec![2], c: c(0.4, -1.1) }],
            mu: vec![c(0.2, 0.3)],
            nu: vec![c(-0.1, 0.05)],
            lambda: vec![c(-0.5, 0.1)],
        }]);
        let z = [c(0.35, -0.6)];
        assert!((e.conj().eval(&z) - e.eval(&z).conj()).norm() < 1e-15);
    }
}
