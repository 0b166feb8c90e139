use std::collections::BTreeMap;

use num::Zero;

use crate::coeff::{self, Coeff};
use crate::jet::Jet;
use crate::JetError;

/// Weighted part of a monomial `z̄̃^k tⁱ dz̄̃^J dw̄^L dt^d`.
///
/// Odd generators are packed into `forms`: bit `i < n` is `dz̄̃ᵢ`, bit
/// `n + l` is `dw̄_l` and bit `2n` is `dt`. Monomials are stored in that
/// generator order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TermKey {
    pub zbar: Vec<u32>,
    pub t: i32,
    pub forms: u64,
}

fn sign_of_merge(a: u64, b: u64) -> i64 {
    let mut swaps = 0u32;
    let mut rest = b;
    while rest != 0 {
        let bit = rest.trailing_zeros();
        swaps += (a >> (bit + 1)).count_ones();
        rest &= rest - 1;
    }
    if swaps % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Graded product sign of `a ∧ b`, or `None` when they share a generator.
pub(crate) fn wedge_sign(a: u64, b: u64) -> Option<i64> {
    (a & b == 0).then(|| sign_of_merge(a, b))
}

/// Finite sum of monomials with coefficients that are jets in unweighted
/// variables. The first `n` coefficient variables are `z̃`; any further
/// ones are carried along untouched.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RescalableExpression {
    n: usize,
    cvars: usize,
    order: u32,
    terms: BTreeMap<TermKey, Jet>,
}

impl RescalableExpression {
    pub fn zero(n: usize, cvars: usize, order: u32) -> Self {
        assert!(cvars >= n, "coefficients must include z̃");
        assert!(2 * n < 64, "too many odd generators");
        Self { n, cvars, order, terms: BTreeMap::new() }
    }

    pub fn term(n: usize, cvars: usize, key: TermKey, coefficient: Jet) -> Self {
        let mut e = Self::zero(n, cvars, coefficient.order());
        e.add_term(key, coefficient);
        e
    }

    fn unit(n: usize, cvars: usize, order: u32, zbar: Vec<u32>, t: i32, forms: u64) -> Self {
        Self::term(n, cvars, TermKey { zbar, t, forms }, Jet::one(cvars, order))
    }

    pub fn scalar(n: usize, coefficient: Jet) -> Self {
        let cvars = coefficient.nvars();
        Self::term(n, cvars, TermKey { zbar: vec![0; n], t: 0, forms: 0 }, coefficient)
    }

    pub fn one(n: usize, cvars: usize, order: u32) -> Self {
        Self::unit(n, cvars, order, vec![0; n], 0, 0)
    }

    pub fn zbar(n: usize, cvars: usize, order: u32, i: usize) -> Self {
        let mut k = vec![0; n];
        k[i] = 1;
        Self::unit(n, cvars, order, k, 0, 0)
    }

    /// `yᵢ = z̄̃ᵢ / t`.
    pub fn y(n: usize, cvars: usize, order: u32, i: usize) -> Self {
        let mut k = vec![0; n];
        k[i] = 1;
        Self::unit(n, cvars, order, k, -1, 0)
    }

    pub fn t_power(n: usize, cvars: usize, order: u32, p: i32) -> Self {
        Self::unit(n, cvars, order, vec![0; n], p, 0)
    }

    pub fn dzbar(n: usize, cvars: usize, order: u32, i: usize) -> Self {
        Self::unit(n, cvars, order, vec![0; n], 0, 1 << i)
    }

    pub fn dwbar(n: usize, cvars: usize, order: u32, l: usize) -> Self {
        Self::unit(n, cvars, order, vec![0; n], 0, 1 << (n + l))
    }

    pub fn dt(n: usize, cvars: usize, order: u32) -> Self {
        Self::unit(n, cvars, order, vec![0; n], 0, 1 << (2 * n))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cvars(&self) -> usize {
        self.cvars
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn terms(&self) -> impl Iterator<Item = (&TermKey, &Jet)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, key: TermKey, c: Jet) {
        assert_eq!(key.zbar.len(), self.n, "z̄̃ exponent length");
        assert_eq!(c.nvars(), self.cvars, "coefficient roster");
        if c.order() < self.order {
            self.set_order(c.order());
        }
        let c = c.truncate(self.order);
        if c.is_zero() {
            return;
        }
        let merged = match self.terms.remove(&key) {
            Some(old) => &old + &c,
            None => c,
        };
        if !merged.is_zero() {
            self.terms.insert(key, merged);
        }
    }

    fn set_order(&mut self, order: u32) {
        self.order = order;
        let old = std::mem::take(&mut self.terms);
        for (k, c) in old {
            let c = c.truncate(order);
            if !c.is_zero() {
                self.terms.insert(k, c);
            }
        }
    }

    /// `|k| + i + |J| + d`; `z̃`, `w`, `w̄` and `dw̄` carry no weight.
    pub fn weight(&self, key: &TermKey) -> i32 {
        let dz = (key.forms & ((1u64 << self.n) - 1)).count_ones();
        let dt = (key.forms >> (2 * self.n) & 1) as u32;
        key.zbar.iter().sum::<u32>() as i32 + key.t + (dz + dt) as i32
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        Self { terms: self.terms.iter().map(|(k, c)| (k.clone(), -c)).collect(), ..self.clone() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Coeff) -> Self {
        let mut out = Self::zero(self.n, self.cvars, self.order);
        for (k, j) in &self.terms {
            out.add_term(k.clone(), j.scale(c));
        }
        out
    }

    /// Graded product.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!((self.n, self.cvars), (other.n, other.cvars), "roster mismatch");
        let mut out = Self::zero(self.n, self.cvars, self.order.min(other.order));
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                let Some(sign) = wedge_sign(ka.forms, kb.forms) else {
                    continue;
                };
                let key = TermKey {
                    zbar: ka.zbar.iter().zip(&kb.zbar).map(|(a, b)| a + b).collect(),
                    t: ka.t + kb.t,
                    forms: ka.forms | kb.forms,
                };
                out.add_term(key, (ca * cb).scale(&coeff::int(sign)));
            }
        }
        out
    }

    /// Derivative of the coefficients in unweighted variable `var`.
    pub fn diff_coefficient(&self, var: usize) -> Self {
        let mut out = Self::zero(self.n, self.cvars, self.order.saturating_sub(1));
        for (k, c) in &self.terms {
            out.add_term(k.clone(), c.derivative(var));
        }
        out
    }

    /// Weight-graded pieces `a_w` of `δ_ε(a) = Σ ε^w a_w`, ascending in `w`.
    pub fn rescale(&self) -> Vec<(i32, Self)> {
        let mut parts: BTreeMap<i32, Self> = BTreeMap::new();
        for (k, c) in &self.terms {
            parts
                .entry(self.weight(k))
                .or_insert_with(|| Self::zero(self.n, self.cvars, self.order))
                .add_term(k.clone(), c.clone());
        }
        parts.into_iter().collect()
    }

    /// Largest `m` with the expression in `F_m`; `None` for zero.
    pub fn filtration_order(&self) -> Option<i32> {
        self.terms.keys().map(|k| self.weight(k)).min()
    }

    pub fn weight_part(&self, w: i32) -> Self {
        let mut out = Self::zero(self.n, self.cvars, self.order);
        for (k, c) in self.terms.iter().filter(|(k, _)| self.weight(k) == w) {
            out.add_term(k.clone(), c.clone());
        }
        out
    }

    /// Contraction with `X = t∂_t + Σ z̄̃ᵢ ∂_{z̄̃ᵢ}`.
    pub fn iota_x(&self) -> Self {
        let mut out = Self::zero(self.n, self.cvars, self.order);
        for (k, c) in &self.terms {
            let mut rest = k.forms;
            while rest != 0 {
                let bit = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                let mut key = k.clone();
                if bit < self.n {
                    key.zbar[bit] += 1;
                } else if bit == 2 * self.n {
                    key.t += 1;
                } else {
                    continue;
                }
                key.forms ^= 1 << bit;
                let before = (k.forms & ((1u64 << bit) - 1)).count_ones();
                let sign = if before % 2 == 0 { 1 } else { -1 };
                out.add_term(key, c.scale(&coeff::int(sign)));
            }
        }
        out
    }

    /// In `F₀` with `ι_X` of the weight-zero part vanishing.
    pub fn regularity_test(&self) -> bool {
        match self.filtration_order() {
            None => true,
            Some(m) if m < 0 => false,
            Some(_) => self.weight_part(0).iota_x().is_zero(),
        }
    }

    /// Drops monomials whose `z̄̃` degree exceeds `max`.
    pub fn truncate_zbar(&self, max: u32) -> Self {
        let mut out = self.clone();
        out.terms.retain(|k, _| k.zbar.iter().sum::<u32>() <= max);
        out
    }

    /// Pulls back along `z ↦ f(z)` applied to both factors, restricted to the
    /// diagonal fibre over the base point: `z̄̃ ↦ f̄(z̄̃)`, `dz̄̃ ↦ df̄(z̄̃)` and
    /// the `z̃` coefficient variables are composed with `f`. Series in `z̄̃`
    /// are cut above degree `zbar_order`.
    pub fn pullback_biholomorphism(&self, f: &[Jet], zbar_order: u32) -> Result<Self, JetError> {
        let n = self.n;
        if f.len() != n {
            return Err(JetError::Shape { expected: n, got: f.len() });
        }
        if let Some(j) = f.iter().find(|j| j.nvars() != n) {
            return Err(JetError::Shape { expected: n, got: j.nvars() });
        }
        if let Some(index) = f.iter().position(|j| !j.constant_term().is_zero()) {
            return Err(JetError::NonzeroConstant { index });
        }
        let linear: Vec<Vec<Coeff>> = f
            .iter()
            .map(|j| {
                (0..n)
                    .map(|k| {
                        let mut e = vec![0; n];
                        e[k] = 1;
                        j.coeff(&e)
                    })
                    .collect()
            })
            .collect();
        if coeff::det(&linear).is_zero() {
            return Err(JetError::NonInvertibleLinear);
        }
        let (cvars, order) = (self.cvars, self.order);
        let lift = |s: &Jet| -> Self {
            let mut out = Self::zero(n, cvars, order);
            for (e, c) in s.terms() {
                out.add_term(TermKey { zbar: e.clone(), t: 0, forms: 0 }, Jet::constant(cvars, order, c.clone()));
            }
            out
        };
        let fbar: Vec<Jet> = f.iter().map(|j| j.conj().truncate(zbar_order)).collect();
        let zimg: Vec<Self> = fbar.iter().map(&lift).collect();
        let dimg: Vec<Self> = fbar
            .iter()
            .map(|fj| {
                (0..n).fold(Self::zero(n, cvars, order), |acc, m| {
                    acc.add(&lift(&fj.derivative(m)).mul(&Self::dzbar(n, cvars, order, m)))
                })
            })
            .collect();
        let inner: Vec<Jet> = (0..cvars)
            .map(|v| if v < n { f[v].embed(cvars, &(0..n).collect::<Vec<_>>()) } else { Jet::var(cvars, order, v) })
            .collect();
        let mut out = Self::zero(n, cvars, order);
        for (k, c) in &self.terms {
            let c = c.compose(&inner)?;
            let mut img = Self::term(n, cvars, TermKey { zbar: vec![0; n], t: k.t, forms: 0 }, c);
            for (i, &p) in k.zbar.iter().enumerate() {
                for _ in 0..p {
                    img = img.mul(&zimg[i]).truncate_zbar(zbar_order);
                }
            }
            let mut rest = k.forms;
            while rest != 0 {
                let bit = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                let g = if bit < n {
                    dimg[bit].clone()
                } else {
                    Self::unit(n, cvars, order, vec![0; n], 0, 1 << bit)
                };
                img = img.mul(&g).truncate_zbar(zbar_order);
            }
            out = out.add(&img);
        }
        let before = self.filtration_order();
        let after = out.filtration_order();
        if let (Some(b), Some(a)) = (before, after) {
            if a < b {
                return Err(JetError::Invariant(format!("filtration order dropped from {b} to {a}")));
            }
        }
        if self.regularity_test() && !out.regularity_test() {
            return Err(JetError::Invariant("pullback of a regular expression is not regular".into()));
        }
        Ok(out)
    }
}
