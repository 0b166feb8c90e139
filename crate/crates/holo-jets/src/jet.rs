use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::{BigRational, One, Zero};

use crate::coeff::{self, Coeff};
use crate::JetError;

/// Largest truncation order a jet may carry.
pub const MAX_ORDER: u32 = 64;

/// Truncated power series in `nvars` commuting variables with exact
/// complex-rational coefficients. Coefficients of total degree above
/// `order` are unknown and never stored.
///
/// Callers fix the meaning of the variables. The crate uses the orderings
/// `(z₁..zₙ, z̄₁..z̄ₙ)` for metrics and sections, and `(z̃, w, w̄)` for the
/// unweighted coefficients of rescalable expressions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Jet {
    nvars: usize,
    order: u32,
    terms: BTreeMap<Vec<u32>, Coeff>,
}

fn degree(e: &[u32]) -> u32 {
    e.iter().sum()
}

impl Jet {
    pub fn zero(nvars: usize, order: u32) -> Self {
        Self { nvars, order: order.min(MAX_ORDER), terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, order: u32, c: Coeff) -> Self {
        Self::monomial(nvars, order, &vec![0; nvars], c)
    }

    pub fn one(nvars: usize, order: u32) -> Self {
        Self::constant(nvars, order, Coeff::one())
    }

    /// The coordinate function `x_i`.
    pub fn var(nvars: usize, order: u32, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(nvars, order, &e, Coeff::one())
    }

    /// `c · x^e`, dropped when its degree exceeds `order`.
    pub fn monomial(nvars: usize, order: u32, e: &[u32], c: Coeff) -> Self {
        assert_eq!(e.len(), nvars, "exponent length");
        let mut j = Self::zero(nvars, order);
        j.add_term(e.to_vec(), c);
        j
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Coeff)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, e: &[u32]) -> Coeff {
        self.terms.get(e).cloned().unwrap_or_else(Coeff::zero)
    }

    pub fn constant_term(&self) -> Coeff {
        self.coeff(&vec![0; self.nvars])
    }

    /// Adds `c · x^e` in place, ignoring terms above the order.
    pub fn add_term(&mut self, e: Vec<u32>, c: Coeff) {
        if degree(&e) > self.order || c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = &*o.get() + &c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    /// Lowers the order, discarding higher terms.
    pub fn truncate(&self, order: u32) -> Self {
        let order = order.min(self.order);
        Self {
            nvars: self.nvars,
            order,
            terms: self.terms.iter().filter(|(e, _)| degree(e) <= order).map(|(e, c)| (e.clone(), c.clone())).collect(),
        }
    }

    /// Raises the order. Only valid when the jet is known to be a polynomial
    /// of degree at most its current order, so it fails otherwise.
    pub fn with_order(&self, order: u32) -> Result<Self, JetError> {
        if order > MAX_ORDER || (order > self.order && !self.is_zero()) {
            return Err(JetError::OrderOverflow { requested: order, available: self.order });
        }
        Ok(self.pad(order))
    }

    /// Treats the jet as an exact polynomial at a higher order.
    pub(crate) fn pad(&self, order: u32) -> Self {
        if order <= self.order {
            return self.truncate(order);
        }
        Self { nvars: self.nvars, order: order.min(MAX_ORDER), terms: self.terms.clone() }
    }

    /// Homogeneous part of degree `d`.
    pub fn degree_part(&self, d: u32) -> Self {
        Self {
            nvars: self.nvars,
            order: self.order,
            terms: self.terms.iter().filter(|(e, _)| degree(e) == d).map(|(e, c)| (e.clone(), c.clone())).collect(),
        }
    }

    pub fn scale(&self, c: &Coeff) -> Self {
        let mut out = Self::zero(self.nvars, self.order);
        if c.is_zero() {
            return out;
        }
        out.terms = self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect();
        out
    }

    pub fn conj(&self) -> Self {
        Self {
            nvars: self.nvars,
            order: self.order,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c.conj())).collect(),
        }
    }

    /// Complex conjugation for jets in `(z, z̄)`: conjugates coefficients and
    /// swaps `zᵢ ↔ z̄ᵢ`.
    pub fn conj_swap(&self, n: usize) -> Self {
        assert_eq!(self.nvars, 2 * n, "conj_swap needs 2n variables");
        Self {
            nvars: self.nvars,
            order: self.order,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let mut f = e[n..].to_vec();
                    f.extend_from_slice(&e[..n]);
                    (f, c.conj())
                })
                .collect(),
        }
    }

    /// Sets the variables in `vars` to zero.
    pub fn restrict_zero(&self, vars: std::ops::Range<usize>) -> Self {
        Self {
            nvars: self.nvars,
            order: self.order,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e[vars.clone()].iter().all(|&x| x == 0))
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    /// Multiplication by `x_i`, exact to one order higher.
    pub fn mul_var(&self, i: usize) -> Self {
        let mut out = Self::zero(self.nvars, (self.order + 1).min(MAX_ORDER));
        for (e, c) in &self.terms {
            let mut f = e.clone();
            f[i] += 1;
            out.add_term(f, c.clone());
        }
        out
    }

    /// `∂/∂x_i`, known to one order lower.
    pub fn derivative(&self, i: usize) -> Self {
        let mut out = Self::zero(self.nvars, self.order.saturating_sub(1));
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut f = e.clone();
            f[i] -= 1;
            out.add_term(f, c * coeff::int(e[i] as i64));
        }
        out
    }

    /// Multiplicative inverse of a jet with nonzero constant term.
    pub fn inverse(&self) -> Result<Self, JetError> {
        let c0 = self.constant_term();
        let c0inv = coeff::inv(&c0).ok_or(JetError::NonUnit)?;
        let mut h = self.scale(&c0inv);
        h.add_term(vec![0; self.nvars], -Coeff::one());
        let neg_h = -&h;
        let mut sum = Self::one(self.nvars, self.order);
        let mut power = Self::one(self.nvars, self.order);
        for _ in 0..self.order {
            power = &power * &neg_h;
            if power.is_zero() {
                break;
            }
            sum = &sum + &power;
        }
        Ok(sum.scale(&c0inv))
    }

    /// Substitutes `inner[i]` for `x_i`. Every inner jet must vanish at the
    /// origin and share one variable count.
    pub fn compose(&self, inner: &[Jet]) -> Result<Self, JetError> {
        if inner.len() != self.nvars {
            return Err(JetError::Shape { expected: self.nvars, got: inner.len() });
        }
        let Some(first) = inner.first() else {
            return Ok(self.clone());
        };
        let m = first.nvars;
        if let Some(j) = inner.iter().find(|j| j.nvars != m) {
            return Err(JetError::Shape { expected: m, got: j.nvars });
        }
        if let Some(index) = inner.iter().position(|j| !j.constant_term().is_zero()) {
            return Err(JetError::NonzeroConstant { index });
        }
        let order = inner.iter().map(|j| j.order).fold(self.order, u32::min);
        let mut powers: Vec<Vec<Jet>> = Vec::with_capacity(self.nvars);
        for j in inner {
            let j = j.truncate(order);
            let mut p = vec![Self::one(m, order)];
            for k in 1..=order as usize {
                let next = &p[k - 1] * &j;
                p.push(next);
            }
            powers.push(p);
        }
        let mut out = Self::zero(m, order);
        for (e, c) in &self.terms {
            let mut term = Self::constant(m, order, c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    term = &term * &powers[i][k as usize];
                }
            }
            out = &out + &term;
        }
        Ok(out)
    }

    /// Places the variables into a larger roster: variable `i` becomes
    /// `slots[i]` among `nvars` variables.
    pub fn embed(&self, nvars: usize, slots: &[usize]) -> Self {
        assert_eq!(slots.len(), self.nvars, "slot count");
        let mut out = Self::zero(nvars, self.order);
        for (e, c) in &self.terms {
            let mut f = vec![0; nvars];
            for (i, &k) in e.iter().enumerate() {
                f[slots[i]] += k;
            }
            out.add_term(f, c.clone());
        }
        out
    }

    /// Largest `|c|²` over the stored coefficients.
    pub fn max_norm_sqr(&self) -> BigRational {
        self.terms.values().map(coeff::norm_sqr).max().unwrap_or_else(BigRational::zero)
    }

    /// One line per monomial: exponents, a colon, then the real and
    /// imaginary parts as rationals.
    pub fn to_text(&self) -> String {
        let mut s = format!("jet {} {}\n", self.nvars, self.order);
        for (e, c) in &self.terms {
            let exps: Vec<String> = e.iter().map(u32::to_string).collect();
            s.push_str(&format!("{} : {}\n", exps.join(" "), coeff::format(c)));
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self, JetError> {
        let bad = |m: &str| JetError::Parse(m.to_string());
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| bad("empty input"))?;
        let h: Vec<&str> = header.split_whitespace().collect();
        if h.len() != 3 || h[0] != "jet" {
            return Err(bad("header must read `jet <nvars> <order>`"));
        }
        let nvars: usize = h[1].parse().map_err(|_| bad("nvars"))?;
        let order: u32 = h[2].parse().map_err(|_| bad("order"))?;
        if order > MAX_ORDER {
            return Err(JetError::OrderOverflow { requested: order, available: MAX_ORDER });
        }
        let mut jet = Self::zero(nvars, order);
        for line in lines {
            let (lhs, rhs) = line.split_once(':').ok_or_else(|| bad(line))?;
            let e: Vec<u32> =
                lhs.split_whitespace().map(str::parse).collect::<Result<_, _>>().map_err(|_| bad(line))?;
            if e.len() != nvars {
                return Err(JetError::Shape { expected: nvars, got: e.len() });
            }
            if degree(&e) > order {
                return Err(JetError::OrderOverflow { requested: degree(&e), available: order });
            }
            let c = coeff::parse(rhs).ok_or_else(|| bad(line))?;
            jet.add_term(e, c);
        }
        Ok(jet)
    }
}

impl fmt::Display for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl Add for &Jet {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch");
        let order = self.order.min(rhs.order);
        let mut out = self.truncate(order);
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        self + &(-rhs)
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet {
            nvars: self.nvars,
            order: self.order,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c.clone())).collect(),
        }
    }
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch");
        let order = self.order.min(rhs.order);
        let mut out = Jet::zero(self.nvars, order);
        for (ea, ca) in &self.terms {
            let da = degree(ea);
            if da > order {
                continue;
            }
            for (eb, cb) in &rhs.terms {
                if da + degree(eb) > order {
                    continue;
                }
                let e: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }
}
