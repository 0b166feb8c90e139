use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

/// `dz̄_{point, coord}` with `coord` counted from 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AntiholoGenerator {
    pub point: usize,
    pub coord: usize,
}

impl AntiholoGenerator {
    pub const fn new(point: usize, coord: usize) -> Self {
        Self { point, coord }
    }
}

/// Strictly increasing list of generators.
pub type Monomial = Vec<AntiholoGenerator>;

/// Sparse element of the exterior algebra: monomial → coefficient.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MultiPointForm {
    terms: BTreeMap<Monomial, Complex64>,
}

/// Sign of sorting `gens` into increasing order, or `None` if a generator repeats.
fn sort_sign(gens: &mut [AntiholoGenerator]) -> Option<f64> {
    let mut sign = 1.0;
    for i in 1..gens.len() {
        let mut j = i;
        while j > 0 && gens[j - 1] > gens[j] {
            gens.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
        if j > 0 && gens[j - 1] == gens[j] {
            return None;
        }
    }
    Some(sign)
}

/// Merge two sorted monomials; `None` if they share a generator.
fn merge(a: &[AntiholoGenerator], b: &[AntiholoGenerator]) -> Option<(Monomial, f64)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    let mut swaps = 0usize;
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                swaps += a.len() - i;
                j += 1;
            }
            std::cmp::Ordering::Equal => return None,
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    Some((out, if swaps % 2 == 0 { 1.0 } else { -1.0 }))
}

impl MultiPointForm {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn scalar(c: Complex64) -> Self {
        let mut f = Self::zero();
        f.add_term(Vec::new(), c);
        f
    }

    pub fn one() -> Self {
        Self::scalar(Complex64::new(1.0, 0.0))
    }

    pub fn generator(g: AntiholoGenerator) -> Self {
        let mut f = Self::zero();
        f.add_term(vec![g], Complex64::new(1.0, 0.0));
        f
    }

    /// `c · g₁ ∧ g₂ ∧ …` in the given (possibly unsorted) order.
    pub fn monomial(c: Complex64, gens: &[AntiholoGenerator]) -> Self {
        let mut g = gens.to_vec();
        let mut f = Self::zero();
        if let Some(s) = sort_sign(&mut g) {
            f.add_term(g, c * s);
        }
        f
    }

    /// Adds `c` to the coefficient of a sorted monomial.
    pub fn add_term(&mut self, m: Monomial, c: Complex64) {
        debug_assert!(m.windows(2).all(|w| w[0] < w[1]), "monomial not canonical");
        if c == Complex64::new(0.0, 0.0) {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if *o.get() == Complex64::new(0.0, 0.0) {
                    o.remove();
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Complex64)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &[AntiholoGenerator]) -> Complex64 {
        self.terms.get(m).copied().unwrap_or_default()
    }

    /// Common degree of all monomials, `None` for mixed degree or zero.
    pub fn degree(&self) -> Option<usize> {
        let mut it = self.terms.keys().map(Vec::len);
        let d = it.next()?;
        it.all(|e| e == d).then_some(d)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), *c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let mut out = Self::zero();
        for (m, v) in &self.terms {
            out.add_term(m.clone(), v * c);
        }
        out
    }

    pub fn wedge(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                if let Some((m, s)) = merge(ma, mb) {
                    out.add_term(m, ca * cb * s);
                }
            }
        }
        out
    }

    /// Interior product with the vector dual to `g`.
    pub fn contract(&self, g: AntiholoGenerator) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            if let Ok(p) = m.binary_search(&g) {
                let mut rest = m.clone();
                rest.remove(p);
                let s = if p % 2 == 0 { 1.0 } else { -1.0 };
                out.add_term(rest, c * s);
            }
        }
        out
    }

    /// Renames generators point-wise; monomials with repeated generators
    /// after the renaming drop out. Covers relabelling (`map` a permutation)
    /// and pullback along a diagonal (`map` non-injective).
    pub fn map_points(&self, map: impl Fn(usize) -> usize) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let mut g: Vec<_> = m.iter().map(|x| AntiholoGenerator::new(map(x.point), x.coord)).collect();
            if let Some(s) = sort_sign(&mut g) {
                out.add_term(g, c * s);
            }
        }
        out
    }

    /// Point labels appearing in any monomial.
    pub fn points(&self) -> Vec<usize> {
        let mut p: Vec<usize> = self.terms.keys().flatten().map(|g| g.point).collect();
        p.sort_unstable();
        p.dedup();
        p
    }

    /// Lebesgue density of `∏_v Ω_v ∧ self` on `(Cⁿ)^k`: the coefficient of
    /// the full monomial `dz̄_{0,0} ∧ … ∧ dz̄_{k−1,n−1}` times `(−2i)^{nk}`.
    pub fn top_density(&self, k: usize, n: usize) -> Complex64 {
        let top: Monomial = (0..k).flat_map(|v| (0..n).map(move |i| AntiholoGenerator::new(v, i))).collect();
        self.coefficient(&top) * Complex64::new(0.0, -2.0).powu((n * k) as u32)
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

impl fmt::Display for MultiPointForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})")?;
            for g in m {
                write!(f, "·dz̄[{},{}]", g.point, g.coord)?;
            }
        }
        Ok(())
    }
}
