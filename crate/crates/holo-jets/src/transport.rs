use std::collections::BTreeMap;

use num::{BigRational, One, Zero};

use crate::coeff::{self, Coeff};
use crate::jet::Jet;
use crate::matrix;
use crate::metric::MetricJet;
use crate::rescale::{wedge_sign, RescalableExpression, TermKey};
use crate::JetError;

/// Jet in `(z̃, z̄̃)` valued in the exterior algebra on `dz̄̃₁..dz̄̃ₙ, dw̄₁..dw̄ₙ`.
/// Bit `i < n` of a form mask is `dz̄̃ᵢ`; bit `n + l` is `dw̄_l`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormJet {
    n: usize,
    order: u32,
    parts: BTreeMap<u64, Jet>,
}

impl FormJet {
    pub fn zero(n: usize, order: u32) -> Self {
        Self { n, order, parts: BTreeMap::new() }
    }

    pub fn from_part(n: usize, mask: u64, coefficient: Jet) -> Self {
        let mut f = Self::zero(n, coefficient.order());
        f.add_part(mask, coefficient);
        f
    }

    /// `dz̄̃₁ ∧ … ∧ dz̄̃ₙ`, the form factor of the identity section.
    pub fn identity_form(n: usize, order: u32) -> Self {
        Self::from_part(n, (1u64 << n) - 1, Jet::one(2 * n, order))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn parts(&self) -> impl Iterator<Item = (&u64, &Jet)> {
        self.parts.iter()
    }

    pub fn part(&self, mask: u64) -> Jet {
        self.parts.get(&mask).cloned().unwrap_or_else(|| Jet::zero(2 * self.n, self.order))
    }

    pub fn is_zero(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn add_part(&mut self, mask: u64, c: Jet) {
        assert_eq!(c.nvars(), 2 * self.n, "coefficient roster");
        if c.order() < self.order {
            *self = self.truncate(c.order());
        }
        let c = c.truncate(self.order);
        let merged = match self.parts.remove(&mask) {
            Some(old) => &old + &c,
            None => c,
        };
        if !merged.is_zero() {
            self.parts.insert(mask, merged);
        }
    }

    /// Adds `c` to one coefficient.
    pub fn perturbed(&self, mask: u64, e: &[u32], c: Coeff) -> Self {
        let mut out = self.clone();
        out.add_part(mask, Jet::monomial(2 * self.n, self.order, e, c));
        out
    }

    pub fn truncate(&self, order: u32) -> Self {
        let order = order.min(self.order);
        let mut out = Self::zero(self.n, order);
        for (m, c) in &self.parts {
            let c = c.truncate(order);
            if !c.is_zero() {
                out.parts.insert(*m, c);
            }
        }
        out
    }

    pub(crate) fn pad(&self, order: u32) -> Self {
        Self { n: self.n, order, parts: self.parts.iter().map(|(m, c)| (*m, c.pad(order))).collect() }
    }

    fn map(&self, order: u32, f: impl Fn(&Jet) -> Jet) -> Self {
        let mut out = Self::zero(self.n, order);
        for (m, c) in &self.parts {
            out.add_part(*m, f(c));
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.truncate(other.order);
        for (m, c) in &other.parts {
            out.add_part(*m, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-Coeff::one()))
    }

    pub fn scale(&self, c: &Coeff) -> Self {
        self.map(self.order, |j| j.scale(c))
    }

    pub fn mul_jet(&self, j: &Jet) -> Self {
        self.map(self.order.min(j.order()), |c| c * j)
    }

    pub fn mul_var(&self, var: usize) -> Self {
        self.map(self.order + 1, |c| c.mul_var(var))
    }

    pub fn derivative(&self, var: usize) -> Self {
        self.map(self.order.saturating_sub(1), |c| c.derivative(var))
    }

    pub fn degree_part(&self, d: u32) -> Self {
        self.map(self.order, |c| c.degree_part(d))
    }

    /// `g ∧ ω` for odd generator bit `g`.
    pub fn wedge(&self, g: usize) -> Self {
        let mut out = Self::zero(self.n, self.order);
        for (m, c) in &self.parts {
            if let Some(s) = wedge_sign(1 << g, *m) {
                out.add_part(m | 1 << g, c.scale(&coeff::int(s)));
            }
        }
        out
    }

    /// Contraction removing `dz̄̃_k`.
    pub fn iota(&self, k: usize) -> Self {
        let mut out = Self::zero(self.n, self.order);
        for (m, c) in &self.parts {
            if m >> k & 1 == 1 {
                let s = if (m & ((1u64 << k) - 1)).count_ones() % 2 == 0 { 1 } else { -1 };
                out.add_part(m ^ 1 << k, c.scale(&coeff::int(s)));
            }
        }
        out
    }

    pub fn max_norm_sqr(&self) -> BigRational {
        self.parts.values().map(Jet::max_norm_sqr).max().unwrap_or_else(BigRational::zero)
    }

    /// Largest `|c|²` among coefficients of degree exactly `d`.
    pub fn degree_norm_sqr(&self, d: u32) -> BigRational {
        self.degree_part(d).max_norm_sqr()
    }
}

/// Model connection and curvature data at the base point.
///
/// `w[l][j][k] = w^{k̄}_{l̄ j̄}(z̃, 0)` and `f[j][i] = F_{j ī}(z̃, 0)`, as
/// jets in `(z̃, z̄̃)` that do not involve `z̄̃`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelData {
    pub n: usize,
    pub w: Vec<Vec<Vec<Jet>>>,
    pub f: Vec<Vec<Jet>>,
}

impl ModelData {
    pub fn flat(n: usize, order: u32) -> Self {
        let z = Jet::zero(2 * n, order);
        Self { n, w: vec![vec![vec![z.clone(); n]; n]; n], f: vec![vec![z; n]; n] }
    }

    /// `w^{k̄}_{l̄ j̄} = Σ_m g^{m k̄} ∂_{l̄} g_{m j̄}` restricted to `z̄ = 0`;
    /// `curvature[j][i]` is `F_{j ī}` as a jet in `(z, z̄)`, zero if absent.
    pub fn from_metric(g: &MetricJet, curvature: Option<&[Vec<Jet>]>) -> Result<Self, JetError> {
        let n = g.n();
        let ginv = g.inverse()?;
        let order = g.order().saturating_sub(1);
        let mut w = vec![vec![vec![Jet::zero(2 * n, order); n]; n]; n];
        for (l, wl) in w.iter_mut().enumerate() {
            for (j, wlj) in wl.iter_mut().enumerate() {
                for (k, slot) in wlj.iter_mut().enumerate() {
                    let mut s = Jet::zero(2 * n, order);
                    for (m, row) in ginv.iter().enumerate() {
                        s = &s + &(&row[k] * &g.entry(m, j).derivative(n + l));
                    }
                    *slot = s.restrict_zero(n..2 * n);
                }
            }
        }
        let f = match curvature {
            Some(c) => {
                if c.len() != n || c.iter().any(|r| r.len() != n) {
                    return Err(JetError::Shape { expected: n, got: c.len() });
                }
                matrix::map(&c.to_vec(), |j| j.restrict_zero(n..2 * n))
            }
            None => vec![vec![Jet::zero(2 * n, g.order()); n]; n],
        };
        Ok(Self { n, w, f })
    }

    /// `F_{j ī} = ∂_j ∂_ī φ` for a real weight potential `φ`.
    pub fn curvature_from_potential(n: usize, phi: &Jet) -> Vec<Vec<Jet>> {
        (0..n).map(|j| (0..n).map(|i| phi.derivative(j).derivative(n + i)).collect()).collect()
    }

    fn w_order(&self) -> u32 {
        self.w.iter().flatten().flatten().map(Jet::order).min().unwrap_or(u32::MAX)
    }

    fn f_order(&self) -> u32 {
        self.f.iter().flatten().map(Jet::order).min().unwrap_or(u32::MAX)
    }
}

/// `∇^md_j = ∂_{z̃_j}`.
pub fn nabla(j: usize, v: &FormJet) -> FormJet {
    v.derivative(j)
}

/// `∇^md_j̄ = ∂_{z̄̃_j} + Σ_{l,k} w^{k̄}_{l̄ j̄} dw̄_l ι_{∂_k̄}`.
pub fn nabla_bar(data: &ModelData, j: usize, v: &FormJet) -> FormJet {
    let n = data.n;
    let mut out = v.derivative(n + j);
    for l in 0..n {
        for k in 0..n {
            let w = &data.w[l][j][k];
            if w.is_zero() {
                continue;
            }
            out = out.add(&v.iota(k).mul_jet(w).wedge(n + l));
        }
    }
    out
}

/// `∇^md_{r∂r} = Σ_j z̃_j ∇^md_j + z̄̃_j ∇^md_j̄`.
pub fn radial(data: &ModelData, v: &FormJet) -> FormJet {
    let n = data.n;
    let mut out = FormJet::zero(n, v.order);
    for j in 0..n {
        out = out.add(&nabla(j, v).mul_var(j)).add(&nabla_bar(data, j, v).mul_var(n + j));
    }
    out
}

/// `Δ^md = −2 Σ_i ∂_i ∇^md_ī + 2 Σ_{i,j} F_{j ī} dw̄_i ι_{∂_j̄}`.
pub fn laplacian(data: &ModelData, v: &FormJet) -> FormJet {
    let n = data.n;
    let mut out = FormJet::zero(n, v.order);
    for i in 0..n {
        out = out.add(&nabla(i, &nabla_bar(data, i, v)).scale(&coeff::int(-2)));
    }
    for i in 0..n {
        for j in 0..n {
            let f = &data.f[j][i];
            if f.is_zero() {
                continue;
            }
            out = out.add(&v.iota(j).mul_jet(f).wedge(n + i).scale(&coeff::int(2)));
        }
    }
    out
}

/// `Σ_l ι_{∂_l̄} ∂_l`.
pub fn contraction_d(v: &FormJet) -> FormJet {
    let mut out = FormJet::zero(v.n, v.order);
    for l in 0..v.n {
        out = out.add(&v.derivative(l).iota(l));
    }
    out
}

/// Coefficients `v₀..v_K` of the model heat kernel, `v_k` exact through
/// degree `order − 2k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeatCoefficientJet {
    pub n: usize,
    pub order: u32,
    pub v: Vec<FormJet>,
}

impl HeatCoefficientJet {
    pub fn k_max(&self) -> usize {
        self.v.len() - 1
    }
}

/// Solves `∇_{r∂r} v₀ = 0` and `∇_{r∂r} v_{k+1} + (k+1) v_{k+1} + Δ^md v_k = 0`.
///
/// `∇_{r∂r}` acts as `d` on degree-`d` parts plus a connection term that
/// raises degree, so each homogeneous part follows from lower ones:
/// `v_{k+1,d} = −(Δ^md v_k + ∇_{r∂r} v_{k+1})_d / (k+1+d)`.
/// The seed is the constant value of `v₀`, by default the identity form.
pub fn model_transport_solve(
    data: &ModelData,
    seed: Option<&FormJet>,
    k_max: usize,
    order: u32,
) -> Result<HeatCoefficientJet, JetError> {
    let n = data.n;
    if 2 * k_max as u32 > order {
        return Err(JetError::OrderOverflow { requested: 2 * k_max as u32, available: order });
    }
    let need_w = order.saturating_sub(1);
    if data.w_order() < need_w {
        return Err(JetError::OrderOverflow { requested: need_w, available: data.w_order() });
    }
    let need_f = order.saturating_sub(2);
    if k_max > 0 && data.f_order() < need_f {
        return Err(JetError::OrderOverflow { requested: need_f, available: data.f_order() });
    }
    let seed = match seed {
        Some(s) => {
            if s.n != n {
                return Err(JetError::Shape { expected: n, got: s.n });
            }
            if s.parts.values().any(|c| c.terms().any(|(e, _)| e.iter().any(|&x| x > 0))) {
                return Err(JetError::Invariant("seed must be constant".into()));
            }
            s.pad(order)
        }
        None => FormJet::identity_form(n, order),
    };
    let mut v0 = seed;
    for d in 1..=order {
        let r = radial(data, &v0).degree_part(d);
        v0 = v0.add(&r.scale(&coeff::real(-1, d as i64)).pad(order));
    }
    let mut vs = vec![v0];
    for k in 0..k_max {
        let ord = order - 2 * (k as u32 + 1);
        let fixed = laplacian(data, &vs[k]).truncate(ord);
        let kk = (k + 1) as i64;
        let mut v = FormJet::zero(n, ord);
        for d in 0..=ord {
            let cur = radial(data, &v).add(&v.scale(&coeff::int(kk))).add(&fixed);
            let r = cur.degree_part(d);
            v = v.add(&r.scale(&coeff::real(-1, kk + d as i64)).pad(ord));
        }
        vs.push(v);
    }
    Ok(HeatCoefficientJet { n, order, v: vs })
}

/// Laurent coefficients, relative to `t^{−n} e^{−|z̃|²/2t}`, of
/// `(∂_t + Δ^md)` applied to the model kernel.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeatResidual {
    /// `(power of t, exact degree window, max |c|² per degree)` below the top power.
    pub rows: Vec<(i32, u32, Vec<BigRational>)>,
    /// Largest coefficient of the top power, which awaits `v_{K+1}`.
    pub defect: BigRational,
}

impl HeatResidual {
    /// Largest coefficient inside the exact windows.
    pub fn window_max(&self) -> BigRational {
        self.rows
            .iter()
            .flat_map(|(_, w, by)| by.iter().take(*w as usize + 1).cloned())
            .max()
            .unwrap_or_else(BigRational::zero)
    }

    /// Whether any coefficient above a window is nonzero.
    pub fn beyond_window_nonzero(&self) -> bool {
        self.rows.iter().any(|(_, w, by)| by.iter().skip(*w as usize + 1).any(|x| !x.is_zero()))
    }
}

/// Substitutes `S = t^{−n} e^{−Q/2t} Σ t^k v_k`, `Q = Σ z̃ᵢ z̄̃ᵢ`, into the heat
/// operator using the product rule on the Gaussian. Each `v_k` is treated as
/// a polynomial `extra` degrees past its exact range, which exposes the
/// truncation defect above each window.
pub fn heat_residual_check(u: &HeatCoefficientJet, data: &ModelData, extra: u32) -> HeatResidual {
    let n = u.n;
    let nf = n as i64;
    let mut laurent: BTreeMap<i32, FormJet> = BTreeMap::new();
    let mut put = |p: i32, f: FormJet| {
        let slot = laurent.remove(&p);
        laurent.insert(p, match slot {
            Some(s) => s.add(&f),
            None => f,
        });
    };
    let half = coeff::real(1, 2);
    for (k, vk) in u.v.iter().enumerate() {
        let p = k as i32;
        let v = vk.pad(vk.order + extra);
        let mut q_v = FormJet::zero(n, v.order + 2);
        for i in 0..n {
            q_v = q_v.add(&v.mul_var(i).mul_var(n + i));
        }
        // ∂_t of t^k v and of the Gaussian and t^{−n} prefactors.
        put(p - 1, v.scale(&coeff::int(k as i64 - nf)));
        put(p - 2, q_v.scale(&half));
        // −2 Σ ∂_i ∇_ī with the Gaussian: h_i = ∇_ī v − z̃_i v / 2t.
        for i in 0..n {
            let nb = nabla_bar(data, i, &v);
            put(p, nabla(i, &nb).scale(&coeff::int(-2)));
            put(p - 1, nabla(i, &v.mul_var(i)));
            put(p - 1, nb.mul_var(n + i));
            put(p - 2, v.mul_var(i).mul_var(n + i).scale(&-half.clone()));
        }
        for i in 0..n {
            for j in 0..n {
                let f = &data.f[j][i];
                if !f.is_zero() {
                    put(p, v.iota(j).mul_jet(f).wedge(n + i).scale(&coeff::int(2)));
                }
            }
        }
    }
    let top = u.k_max() as i32;
    let mut rows = Vec::new();
    let mut defect = BigRational::zero();
    for (p, c) in &laurent {
        if *p == top {
            let window = u.order - 2 * top as u32;
            defect = (0..=window.saturating_sub(2)).map(|d| c.degree_norm_sqr(d)).max().unwrap_or_else(BigRational::zero);
            continue;
        }
        if *p > top {
            continue;
        }
        let k = (p + 1).max(0) as u32;
        let window = u.order - 2 * k;
        let by = (0..=c.order).map(|d| c.degree_norm_sqr(d)).collect();
        rows.push((*p, window, by));
    }
    HeatResidual { rows, defect }
}

/// Weight decomposition of `t^{−n} Σ t^k v_k` under Getzler rescaling. The
/// Gaussian factor depends on `z̃` and `yᵢ = z̄̃ᵢ/t` only and has weight 0.
pub fn getzler_decomposition(u: &HeatCoefficientJet) -> Vec<(i32, RescalableExpression)> {
    let n = u.n;
    let order = u.order;
    let mut expr = RescalableExpression::zero(n, n, order);
    for (k, vk) in u.v.iter().enumerate() {
        for (mask, c) in vk.parts() {
            for (e, val) in c.terms() {
                let key = TermKey { zbar: e[n..].to_vec(), t: k as i32 - n as i32, forms: *mask };
                let hol = Jet::monomial(n, order, &e[..n], val.clone());
                expr.add_term(key, hol);
            }
        }
    }
    expr.rescale()
}
