use num::{BigRational, One, Signed, Zero};

use crate::coeff::{self, Coeff};
use crate::jet::Jet;
use crate::matrix::{self, JetMatrix};
use crate::JetError;

/// Hermitian matrix jet `g_{i j̄}` in `(z₁..zₙ, z̄₁..z̄ₙ)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MetricJet {
    n: usize,
    g: JetMatrix,
}

fn check_hermitian(h: &JetMatrix, n: usize) -> Result<(), JetError> {
    let r = h.len();
    if h.iter().any(|row| row.len() != r) {
        return Err(JetError::Shape { expected: r, got: h.iter().map(Vec::len).find(|&l| l != r).unwrap_or(r) });
    }
    if let Some(j) = h.iter().flatten().find(|j| j.nvars() != 2 * n) {
        return Err(JetError::Shape { expected: 2 * n, got: j.nvars() });
    }
    let order = h.iter().flatten().map(Jet::order).min().unwrap_or(0);
    let d = matrix::dagger(h, n);
    for i in 0..r {
        for j in 0..r {
            if h[i][j].truncate(order) != d[i][j].truncate(order) {
                return Err(JetError::NotHermitian);
            }
        }
    }
    Ok(())
}

impl MetricJet {
    pub fn new(g: JetMatrix) -> Result<Self, JetError> {
        let n = g.len();
        if n == 0 {
            return Err(JetError::Shape { expected: 1, got: 0 });
        }
        check_hermitian(&g, n)?;
        let c = matrix::constant_part(&g);
        for k in 1..=n {
            let minor: Vec<Vec<Coeff>> = c[..k].iter().map(|row| row[..k].to_vec()).collect();
            if !coeff::det(&minor).re.is_positive() {
                return Err(JetError::NotPositive);
            }
        }
        Ok(Self { n, g })
    }

    /// `g_{i j̄} = ½ δ_{ij}`.
    pub fn flat(n: usize, order: u32) -> Self {
        Self { n, g: matrix::identity(n, 2 * n, order, &coeff::real(1, 2)) }
    }

    /// `g_{i j̄} = ∂_i ∂_{j̄} K` for a real potential `K` in `(z, z̄)`.
    pub fn from_potential(n: usize, potential: &Jet) -> Result<Self, JetError> {
        if potential.nvars() != 2 * n {
            return Err(JetError::Shape { expected: 2 * n, got: potential.nvars() });
        }
        let g = (0..n).map(|i| (0..n).map(|j| potential.derivative(i).derivative(n + j)).collect()).collect();
        Self::new(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> u32 {
        self.g.iter().flatten().map(Jet::order).min().unwrap_or(0)
    }

    pub fn entry(&self, i: usize, j: usize) -> &Jet {
        &self.g[i][j]
    }

    pub fn matrix(&self) -> &JetMatrix {
        &self.g
    }

    pub(crate) fn padded(&self, order: u32) -> Self {
        Self { n: self.n, g: matrix::map(&self.g, |j| j.pad(order)) }
    }

    /// `g^{i j̄}` with `Σ_j g^{i j̄} g_{k j̄} = δ_{ik}`.
    pub fn inverse(&self) -> Result<JetMatrix, JetError> {
        Ok(matrix::transpose(&matrix::mat_inverse(&self.g)?))
    }
}

/// Hermitian bundle metric jet with identity constant term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HermitianJet {
    n: usize,
    h: JetMatrix,
}

impl HermitianJet {
    pub fn new(n: usize, h: JetMatrix) -> Result<Self, JetError> {
        if h.is_empty() {
            return Err(JetError::Shape { expected: 1, got: 0 });
        }
        check_hermitian(&h, n)?;
        let c = matrix::constant_part(&h);
        for (i, row) in c.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                if *v != if i == j { Coeff::one() } else { Coeff::zero() } {
                    return Err(JetError::NotPositive);
                }
            }
        }
        Ok(Self { n, h })
    }

    pub fn rank(&self) -> usize {
        self.h.len()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &JetMatrix {
        &self.h
    }
}

/// Worst offending coefficient of a normality scan.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub norm_sqr: BigRational,
    /// Entry, exponent and coefficient of the largest offender.
    pub witness: Option<(usize, usize, Vec<u32>, Coeff)>,
}

impl Violation {
    pub fn is_zero(&self) -> bool {
        self.norm_sqr.is_zero()
    }
}

/// Largest coefficient of `m − target` with no antiholomorphic factor.
fn holomorphic_scan(m: &JetMatrix, n: usize, target: &Coeff) -> Violation {
    let mut best = Violation { norm_sqr: BigRational::zero(), witness: None };
    for (i, row) in m.iter().enumerate() {
        for (j, jet) in row.iter().enumerate() {
            let mut jet = jet.clone();
            if i == j {
                jet.add_term(vec![0; 2 * n], -target.clone());
            }
            for (e, c) in jet.terms() {
                if e[n..].iter().any(|&x| x > 0) {
                    continue;
                }
                let ns = coeff::norm_sqr(c);
                if ns > best.norm_sqr {
                    best = Violation { norm_sqr: ns, witness: Some((i, j, e.clone(), c.clone())) };
                }
            }
        }
    }
    best
}

/// Deviation of `g` from Kähler normal form: `g(0) = ½δ` and no purely
/// holomorphic terms.
pub fn kahler_normal_residual(g: &MetricJet) -> Violation {
    holomorphic_scan(&g.g, g.n, &coeff::real(1, 2))
}

/// `Σ ∂_i ρ² g^{i j̄} ∂_{j̄} ρ² − 2ρ²`.
pub fn eikonal_residual(g: &MetricJet, rho2: &Jet) -> Result<Jet, JetError> {
    let n = g.n;
    let order = rho2.order();
    let ginv = g.padded(order).inverse()?;
    let rho = rho2.pad(order + 1);
    let mut lhs = Jet::zero(2 * n, order);
    for i in 0..n {
        let di = rho.derivative(i);
        for j in 0..n {
            if ginv[i][j].is_zero() {
                continue;
            }
            let t = &(&di * &ginv[i][j]) * &rho.derivative(n + j);
            lhs = &lhs + &t;
        }
    }
    Ok((&lhs - &rho2.scale(&coeff::int(2))).truncate(g.order() + 2))
}

/// Solves `Σ ∂_i ρ² g^{i j̄} ∂_{j̄} ρ² = 2ρ²` order by order from the seed
/// `Σ zᵢ z̄ᵢ`. The degree-`d` correction enters the left side as `2d P_d`,
/// so `P_d = −r_d / (2(d − 1))`.
pub fn eikonal_solve(g: &MetricJet, order: u32) -> Result<Jet, JetError> {
    let n = g.n;
    if order > crate::jet::MAX_ORDER {
        return Err(JetError::OrderOverflow { requested: order, available: crate::jet::MAX_ORDER });
    }
    if g.order() + 2 < order {
        return Err(JetError::OrderOverflow { requested: order, available: g.order() + 2 });
    }
    let mut rho = Jet::zero(2 * n, order);
    for i in 0..n {
        let mut e = vec![0; 2 * n];
        e[i] = 1;
        e[n + i] = 1;
        rho.add_term(e, Coeff::one());
    }
    if !eikonal_residual(g, &rho.truncate(2.min(order)))?.degree_part(2).is_zero() {
        return Err(JetError::Inconsistent { order: 2 });
    }
    for d in 3..=order {
        let r = eikonal_residual(g, &rho.truncate(d))?.degree_part(d);
        let f = coeff::real(-1, 2 * (d as i64 - 1));
        for (e, c) in r.terms() {
            rho.add_term(e.clone(), c * &f);
        }
    }
    Ok(rho)
}

/// Holomorphic frame change `G = h(z, 0)⁻¹` making the bundle metric normal.
pub fn normal_frame_gauge(h: &HermitianJet) -> Result<JetMatrix, JetError> {
    let hol = matrix::map(&h.h, |j| j.restrict_zero(h.n..2 * h.n));
    matrix::mat_inverse(&hol)
}

/// `G h G†`.
pub fn transformed_metric(h: &HermitianJet, gauge: &JetMatrix) -> JetMatrix {
    matrix::mat_mul(&matrix::mat_mul(gauge, &h.h), &matrix::dagger(gauge, h.n))
}

/// Purely holomorphic deviation of `G h G†` from the identity.
pub fn frame_residual(h: &HermitianJet, gauge: &JetMatrix) -> Violation {
    holomorphic_scan(&transformed_metric(h, gauge), h.n, &Coeff::one())
}
