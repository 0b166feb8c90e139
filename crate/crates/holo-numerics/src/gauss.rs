//! Gauss–Legendre rules and Gauss rules for the weight `(-ln x)^k` on `[0, 1]`.
//!
//! The log-weighted rules are built by discretising the weight with a
//! composite Legendre rule on dyadic panels, running the Stieltjes
//! procedure for the recurrence coefficients and diagonalising the Jacobi
//! matrix (Golub–Welsch).

use nalgebra::{DMatrix, SymmetricEigen};

#[derive(Debug, Clone, PartialEq)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    /// Maps a rule on `[-1, 1]` to `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> GaussRule {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        GaussRule {
            nodes: self.nodes.iter().map(|x| mid + half * x).collect(),
            weights: self.weights.iter().map(|w| w * half).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

/// `n`-point Gauss–Legendre rule on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre(n: usize) -> GaussRule {
    assert!(n >= 1, "Gauss–Legendre rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    GaussRule { nodes, weights }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// `n`-point Gauss rule on `[0, 1]` for the weight `(-ln x)^k`.
///
/// For `k = 0` this is the shifted Legendre rule. Nodes ascend.
pub fn log_weighted_rule(k: u32, n: usize) -> GaussRule {
    if k == 0 {
        return gauss_legendre(n).mapped(0.0, 1.0);
    }
    let panel = gauss_legendre(24);
    let mut xs = Vec::new();
    let mut ws = Vec::new();
    let mut hi = 1.0f64;
    for _ in 0..80 {
        let lo = 0.5 * hi;
        let r = panel.mapped(lo, hi);
        for (&x, &w) in r.nodes.iter().zip(&r.weights) {
            xs.push(x);
            ws.push(w * (-x.ln()).powi(k as i32));
        }
        hi = lo;
    }
    let (alpha, beta) = stieltjes(&xs, &ws, n);
    golub_welsch(&alpha, &beta)
}

fn stieltjes(xs: &[f64], ws: &[f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut alpha = Vec::with_capacity(n);
    let mut beta = Vec::with_capacity(n);
    let mut p_prev = vec![0.0; xs.len()];
    let mut p = vec![1.0; xs.len()];
    let mut norm_prev = 1.0;
    for j in 0..n {
        let norm: f64 = ws.iter().zip(&p).map(|(w, v)| w * v * v).sum();
        let xnorm: f64 = ws.iter().zip(&p).zip(xs).map(|((w, v), x)| w * x * v * v).sum();
        let a = xnorm / norm;
        let b = if j == 0 { norm } else { norm / norm_prev };
        alpha.push(a);
        beta.push(b);
        let next: Vec<f64> = xs
            .iter()
            .zip(p.iter().zip(&p_prev))
            .map(|(x, (v, vp))| (x - a) * v - if j == 0 { 0.0 } else { b * vp })
            .collect();
        p_prev = std::mem::replace(&mut p, next);
        norm_prev = norm;
    }
    (alpha, beta)
}

fn golub_welsch(alpha: &[f64], beta: &[f64]) -> GaussRule {
    let n = alpha.len();
    let mut jac = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        jac[(i, i)] = alpha[i];
        if i + 1 < n {
            let off = beta[i + 1].sqrt();
            jac[(i, i + 1)] = off;
            jac[(i + 1, i)] = off;
        }
    }
    let eig = SymmetricEigen::new(jac);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            (eig.eigenvalues[i], beta[0] * v0 * v0)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    GaussRule {
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1).collect(),
    }
}
