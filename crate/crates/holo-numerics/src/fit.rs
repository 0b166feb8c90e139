//! Weighted linear least squares (SVD on a column-scaled design) and
//! polynomial extrapolation to a vanishing step.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::NumericsError;

#[derive(Debug, Clone, PartialEq)]
pub struct LstsqFit {
    pub coef: Vec<f64>,
    /// Weighted residuals `(y - A c) / sigma`.
    pub residuals: Vec<f64>,
    pub residual_rms: f64,
    /// Diagonal of `(Aᵀ W A)⁻¹`; standard errors when `sigma` are true 1σ errors.
    pub cov_diag: Vec<f64>,
}

/// Solves `min ‖(y − A c)/σ‖₂`. Rows of `design` are observations.
pub fn weighted_lstsq(
    design: &[Vec<f64>],
    y: &[f64],
    sigma: Option<&[f64]>,
) -> Result<LstsqFit, NumericsError> {
    let rows = design.len();
    let cols = design.first().map_or(0, Vec::len);
    if rows < cols || cols == 0 {
        return Err(NumericsError::Underdetermined { rows, cols });
    }
    let w: Vec<f64> = match sigma {
        Some(s) => s.iter().map(|&v| if v > 0.0 { 1.0 / v } else { 1.0 }).collect(),
        None => vec![1.0; rows],
    };
    let mut a = DMatrix::<f64>::zeros(rows, cols);
    let mut b = DVector::<f64>::zeros(rows);
    for i in 0..rows {
        for j in 0..cols {
            a[(i, j)] = design[i][j] * w[i];
        }
        b[i] = y[i] * w[i];
    }
    let mut scale = vec![1.0; cols];
    for (j, s) in scale.iter_mut().enumerate() {
        let m = a.column(j).amax();
        if m > 0.0 {
            *s = m;
            a.column_mut(j).scale_mut(1.0 / m);
        }
    }
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let tol = smax * 1e-15 * rows.max(cols) as f64;
    let x = svd
        .solve(&b, tol)
        .map_err(|e| NumericsError::Domain(e.to_string()))?;
    let v_t = svd.v_t.as_ref().ok_or_else(|| NumericsError::Domain("svd without V".into()))?;
    let mut cov_diag = vec![0.0; cols];
    for (j, c) in cov_diag.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (k, &s) in svd.singular_values.iter().enumerate() {
            if s > tol {
                acc += (v_t[(k, j)] / s).powi(2);
            }
        }
        *c = acc / (scale[j] * scale[j]);
    }
    let fitted = &a * &x;
    let residuals: Vec<f64> = (0..rows).map(|i| b[i] - fitted[i]).collect();
    let residual_rms = (residuals.iter().map(|r| r * r).sum::<f64>() / rows as f64).sqrt();
    let coef = (0..cols).map(|j| x[j] / scale[j]).collect();
    Ok(LstsqFit { coef, residuals, residual_rms, cov_diag })
}

/// Fits `v(h) = c₀ + Σ c_k h^{p_k}` and returns `c₀`. With exactly
/// `1 + powers.len()` samples this is Richardson extrapolation.
pub fn extrapolate_to_zero(
    hs: &[f64],
    vs: &[Complex64],
    powers: &[f64],
) -> Result<Complex64, NumericsError> {
    let design: Vec<Vec<f64>> = hs
        .iter()
        .map(|&h| std::iter::once(1.0).chain(powers.iter().map(|&p| h.powf(p))).collect())
        .collect();
    let re: Vec<f64> = vs.iter().map(|v| v.re).collect();
    let im: Vec<f64> = vs.iter().map(|v| v.im).collect();
    let fr = weighted_lstsq(&design, &re, None)?;
    let fi = weighted_lstsq(&design, &im, None)?;
    Ok(Complex64::new(fr.coef[0], fi.coef[0]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exact_polynomial() {
        let xs = [0.1, 0.2, 0.4, 0.8, 1.6];
        let design: Vec<Vec<f64>> = xs.iter().map(|&x| vec![1.0, x, x * x]).collect();
        let y: Vec<f64> = xs.iter().map(|&x| 3.0 - 2.0 * x + 0.5 * x * x).collect();
        let f = weighted_lstsq(&design, &y, None).unwrap();
        assert!((f.coef[0] - 3.0).abs() < 1e-12);
        assert!((f.coef[1] + 2.0).abs() < 1e-12);
        assert!(f.residual_rms < 1e-12);
    }

    #[test]
    fn richardson_removes_linear_and_quadratic_terms() {
        let hs = [1e-2, 1e-3, 1e-4];
        let vs: Vec<Complex64> =
            hs.iter().map(|&h| Complex64::new(1.0 + 3.0 * h - h * h, -h)).collect();
        let c0 = extrapolate_to_zero(&hs, &vs, &[1.0, 2.0]).unwrap();
        assert!((c0 - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn rejects_underdetermined() {
        let design = vec![vec![1.0, 2.0, 3.0]];
        assert!(weighted_lstsq(&design, &[1.0], None).is_err());
    }
}
