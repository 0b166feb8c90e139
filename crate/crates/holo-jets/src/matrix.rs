//! Square matrices of jets.

use num::One;

use crate::coeff::{self, Coeff};
use crate::jet::Jet;
use crate::JetError;

pub type JetMatrix = Vec<Vec<Jet>>;

pub fn identity(r: usize, nvars: usize, order: u32, c: &Coeff) -> JetMatrix {
    (0..r)
        .map(|i| {
            (0..r)
                .map(|j| if i == j { Jet::constant(nvars, order, c.clone()) } else { Jet::zero(nvars, order) })
                .collect()
        })
        .collect()
}

pub fn mat_mul(a: &JetMatrix, b: &JetMatrix) -> JetMatrix {
    let r = a.len();
    let m = b[0].len();
    (0..r)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let mut s = &a[i][0] * &b[0][j];
                    for k in 1..b.len() {
                        s = &s + &(&a[i][k] * &b[k][j]);
                    }
                    s
                })
                .collect()
        })
        .collect()
}

pub fn mat_add(a: &JetMatrix, b: &JetMatrix) -> JetMatrix {
    a.iter().zip(b).map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x + y).collect()).collect()
}

pub fn mat_sub(a: &JetMatrix, b: &JetMatrix) -> JetMatrix {
    a.iter().zip(b).map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x - y).collect()).collect()
}

pub fn transpose(a: &JetMatrix) -> JetMatrix {
    (0..a[0].len()).map(|j| a.iter().map(|row| row[j].clone()).collect()).collect()
}

/// Conjugate transpose for entries in `(z, z̄)`.
pub fn dagger(a: &JetMatrix, n: usize) -> JetMatrix {
    (0..a[0].len()).map(|j| a.iter().map(|row| row[j].conj_swap(n)).collect()).collect()
}

pub fn constant_part(a: &JetMatrix) -> Vec<Vec<Coeff>> {
    a.iter().map(|row| row.iter().map(Jet::constant_term).collect()).collect()
}

pub fn map(a: &JetMatrix, f: impl Fn(&Jet) -> Jet) -> JetMatrix {
    a.iter().map(|row| row.iter().map(&f).collect()).collect()
}

/// Inverse via the constant part and a terminating Neumann series.
pub fn mat_inverse(a: &JetMatrix) -> Result<JetMatrix, JetError> {
    let r = a.len();
    let nvars = a[0][0].nvars();
    let order = a.iter().flatten().map(Jet::order).min().unwrap_or(0);
    let c0inv = coeff::inverse(&constant_part(a)).ok_or(JetError::NonUnit)?;
    let c0inv: JetMatrix =
        c0inv.into_iter().map(|row| row.into_iter().map(|c| Jet::constant(nvars, order, c)).collect()).collect();
    let mut nil: JetMatrix = mat_mul(&c0inv, a).iter().map(|row| row.iter().map(|j| -j).collect()).collect();
    for (i, row) in nil.iter_mut().enumerate() {
        row[i].add_term(vec![0; nvars], Coeff::one());
    }
    let mut sum = identity(r, nvars, order, &Coeff::one());
    let mut power = sum.clone();
    for _ in 0..order {
        power = mat_mul(&power, &nil);
        if power.iter().flatten().all(Jet::is_zero) {
            break;
        }
        sum = mat_add(&sum, &power);
    }
    Ok(mat_mul(&sum, &c0inv))
}
