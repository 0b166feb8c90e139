//! Exact complex-rational scalars.

use num::{BigInt, BigRational, Complex, One, Zero};

pub type Coeff = Complex<BigRational>;

pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn real(num: i64, den: i64) -> Coeff {
    Complex::new(rational(num, den), BigRational::zero())
}

pub fn int(v: i64) -> Coeff {
    real(v, 1)
}

pub fn complex(re: BigRational, im: BigRational) -> Coeff {
    Complex::new(re, im)
}

pub fn imag_unit() -> Coeff {
    Complex::new(BigRational::zero(), BigRational::one())
}

pub fn norm_sqr(c: &Coeff) -> BigRational {
    &c.re * &c.re + &c.im * &c.im
}

/// Multiplicative inverse; `None` for zero.
pub fn inv(c: &Coeff) -> Option<Coeff> {
    let n = norm_sqr(c);
    if n.is_zero() {
        return None;
    }
    Some(Complex::new(&c.re / &n, -&c.im / &n))
}

pub(crate) fn format(c: &Coeff) -> String {
    format!("{} {}", c.re, c.im)
}

pub(crate) fn parse(s: &str) -> Option<Coeff> {
    let mut it = s.split_whitespace();
    let re = it.next()?.parse::<BigRational>().ok()?;
    let im = it.next()?.parse::<BigRational>().ok()?;
    it.next().is_none().then(|| Complex::new(re, im))
}

/// Determinant by exact elimination.
pub fn det(m: &[Vec<Coeff>]) -> Coeff {
    let r = m.len();
    let mut a: Vec<Vec<Coeff>> = m.to_vec();
    let mut d = Coeff::one();
    for c in 0..r {
        let Some(p) = (c..r).find(|&i| !a[i][c].is_zero()) else {
            return Coeff::zero();
        };
        if p != c {
            a.swap(p, c);
            d = -d;
        }
        let pinv = inv(&a[c][c]).expect("pivot is nonzero");
        d = &d * &a[c][c];
        for i in c + 1..r {
            if a[i][c].is_zero() {
                continue;
            }
            let f = &a[i][c] * &pinv;
            for j in c..r {
                let s = &f * &a[c][j];
                a[i][j] = &a[i][j] - &s;
            }
        }
    }
    d
}

/// Inverse by exact Gauss-Jordan elimination; `None` when singular.
pub fn inverse(m: &[Vec<Coeff>]) -> Option<Vec<Vec<Coeff>>> {
    let r = m.len();
    let mut a: Vec<Vec<Coeff>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut row = row.clone();
            row.extend((0..r).map(|j| if i == j { Coeff::one() } else { Coeff::zero() }));
            row
        })
        .collect();
    for c in 0..r {
        let p = (c..r).find(|&i| !a[i][c].is_zero())?;
        a.swap(p, c);
        let pinv = inv(&a[c][c])?;
        for v in a[c].iter_mut() {
            *v = &*v * &pinv;
        }
        for i in 0..r {
            if i == c || a[i][c].is_zero() {
                continue;
            }
            let f = a[i][c].clone();
            for j in 0..2 * r {
                let s = &f * &a[c][j];
                a[i][j] = &a[i][j] - &s;
            }
        }
    }
    Some(a.into_iter().map(|row| row[r..].to_vec()).collect())
}
