#![allow(dead_code)]

use holo_jets::coeff::{self, Coeff};
use holo_jets::Jet;
use num::{BigInt, BigRational, Complex, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn small_coeff(r: &mut ChaCha8Rng) -> Coeff {
    let q = |r: &mut ChaCha8Rng| BigRational::new(BigInt::from(r.random_range(-4i64..=4)), BigInt::from(r.random_range(1i64..=3)));
    Complex::new(q(r), q(r))
}

/// `(z₁..zₙ, z̄₁..z̄ₙ)` exponents of total degree `d`.
pub fn exponents(nvars: usize, d: u32) -> Vec<Vec<u32>> {
    if nvars == 0 {
        return if d == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in (0..=d).rev() {
        for mut rest in exponents(nvars - 1, d - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Real potential `½|z|² + Σ c z^α z̄^β + conj` with `|α|, |β| ≥ 2`, whose
/// Kähler metric is in normal form at the origin.
pub fn normal_potential(n: usize, order: u32, r: &mut ChaCha8Rng) -> Jet {
    let mut k = Jet::zero(2 * n, order);
    for i in 0..n {
        let mut e = vec![0; 2 * n];
        e[i] = 1;
        e[n + i] = 1;
        k.add_term(e, coeff::real(1, 2));
    }
    for d in 4..=order {
        for e in exponents(2 * n, d) {
            let (a, b): (u32, u32) = (e[..n].iter().sum(), e[n..].iter().sum());
            if a < 2 || b < 2 || a > b || r.random_bool(0.5) {
                continue;
            }
            let mut c = small_coeff(r);
            let mut swapped = e[n..].to_vec();
            swapped.extend_from_slice(&e[..n]);
            if swapped == e {
                c = Complex::new(c.re, BigRational::zero());
                k.add_term(e, c);
            } else {
                k.add_term(swapped, c.conj());
                k.add_term(e, c);
            }
        }
    }
    k
}

/// Real weight `Σ c z^α z̄^β + conj` with `|α|, |β| ≥ 1`.
pub fn weight_potential(n: usize, order: u32, r: &mut ChaCha8Rng) -> Jet {
    let mut k = Jet::zero(2 * n, order);
    for d in 2..=order {
        for e in exponents(2 * n, d) {
            let (a, b): (u32, u32) = (e[..n].iter().sum(), e[n..].iter().sum());
            if a < 1 || b < 1 || a > b || r.random_bool(0.6) {
                continue;
            }
            let c = small_coeff(r);
            let mut swapped = e[n..].to_vec();
            swapped.extend_from_slice(&e[..n]);
            if swapped == e {
                k.add_term(e, Complex::new(c.re, BigRational::zero()));
            } else {
                k.add_term(swapped, c.conj());
                k.add_term(e, c);
            }
        }
    }
    k
}

pub fn zzbar(n: usize, i: usize) -> Vec<u32> {
    let mut e = vec![0; 2 * n];
    e[i] = 1;
    e[n + i] = 1;
    e
}
