//! Exact jet checks and the seeded random data they run on.

use holo_jets::coeff::{self, Coeff};
use holo_jets::{
    contraction_d, eikonal_residual, eikonal_solve, frame_residual, getzler_decomposition, heat_residual_check,
    kahler_normal_residual, laplacian, model_transport_solve, nabla, nabla_bar, normal_frame_gauge, FormJet,
    HermitianJet, Jet, MetricJet, ModelData, RescalableExpression,
};
use num::{BigInt, BigRational, Complex, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::JetsBlock;
use crate::output::Table;
use crate::{to_value, Body, CliError, Context};

pub fn small_coeff(r: &mut ChaCha8Rng) -> Coeff {
    let q = |r: &mut ChaCha8Rng| BigRational::new(BigInt::from(r.random_range(-4i64..=4)), BigInt::from(r.random_range(1i64..=3)));
    Complex::new(q(r), q(r))
}

/// Exponent vectors in `nvars` variables of total degree `d`.
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

fn swap_halves(e: &[u32], n: usize) -> Vec<u32> {
    let mut s = e[n..].to_vec();
    s.extend_from_slice(&e[..n]);
    s
}

/// Real potential `Σ c z^α z̄^β + conj` over bidegrees with `|α|, |β| ≥ min_bidegree`.
fn real_potential(n: usize, order: u32, min_bidegree: u32, density: f64, r: &mut ChaCha8Rng) -> Jet {
    let mut k = Jet::zero(2 * n, order);
    for d in (2 * min_bidegree)..=order {
        for e in exponents(2 * n, d) {
            let (a, b): (u32, u32) = (e[..n].iter().sum(), e[n..].iter().sum());
            if a < min_bidegree || b < min_bidegree || a > b || !r.random_bool(density) {
                continue;
            }
            let c = small_coeff(r);
            let swapped = swap_halves(&e, n);
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

/// `½|z|²` plus random real terms of bidegree at least `(2, 2)`: a Kähler
/// potential in normal coordinates.
pub fn random_normal_potential(n: usize, order: u32, r: &mut ChaCha8Rng) -> Jet {
    let mut k = real_potential(n, order, 2, 0.5, r);
    for i in 0..n {
        let mut e = vec![0; 2 * n];
        e[i] = 1;
        e[n + i] = 1;
        k.add_term(e, coeff::real(1, 2));
    }
    k
}

/// Random real potential with bidegrees at least `(1, 1)`.
pub fn random_weight_potential(n: usize, order: u32, r: &mut ChaCha8Rng) -> Jet {
    real_potential(n, order, 1, 0.4, r)
}

/// Hermitian `rank × rank` matrix of jets in `(z, z̄)` with constant part `I`.
pub fn random_hermitian(n: usize, rank: usize, order: u32, r: &mut ChaCha8Rng) -> HermitianJet {
    let mut h = vec![vec![Jet::zero(2 * n, order); rank]; rank];
    for (i, row) in h.iter_mut().enumerate() {
        row[i].add_term(vec![0; 2 * n], Coeff::from(coeff::int(1)));
    }
    for i in 0..rank {
        for j in i..rank {
            for d in 1..=order.min(3) {
                for e in exponents(2 * n, d) {
                    if !r.random_bool(0.3) {
                        continue;
                    }
                    let c = small_coeff(r);
                    let swapped = swap_halves(&e, n);
                    if i == j && swapped == e {
                        h[i][i].add_term(e, Complex::new(c.re, BigRational::zero()));
                    } else {
                        h[j][i].add_term(swapped, c.conj());
                        h[i][j].add_term(e, c);
                    }
                }
            }
        }
    }
    HermitianJet::new(n, h).expect("constant part is the identity")
}

/// Curved model data from a random normal metric and curvature potential.
pub fn random_model(n: usize, order: u32, r: &mut ChaCha8Rng) -> Result<ModelData, CliError> {
    let g = MetricJet::from_potential(n, &random_normal_potential(n, order + 2, r))?;
    let f = ModelData::curvature_from_potential(n, &random_weight_potential(n, order, r));
    Ok(ModelData::from_metric(&g, Some(&f))?)
}

pub fn random_section(n: usize, order: u32, r: &mut ChaCha8Rng) -> FormJet {
    let mut v = FormJet::zero(n, order);
    for mask in 0..(1u64 << (2 * n)) {
        let mut c = Jet::zero(2 * n, order);
        for d in 0..=order {
            for e in exponents(2 * n, d) {
                if r.random_bool(0.3) {
                    c.add_term(e, small_coeff(r));
                }
            }
        }
        v.add_part(mask, c);
    }
    v
}

/// `(label, expression, filtration order, regular)` for the generators
/// `y₁, t⁻¹, dt/t, t·y₁` in complex dimension `n`.
pub fn filtration_table(n: usize, order: u32) -> Vec<(&'static str, RescalableExpression, Option<i32>, bool)> {
    type R = RescalableExpression;
    let y = R::y(n, n, order, 0);
    let t = |p| R::t_power(n, n, order, p);
    vec![
        ("y1", y.clone(), Some(0), true),
        ("t^-1", t(-1), Some(-1), false),
        ("dt/t", R::dt(n, n, order).mul(&t(-1)), Some(0), false),
        ("t*y1", t(1).mul(&y), Some(1), true),
    ]
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub n: usize,
    pub pass: bool,
    pub detail: String,
}

fn check(out: &mut Vec<Check>, name: &str, n: usize, pass: bool, detail: String) {
    out.push(Check { name: name.into(), n, pass, detail });
}

/// Every exact check for complex dimension `n`.
pub fn checks_for(n: usize, block: &JetsBlock, r: &mut ChaCha8Rng) -> Result<Vec<Check>, CliError> {
    let order = block.order;
    let mut out = Vec::new();
    for trial in 0..block.metrics {
        let k = random_normal_potential(n, order + 2, r);
        let g = MetricJet::from_potential(n, &k)?;
        let v = kahler_normal_residual(&g);
        check(&mut out, "normal-residual", n, v.is_zero(), format!("trial {trial}: |residual|² = {}", v.norm_sqr));
        let mut bent = k.clone();
        let mut e = vec![0; 2 * n];
        e[0] = 3;
        e[n] = 1;
        bent.add_term(swap_halves(&e, n), coeff::real(1, 1));
        bent.add_term(e, coeff::real(1, 1));
        let v = kahler_normal_residual(&MetricJet::from_potential(n, &bent)?);
        check(&mut out, "normal-residual-detects", n, !v.is_zero(), format!("trial {trial}: witness {:?}", v.witness.map(|w| w.2)));
        let rho = eikonal_solve(&g, order)?;
        let res = eikonal_residual(&g, &rho)?;
        check(&mut out, "eikonal-back-substitution", n, res.is_zero(), format!("trial {trial}: residual terms {}", res.len()));
        let h = random_hermitian(n, n, order, r);
        let gauge = normal_frame_gauge(&h)?;
        let v = frame_residual(&h, &gauge);
        check(&mut out, "normal-frame-gauge", n, v.is_zero(), format!("trial {trial}: |residual|² = {}", v.norm_sqr));
    }

    let table = filtration_table(n, order);
    let mismatches: Vec<&str> = table
        .iter()
        .filter(|(_, e, w, reg)| e.filtration_order() != *w || e.regularity_test() != *reg)
        .map(|(l, ..)| *l)
        .collect();
    check(&mut out, "filtration-table", n, mismatches.is_empty(), format!("mismatches {mismatches:?}"));

    let k_max = (order / 2) as usize;
    let flat = ModelData::flat(n, order);
    let u = model_transport_solve(&flat, None, k_max, order)?;
    let trivial = u.v[0] == FormJet::identity_form(n, order) && u.v[1..].iter().all(FormJet::is_zero);
    let res = heat_residual_check(&u, &flat, 0);
    check(&mut out, "transport-flat", n, trivial && res.window_max().is_zero(), format!("K = {k_max}"));

    let parts = getzler_decomposition(&u);
    let negative: Vec<i32> = parts.iter().map(|p| p.0).filter(|&w| w < 0).collect();
    check(&mut out, "getzler-flat", n, negative.is_empty(), format!("weights {:?}", parts.iter().map(|p| p.0).collect::<Vec<_>>()));

    let data = random_model(n, order, r)?;
    let u = model_transport_solve(&data, None, k_max, order)?;
    let res = heat_residual_check(&u, &data, 0);
    check(&mut out, "transport-curved", n, res.window_max().is_zero(), format!("window max {}", res.window_max()));
    let mut mutated = u.clone();
    mutated.v[1] = u.v[1].perturbed(0, &vec![0; 2 * n], coeff::real(1, 1000));
    let res = heat_residual_check(&mutated, &data, 0);
    check(&mut out, "transport-uniqueness", n, !res.window_max().is_zero(), "perturbed v1 at degree 0".into());

    let data = random_model(n, 4, r)?;
    let v = random_section(n, 4, r);
    let mut bad = Vec::new();
    for j in 0..n {
        if !contraction_d(&nabla_bar(&data, j, &v)).sub(&nabla_bar(&data, j, &contraction_d(&v))).is_zero() {
            bad.push(format!("[D, nabla_bar_{j}]"));
        }
        if !contraction_d(&nabla(j, &v)).sub(&nabla(j, &contraction_d(&v))).is_zero() {
            bad.push(format!("[D, nabla_{j}]"));
        }
    }
    if !contraction_d(&laplacian(&data, &v)).sub(&laplacian(&data, &contraction_d(&v))).is_zero() {
        bad.push("[D, laplacian]".into());
    }
    check(&mut out, "commutators", n, bad.is_empty(), format!("nonzero {bad:?}"));
    Ok(out)
}

pub(crate) fn run(block: &JetsBlock, ctx: &Context) -> Result<(Body, Table), CliError> {
    if block.n_max == 0 || block.order < 4 {
        return Err(CliError::Config("jets needs n_max ≥ 1 and order ≥ 4".into()));
    }
    let mut r = ChaCha8Rng::seed_from_u64(ctx.seed);
    let mut all = Vec::new();
    for n in 1..=block.n_max {
        all.extend(checks_for(n, block, &mut r)?);
    }
    let flags = all.iter().filter(|c| !c.pass).map(|c| format!("{} (n = {}): {}", c.name, c.n, c.detail)).collect();
    let mut table = Table::new(&["name", "n", "pass", "detail"]);
    for c in &all {
        table.push(vec![c.name.clone(), c.n.to_string(), c.pass.to_string(), c.detail.clone()]);
    }
    Ok((Body { results: to_value(&all)?, flags, notes: Vec::new() }, table))
}
