use std::f64::consts::PI;

use holo_heat::cache::PropagatorCache;
use holo_heat::weak::{defining_equation_check, FourierTestForm};
use holo_heat::{LegDerivs, PropagatorKernel};
use holo_numerics::extrapolate_to_zero;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::PropBlock;
use crate::output::{f, Table};
use crate::{to_value, Body, CliError, Context};

#[derive(Serialize)]
struct Sample {
    z: Vec<f64>,
    w: Vec<f64>,
    head: Vec<u32>,
    tail: Vec<u32>,
    coeffs: Vec<Complex64>,
}

#[derive(Serialize)]
struct Residue {
    limit: Complex64,
    error: f64,
}

#[derive(Serialize)]
struct Weak {
    modes: Vec<(Vec<i64>, Complex64)>,
    lhs: Complex64,
    rhs: Complex64,
    residual: f64,
}

#[derive(Serialize)]
struct Results {
    kernel_fingerprint: String,
    split_l: f64,
    samples: Vec<Sample>,
    residue: Option<Residue>,
    weak: Vec<Weak>,
}

/// Low Fourier test forms `Σ a_k e^{i⟨μ_k, u⟩}`, `μ_k` in dual-basis coordinates.
pub fn low_fourier_forms() -> Vec<FourierTestForm> {
    let c = Complex64::new;
    vec![
        FourierTestForm { modes: vec![(vec![1, 0], c(1.0, 0.0))] },
        FourierTestForm { modes: vec![(vec![0, 1], c(0.5, -0.25))] },
        FourierTestForm { modes: vec![(vec![1, 1], c(1.0, 0.0)), (vec![0, 0], c(2.0, 0.0))] },
        FourierTestForm { modes: vec![(vec![-1, 2], c(0.0, 1.0)), (vec![2, 0], c(0.3, 0.0))] },
        FourierTestForm { modes: vec![(vec![1, -1], c(0.7, 0.2)), (vec![-2, -1], c(-0.4, 0.1)), (vec![0, 0], c(1.0, 1.0))] },
    ]
}

/// Richardson limit of `(z − w)P` along `dir` from `|z − w| ∈ hs`.
pub fn residue_limit(kernel: &PropagatorKernel, dir: Complex64, hs: &[f64]) -> Result<Complex64, CliError> {
    let vals = hs
        .iter()
        .map(|&h| {
            let u = dir * h;
            let p = kernel.coefficients_real(&[u.re, u.im], &LegDerivs::none())?.coeffs[0];
            Ok(u * p)
        })
        .collect::<Result<Vec<Complex64>, CliError>>()?;
    extrapolate_to_zero(hs, &vals, &[1.0, 2.0]).map_err(|e| CliError::Output(format!("extrapolation: {e}")))
}

pub(crate) fn run(block: &PropBlock, ctx: &Context) -> Result<(Body, Table), CliError> {
    let lattice = block.lattice.build()?;
    let kernel = PropagatorKernel::new(lattice.clone(), block.propagator.build())?;
    let fingerprint = kernel.fingerprint();
    let d = lattice.real_dim();
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let points: Vec<(Vec<f64>, Vec<f64>)> = (0..block.samples)
        .map(|_| {
            let z: Vec<f64> = (0..d).map(|_| rng.random::<f64>()).collect();
            let w: Vec<f64> = (0..d).map(|_| rng.random::<f64>()).collect();
            (lattice.basis().from_cell(&z), lattice.basis().from_cell(&w))
        })
        .collect();
    let cache = match &ctx.cache_dir {
        Some(dir) => Some(PropagatorCache::open(dir, &fingerprint, lattice.n())?),
        None => None,
    };
    let derivs: Vec<LegDerivs> = block.derivs.iter().map(|b| LegDerivs::new(b.head.clone(), b.tail.clone())).collect();
    let jobs: Vec<(&(Vec<f64>, Vec<f64>), &LegDerivs)> =
        points.iter().flat_map(|p| derivs.iter().map(move |dv| (p, dv))).collect();
    let samples = jobs
        .par_iter()
        .map(|&((z, w), dv)| {
            let coeffs = match cache.as_ref().and_then(|c| c.get(z, w, dv)) {
                Some(c) => c,
                None => {
                    let u: Vec<f64> = z.iter().zip(w).map(|(a, b)| a - b).collect();
                    let c = kernel.coefficients_real(&u, dv)?.coeffs;
                    if let Some(cache) = &cache {
                        cache.insert(z, w, dv, c.clone());
                    }
                    c
                }
            };
            Ok(Sample { z: z.clone(), w: w.clone(), head: dv.head.clone(), tail: dv.tail.clone(), coeffs })
        })
        .collect::<Result<Vec<Sample>, CliError>>()?;
    if let Some(cache) = &cache {
        cache.flush()?;
        eprintln!("cache: {} entries in {}", cache.len(), cache.path().display());
    }

    let mut flags = Vec::new();
    let mut notes = Vec::new();
    let one_dim = lattice.n() == 1;
    let residue = if block.residue_check && one_dim {
        let limit = residue_limit(&kernel, Complex64::new(0.6, 0.8), &[1e-2, 1e-3, 1e-4])?;
        let error = (limit - Complex64::new(1.0 / PI, 0.0)).norm();
        if error > block.tolerance {
            flags.push(format!("residue limit {limit} is {error:e} away from 1/π"));
        }
        Some(Residue { limit, error })
    } else {
        if block.residue_check {
            notes.push("residue check skipped: only implemented for n = 1".into());
        }
        None
    };
    let mut weak = Vec::new();
    if block.weak_check && one_dim {
        for form in low_fourier_forms() {
            let r = defining_equation_check(&kernel, &form, 40)?;
            if r.residual > block.tolerance {
                flags.push(format!("weak defining equation residual {:e} for modes {:?}", r.residual, form.modes));
            }
            weak.push(Weak { modes: form.modes, lhs: r.lhs, rhs: r.rhs, residual: r.residual });
        }
    } else if block.weak_check {
        notes.push("weak-form check skipped: only implemented for n = 1".into());
    }

    let mut table = Table::new(&["sample", "z", "w", "head", "tail", "index", "re", "im"]);
    let join = |v: &[f64]| v.iter().map(|x| f(*x)).collect::<Vec<_>>().join(" ");
    let joinu = |v: &[u32]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
    for (k, s) in samples.iter().enumerate() {
        for (i, c) in s.coeffs.iter().enumerate() {
            table.push(vec![k.to_string(), join(&s.z), join(&s.w), joinu(&s.head), joinu(&s.tail), i.to_string(), f(c.re), f(c.im)]);
        }
    }
    let results = to_value(&Results { kernel_fingerprint: fingerprint, split_l: kernel.split_l(), samples, residue, weak })?;
    Ok((Body { results, flags, notes }, table))
}
