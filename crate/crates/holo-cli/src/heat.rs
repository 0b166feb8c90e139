use holo_heat::{HeatKernelEval, HeatMethod};
use holo_lattice::Lattice;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::HeatBlock;
use crate::output::{f, Table};
use crate::{to_value, Body, CliError, Context};

#[derive(Serialize)]
struct Row {
    t: f64,
    u: Vec<f64>,
    image: f64,
    spectral: f64,
    diff: f64,
}

#[derive(Serialize)]
struct Mass {
    t: f64,
    mass: f64,
    error: f64,
}

#[derive(Serialize)]
struct Results {
    rows: Vec<Row>,
    max_diff: f64,
    mass: Vec<Mass>,
}

/// Displacements `z − w` between uniform random points of the cell.
pub(crate) fn random_displacements(lattice: &Lattice, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = lattice.real_dim();
    (0..count)
        .map(|_| {
            let z: Vec<f64> = (0..d).map(|_| rng.random::<f64>()).collect();
            let w: Vec<f64> = (0..d).map(|_| rng.random::<f64>()).collect();
            let diff: Vec<f64> = z.iter().zip(&w).map(|(a, b)| a - b).collect();
            lattice.basis().from_cell(&diff)
        })
        .collect()
}

/// `∫_M H_t` by the periodic trapezoid rule with `m` nodes per cell axis.
pub fn heat_mass(h: &HeatKernelEval, t: f64, m: usize) -> Result<f64, CliError> {
    let l = h.lattice();
    let d = l.real_dim();
    let total = m.pow(d as u32);
    let vals = (0..total)
        .into_par_iter()
        .map(|mut idx| {
            let mut c = vec![0.0; d];
            for x in c.iter_mut() {
                *x = (idx % m) as f64 / m as f64;
                idx /= m;
            }
            h.scalar_real(&l.basis().from_cell(&c), t, HeatMethod::Auto).map(|v| v.value)
        })
        .collect::<Result<Vec<f64>, _>>()?;
    Ok(vals.iter().sum::<f64>() * l.covolume() / total as f64)
}

pub(crate) fn run(block: &HeatBlock, ctx: &Context) -> Result<(Body, Table), CliError> {
    let lattice = block.lattice.build()?;
    let h = HeatKernelEval::new(lattice.clone());
    let us = random_displacements(&lattice, block.pairs, ctx.seed);
    let jobs: Vec<(f64, &Vec<f64>)> = block.times.iter().flat_map(|&t| us.iter().map(move |u| (t, u))).collect();
    let rows = jobs
        .par_iter()
        .map(|&(t, u)| {
            let image = h.scalar_real(u, t, HeatMethod::Image)?.value;
            let spectral = h.scalar_real(u, t, HeatMethod::Spectral)?.value;
            Ok(Row { t, u: u.clone(), image, spectral, diff: (image - spectral).abs() })
        })
        .collect::<Result<Vec<Row>, CliError>>()?;
    let max_diff = rows.iter().map(|r| r.diff).fold(0.0, f64::max);
    let mut flags = Vec::new();
    if max_diff > block.tolerance {
        flags.push(format!("image and spectral sums differ by {max_diff:e} > {:e}", block.tolerance));
    }
    let mut mass = Vec::new();
    for &t in &block.mass_times {
        let m = heat_mass(&h, t, block.mass_grid)?;
        let error = (m - 1.0).abs();
        if error > block.mass_tolerance {
            flags.push(format!("heat mass at t = {t} is {m}, off by {error:e}"));
        }
        mass.push(Mass { t, mass: m, error });
    }
    let mut table = Table::new(&["t", "u", "image", "spectral", "diff"]);
    for r in &rows {
        let u = r.u.iter().map(|x| f(*x)).collect::<Vec<_>>().join(" ");
        table.push(vec![f(r.t), u, f(r.image), f(r.spectral), f(r.diff)]);
    }
    let results = to_value(&Results { rows, max_diff, mass })?;
    Ok((Body { results, flags, notes: Vec::new() }, table))
}
