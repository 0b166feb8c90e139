//! PV test cases: a builtin set with known values, a seeded random set, and
//! a JSON file format.

use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::integrand::PVIntegrand;
use crate::smooth::{Beta, ExpPolyBlock, ExpPolySum, PolyTerm};
use crate::PvError;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `β` by name or as an explicit exponential-polynomial table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum BetaSpec {
    Builtin { name: String },
    Table { table: ExpPolySum },
}

/// Where an expected value comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Source {
    /// Closed form.
    Analytic,
    /// No closed form; the direct and desingularized routes must agree.
    CrossCheck,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusCase {
    pub name: String,
    pub m: usize,
    pub n: usize,
    pub pole: Vec<u32>,
    pub logs: Vec<u32>,
    pub beta: BetaSpec,
    #[serde(default)]
    pub expected: Option<Complex64>,
    pub source: Source,
}

/// Named builtin `β`s in `dim` variables.
pub fn builtin_beta(name: &str, dim: usize) -> Result<ExpPolySum, PvError> {
    let unit = |l: usize| {
        let mut v = vec![0; dim];
        v[l] = 1;
        v
    };
    let zeros = vec![0; dim];
    let gauss = |w: f64| vec![c(-w, 0.0); dim];
    let need = |k: usize| {
        if dim < k {
            Err(PvError::Corpus(format!("builtin {name} needs {k} variables, got {dim}")))
        } else {
            Ok(())
        }
    };
    Ok(match name {
        "one" => ExpPolySum::constant(c(1.0, 0.0)),
        "z1" => {
            need(1)?;
            ExpPolySum::monomial(c(1.0, 0.0), unit(0), zeros)
        }
        "z1z2" => {
            need(2)?;
            let mut a = unit(0);
            a[1] = 1;
            ExpPolySum::monomial(c(1.0, 0.0), a, zeros)
        }
        // z₁ z₂ e^{−|z|²/2}
        "z1z2-bump" => {
            need(2)?;
            let mut a = unit(0);
            a[1] = 1;
            ExpPolySum::monomial(c(1.0, 0.0), a, zeros).times_gaussian(&gauss(0.5))
        }
        // z₁² e^{−|z₁|²} + z̄₁ (1 + z₁ + z̄₁²)
        "z1sq-bump-plus-zbar" => {
            need(1)?;
            let mut sq = zeros.clone();
            sq[0] = 2;
            let bump = ExpPolySum::monomial(c(1.0, 0.0), sq, zeros.clone()).times_gaussian(&{
                let mut g = vec![c(0.0, 0.0); dim];
                g[0] = c(-1.0, 0.0);
                g
            });
            let mut zb2 = zeros.clone();
            zb2[0] = 3;
            let rest = ExpPolySum::new(vec![ExpPolyBlock::polynomial(vec![
                PolyTerm { hol: zeros.clone(), anti: unit(0), c: c(1.0, 0.0) },
                PolyTerm { hol: unit(0), anti: unit(0), c: c(1.0, 0.0) },
                PolyTerm { hol: zeros.clone(), anti: zb2, c: c(1.0, 0.0) },
            ])]);
            bump.plus(rest)
        }
        other => return Err(PvError::Corpus(format!("unknown builtin {other}"))),
    })
}

impl CorpusCase {
    pub fn integrand(&self) -> Result<PVIntegrand, PvError> {
        if self.pole.len() != self.m || self.logs.len() != self.m {
            return Err(PvError::Corpus(format!("{}: pole/log lengths differ from m = {}", self.name, self.m)));
        }
        let table = match &self.beta {
            BetaSpec::Builtin { name } => builtin_beta(name, self.m + self.n)?,
            BetaSpec::Table { table } => table.clone(),
        };
        if table.dim() > self.m + self.n {
            return Err(PvError::Corpus(format!("{}: β uses {} variables", self.name, table.dim())));
        }
        PVIntegrand::new(self.name.clone(), self.pole.clone(), self.logs.clone(), self.n, Beta::ExpPoly(table))
    }
}

fn case(name: &str, pole: Vec<u32>, logs: Vec<u32>, beta: &str, expected: Option<Complex64>, source: Source) -> CorpusCase {
    CorpusCase {
        name: name.into(),
        m: pole.len(),
        n: 0,
        pole,
        logs,
        beta: BetaSpec::Builtin { name: beta.into() },
        expected,
        source,
    }
}

/// The four closed-form cases followed by cross-checked ones.
pub fn builtin_corpus() -> Vec<CorpusCase> {
    vec![
        case("simple-pole-constant", vec![1], vec![0], "one", Some(c(0.0, 0.0)), Source::Analytic),
        case("simple-pole-z", vec![1], vec![0], "z1", Some(c(0.0, -2.0 * PI)), Source::Analytic),
        case("simple-pole-z-log", vec![1], vec![1], "z1", Some(c(0.0, 2.0 * PI)), Source::Analytic),
        case("product-simple-poles", vec![1, 1], vec![0, 0], "z1z2", Some(c(-4.0 * PI * PI, 0.0)), Source::Analytic),
        case("double-pole-mixed", vec![2], vec![0], "z1sq-bump-plus-zbar", None, Source::CrossCheck),
        case("mixed-log-bump", vec![1, 1], vec![1, 0], "z1z2-bump", None, Source::CrossCheck),
    ]
}

/// `count` random cases with `m ≤ 2`, poles `≤ 3`, log powers `≤ 2` and
/// `β` a short exponential polynomial with a Gaussian envelope.
pub fn random_corpus(seed: u64, count: usize) -> Vec<CorpusCase> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|idx| {
            let m = rng.random_range(1..=2usize);
            let pole: Vec<u32> = (0..m).map(|_| rng.random_range(0..=3)).collect();
            let logs: Vec<u32> = (0..m).map(|_| rng.random_range(0..=2)).collect();
            let nterms = rng.random_range(1..=3);
            let terms = (0..nterms)
                .map(|_| PolyTerm {
                    hol: (0..m).map(|_| rng.random_range(0..=3)).collect(),
                    anti: (0..m).map(|_| rng.random_range(0..=2)).collect(),
                    c: c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
                })
                .collect();
            let mut small = || c(rng.random_range(-0.3..0.3), rng.random_range(-0.3..0.3));
            let mu: Vec<Complex64> = (0..m).map(|_| small()).collect();
            let nu: Vec<Complex64> = (0..m).map(|_| small()).collect();
            let lambda: Vec<Complex64> = (0..m).map(|_| c(-rng.random_range(0.2..1.2), 0.0)).collect();
            CorpusCase {
                name: format!("random-{seed}-{idx}"),
                m,
                n: 0,
                pole,
                logs,
                beta: BetaSpec::Table { table: ExpPolySum::new(vec![ExpPolyBlock { terms, mu, nu, lambda }]) },
                expected: None,
                source: Source::CrossCheck,
            }
        })
        .collect()
}

pub fn load(path: &Path) -> Result<Vec<CorpusCase>, PvError> {
    let text = std::fs::read_to_string(path).map_err(|e| PvError::Corpus(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| PvError::Corpus(format!("{}: {e}", path.display())))
}

pub fn save(path: &Path, cases: &[CorpusCase]) -> Result<(), PvError> {
    let text = serde_json::to_string_pretty(cases).map_err(|e| PvError::Corpus(e.to_string()))?;
    std::fs::write(path, text).map_err(|e| PvError::Corpus(format!("{}: {e}", path.display())))
}
