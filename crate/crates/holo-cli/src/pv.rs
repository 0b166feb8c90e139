use holo_pv::corpus::{self, builtin_corpus, random_corpus, CorpusCase, Source};
use holo_pv::{desingularize, independence_check, pv_direct, DesingQuadrature, DirectQuadrature, PvDomain};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::PvBlock;
use crate::output::{f, Table};
use crate::{to_value, Body, CliError, Context};

#[derive(Serialize)]
struct CaseResult {
    name: String,
    source: Source,
    direct: Complex64,
    direct_error: f64,
    desingularized: Complex64,
    expected: Option<Complex64>,
    /// Largest distance to the expected value, or between the routes.
    discrepancy: f64,
    independence: Option<f64>,
    pass: bool,
}

/// Three cutoff domains: the standard one, squared exponents, and a
/// position-dependent scaling.
pub fn independence_domains(m: usize) -> Vec<PvDomain> {
    let mut mixed = vec![1; m];
    mixed[0] = 2;
    vec![
        PvDomain::standard(m),
        PvDomain::with_exponents(vec![2; m]),
        PvDomain::with_exponents(mixed)
            .with_scaling("2+sin", |z: &[Complex64]| 2.0 + 0.5 * z[0].re.sin()),
    ]
}

fn evaluate(case: &CorpusCase, block: &PvBlock) -> Result<CaseResult, CliError> {
    let itg = case.integrand()?;
    let d = pv_direct(&itg, &PvDomain::standard(itg.m()), DirectQuadrature::default())?;
    let q = DesingQuadrature::default();
    let s = desingularize(&itg, &q)?.integrate(&q);
    let (discrepancy, tol) = match case.expected {
        Some(e) => ((d.value - e).norm().max((s.value - e).norm()), block.tolerance),
        None => ((d.value - s.value).norm(), block.route_tolerance),
    };
    let independence = if block.independence {
        let rep = independence_check(&itg, &independence_domains(itg.m()), DirectQuadrature::default(), block.independence_tolerance)?;
        Some(rep.max_discrepancy)
    } else {
        None
    };
    let pass = discrepancy <= tol && independence.map_or(true, |x| x <= block.independence_tolerance);
    Ok(CaseResult {
        name: case.name.clone(),
        source: case.source,
        direct: d.value,
        direct_error: d.error,
        desingularized: s.value,
        expected: case.expected,
        discrepancy,
        independence,
        pass,
    })
}

pub(crate) fn run(block: &PvBlock, ctx: &Context) -> Result<(Body, Table), CliError> {
    let mut cases = match &block.corpus {
        Some(p) => corpus::load(p)?,
        None => builtin_corpus(),
    };
    cases.extend(random_corpus(ctx.seed, block.random));
    let results = cases.par_iter().map(|c| evaluate(c, block)).collect::<Result<Vec<_>, _>>()?;
    let flags: Vec<String> = results
        .iter()
        .filter(|r| !r.pass)
        .map(|r| format!("{}: discrepancy {:e}, independence {:?}", r.name, r.discrepancy, r.independence))
        .collect();
    let mut table =
        Table::new(&["name", "direct_re", "direct_im", "desing_re", "desing_im", "expected_re", "expected_im", "discrepancy", "pass"]);
    for r in &results {
        let (er, ei) = r.expected.map_or((String::new(), String::new()), |e| (f(e.re), f(e.im)));
        table.push(vec![
            r.name.clone(),
            f(r.direct.re),
            f(r.direct.im),
            f(r.desingularized.re),
            f(r.desingularized.im),
            er,
            ei,
            f(r.discrepancy),
            r.pass.to_string(),
        ]);
    }
    let results = to_value(&results)?;
    Ok((Body { results, flags, notes: Vec::new() }, table))
}
