use crate::direct::{pv_direct, DirectQuadrature, PvEstimate};
use crate::domain::PvDomain;
use crate::integrand::PVIntegrand;
use crate::PvError;

#[derive(Debug, Clone)]
pub struct IndependenceReport {
    pub values: Vec<(String, PvEstimate)>,
    pub max_discrepancy: f64,
    /// Largest sum of the two error estimates over all pairs.
    pub combined_error: f64,
    pub tolerance: f64,
    /// Every pairwise discrepancy is within `tolerance`.
    pub agree: bool,
}

/// Principal values of one integrand over several `(j, f)` domains.
pub fn independence_check(
    itg: &PVIntegrand,
    domains: &[PvDomain],
    quad: DirectQuadrature,
    tolerance: f64,
) -> Result<IndependenceReport, PvError> {
    if domains.len() < 2 {
        return Err(PvError::Invalid("independence needs at least two domains".into()));
    }
    let values = domains
        .iter()
        .map(|d| pv_direct(itg, d, quad).map(|e| (d.name.clone(), e)))
        .collect::<Result<Vec<_>, _>>()?;
    let mut max_discrepancy: f64 = 0.0;
    let mut combined_error: f64 = 0.0;
    for (a, (_, ea)) in values.iter().enumerate() {
        for (_, eb) in &values[a + 1..] {
            max_discrepancy = max_discrepancy.max((ea.value - eb.value).norm());
            combined_error = combined_error.max(ea.error + eb.error);
        }
    }
    Ok(IndependenceReport { agree: max_discrepancy <= tolerance, values, max_discrepancy, combined_error, tolerance })
}
