use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use super::StatsError;

/// Williams test for two dependent correlations sharing variable 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WilliamsResult {
    pub t: f64,
    pub df: usize,
    pub p_value: f64,
    pub r12: f64,
    pub r13: f64,
    pub r23: f64,
}

/// Compares `r12` against `r13` given `r23` over `n` observations.
///
/// ```text
/// t = (r12 - r13) · sqrt( (n-1)(1+r23) / (2·(n-1)/(n-3)·|R| + r̄²(1-r23)³) )
/// |R| = 1 + 2·r12·r13·r23 - r12² - r13² - r23²,   r̄ = (r12 + r13) / 2
/// ```
///
/// The p-value is two-tailed from Student t with `n - 3` degrees of freedom.
pub fn williams_t(r12: f64, r13: f64, r23: f64, n: usize) -> Result<WilliamsResult, StatsError> {
    if n <= 3 {
        return Err(StatsError::TooFewObservations { needed: 4, got: n });
    }
    for r in [r12, r13, r23] {
        if !(r.is_finite() && r.abs() < 1.0) {
            return Err(StatsError::InvalidCorrelation(r));
        }
    }
    let det = 1.0 + 2.0 * r12 * r13 * r23 - r12 * r12 - r13 * r13 - r23 * r23;
    if det <= 0.0 {
        return Err(StatsError::ImpossibleCorrelations(det));
    }
    let nf = n as f64;
    let rbar = (r12 + r13) / 2.0;
    let denom = 2.0 * ((nf - 1.0) / (nf - 3.0)) * det + rbar * rbar * (1.0 - r23).powi(3);
    let t = (r12 - r13) * (((nf - 1.0) * (1.0 + r23)) / denom).sqrt();
    let df = n - 3;
    let dist = StudentsT::new(0.0, 1.0, df as f64).expect("df ≥ 1");
    let p_value = (2.0 * dist.sf(t.abs())).clamp(0.0, 1.0);
    Ok(WilliamsResult {
        t,
        df,
        p_value,
        r12,
        r13,
        r23,
    })
}
