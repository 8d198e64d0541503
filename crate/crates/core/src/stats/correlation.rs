use statrs::distribution::{ContinuousCDF, StudentsT};

use super::{average_ranks, StatsError};

fn check(x: &[f64], y: &[f64]) -> Result<(), StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 3 {
        return Err(StatsError::TooFewObservations {
            needed: 3,
            got: x.len(),
        });
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(StatsError::NonFinite);
    }
    Ok(())
}

fn centred(v: &[f64]) -> Vec<f64> {
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    v.iter().map(|x| x - mean).collect()
}

pub(crate) fn pearson_unchecked(x: &[f64], y: &[f64]) -> Result<f64, StatsError> {
    let cx = centred(x);
    let cy = centred(y);
    let sxx: f64 = cx.iter().map(|v| v * v).sum();
    let syy: f64 = cy.iter().map(|v| v * v).sum();
    if sxx == 0.0 || x.iter().all(|v| *v == x[0]) {
        return Err(StatsError::Constant("first"));
    }
    if syy == 0.0 || y.iter().all(|v| *v == y[0]) {
        return Err(StatsError::Constant("second"));
    }
    let sxy: f64 = cx.iter().zip(&cy).map(|(a, b)| a * b).sum();
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Sample Pearson correlation.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64, StatsError> {
    check(x, y)?;
    pearson_unchecked(x, y)
}

/// Spearman correlation: Pearson correlation of average ranks.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64, StatsError> {
    check(x, y)?;
    pearson_unchecked(&average_ranks(x), &average_ranks(y))
}

/// Two-tailed p-value of a Student t statistic.
pub fn student_t_two_tailed(t: f64, df: f64) -> f64 {
    if t.is_nan() {
        return f64::NAN;
    }
    if t.is_infinite() {
        return 0.0;
    }
    let dist = StudentsT::new(0.0, 1.0, df).expect("positive degrees of freedom");
    (2.0 * dist.sf(t.abs())).clamp(0.0, 1.0)
}

/// Two-tailed p-value for a correlation `r` with `df` degrees of freedom.
pub(crate) fn correlation_p(r: f64, df: f64) -> f64 {
    if r.abs() >= 1.0 {
        return 0.0;
    }
    let t = r * (df / (1.0 - r * r)).sqrt();
    student_t_two_tailed(t, df)
}
