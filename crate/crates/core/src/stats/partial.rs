use nalgebra::{DMatrix, DVector};

use super::correlation::{correlation_p, pearson_unchecked};
use super::{average_ranks, AlignmentResult, Method, StatsError};
use crate::rdm::{condense, Rdm};

const RANK_TOLERANCE: f64 = 1e-10;
const RESIDUAL_TOLERANCE: f64 = 1e-20;

fn residualize(q: &DMatrix<f64>, v: &[f64], what: &str) -> Result<Vec<f64>, StatsError> {
    let v = DVector::from_column_slice(v);
    let fitted = q * (q.transpose() * &v);
    let resid = &v - fitted;
    let mean = v.mean();
    let tss: f64 = v.iter().map(|x| (x - mean) * (x - mean)).sum();
    let rss: f64 = resid.iter().map(|r| r * r).sum();
    if rss <= RESIDUAL_TOLERANCE * tss.max(f64::MIN_POSITIVE) {
        return Err(StatsError::Singular(format!(
            "{what} is fully explained by the controls"
        )));
    }
    Ok(resid.iter().copied().collect())
}

/// Partial Pearson correlation of `x` and `y` given `controls`, computed by
/// regressing both on the controls (with intercept) and correlating the
/// residuals. Returns `(r, df)` with `df = m - 2 - controls`.
pub fn partial_correlation_ranked(
    y: &[f64],
    x: &[f64],
    controls: &[Vec<f64>],
) -> Result<(f64, usize), StatsError> {
    let m = y.len();
    if x.len() != m {
        return Err(StatsError::LengthMismatch(m, x.len()));
    }
    if let Some(c) = controls.iter().find(|c| c.len() != m) {
        return Err(StatsError::LengthMismatch(m, c.len()));
    }
    let k = controls.len();
    if m <= 2 + k {
        return Err(StatsError::TooFewObservations {
            needed: 3 + k,
            got: m,
        });
    }
    if controls.is_empty() {
        return Ok((pearson_unchecked(x, y)?, m - 2));
    }
    if controls.iter().any(|c| c.iter().all(|v| *v == c[0])) {
        return Err(StatsError::Constant("control"));
    }
    let design = DMatrix::from_fn(
        m,
        k + 1,
        |i, j| if j == 0 { 1.0 } else { controls[j - 1][i] },
    );
    let qr = design.qr();
    let r = qr.r();
    let scale = (0..=k).map(|i| r[(i, i)].abs()).fold(0.0, f64::max);
    if (0..=k).any(|i| r[(i, i)].abs() <= RANK_TOLERANCE * scale) {
        return Err(StatsError::Singular("controls are collinear".into()));
    }
    let q = qr.q();
    let rx = residualize(&q, x, "x")?;
    let ry = residualize(&q, y, "y")?;
    Ok((pearson_unchecked(&rx, &ry)?, m - 2 - k))
}

/// Partial Spearman correlation between RDMs `y` and `x` controlling for
/// `controls`: every condensed vector is rank-transformed first, then the
/// partial Pearson correlation of the ranks is taken. Analytic two-tailed p
/// with `df = pairs - 2 - controls`.
pub fn partial_spearman(
    y: &Rdm,
    x: &Rdm,
    controls: &[&Rdm],
) -> Result<AlignmentResult, StatsError> {
    let x = x.aligned_to(y)?;
    for c in controls {
        if c.aligned_to(y)?.values() == x.values() {
            return Err(StatsError::Singular("x is one of the controls".into()));
        }
    }
    let rank = |r: &Rdm| -> Result<Vec<f64>, StatsError> {
        Ok(average_ranks(&condense(&r.aligned_to(y)?)?.values))
    };
    let ry = rank(y)?;
    let rx = rank(&x)?;
    let rc: Vec<Vec<f64>> = controls.iter().map(|c| rank(c)).collect::<Result<_, _>>()?;
    let (rho, df) = partial_correlation_ranked(&ry, &rx, &rc)?;
    Ok(AlignmentResult {
        rho,
        p_value: correlation_p(rho, df as f64),
        n_pairs: ry.len(),
        method: Method::Analytic,
        seed: None,
    })
}
