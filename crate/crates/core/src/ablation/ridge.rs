use std::io::{Read, Write};

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::AblationError;

/// Format tag of persisted fits.
pub const RIDGE_FORMAT: &str = "lexalign-ridge/1";

/// 13 log-spaced values from 1e-3 to 1e3.
pub fn default_alpha_grid() -> Vec<f64> {
    (0..13).map(|i| 10f64.powf(-3.0 + 0.5 * i as f64)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct RidgeOptions {
    pub alpha_grid: Vec<f64>,
    pub k_folds: usize,
    pub seed: u64,
}

impl Default for RidgeOptions {
    fn default() -> Self {
        RidgeOptions {
            alpha_grid: default_alpha_grid(),
            k_folds: 5,
            seed: 0,
        }
    }
}

/// Whether residuals are returned in raw embedding units or in the
/// standardized space the regression was fitted in.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ResidualSpace {
    #[default]
    Raw,
    Standardized,
}

/// Ridge fit on standardized features and targets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RidgeFit {
    pub format: String,
    /// `p × d`, row per feature.
    pub weights: Vec<Vec<f64>>,
    pub alpha: f64,
    pub x_mean: Vec<f64>,
    pub x_sd: Vec<f64>,
    pub y_mean: Vec<f64>,
    /// 1.0 for passthrough dimensions.
    pub y_sd: Vec<f64>,
    /// Target dimensions with zero training variance; never predicted.
    pub passthrough: Vec<usize>,
    pub cv_r2: f64,
    /// Mean out-of-fold R² per grid value, in grid order.
    pub cv_scores: Vec<f64>,
    pub alpha_grid: Vec<f64>,
    pub folds: usize,
    pub seed: u64,
    pub n_train: usize,
}

impl RidgeFit {
    pub fn n_features(&self) -> usize {
        self.x_mean.len()
    }

    pub fn n_outputs(&self) -> usize {
        self.y_mean.len()
    }

    pub fn write_json<W: Write>(&self, out: W) -> Result<(), AblationError> {
        serde_json::to_writer_pretty(out, self)?;
        Ok(())
    }

    pub fn read_json<R: Read>(reader: R) -> Result<Self, AblationError> {
        let fit: RidgeFit = serde_json::from_reader(reader)?;
        if fit.format != RIDGE_FORMAT {
            return Err(AblationError::Format(fit.format));
        }
        Ok(fit)
    }
}

/// Population mean and standard deviation of each column.
fn scaler(rows: &[&[f64]], cols: &[usize]) -> (Vec<f64>, Vec<f64>) {
    let n = rows.len() as f64;
    let mut mean = Vec::with_capacity(cols.len());
    let mut sd = Vec::with_capacity(cols.len());
    for &c in cols {
        let m = rows.iter().map(|r| r[c]).sum::<f64>() / n;
        let v = rows.iter().map(|r| (r[c] - m) * (r[c] - m)).sum::<f64>() / n;
        mean.push(m);
        sd.push(v.sqrt());
    }
    (mean, sd)
}

fn is_constant(rows: &[&[f64]], c: usize) -> bool {
    rows.iter().all(|r| r[c] == rows[0][c])
}

fn standardize(rows: &[&[f64]], cols: &[usize], mean: &[f64], sd: &[f64]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), cols.len(), |i, j| {
        (rows[i][cols[j]] - mean[j]) / sd[j]
    })
}

/// `(XᵀX + αI)⁻¹ XᵀY`.
fn solve(x: &DMatrix<f64>, y: &DMatrix<f64>, alpha: f64) -> Result<DMatrix<f64>, AblationError> {
    let p = x.ncols();
    let xt = x.transpose();
    let gram = &xt * x + DMatrix::identity(p, p) * alpha;
    let rhs = &xt * y;
    if let Some(chol) = gram.clone().cholesky() {
        return Ok(chol.solve(&rhs));
    }
    gram.lu().solve(&rhs).ok_or(AblationError::Singular(alpha))
}

struct Fold {
    x_train: DMatrix<f64>,
    y_train: DMatrix<f64>,
    x_test: DMatrix<f64>,
    y_test: DMatrix<f64>,
}

fn prepare_fold(
    fold: usize,
    train: &[usize],
    test: &[usize],
    x: &[&[f64]],
    y: &[&[f64]],
    x_cols: &[usize],
    y_cols: &[usize],
) -> Result<Fold, AblationError> {
    let xt: Vec<&[f64]> = train.iter().map(|&i| x[i]).collect();
    let yt: Vec<&[f64]> = train.iter().map(|&i| y[i]).collect();
    for &c in x_cols {
        if is_constant(&xt, c) {
            return Err(AblationError::SingularFold {
                fold,
                what: "feature",
                column: c,
            });
        }
    }
    for &c in y_cols {
        if is_constant(&yt, c) {
            return Err(AblationError::SingularFold {
                fold,
                what: "embedding",
                column: c,
            });
        }
    }
    let (xm, xs) = scaler(&xt, x_cols);
    let (ym, ys) = scaler(&yt, y_cols);
    let xv: Vec<&[f64]> = test.iter().map(|&i| x[i]).collect();
    let yv: Vec<&[f64]> = test.iter().map(|&i| y[i]).collect();
    Ok(Fold {
        x_train: standardize(&xt, x_cols, &xm, &xs),
        y_train: standardize(&yt, y_cols, &ym, &ys),
        x_test: standardize(&xv, x_cols, &xm, &xs),
        y_test: standardize(&yv, y_cols, &ym, &ys),
    })
}

/// Variance-weighted R²: `1 - Σ SS_res / Σ SS_tot` over all outputs.
fn r2_score(truth: &DMatrix<f64>, pred: &DMatrix<f64>) -> f64 {
    let mut ss_res = 0.0;
    let mut ss_tot = 0.0;
    for j in 0..truth.ncols() {
        let col = truth.column(j);
        let mean = col.mean();
        for i in 0..truth.nrows() {
            ss_res += (truth[(i, j)] - pred[(i, j)]).powi(2);
            ss_tot += (truth[(i, j)] - mean).powi(2);
        }
    }
    if ss_tot > 0.0 {
        1.0 - ss_res / ss_tot
    } else if ss_res == 0.0 {
        1.0
    } else {
        f64::NEG_INFINITY
    }
}

/// Ridge regression from features `x` (n × p) to embeddings `y` (n × d).
///
/// Both sides are standardized (population sd). The penalty is picked from
/// `alpha_grid` by mean out-of-fold R² over `k_folds` seeded folds, with the
/// scaler refitted on each fold's training part; ties go to the smaller
/// alpha. The final model is refitted on all rows. Embedding dimensions that
/// are constant over the training rows are excluded and passed through
/// unchanged by [`residualize`].
pub fn fit_ridge(
    x: &[Vec<f64>],
    y: &[Vec<f64>],
    options: &RidgeOptions,
) -> Result<RidgeFit, AblationError> {
    let n = x.len();
    if y.len() != n {
        return Err(AblationError::InvalidInput(format!(
            "{n} feature rows but {} embedding rows",
            y.len()
        )));
    }
    let k = options.k_folds;
    if k < 2 || k > n {
        return Err(AblationError::InvalidInput(format!(
            "need 2 ≤ k_folds ≤ n, got k_folds = {k}, n = {n}"
        )));
    }
    if options.alpha_grid.is_empty()
        || options
            .alpha_grid
            .iter()
            .any(|a| !(a.is_finite() && *a >= 0.0))
    {
        return Err(AblationError::InvalidInput(
            "alpha grid must be nonempty, finite and nonnegative".into(),
        ));
    }
    let p = x[0].len();
    let d = y[0].len();
    if p == 0 || d == 0 {
        return Err(AblationError::InvalidInput(
            "empty feature or embedding rows".into(),
        ));
    }
    if let Some(r) = x.iter().find(|r| r.len() != p) {
        return Err(AblationError::DimensionMismatch {
            expected: p,
            found: r.len(),
        });
    }
    if let Some(r) = y.iter().find(|r| r.len() != d) {
        return Err(AblationError::DimensionMismatch {
            expected: d,
            found: r.len(),
        });
    }
    if x.iter().chain(y).flatten().any(|v| !v.is_finite()) {
        return Err(AblationError::InvalidInput("non-finite values".into()));
    }
    let xr: Vec<&[f64]> = x.iter().map(Vec::as_slice).collect();
    let yr: Vec<&[f64]> = y.iter().map(Vec::as_slice).collect();
    let x_cols: Vec<usize> = (0..p).collect();
    if let Some(c) = x_cols.iter().copied().find(|&c| is_constant(&xr, c)) {
        return Err(AblationError::ConstantFeature(c));
    }
    let (y_cols, passthrough): (Vec<usize>, Vec<usize>) =
        (0..d).partition(|&c| !is_constant(&yr, c));
    if !passthrough.is_empty() {
        log::warn!(
            "{} embedding dimensions are constant over the training rows and are passed through",
            passthrough.len()
        );
    }
    if y_cols.is_empty() {
        return Err(AblationError::InvalidInput(
            "every embedding dimension is constant".into(),
        ));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut crate::seed::rng(options.seed));
    let fold_of: Vec<usize> = {
        let mut f = vec![0; n];
        for (pos, &i) in order.iter().enumerate() {
            f[i] = pos % k;
        }
        f
    };
    let folds: Vec<Fold> = (0..k)
        .into_par_iter()
        .map(|fold| {
            let train: Vec<usize> = (0..n).filter(|&i| fold_of[i] != fold).collect();
            let test: Vec<usize> = (0..n).filter(|&i| fold_of[i] == fold).collect();
            prepare_fold(fold, &train, &test, &xr, &yr, &x_cols, &y_cols)
        })
        .collect::<Result<_, _>>()?;

    let scores: Vec<f64> = options
        .alpha_grid
        .par_iter()
        .map(|&alpha| -> Result<f64, AblationError> {
            let mut total = 0.0;
            for f in &folds {
                let w = solve(&f.x_train, &f.y_train, alpha)?;
                total += r2_score(&f.y_test, &(&f.x_test * w));
            }
            Ok(total / k as f64)
        })
        .collect::<Result<_, _>>()?;

    let mut best = 0;
    for (i, &s) in scores.iter().enumerate() {
        let (a, b) = (options.alpha_grid[i], options.alpha_grid[best]);
        if s > scores[best] || (s == scores[best] && a < b) {
            best = i;
        }
    }
    let alpha = options.alpha_grid[best];

    let (x_mean, x_sd) = scaler(&xr, &x_cols);
    let (ym_kept, ys_kept) = scaler(&yr, &y_cols);
    let xs = standardize(&xr, &x_cols, &x_mean, &x_sd);
    let ys = standardize(&yr, &y_cols, &ym_kept, &ys_kept);
    let w = solve(&xs, &ys, alpha)?;

    let mut weights = vec![vec![0.0; d]; p];
    let mut y_mean = vec![0.0; d];
    let mut y_sd = vec![1.0; d];
    for (j, &c) in y_cols.iter().enumerate() {
        y_mean[c] = ym_kept[j];
        y_sd[c] = ys_kept[j];
        for (f, row) in weights.iter_mut().enumerate() {
            row[c] = w[(f, j)];
        }
    }
    for &c in &passthrough {
        y_mean[c] = y[0][c];
    }
    Ok(RidgeFit {
        format: RIDGE_FORMAT.to_string(),
        weights,
        alpha,
        x_mean,
        x_sd,
        y_mean,
        y_sd,
        passthrough,
        cv_r2: scores[best],
        cv_scores: scores,
        alpha_grid: options.alpha_grid.clone(),
        folds: k,
        seed: options.seed,
        n_train: n,
    })
}

fn check_x(fit: &RidgeFit, x: &[Vec<f64>]) -> Result<(), AblationError> {
    match x.iter().find(|r| r.len() != fit.n_features()) {
        Some(r) => Err(AblationError::DimensionMismatch {
            expected: fit.n_features(),
            found: r.len(),
        }),
        None => Ok(()),
    }
}

fn predict_standardized(fit: &RidgeFit, row: &[f64]) -> Vec<f64> {
    let d = fit.n_outputs();
    let mut out = vec![0.0; d];
    for (f, w) in fit.weights.iter().enumerate() {
        let z = (row[f] - fit.x_mean[f]) / fit.x_sd[f];
        for (o, wj) in out.iter_mut().zip(w) {
            *o += z * wj;
        }
    }
    out
}

/// Predicted embeddings in raw units. Passthrough dimensions predict 0.
pub fn predict(fit: &RidgeFit, x: &[Vec<f64>]) -> Result<Vec<Vec<f64>>, AblationError> {
    check_x(fit, x)?;
    Ok(x.iter()
        .map(|row| {
            let mut yhat = predict_standardized(fit, row);
            for (j, v) in yhat.iter_mut().enumerate() {
                *v = *v * fit.y_sd[j] + fit.y_mean[j];
            }
            for &c in &fit.passthrough {
                yhat[c] = 0.0;
            }
            yhat
        })
        .collect())
}

/// Embeddings minus their ridge prediction.
///
/// In [`ResidualSpace::Raw`] the prediction is mapped back through the
/// training scaler and subtracted from `y` itself; in
/// [`ResidualSpace::Standardized`] both sides stay standardized.
/// Passthrough dimensions are returned unchanged in either space.
pub fn residualize(
    fit: &RidgeFit,
    x: &[Vec<f64>],
    y: &[Vec<f64>],
    space: ResidualSpace,
) -> Result<Vec<Vec<f64>>, AblationError> {
    check_x(fit, x)?;
    if x.len() != y.len() {
        return Err(AblationError::InvalidInput(format!(
            "{} feature rows but {} embedding rows",
            x.len(),
            y.len()
        )));
    }
    if let Some(r) = y.iter().find(|r| r.len() != fit.n_outputs()) {
        return Err(AblationError::DimensionMismatch {
            expected: fit.n_outputs(),
            found: r.len(),
        });
    }
    let mut out = Vec::with_capacity(y.len());
    for (xr, yr) in x.iter().zip(y) {
        let z = predict_standardized(fit, xr);
        let mut r: Vec<f64> = match space {
            ResidualSpace::Raw => yr
                .iter()
                .enumerate()
                .map(|(j, v)| v - (z[j] * fit.y_sd[j] + fit.y_mean[j]))
                .collect(),
            ResidualSpace::Standardized => yr
                .iter()
                .enumerate()
                .map(|(j, v)| (v - fit.y_mean[j]) / fit.y_sd[j] - z[j])
                .collect(),
        };
        for &c in &fit.passthrough {
            r[c] = yr[c];
        }
        out.push(r);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn linear_world(
        n: usize,
        p: usize,
        d: usize,
        noise: f64,
        seed: u64,
    ) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
        let mut rng = crate::seed::rng(seed);
        let w: Vec<Vec<f64>> = (0..p)
            .map(|_| (0..d).map(|_| rng.random_range(-2.0..2.0)).collect())
            .collect();
        let x: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..p).map(|_| rng.random_range(1.0..9.0)).collect())
            .collect();
        let y = x
            .iter()
            .map(|row| {
                (0..d)
                    .map(|j| {
                        let e: f64 = StandardNormal.sample(&mut rng);
                        0.5 + (0..p).map(|f| row[f] * w[f][j]).sum::<f64>() + noise * e
                    })
                    .collect()
            })
            .collect();
        (x, y)
    }

    #[test]
    fn default_grid() {
        let g = default_alpha_grid();
        assert_eq!(g.len(), 13);
        assert!((g[0] - 1e-3).abs() < 1e-15);
        assert!((g[12] - 1e3).abs() < 1e-9);
        assert!((g[6] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn noiseless_data_picks_smallest_alpha() {
        let (x, y) = linear_world(60, 1, 8, 0.0, 1);
        let opts = RidgeOptions {
            alpha_grid: vec![1e-6, 1.0, 100.0],
            k_folds: 5,
            seed: 3,
        };
        let fit = fit_ridge(&x, &y, &opts).unwrap();
        assert_eq!(fit.alpha, 1e-6);
        assert!(fit.cv_r2 >= 0.999, "cv_r2 = {}", fit.cv_r2);
        let resid = residualize(&fit, &x, &y, ResidualSpace::Raw).unwrap();
        let worst = resid.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(worst < 1e-6, "max residual {worst}");
    }

    #[test]
    fn independent_targets_have_no_cv_skill() {
        for seed in 0..5 {
            let mut rng = crate::seed::rng(100 + seed);
            let x: Vec<Vec<f64>> = (0..200).map(|_| vec![rng.random::<f64>()]).collect();
            let y: Vec<Vec<f64>> = (0..200)
                .map(|_| (0..10).map(|_| StandardNormal.sample(&mut rng)).collect())
                .collect();
            let fit = fit_ridge(
                &x,
                &y,
                &RidgeOptions {
                    seed,
                    ..Default::default()
                },
            )
            .unwrap();
            assert!(fit.cv_r2 <= 0.05, "seed {seed}: {}", fit.cv_r2);
        }
    }

    #[test]
    fn huge_alpha_predicts_the_mean() {
        let (x, y) = linear_world(40, 1, 4, 0.1, 2);
        let opts = RidgeOptions {
            alpha_grid: vec![1e12],
            k_folds: 4,
            seed: 0,
        };
        let fit = fit_ridge(&x, &y, &opts).unwrap();
        let resid = residualize(&fit, &x, &y, ResidualSpace::Raw).unwrap();
        for (r, yr) in resid.iter().zip(&y) {
            for j in 0..4 {
                assert!((r[j] - (yr[j] - fit.y_mean[j])).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn alpha_zero_residuals_are_orthogonal_to_features() {
        let (x, y) = linear_world(80, 3, 6, 0.7, 4);
        let opts = RidgeOptions {
            alpha_grid: vec![0.0],
            k_folds: 5,
            seed: 1,
        };
        let fit = fit_ridge(&x, &y, &opts).unwrap();
        let resid = residualize(&fit, &x, &y, ResidualSpace::Raw).unwrap();
        for f in 0..3 {
            for j in 0..6 {
                let dot: f64 = x
                    .iter()
                    .zip(&resid)
                    .map(|(xr, r)| (xr[f] - fit.x_mean[f]) / fit.x_sd[f] * r[j])
                    .sum();
                assert!(dot.abs() < 1e-8, "feature {f}, dim {j}: {dot}");
            }
        }
    }

    #[test]
    fn residual_plus_prediction_is_identity() {
        let (x, y) = linear_world(50, 2, 5, 1.0, 5);
        let fit = fit_ridge(&x, &y, &RidgeOptions::default()).unwrap();
        let (xt, yt) = linear_world(12, 2, 5, 1.0, 6);
        let r = residualize(&fit, &xt, &yt, ResidualSpace::Raw).unwrap();
        let p = predict(&fit, &xt).unwrap();
        for i in 0..12 {
            for j in 0..5 {
                assert!((r[i][j] + p[i][j] - yt[i][j]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn constant_dimensions_pass_through() {
        let (x, mut y) = linear_world(30, 1, 3, 0.2, 7);
        for row in &mut y {
            row[1] = 4.0;
        }
        let fit = fit_ridge(&x, &y, &RidgeOptions::default()).unwrap();
        assert_eq!(fit.passthrough, vec![1]);
        assert!(fit.y_sd.iter().all(|s| *s > 0.0));
        let r = residualize(&fit, &x, &y, ResidualSpace::Raw).unwrap();
        assert!(r.iter().all(|row| row[1] == 4.0));
        let s = residualize(&fit, &x, &y, ResidualSpace::Standardized).unwrap();
        assert!(s.iter().all(|row| row[1] == 4.0));
    }

    #[test]
    fn errors() {
        let (x, y) = linear_world(10, 1, 2, 0.1, 8);
        let opts = |k| RidgeOptions {
            k_folds: k,
            ..Default::default()
        };
        assert!(fit_ridge(&x, &y, &opts(11)).is_err());
        assert!(fit_ridge(&x, &y, &opts(1)).is_err());
        let flat: Vec<Vec<f64>> = x.iter().map(|_| vec![3.0]).collect();
        assert!(matches!(
            fit_ridge(&flat, &y, &opts(2)),
            Err(AblationError::ConstantFeature(0))
        ));
        // constant on every training part of some fold
        let mut mostly = vec![vec![1.0]; 10];
        mostly[0] = vec![2.0];
        assert!(matches!(
            fit_ridge(&mostly, &y, &opts(10)),
            Err(AblationError::SingularFold { .. })
        ));
        let fit = fit_ridge(&x, &y, &opts(5)).unwrap();
        assert!(matches!(
            residualize(
                &fit,
                &[vec![1.0, 2.0]],
                &[vec![0.0, 0.0]],
                ResidualSpace::Raw
            ),
            Err(AblationError::DimensionMismatch {
                expected: 1,
                found: 2
            })
        ));
    }

    #[test]
    fn json_round_trip() {
        let (x, y) = linear_world(30, 1, 3, 0.3, 9);
        let fit = fit_ridge(&x, &y, &RidgeOptions::default()).unwrap();
        let mut buf = Vec::new();
        fit.write_json(&mut buf).unwrap();
        assert_eq!(RidgeFit::read_json(buf.as_slice()).unwrap(), fit);
        let tampered = String::from_utf8(buf)
            .unwrap()
            .replace(RIDGE_FORMAT, "other/9");
        assert!(RidgeFit::read_json(tampered.as_bytes()).is_err());
    }
}
