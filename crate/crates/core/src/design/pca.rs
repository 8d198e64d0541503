use nalgebra::{DMatrix, SymmetricEigen};

use super::DesignError;

/// Cumulative explained-variance share used to pick the default component
/// count.
pub const VARIANCE_TARGET: f64 = 0.95;

/// Principal components of a set of row observations.
#[derive(Debug, Clone)]
pub struct Pca {
    /// Projected observations, one row per input row.
    pub coords: Vec<Vec<f64>>,
    /// Eigenvalues of the retained components, descending.
    pub explained_variance: Vec<f64>,
    /// Sum of all eigenvalues.
    pub total_variance: f64,
}

/// Projects mean-centred rows onto their top principal components.
///
/// With `n_components = None` the smallest count reaching
/// [`VARIANCE_TARGET`] of the variance is used, capped at `n - 1`. Component
/// signs are fixed so that each eigenvector's largest-magnitude entry is
/// positive.
pub fn pca(rows: &[Vec<f64>], n_components: Option<usize>) -> Result<Pca, DesignError> {
    let n = rows.len();
    if n < 2 {
        return Err(DesignError::TooFewWords { needed: 2, got: n });
    }
    let d = rows[0].len();
    if rows.iter().any(|r| r.len() != d) {
        return Err(DesignError::InvalidParameter(
            "ragged observation rows".into(),
        ));
    }
    if rows.iter().flatten().any(|v| !v.is_finite()) {
        return Err(DesignError::NonFinite("PCA input"));
    }
    let mut x = DMatrix::from_fn(n, d, |i, j| rows[i][j]);
    for j in 0..d {
        let mean = x.column(j).mean();
        x.column_mut(j).add_scalar_mut(-mean);
    }
    let cov = (x.transpose() * &x) / (n as f64 - 1.0);
    let eig = SymmetricEigen::new(cov);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .total_cmp(&eig.eigenvalues[a])
            .then(a.cmp(&b))
    });
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i].max(0.0)).collect();
    let total: f64 = values.iter().sum();

    let cap = (n - 1).min(d).max(1);
    let k = match n_components {
        Some(k) if k == 0 || k > n || k > d => {
            return Err(DesignError::InvalidParameter(format!(
                "n_components = {k} outside 1..={}",
                n.min(d)
            )))
        }
        Some(k) => k,
        None => {
            let mut acc = 0.0;
            let mut k = cap;
            for (i, v) in values.iter().enumerate() {
                acc += v;
                if total <= 0.0 || acc >= VARIANCE_TARGET * total {
                    k = i + 1;
                    break;
                }
            }
            k.min(cap)
        }
    };

    let mut basis = DMatrix::zeros(d, k);
    for (c, &idx) in order.iter().take(k).enumerate() {
        let mut v = eig.eigenvectors.column(idx).into_owned();
        let pivot = v.iter().copied().fold(
            0.0f64,
            |best, x| if x.abs() > best.abs() { x } else { best },
        );
        if pivot < 0.0 {
            v.neg_mut();
        }
        basis.set_column(c, &v);
    }
    let projected = x * basis;
    let coords = (0..n)
        .map(|i| projected.row(i).iter().copied().collect())
        .collect();
    Ok(Pca {
        coords,
        explained_variance: values[..k].to_vec(),
        total_variance: total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn points_on_a_line_need_one_component() {
        let rows: Vec<Vec<f64>> = (0..6)
            .map(|i| {
                let t = i as f64;
                vec![2.0 * t + 1.0, -t, 0.5 * t]
            })
            .collect();
        let p = pca(&rows, None).unwrap();
        assert_eq!(p.coords[0].len(), 1);
        assert!((p.explained_variance[0] - p.total_variance).abs() < 1e-9);
        // projections preserve pairwise distances along the line.
        let d01 = (p.coords[1][0] - p.coords[0][0]).abs();
        assert!((d01 - (4.0f64 + 1.0 + 0.25).sqrt()).abs() < 1e-9);
    }

    #[test]
    fn explicit_components_and_errors() {
        let rows = vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]];
        assert_eq!(pca(&rows, Some(2)).unwrap().coords[0].len(), 2);
        assert!(pca(&rows, Some(0)).is_err());
        assert!(pca(&rows, Some(3)).is_err());
        assert!(pca(&[vec![1.0]], None).is_err());
        assert!(pca(&[vec![1.0], vec![f64::NAN]], None).is_err());
    }
}
