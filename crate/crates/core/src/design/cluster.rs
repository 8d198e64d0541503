use super::{kmeans, pca, AffinityMatrix, DesignError};
use crate::ingest::FeatureColumn;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClusterOptions {
    pub k: usize,
    /// `None` keeps the smallest count explaining 95% of the variance.
    pub n_components: Option<usize>,
    pub restarts: usize,
    pub seed: u64,
}

impl ClusterOptions {
    pub fn new(k: usize, seed: u64) -> Self {
        ClusterOptions {
            k,
            n_components: None,
            restarts: 10,
            seed,
        }
    }
}

/// Clustering of the affinity rows in PCA space.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterModel {
    pub labels: Vec<String>,
    /// Cluster id per label, in label order.
    pub assignments: Vec<usize>,
    pub centroids: Vec<Vec<f64>>,
    /// PCA coordinates per label, in label order.
    pub reduced_coords: Vec<Vec<f64>>,
    pub k: usize,
    pub seed: u64,
    pub inertia: f64,
    pub inertia_history: Vec<f64>,
}

impl ClusterModel {
    pub fn members(&self, cluster: usize) -> Vec<String> {
        self.labels
            .iter()
            .zip(&self.assignments)
            .filter(|(_, &c)| c == cluster)
            .map(|(w, _)| w.clone())
            .collect()
    }

    pub fn assignment(&self, word: &str) -> Option<usize> {
        self.labels
            .iter()
            .position(|w| w == word)
            .map(|i| self.assignments[i])
    }

    /// Euclidean distance of a word to its cluster centroid.
    pub fn centroid_distance(&self, word: &str) -> Option<f64> {
        let i = self.labels.iter().position(|w| w == word)?;
        let c = &self.centroids[self.assignments[i]];
        Some(
            self.reduced_coords[i]
                .iter()
                .zip(c)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt(),
        )
    }
}

/// PCA over the mean-centred affinity rows followed by k-means++.
pub fn cluster(
    affinity: &AffinityMatrix,
    options: ClusterOptions,
) -> Result<ClusterModel, DesignError> {
    let n = affinity.len();
    if options.k == 0 || options.k > n {
        return Err(DesignError::InvalidParameter(format!(
            "k = {} must lie in 1..={n}",
            options.k
        )));
    }
    if affinity.values.iter().any(|v| !v.is_finite()) {
        return Err(DesignError::NonFinite("affinity matrix"));
    }
    let rows: Vec<Vec<f64>> = (0..n).map(|i| affinity.row(i).to_vec()).collect();
    let projected = pca(&rows, options.n_components)?;
    let result = kmeans(&projected.coords, options.k, options.restarts, options.seed)?;
    Ok(ClusterModel {
        labels: affinity.labels.clone(),
        assignments: result.assignments,
        centroids: result.centroids,
        reduced_coords: projected.coords,
        k: options.k,
        seed: options.seed,
        inertia: result.inertia,
        inertia_history: result.history,
    })
}

pub(crate) fn mean_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Cluster whose members have the largest sample variance of
/// `concreteness`; ties go to the lowest id.
pub fn pick_target_cluster(
    model: &ClusterModel,
    concreteness: &FeatureColumn,
) -> Result<usize, DesignError> {
    let mut best: Option<(usize, f64)> = None;
    for c in 0..model.k {
        let values: Vec<f64> = model
            .members(c)
            .iter()
            .map(|w| {
                concreteness
                    .get(w)
                    .copied()
                    .ok_or_else(|| DesignError::MissingFeature {
                        word: w.clone(),
                        feature: "concreteness".into(),
                    })
            })
            .collect::<Result<_, _>>()?;
        if values.len() < 2 {
            continue;
        }
        let (_, sd) = mean_sd(&values);
        let var = sd * sd;
        if best.is_none_or(|(_, v)| var > v) {
            best = Some((c, var));
        }
    }
    best.map(|(c, _)| c).ok_or(DesignError::AllSingletons)
}
