use rand::Rng;
use rayon::prelude::*;

use super::DesignError;
use crate::seed;

const MAX_ITERATIONS: usize = 300;

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansResult {
    pub assignments: Vec<usize>,
    pub centroids: Vec<Vec<f64>>,
    pub inertia: f64,
    /// Inertia after every assignment step of the winning restart.
    pub history: Vec<f64>,
    /// Which restart won.
    pub restart: usize,
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn nearest(point: &[f64], centroids: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, centroid) in centroids.iter().enumerate() {
        let d = sq_dist(point, centroid);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

/// k-means++ seeding: first centre uniform, then proportional to the
/// squared distance to the nearest chosen centre.
fn seed_centroids<R: Rng>(points: &[Vec<f64>], k: usize, rng: &mut R) -> Vec<Vec<f64>> {
    let n = points.len();
    let mut chosen = vec![false; n];
    let first = rng.random_range(0..n);
    chosen[first] = true;
    let mut centroids = vec![points[first].clone()];
    let mut dist: Vec<f64> = points.iter().map(|p| sq_dist(p, &points[first])).collect();
    while centroids.len() < k {
        let total: f64 = dist.iter().sum();
        let pick = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut pick = None;
            for (i, d) in dist.iter().enumerate() {
                if *d <= 0.0 {
                    continue;
                }
                pick = Some(i);
                if target < *d {
                    break;
                }
                target -= d;
            }
            pick.unwrap_or(0)
        } else {
            // remaining points coincide with chosen centres
            let free: Vec<usize> = (0..n).filter(|&i| !chosen[i]).collect();
            free[rng.random_range(0..free.len())]
        };
        chosen[pick] = true;
        centroids.push(points[pick].clone());
        for (d, p) in dist.iter_mut().zip(points) {
            *d = d.min(sq_dist(p, &points[pick]));
        }
    }
    centroids
}

fn lloyd<R: Rng>(
    points: &[Vec<f64>],
    k: usize,
    rng: &mut R,
) -> (Vec<usize>, Vec<Vec<f64>>, Vec<f64>) {
    let dim = points[0].len();
    let mut centroids = seed_centroids(points, k, rng);
    let mut assignments = vec![usize::MAX; points.len()];
    let mut history = Vec::new();
    for _ in 0..MAX_ITERATIONS {
        let mut changed = false;
        let mut inertia = 0.0;
        for (p, slot) in points.iter().zip(assignments.iter_mut()) {
            let (c, d) = nearest(p, &centroids);
            inertia += d;
            if *slot != c {
                *slot = c;
                changed = true;
            }
        }
        history.push(inertia);
        if !changed {
            break;
        }
        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (p, &c) in points.iter().zip(&assignments) {
            counts[c] += 1;
            for (s, v) in sums[c].iter_mut().zip(p) {
                *s += v;
            }
        }
        for c in 0..k {
            if counts[c] > 0 {
                centroids[c] = sums[c].iter().map(|s| s / counts[c] as f64).collect();
            }
        }
        // An empty cluster takes over the point farthest from its centre.
        for c in 0..k {
            if counts[c] == 0 {
                let (far, _) = points
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| counts[assignments[*i]] > 1)
                    .map(|(i, p)| (i, sq_dist(p, &centroids[assignments[i]])))
                    .fold(
                        (usize::MAX, -1.0),
                        |best, cur| if cur.1 > best.1 { cur } else { best },
                    );
                if far != usize::MAX {
                    counts[assignments[far]] -= 1;
                    counts[c] = 1;
                    centroids[c] = points[far].clone();
                }
            }
        }
    }
    let final_inertia: f64 = points
        .iter()
        .zip(&assignments)
        .map(|(p, &c)| sq_dist(p, &centroids[c]))
        .sum();
    if history.last().is_none_or(|last| final_inertia < *last) {
        history.push(final_inertia);
    }
    (assignments, centroids, history)
}

/// Best-of-`restarts` k-means with k-means++ seeding. Restart `r` draws from
/// stream `r` of `seed`; ties in inertia go to the lower restart index, so
/// the parallel result equals the sequential one.
pub fn kmeans(
    points: &[Vec<f64>],
    k: usize,
    restarts: usize,
    seed: u64,
) -> Result<KMeansResult, DesignError> {
    let n = points.len();
    if k == 0 || k > n {
        return Err(DesignError::InvalidParameter(format!(
            "k = {k} must lie in 1..={n}"
        )));
    }
    if restarts == 0 {
        return Err(DesignError::InvalidParameter("restarts must be ≥ 1".into()));
    }
    if points.iter().flatten().any(|v| !v.is_finite()) {
        return Err(DesignError::NonFinite("k-means input"));
    }
    let runs: Vec<KMeansResult> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = seed::stream(seed, r as u64);
            let (assignments, centroids, history) = lloyd(points, k, &mut rng);
            let inertia = *history.last().unwrap_or(&0.0);
            KMeansResult {
                assignments,
                centroids,
                inertia,
                history,
                restart: r,
            }
        })
        .collect();
    let best = runs
        .into_iter()
        .reduce(|a, b| if b.inertia < a.inertia { b } else { a })
        .expect("at least one restart");
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn blobs() -> Vec<Vec<f64>> {
        vec![
            vec![0.0, 0.1],
            vec![0.2, -0.1],
            vec![-0.1, 0.0],
            vec![10.0, 10.2],
            vec![10.1, 9.9],
            vec![9.8, 10.0],
        ]
    }

    #[test]
    fn separates_blobs() {
        let r = kmeans(&blobs(), 2, 5, 3).unwrap();
        assert_eq!(r.assignments[0], r.assignments[1]);
        assert_eq!(r.assignments[0], r.assignments[2]);
        assert_eq!(r.assignments[3], r.assignments[5]);
        assert_ne!(r.assignments[0], r.assignments[3]);
    }

    #[test]
    fn k_equals_n_is_exact() {
        let pts = blobs();
        let r = kmeans(&pts, pts.len(), 3, 1).unwrap();
        let mut ids = r.assignments.clone();
        ids.sort_unstable();
        ids.dedup();
        assert_eq!(ids.len(), pts.len());
        assert_eq!(r.inertia, 0.0);
    }

    #[test]
    fn invalid_k() {
        assert!(kmeans(&blobs(), 0, 1, 0).is_err());
        assert!(kmeans(&blobs(), 7, 1, 0).is_err());
        assert!(kmeans(&[vec![f64::NAN]], 1, 1, 0).is_err());
    }

    #[test]
    fn deterministic_and_thread_independent() {
        use rand::Rng;
        let mut rng = seed::rng(42);
        let pts: Vec<Vec<f64>> = (0..60)
            .map(|_| (0..3).map(|_| rng.random::<f64>()).collect())
            .collect();
        let a = kmeans(&pts, 5, 8, 17).unwrap();
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let b = pool.install(|| kmeans(&pts, 5, 8, 17).unwrap());
        assert_eq!(a, b);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]
            #[test]
            fn inertia_never_increases(
                pts in prop::collection::vec(prop::collection::vec(-5.0f64..5.0, 2), 4..40),
                k in 1usize..5,
                seed in any::<u64>(),
            ) {
                let k = k.min(pts.len());
                let r = kmeans(&pts, k, 3, seed).unwrap();
                for w in r.history.windows(2) {
                    prop_assert!(w[1] <= w[0] * (1.0 + 1e-12) + 1e-12, "{:?}", r.history);
                }
                prop_assert_eq!(r.centroids.len(), k);
                prop_assert!(r.assignments.iter().all(|&c| c < k));
            }
        }
    }
}
