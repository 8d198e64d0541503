use rand::seq::SliceRandom;
use rayon::prelude::*;

use super::correlation::{correlation_p, pearson_unchecked};
use super::{average_ranks, AlignmentResult, Method, PValueMethod, StatsError};
use crate::rdm::{condense, Rdm};
use crate::seed;

const MIN_CONDITIONS: usize = 4;

/// Representational similarity: Spearman correlation of the condensed
/// vectors, with `model` reconciled to `target`'s label order.
pub fn rsa(target: &Rdm, model: &Rdm, method: PValueMethod) -> Result<AlignmentResult, StatsError> {
    let model = model.aligned_to(target)?;
    if target.len() < MIN_CONDITIONS {
        return Err(StatsError::TooFewObservations {
            needed: MIN_CONDITIONS,
            got: target.len(),
        });
    }
    let t = condense(target)?;
    let m = condense(&model)?;
    let rho = pearson_unchecked(&average_ranks(&t.values), &average_ranks(&m.values))?;
    let n_pairs = t.len();
    let (p_value, method, seed) = match method {
        PValueMethod::Analytic => (
            correlation_p(rho, n_pairs as f64 - 2.0),
            Method::Analytic,
            None,
        ),
        PValueMethod::Permutation { n_perm, seed } => (
            permutation_p(target, &model, n_perm, seed)?,
            Method::Permutation,
            Some(seed),
        ),
    };
    Ok(AlignmentResult {
        rho,
        p_value,
        n_pairs,
        method,
        seed,
    })
}

/// Permutation p-value of the RSA correlation.
///
/// Each permutation relabels the model conditions (rows and columns
/// jointly) from its own seeded stream; the result is
/// `(1 + #{|rho_perm| ≥ |rho_obs|}) / (n_perm + 1)` and does not depend on
/// the number of threads.
pub fn permutation_p(
    target: &Rdm,
    model: &Rdm,
    n_perm: usize,
    seed: u64,
) -> Result<f64, StatsError> {
    if n_perm < 1 {
        return Err(StatsError::NoPermutations);
    }
    let model = model.aligned_to(target)?;
    let target_ranks = average_ranks(&condense(target)?.values);
    let observed = pearson_unchecked(&target_ranks, &average_ranks(&condense(&model)?.values))?;
    let n = target.len();
    let threshold = observed.abs() - 1e-12;
    let hits: usize = (0..n_perm)
        .into_par_iter()
        .map(|i| -> Result<usize, StatsError> {
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(&mut seed::stream(seed, i as u64));
            let shuffled = model.permute_conditions(&perm);
            let values = condense(&shuffled)?.values;
            let rho = pearson_unchecked(&target_ranks, &average_ranks(&values))?;
            Ok(usize::from(rho.abs() >= threshold))
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok((1 + hits) as f64 / (n_perm + 1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::FeatureColumn;
    use crate::rdm::{feature_rdm, RdmKind};
    use crate::stats::spearman;
    use rand::Rng;

    fn labels(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("w{i}")).collect()
    }

    fn random_rdm(n: usize, seed: u64) -> Rdm {
        let mut rng = crate::seed::rng(seed);
        let ls = labels(n);
        let pts: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let col: FeatureColumn = ls.iter().cloned().zip(pts).collect();
        feature_rdm(&col, &ls).unwrap()
    }

    #[test]
    fn self_alignment_is_perfect() {
        let r = random_rdm(8, 1);
        let res = rsa(&r, &r, PValueMethod::Analytic).unwrap();
        assert_eq!(res.rho, 1.0);
        assert_eq!(res.p_value, 0.0);
        assert_eq!(res.n_pairs, 28);
    }

    #[test]
    fn labels_are_reconciled() {
        let r = random_rdm(7, 2);
        let mut order = r.labels().to_vec();
        order.reverse();
        order.swap(0, 3);
        let shuffled = r.subset(&order).unwrap();
        assert_eq!(rsa(&r, &shuffled, PValueMethod::Analytic).unwrap().rho, 1.0);
        let smaller = r.subset(&order[..5]).unwrap();
        assert!(rsa(&r, &smaller, PValueMethod::Analytic).is_err());
    }

    #[test]
    fn five_condition_fixture() {
        let target_vals = [0.1, 0.4, 0.35, 0.9, 0.2, 0.6, 0.75, 0.5, 0.3, 0.8];
        let model_vals = [0.2, 0.5, 0.1, 0.7, 0.3, 0.4, 0.9, 0.6, 0.2, 1.0];
        let target = crate::rdm::CondensedVector {
            labels: labels(5),
            pair_labels: vec![],
            values: target_vals.to_vec(),
            kind: RdmKind::Behavioral,
        }
        .expand()
        .unwrap();
        let model = crate::rdm::CondensedVector {
            labels: labels(5),
            pair_labels: vec![],
            values: model_vals.to_vec(),
            kind: RdmKind::Cosine,
        }
        .expand()
        .unwrap();
        let res = rsa(&target, &model, PValueMethod::Analytic).unwrap();
        assert!((res.rho - spearman(&target_vals, &model_vals).unwrap()).abs() < 1e-15);
        let back = rsa(&model, &target, PValueMethod::Analytic).unwrap();
        assert_eq!(res.rho, back.rho);
        // t = rho·sqrt(8 / (1 - rho²)), df = 8
        let t = res.rho * (8.0 / (1.0 - res.rho * res.rho)).sqrt();
        let p = super::super::student_t_two_tailed(t, 8.0);
        assert!((res.p_value - p).abs() < 1e-15);
    }

    #[test]
    fn too_few_conditions_or_constant() {
        let r = random_rdm(3, 4);
        assert!(rsa(&r, &r, PValueMethod::Analytic).is_err());
        let ls = labels(5);
        let flat: FeatureColumn = ls.iter().map(|l| (l.clone(), 1.0)).collect();
        let flat = feature_rdm(&flat, &ls).unwrap();
        assert!(matches!(
            rsa(&random_rdm(5, 3), &flat, PValueMethod::Analytic),
            Err(StatsError::Constant(_))
        ));
    }

    #[test]
    fn identical_rdms_have_minimal_permutation_p() {
        let r = random_rdm(10, 5);
        let p = permutation_p(&r, &r, 999, 11).unwrap();
        assert!(p <= 5.0 / 1000.0, "p = {p}");
        let res = rsa(
            &r,
            &r,
            PValueMethod::Permutation {
                n_perm: 999,
                seed: 11,
            },
        )
        .unwrap();
        assert_eq!(res.p_value, p);
        assert_eq!(res.seed, Some(11));
        assert_eq!(res.method, Method::Permutation);
    }

    #[test]
    fn independent_rdms_are_rarely_significant() {
        let mut significant = 0;
        for s in 0..100 {
            let p = permutation_p(&random_rdm(10, 1000 + s), &random_rdm(10, 5000 + s), 199, s)
                .unwrap();
            assert!((0.0..=1.0).contains(&p));
            if p <= 0.01 {
                significant += 1;
            }
        }
        assert!(significant <= 5, "{significant} of 100 repeats had p ≤ .01");
    }

    #[test]
    fn permutation_p_is_seeded() {
        let (a, b) = (random_rdm(9, 7), random_rdm(9, 8));
        let first = permutation_p(&a, &b, 300, 5).unwrap();
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let single = pool.install(|| permutation_p(&a, &b, 300, 5).unwrap());
        assert_eq!(first, single);
        assert!(matches!(
            permutation_p(&a, &b, 0, 5),
            Err(StatsError::NoPermutations)
        ));
    }
}
