use std::io::Write;

use serde::{Deserialize, Serialize};

use super::ridge::{fit_ridge, residualize, ResidualSpace, RidgeFit, RidgeOptions};
use super::AblationError;
use crate::ingest::{EmbeddingTable, FeatureTable};
use crate::rdm::{condense, embedding_rdm, pair_count, vectors_rdm, Rdm};
use crate::stats::{
    rsa, spearman, stars, williams_t, AlignmentResult, PValueMethod, WilliamsResult,
};

/// Everything one ablation run reads.
#[derive(Debug, Clone)]
pub struct AblationInput<'a> {
    pub embeddings: &'a EmbeddingTable,
    /// Behavioral RDM over exactly the test words.
    pub behavioral: &'a Rdm,
    pub features: &'a FeatureTable,
    /// Ridge training words; those without an embedding are skipped.
    pub train_words: &'a [String],
    pub test_words: &'a [String],
    pub ridge: RidgeOptions,
    pub residual_space: ResidualSpace,
    pub p_method: PValueMethod,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationReport {
    pub model_source: String,
    /// Removed features joined with `+`.
    pub feature_name: String,
    pub train_size: usize,
    pub base_rho: f64,
    pub ablated_rho: f64,
    /// `base_rho - ablated_rho`.
    pub delta: f64,
    /// `100 · delta / base_rho`, absent when `base_rho` is 0.
    pub pct_drop: Option<f64>,
    pub williams: WilliamsResult,
}

/// Ablation result together with its intermediates.
#[derive(Debug, Clone)]
pub struct AblationOutcome {
    pub report: AblationReport,
    pub fit: RidgeFit,
    pub base_rdm: Rdm,
    pub ablated_rdm: Rdm,
    pub base: AlignmentResult,
    pub ablated: AlignmentResult,
}

fn feature_rows(
    features: &FeatureTable,
    names: &[String],
    words: &[String],
) -> Result<Vec<Vec<f64>>, AblationError> {
    words
        .iter()
        .map(|w| {
            names
                .iter()
                .map(|f| {
                    features
                        .value(f, w)
                        .ok_or_else(|| AblationError::MissingFeature {
                            word: w.clone(),
                            feature: f.clone(),
                        })
                })
                .collect()
        })
        .collect()
}

/// Removes the linear contribution of `feature_names` from the test-word
/// embeddings and compares alignment with the behavioral RDM before and
/// after, using a Williams test over the `C(|test|, 2)` condensed pairs.
pub fn ablate(
    input: &AblationInput<'_>,
    feature_names: &[String],
) -> Result<AblationOutcome, AblationError> {
    if feature_names.is_empty() {
        return Err(AblationError::InvalidInput("no features to remove".into()));
    }
    let test: std::collections::HashSet<&str> =
        input.test_words.iter().map(String::as_str).collect();
    let overlap: Vec<String> = input
        .train_words
        .iter()
        .filter(|w| test.contains(w.as_str()))
        .cloned()
        .collect();
    if !overlap.is_empty() {
        return Err(AblationError::Overlap(overlap));
    }
    let table = input.embeddings;
    let train: Vec<String> = input
        .train_words
        .iter()
        .filter(|w| table.contains(w))
        .cloned()
        .collect();
    if train.len() < input.train_words.len() {
        log::info!(
            "{}: {} of {} training words have no embedding",
            table.source_name(),
            input.train_words.len() - train.len(),
            input.train_words.len()
        );
    }
    if let Some(w) = input.test_words.iter().find(|w| !table.contains(w)) {
        return Err(AblationError::MissingEmbedding(w.clone()));
    }

    let x_train = feature_rows(input.features, feature_names, &train)?;
    let x_test = feature_rows(input.features, feature_names, input.test_words)?;
    let y_train: Vec<Vec<f64>> = train
        .iter()
        .map(|w| table.get(w).unwrap().to_vec())
        .collect();
    let y_test: Vec<Vec<f64>> = input
        .test_words
        .iter()
        .map(|w| table.get(w).unwrap().to_vec())
        .collect();

    let fit = fit_ridge(&x_train, &y_train, &input.ridge)?;
    let residuals = residualize(&fit, &x_test, &y_test, input.residual_space)?;

    let base_rdm = embedding_rdm(table, input.test_words)?;
    let ablated_rdm = vectors_rdm(input.test_words, &residuals)?;
    let base = rsa(input.behavioral, &base_rdm, input.p_method)?;
    let ablated = rsa(input.behavioral, &ablated_rdm, input.p_method)?;

    let b = condense(&base_rdm.aligned_to(input.behavioral)?)?;
    let a = condense(&ablated_rdm.aligned_to(input.behavioral)?)?;
    let r23 = spearman(&b.values, &a.values)?;
    let n = pair_count(input.test_words.len());
    let williams = if base.rho == ablated.rho {
        // identical rankings give r23 = 1, where the statistic is 0/0
        WilliamsResult {
            t: 0.0,
            df: n.saturating_sub(3),
            p_value: 1.0,
            r12: base.rho,
            r13: ablated.rho,
            r23,
        }
    } else {
        williams_t(base.rho, ablated.rho, r23, n)?
    };
    let delta = base.rho - ablated.rho;
    let report = AblationReport {
        model_source: table.source_name().to_string(),
        feature_name: feature_names.join("+"),
        train_size: train.len(),
        base_rho: base.rho,
        ablated_rho: ablated.rho,
        delta,
        pct_drop: (base.rho != 0.0).then(|| 100.0 * delta / base.rho),
        williams,
    };
    Ok(AblationOutcome {
        report,
        fit,
        base_rdm,
        ablated_rdm,
        base,
        ablated,
    })
}

/// Single-feature ablation returning only the summary.
pub fn ablation_pipeline(
    input: &AblationInput<'_>,
    feature_name: &str,
) -> Result<AblationReport, AblationError> {
    Ok(ablate(input, &[feature_name.to_string()])?.report)
}

pub const ABLATION_COLUMNS: [&str; 12] = [
    "model",
    "feature",
    "train_size",
    "base_rho",
    "ablated_rho",
    "delta",
    "pct_drop",
    "r23",
    "williams_t",
    "df",
    "p",
    "sig",
];

pub fn write_ablation_csv<W: Write>(
    reports: &[AblationReport],
    out: W,
) -> Result<(), AblationError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(ABLATION_COLUMNS)?;
    for r in reports {
        w.write_record([
            r.model_source.clone(),
            r.feature_name.clone(),
            r.train_size.to_string(),
            r.base_rho.to_string(),
            r.ablated_rho.to_string(),
            r.delta.to_string(),
            r.pct_drop
                .map(|v| v.to_string())
                .unwrap_or_else(|| "NA".into()),
            r.williams.r23.to_string(),
            r.williams.t.to_string(),
            r.williams.df.to_string(),
            r.williams.p_value.to_string(),
            stars(r.williams.p_value).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
