//! Report bundles: the model × feature alignment table, partial
//! correlations, feature ablation, bar charts, and every intermediate the
//! numbers were computed from.
//!
//! A bundle directory contains
//!
//! | file | content |
//! |---|---|
//! | `alignment_table.csv` | one row per model, rho with stars per column |
//! | `alignment_long.csv` | the same cells with p-values and pair counts |
//! | `partial_correlations.csv` | each target vs each feature, other three controlled |
//! | `ablation.csv` | base and ablated rho per model and feature, Williams test |
//! | `partial_correlations.svg`, `ablation.svg` | bar charts of the two tables |
//! | `intermediates/` | every RDM as a labeled matrix and every ridge fit as JSON |
//! | `manifest.toml` | seeds, sizes and parameters of the run |

mod config;
mod svg;

pub use config::{
    validate_config, AblationConfig, ColumnNames, ConfigError, EmbeddingSource, InputPaths,
    PMethodName, PipelineConfig, StatsConfig,
};
pub use svg::BarChart;

use std::collections::HashSet;
use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::ablation::{
    ablate, write_ablation_csv, AblationError, AblationInput, AblationOutcome, AblationReport,
    RidgeOptions,
};
use crate::ingest::{
    load_feature_table, load_judgments, load_lexicon, load_ratings, mean_ratings, old20_batch,
    parse_embedding_file, EmbeddingTable, FeatureBounds, FeatureColumn, FeatureTable, IngestError,
    RatingRecord, TripletJudgment,
};
use crate::rdm::{behavioral_rdm, embedding_rdm, feature_rdm, write_rdm_csv, Rdm, RdmError};
use crate::seed;
use crate::stats::{partial_spearman, rsa, stars, AlignmentResult, PValueMethod, StatsError};
use crate::text::{normalize, word_order};

/// Keys and display names of the alignment-table columns.
pub const ALIGNMENT_COLUMNS: [(&str, &str); 6] = [
    ("behavioral", "Behavioral"),
    ("rated_concreteness", "Conc. (rated)"),
    ("automatic_concreteness", "Conc. (auto)"),
    ("frequency", "Frequency"),
    ("length", "Length"),
    ("old20", "OLD20"),
];

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("invalid configuration:\n{}", .0.iter().map(|e| format!("  {e}")).collect::<Vec<_>>().join("\n"))]
    Config(Vec<ConfigError>),
    #[error("{}: {source}", .path.display())]
    Read {
        path: PathBuf,
        source: Box<IngestError>,
    },
    #[error("{}: {source}", .path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{what}: {source}")]
    Rdm { what: String, source: Box<RdmError> },
    #[error("{target} vs {column}: {source}")]
    Stats {
        target: String,
        column: String,
        source: Box<StatsError>,
    },
    #[error("ablating {feature} from {model}: {source}")]
    Ablation {
        model: String,
        feature: String,
        source: Box<AblationError>,
    },
    #[error("{0}")]
    Data(String),
}

/// One alignment-table cell; `result` is `None` when the column has no data
/// (no ratings file).
#[derive(Debug, Clone, PartialEq)]
pub struct AlignmentCell {
    pub model: String,
    pub column: String,
    pub result: Option<AlignmentResult>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartialRow {
    pub target: String,
    pub feature: String,
    pub controls: Vec<String>,
    pub result: AlignmentResult,
}

#[derive(Debug, Clone)]
pub struct ReportBundle {
    pub output_dir: PathBuf,
    pub alignment: Vec<AlignmentCell>,
    pub partials: Vec<PartialRow>,
    pub ablations: Vec<AblationReport>,
    /// Files written, relative to `output_dir`.
    pub files: Vec<PathBuf>,
}

/// Everything a report reads, loaded and reconciled.
#[derive(Debug, Clone)]
pub struct ReportInputs {
    pub features: FeatureTable,
    pub judgments: Vec<TripletJudgment>,
    pub ratings: Option<Vec<RatingRecord>>,
    pub models: Vec<EmbeddingTable>,
    pub train_words: Vec<String>,
    pub test_words: Vec<String>,
}

fn read_err(path: &Path) -> impl FnOnce(IngestError) -> ReportError + '_ {
    move |source| ReportError::Read {
        path: path.to_path_buf(),
        source: Box::new(source),
    }
}

fn open(path: &Path) -> Result<fs::File, ReportError> {
    fs::File::open(path).map_err(|source| ReportError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// One word per line; blank lines and `#` comments are skipped.
pub fn load_word_list(path: &Path) -> Result<Vec<String>, ReportError> {
    let text = fs::read_to_string(path).map_err(|source| ReportError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for line in text.lines() {
        let w = normalize(line);
        if w.is_empty() || w.starts_with('#') {
            continue;
        }
        if seen.insert(w.clone()) {
            out.push(w);
        }
    }
    Ok(out)
}

pub fn load_embeddings(
    path: &Path,
    name: &str,
    merge_duplicates: bool,
) -> Result<EmbeddingTable, ReportError> {
    parse_embedding_file(BufReader::new(open(path)?), name, merge_duplicates)
        .map_err(read_err(path))
}

/// Distinct words of a judgment log in canonical order.
pub fn judgment_words(judgments: &[TripletJudgment]) -> Vec<String> {
    let mut words: Vec<String> = judgments
        .iter()
        .flat_map(|j| j.triplet.iter().cloned())
        .collect::<HashSet<_>>()
        .into_iter()
        .collect();
    words.sort_by(|a, b| word_order(a, b));
    words
}

/// Loads all inputs named by `config`. Frequency and OLD20 columns missing
/// from the feature table are derived from the lexicon when one is given.
pub fn load_inputs(config: &PipelineConfig, base: &Path) -> Result<ReportInputs, ReportError> {
    let resolve = |p: &Path| PipelineConfig::resolve(base, p);
    let inputs = &config.inputs;
    let cols = &config.columns;

    let path = resolve(&inputs.features);
    let mut features =
        load_feature_table(open(&path)?, &FeatureBounds::new()).map_err(read_err(&path))?;
    if let Some(lex) = &inputs.lexicon {
        let path = resolve(lex);
        let lexicon = load_lexicon(open(&path)?).map_err(read_err(&path))?;
        let words = features.words().to_vec();
        if features.column(&cols.frequency).is_none() {
            let col: FeatureColumn = words
                .iter()
                .map(|w| (w.clone(), lexicon.log_frequency(w, 1.0).unwrap_or(0.0)))
                .collect();
            features
                .insert_column(&cols.frequency, col, None)
                .map_err(read_err(&path))?;
        }
        if features.column(&cols.old20).is_none() {
            let col: FeatureColumn = words
                .iter()
                .cloned()
                .zip(old20_batch(&words, &lexicon))
                .map(|(w, r)| r.map(|v| (w, v)))
                .collect::<Result<_, _>>()
                .map_err(read_err(&path))?;
            features
                .insert_column(&cols.old20, col, None)
                .map_err(read_err(&path))?;
        }
    }

    let path = resolve(&inputs.judgments);
    let judgments = load_judgments(open(&path)?).map_err(read_err(&path))?;
    if judgments.is_empty() {
        return Err(ReportError::Data(format!(
            "{}: no judgments",
            path.display()
        )));
    }
    let ratings = match &inputs.ratings {
        Some(p) => {
            let path = resolve(p);
            Some(load_ratings(open(&path)?).map_err(read_err(&path))?)
        }
        None => None,
    };
    let models = config
        .embeddings
        .par_iter()
        .map(|e| load_embeddings(&resolve(&e.path), &e.name, e.merge_duplicates))
        .collect::<Result<Vec<_>, _>>()?;

    let test_words = match &inputs.test_words {
        Some(p) => load_word_list(&resolve(p))?,
        None => judgment_words(&judgments),
    };
    let test_set: HashSet<&str> = test_words.iter().map(String::as_str).collect();
    let train_words = match &inputs.train_words {
        Some(p) => load_word_list(&resolve(p))?,
        None => features
            .words()
            .iter()
            .filter(|w| !test_set.contains(w.as_str()))
            .cloned()
            .collect(),
    };

    let mut needed: Vec<String> = cols.all().iter().map(|s| s.to_string()).collect();
    for f in config.ablation_features() {
        if !needed.contains(&f) {
            needed.push(f);
        }
    }
    let missing: Vec<&String> = needed
        .iter()
        .filter(|c| features.column(c).is_none())
        .collect();
    if !missing.is_empty() {
        return Err(ReportError::Data(format!(
            "feature table lacks columns {missing:?}"
        )));
    }
    let unknown: Vec<&String> = test_words
        .iter()
        .filter(|w| !features.words().contains(w))
        .collect();
    if !unknown.is_empty() {
        return Err(ReportError::Data(format!(
            "{} test words have no feature row, e.g. {:?}",
            unknown.len(),
            unknown[0]
        )));
    }
    Ok(ReportInputs {
        features,
        judgments,
        ratings,
        models,
        train_words,
        test_words,
    })
}

fn p_method(config: &PipelineConfig, seed: u64) -> PValueMethod {
    match config.stats.p_method {
        PMethodName::Analytic => PValueMethod::Analytic,
        PMethodName::Permutation => PValueMethod::Permutation {
            n_perm: config.stats.n_perm.max(0) as usize,
            seed,
        },
    }
}

fn file_stem(name: &str) -> String {
    name.chars()
        .map(|c| {
            if c.is_alphanumeric() || c == '-' || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

fn cell_text(r: &Option<AlignmentResult>) -> String {
    match r {
        Some(r) => format!("{:.3}{}", r.rho, stars(r.p_value)),
        None => "NA".into(),
    }
}

#[derive(Serialize)]
struct Manifest {
    run: RunInfo,
    models: Vec<ModelInfo>,
    ablations: Vec<AblationInfo>,
    files: Vec<String>,
}

#[derive(Serialize)]
struct RunInfo {
    version: &'static str,
    seed: u64,
    p_method: PMethodName,
    n_perm: i64,
    test_words: usize,
    train_words: usize,
    judgments: usize,
    ratings: usize,
    alpha_grid: Vec<f64>,
    folds: i64,
    residual_space: crate::ablation::ResidualSpace,
}

#[derive(Serialize)]
struct ModelInfo {
    name: String,
    dim: usize,
    vocabulary: usize,
    test_words: usize,
    missing_test_words: Vec<String>,
    cell_seeds: Vec<u64>,
}

#[derive(Serialize)]
struct AblationInfo {
    model: String,
    feature: String,
    ridge_seed: u64,
    alpha: f64,
    cv_r2: f64,
    train_size: usize,
    passthrough_dims: usize,
}

struct Writer {
    dir: PathBuf,
    files: Vec<PathBuf>,
}

impl Writer {
    fn put(&mut self, rel: &str, bytes: &[u8]) -> Result<(), ReportError> {
        let path = self.dir.join(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|source| ReportError::Io {
                path: parent.to_path_buf(),
                source,
            })?;
        }
        fs::write(&path, bytes).map_err(|source| ReportError::Io { path, source })?;
        self.files.push(PathBuf::from(rel));
        Ok(())
    }

    fn rdm(&mut self, rel: &str, rdm: &Rdm) -> Result<(), ReportError> {
        let mut buf = Vec::new();
        write_rdm_csv(rdm, &mut buf).map_err(|source| ReportError::Rdm {
            what: rel.to_string(),
            source: Box::new(source),
        })?;
        self.put(rel, &buf)
    }
}

fn csv_bytes(header: &[&str], rows: &[Vec<String>]) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

fn rdm_err(what: impl Into<String>) -> impl FnOnce(RdmError) -> ReportError {
    let what = what.into();
    move |source| ReportError::Rdm {
        what,
        source: Box::new(source),
    }
}

fn ridge_seed(config: &PipelineConfig, m: usize, f: usize) -> u64 {
    seed::derive(config.seed, (2 << 20) + (m as u64) * 64 + f as u64)
}

fn ablations(
    config: &PipelineConfig,
    inputs: &ReportInputs,
    behavioral: &Rdm,
    model_words: &[Vec<String>],
) -> Result<Vec<AblationOutcome>, ReportError> {
    let feat = &inputs.features;
    let ablation_features = config.ablation_features();
    let tasks: Vec<(usize, usize)> = (0..inputs.models.len())
        .flat_map(|m| (0..ablation_features.len()).map(move |f| (m, f)))
        .collect();
    let behavioral_per_model: Vec<Rdm> = model_words
        .iter()
        .map(|w| behavioral.subset(w).map_err(rdm_err("behavioral RDM")))
        .collect::<Result<_, _>>()?;
    tasks
        .par_iter()
        .map(|&(m, f)| {
            let input = AblationInput {
                embeddings: &inputs.models[m],
                behavioral: &behavioral_per_model[m],
                features: feat,
                train_words: &inputs.train_words,
                test_words: &model_words[m],
                ridge: RidgeOptions {
                    alpha_grid: config.ablation.alpha_grid.clone(),
                    k_folds: config.ablation.folds.max(0) as usize,
                    seed: ridge_seed(config, m, f),
                },
                residual_space: config.ablation.residual_space,
                p_method: p_method(config, ridge_seed(config, m, f)),
            };
            ablate(&input, &[ablation_features[f].clone()]).map_err(|source| {
                ReportError::Ablation {
                    model: inputs.models[m].source_name().to_string(),
                    feature: ablation_features[f].clone(),
                    source: Box::new(source),
                }
            })
        })
        .collect()
}

/// Only the ablation part of a report: every configured feature removed
/// from every model, with the same seeds a full report uses.
pub fn run_ablations(
    config: &PipelineConfig,
    inputs: &ReportInputs,
) -> Result<Vec<AblationOutcome>, ReportError> {
    let behavioral =
        behavioral_rdm(&inputs.judgments, &inputs.test_words).map_err(rdm_err("behavioral RDM"))?;
    let model_words: Vec<Vec<String>> = inputs
        .models
        .iter()
        .map(|m| {
            inputs
                .test_words
                .iter()
                .filter(|w| m.contains(w))
                .cloned()
                .collect()
        })
        .collect();
    ablations(config, inputs, &behavioral, &model_words)
}

/// Validates `config`, loads its inputs (relative to `base`), computes all
/// tables and writes the bundle into the configured output directory.
pub fn run_alignment_report(
    config: &PipelineConfig,
    base: &Path,
) -> Result<ReportBundle, ReportError> {
    validate_config(config, base).map_err(ReportError::Config)?;
    let inputs = load_inputs(config, base)?;
    let output_dir = PipelineConfig::resolve(base, &config.output_dir);
    let bundle = build_report(config, &inputs, &output_dir)?;
    Ok(bundle)
}

/// [`run_alignment_report`] on already loaded inputs.
pub fn build_report(
    config: &PipelineConfig,
    inputs: &ReportInputs,
    output_dir: &Path,
) -> Result<ReportBundle, ReportError> {
    let cols = &config.columns;
    let test = &inputs.test_words;
    let feat = &inputs.features;

    let behavioral = behavioral_rdm(&inputs.judgments, test).map_err(rdm_err("behavioral RDM"))?;
    let rated = match &inputs.ratings {
        Some(r) => {
            let means = mean_ratings(r);
            if let Some(w) = test.iter().find(|w| !means.contains_key(*w)) {
                return Err(ReportError::Data(format!("test word {w:?} has no rating")));
            }
            Some(feature_rdm(&means, test).map_err(rdm_err("rated concreteness RDM"))?)
        }
        None => None,
    };
    let column_rdm = |name: &str| -> Result<Rdm, ReportError> {
        feature_rdm(feat.column(name).expect("checked on load"), test)
            .map_err(rdm_err(format!("{name} RDM")))
    };
    let auto = column_rdm(&cols.concreteness)?;
    let freq = column_rdm(&cols.frequency)?;
    let length = column_rdm(&cols.length)?;
    let old20 = column_rdm(&cols.old20)?;
    let feature_rdms: [(&str, Option<&Rdm>); 6] = [
        ("behavioral", Some(&behavioral)),
        ("rated_concreteness", rated.as_ref()),
        ("automatic_concreteness", Some(&auto)),
        ("frequency", Some(&freq)),
        ("length", Some(&length)),
        ("old20", Some(&old20)),
    ];

    // per-model word coverage and RDMs
    let mut model_words = Vec::with_capacity(inputs.models.len());
    let mut model_rdms = Vec::with_capacity(inputs.models.len());
    for m in &inputs.models {
        let words: Vec<String> = test.iter().filter(|w| m.contains(w)).cloned().collect();
        if words.len() < test.len() {
            log::warn!(
                "{}: {} of {} test words have no vector",
                m.source_name(),
                test.len() - words.len(),
                test.len()
            );
        }
        if words.len() < 4 {
            return Err(ReportError::Data(format!(
                "{}: only {} test words have vectors",
                m.source_name(),
                words.len()
            )));
        }
        model_rdms
            .push(embedding_rdm(m, &words).map_err(rdm_err(format!("{} RDM", m.source_name())))?);
        model_words.push(words);
    }

    // alignment table
    let cell_seed =
        |m: usize, c: usize| seed::derive(config.seed, (1 << 20) + (m as u64) * 16 + c as u64);
    let tasks: Vec<(usize, usize)> = (0..inputs.models.len())
        .flat_map(|m| (0..ALIGNMENT_COLUMNS.len()).map(move |c| (m, c)))
        .collect();
    let alignment: Vec<AlignmentCell> = tasks
        .par_iter()
        .map(|&(m, c)| {
            let model = inputs.models[m].source_name().to_string();
            let column = ALIGNMENT_COLUMNS[c].0.to_string();
            let result = match feature_rdms[c].1 {
                None => None,
                Some(target) => {
                    let target = target.subset(&model_words[m]).map_err(rdm_err(&column))?;
                    let r = rsa(&target, &model_rdms[m], p_method(config, cell_seed(m, c)))
                        .map_err(|source| ReportError::Stats {
                            target: model.clone(),
                            column: column.clone(),
                            source: Box::new(source),
                        })?;
                    Some(r)
                }
            };
            Ok(AlignmentCell {
                model,
                column,
                result,
            })
        })
        .collect::<Result<_, ReportError>>()?;

    // partial correlations: each target vs each feature, the other three controlled
    let conc_key = if rated.is_some() {
        "rated_concreteness"
    } else {
        "automatic_concreteness"
    };
    let partial_features: [(&str, &Rdm); 4] = [
        (conc_key, rated.as_ref().unwrap_or(&auto)),
        ("frequency", &freq),
        ("length", &length),
        ("old20", &old20),
    ];
    let mut targets: Vec<(String, &Rdm)> = vec![("behavioral".into(), &behavioral)];
    for (m, r) in inputs.models.iter().zip(&model_rdms) {
        targets.push((m.source_name().to_string(), r));
    }
    let tasks: Vec<(usize, usize)> = (0..targets.len())
        .flat_map(|t| (0..4).map(move |f| (t, f)))
        .collect();
    let partials: Vec<PartialRow> = tasks
        .par_iter()
        .map(|&(t, f)| {
            let (target_name, target) = &targets[t];
            let labels = target.labels();
            let sub = |r: &Rdm| r.subset(labels).map_err(rdm_err(target_name.clone()));
            let x = sub(partial_features[f].1)?;
            let controls: Vec<Rdm> = (0..4)
                .filter(|&k| k != f)
                .map(|k| sub(partial_features[k].1))
                .collect::<Result<_, _>>()?;
            let refs: Vec<&Rdm> = controls.iter().collect();
            let result =
                partial_spearman(target, &x, &refs).map_err(|source| ReportError::Stats {
                    target: target_name.clone(),
                    column: partial_features[f].0.to_string(),
                    source: Box::new(source),
                })?;
            Ok(PartialRow {
                target: target_name.clone(),
                feature: partial_features[f].0.to_string(),
                controls: (0..4)
                    .filter(|&k| k != f)
                    .map(|k| partial_features[k].0.to_string())
                    .collect(),
                result,
            })
        })
        .collect::<Result<_, ReportError>>()?;

    let outcomes = ablations(config, inputs, &behavioral, &model_words)?;
    let ablation_features = config.ablation_features();
    let tasks: Vec<(usize, usize)> = (0..inputs.models.len())
        .flat_map(|m| (0..ablation_features.len()).map(move |f| (m, f)))
        .collect();

    // outputs
    let mut out = Writer {
        dir: output_dir.to_path_buf(),
        files: Vec::new(),
    };
    let mut header: Vec<&str> = vec!["model"];
    header.extend(ALIGNMENT_COLUMNS.iter().map(|c| c.0));
    let wide: Vec<Vec<String>> = inputs
        .models
        .iter()
        .enumerate()
        .map(|(m, model)| {
            let mut row = vec![model.source_name().to_string()];
            row.extend(
                (0..ALIGNMENT_COLUMNS.len())
                    .map(|c| cell_text(&alignment[m * ALIGNMENT_COLUMNS.len() + c].result)),
            );
            row
        })
        .collect();
    out.put("alignment_table.csv", &csv_bytes(&header, &wide))?;
    let long: Vec<Vec<String>> = alignment
        .iter()
        .map(|cell| match &cell.result {
            Some(r) => vec![
                cell.model.clone(),
                cell.column.clone(),
                r.rho.to_string(),
                r.p_value.to_string(),
                r.n_pairs.to_string(),
                r.method.to_string(),
                r.seed.map(|s| s.to_string()).unwrap_or_default(),
                stars(r.p_value).to_string(),
            ],
            None => vec![
                cell.model.clone(),
                cell.column.clone(),
                "NA".into(),
                "NA".into(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
            ],
        })
        .collect();
    out.put(
        "alignment_long.csv",
        &csv_bytes(
            &[
                "model", "column", "rho", "p", "n_pairs", "method", "seed", "sig",
            ],
            &long,
        ),
    )?;
    let prows: Vec<Vec<String>> = partials
        .iter()
        .map(|p| {
            vec![
                p.target.clone(),
                p.feature.clone(),
                p.controls.join(";"),
                p.result.rho.to_string(),
                p.result.p_value.to_string(),
                p.result.n_pairs.to_string(),
                stars(p.result.p_value).to_string(),
            ]
        })
        .collect();
    out.put(
        "partial_correlations.csv",
        &csv_bytes(
            &[
                "target", "feature", "controls", "rho", "p", "n_pairs", "sig",
            ],
            &prows,
        ),
    )?;
    let reports: Vec<AblationReport> = outcomes.iter().map(|o| o.report.clone()).collect();
    let mut buf = Vec::new();
    write_ablation_csv(&reports, &mut buf).map_err(|source| ReportError::Ablation {
        model: String::new(),
        feature: String::new(),
        source: Box::new(source),
    })?;
    out.put("ablation.csv", &buf)?;

    let display = |key: &str| -> String {
        ALIGNMENT_COLUMNS
            .iter()
            .find(|c| c.0 == key)
            .map(|c| c.1.to_string())
            .unwrap_or_else(|| key.to_string())
    };
    let n_targets = targets.len();
    let partial_chart = BarChart {
        title: "Partial correlations (other features controlled)".into(),
        y_label: "partial Spearman rho".into(),
        groups: partial_features.iter().map(|f| display(f.0)).collect(),
        series: targets.iter().map(|t| display(&t.0)).collect(),
        values: (0..4)
            .map(|f| {
                (0..n_targets)
                    .map(|t| Some(partials[t * 4 + f].result.rho))
                    .collect()
            })
            .collect(),
        marks: (0..4)
            .map(|f| {
                (0..n_targets)
                    .map(|t| stars(partials[t * 4 + f].result.p_value).to_string())
                    .collect()
            })
            .collect(),
    };
    out.put(
        "partial_correlations.svg",
        partial_chart.render().as_bytes(),
    )?;
    let nf = ablation_features.len();
    let mut series = vec!["base".to_string()];
    series.extend(
        ablation_features
            .iter()
            .map(|f| format!("without {}", display_feature(cols, f))),
    );
    let ablation_chart = BarChart {
        title: "Alignment with the behavioral RDM after removing each feature".into(),
        y_label: "Spearman rho".into(),
        groups: inputs
            .models
            .iter()
            .map(|m| m.source_name().to_string())
            .collect(),
        series,
        values: (0..inputs.models.len())
            .map(|m| {
                let mut v = vec![outcomes.get(m * nf).map(|o| o.report.base_rho)];
                v.extend((0..nf).map(|f| Some(outcomes[m * nf + f].report.ablated_rho)));
                v
            })
            .collect(),
        marks: (0..inputs.models.len())
            .map(|m| {
                let mut v = vec![String::new()];
                v.extend(
                    (0..nf)
                        .map(|f| stars(outcomes[m * nf + f].report.williams.p_value).to_string()),
                );
                v
            })
            .collect(),
    };
    out.put("ablation.svg", ablation_chart.render().as_bytes())?;

    out.rdm("intermediates/rdm_behavioral.csv", &behavioral)?;
    for (key, rdm) in feature_rdms.iter().skip(1) {
        if let Some(r) = rdm {
            out.rdm(&format!("intermediates/rdm_{key}.csv"), r)?;
        }
    }
    for (m, r) in inputs.models.iter().zip(&model_rdms) {
        out.rdm(
            &format!("intermediates/rdm_model_{}.csv", file_stem(m.source_name())),
            r,
        )?;
    }
    let mut ablation_info = Vec::with_capacity(outcomes.len());
    for (&(m, f), o) in tasks.iter().zip(&outcomes) {
        let stem = format!(
            "{}_without_{}",
            file_stem(inputs.models[m].source_name()),
            file_stem(&ablation_features[f])
        );
        out.rdm(
            &format!("intermediates/rdm_model_{stem}.csv"),
            &o.ablated_rdm,
        )?;
        let mut json = Vec::new();
        o.fit
            .write_json(&mut json)
            .map_err(|source| ReportError::Ablation {
                model: inputs.models[m].source_name().to_string(),
                feature: ablation_features[f].clone(),
                source: Box::new(source),
            })?;
        json.push(b'\n');
        out.put(&format!("intermediates/ridge_{stem}.json"), &json)?;
        ablation_info.push(AblationInfo {
            model: inputs.models[m].source_name().to_string(),
            feature: ablation_features[f].clone(),
            ridge_seed: ridge_seed(config, m, f),
            alpha: o.fit.alpha,
            cv_r2: o.fit.cv_r2,
            train_size: o.report.train_size,
            passthrough_dims: o.fit.passthrough.len(),
        });
    }

    let manifest = Manifest {
        run: RunInfo {
            version: env!("CARGO_PKG_VERSION"),
            seed: config.seed,
            p_method: config.stats.p_method,
            n_perm: config.stats.n_perm,
            test_words: test.len(),
            train_words: inputs.train_words.len(),
            judgments: inputs.judgments.len(),
            ratings: inputs.ratings.as_ref().map_or(0, Vec::len),
            alpha_grid: config.ablation.alpha_grid.clone(),
            folds: config.ablation.folds,
            residual_space: config.ablation.residual_space,
        },
        models: inputs
            .models
            .iter()
            .enumerate()
            .map(|(m, t)| ModelInfo {
                name: t.source_name().to_string(),
                dim: t.dim(),
                vocabulary: t.len(),
                test_words: model_words[m].len(),
                missing_test_words: test.iter().filter(|w| !t.contains(w)).cloned().collect(),
                cell_seeds: (0..ALIGNMENT_COLUMNS.len())
                    .map(|c| cell_seed(m, c))
                    .collect(),
            })
            .collect(),
        ablations: ablation_info,
        files: out
            .files
            .iter()
            .map(|p| p.to_string_lossy().into_owned())
            .collect(),
    };
    let text =
        toml::to_string(&manifest).map_err(|e| ReportError::Data(format!("manifest: {e}")))?;
    out.put("manifest.toml", text.as_bytes())?;

    Ok(ReportBundle {
        output_dir: output_dir.to_path_buf(),
        alignment,
        partials,
        ablations: reports,
        files: out.files,
    })
}

fn display_feature(cols: &ColumnNames, name: &str) -> String {
    let key = if name == cols.concreteness {
        "concreteness"
    } else if name == cols.frequency {
        "frequency"
    } else if name == cols.length {
        "length"
    } else if name == cols.old20 {
        "OLD20"
    } else {
        name
    };
    key.to_string()
}
