use std::collections::HashSet;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::ablation::{default_alpha_grid, ResidualSpace};

/// Declarative description of one report run. Relative paths are resolved
/// against the directory holding the configuration file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub output_dir: PathBuf,
    /// Master seed; every stochastic step derives its own seed from it.
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub embeddings: Vec<EmbeddingSource>,
    pub inputs: InputPaths,
    #[serde(default)]
    pub columns: ColumnNames,
    #[serde(default)]
    pub stats: StatsConfig,
    #[serde(default)]
    pub ablation: AblationConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmbeddingSource {
    pub name: String,
    pub path: PathBuf,
    /// Average repeated word entries instead of rejecting them.
    #[serde(default)]
    pub merge_duplicates: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputPaths {
    pub features: PathBuf,
    pub judgments: PathBuf,
    pub ratings: Option<PathBuf>,
    /// Used to fill in frequency and OLD20 columns the feature table lacks.
    pub lexicon: Option<PathBuf>,
    /// One word per line; defaults to every feature-table word outside the
    /// test set.
    pub train_words: Option<PathBuf>,
    /// One word per line; defaults to the words of the judgment log.
    pub test_words: Option<PathBuf>,
}

/// Feature-table column names of the four lexical variables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ColumnNames {
    pub concreteness: String,
    pub frequency: String,
    pub length: String,
    pub old20: String,
}

impl Default for ColumnNames {
    fn default() -> Self {
        ColumnNames {
            concreteness: "concreteness".into(),
            frequency: "log_frequency".into(),
            length: "length".into(),
            old20: "old20".into(),
        }
    }
}

impl ColumnNames {
    pub fn all(&self) -> [&str; 4] {
        [
            &self.concreteness,
            &self.frequency,
            &self.length,
            &self.old20,
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PMethodName {
    #[default]
    Analytic,
    Permutation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StatsConfig {
    pub p_method: PMethodName,
    /// Signed so that a negative value is reported rather than rejected by
    /// the parser.
    pub n_perm: i64,
}

impl Default for StatsConfig {
    fn default() -> Self {
        StatsConfig {
            p_method: PMethodName::Analytic,
            n_perm: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AblationConfig {
    /// Features removed one at a time; empty means the four lexical columns.
    pub features: Vec<String>,
    /// Appended to `features`, e.g. imageability, valence, arousal.
    pub extra_features: Vec<String>,
    pub alpha_grid: Vec<f64>,
    pub folds: i64,
    pub residual_space: ResidualSpace,
}

impl Default for AblationConfig {
    fn default() -> Self {
        AblationConfig {
            features: Vec::new(),
            extra_features: Vec::new(),
            alpha_grid: default_alpha_grid(),
            folds: 5,
            residual_space: ResidualSpace::Raw,
        }
    }
}

/// One structural problem found by [`validate_config`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConfigError {
    MissingPath { field: String, path: PathBuf },
    DuplicateModel(String),
    Invalid { field: String, message: String },
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::MissingPath { field, path } => {
                write!(f, "{field}: {} does not exist", path.display())
            }
            ConfigError::DuplicateModel(name) => {
                write!(f, "embeddings: duplicate source name {name:?}")
            }
            ConfigError::Invalid { field, message } => write!(f, "{field}: {message}"),
        }
    }
}

impl PipelineConfig {
    pub fn from_toml(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    /// `path` joined onto `base` unless it is absolute.
    pub fn resolve(base: &Path, path: &Path) -> PathBuf {
        if path.is_absolute() {
            path.to_path_buf()
        } else {
            base.join(path)
        }
    }

    /// Features to ablate, in report order.
    pub fn ablation_features(&self) -> Vec<String> {
        let mut out: Vec<String> = if self.ablation.features.is_empty() {
            self.columns.all().iter().map(|s| s.to_string()).collect()
        } else {
            self.ablation.features.clone()
        };
        for f in &self.ablation.extra_features {
            if !out.contains(f) {
                out.push(f.clone());
            }
        }
        out
    }
}

/// Runs every structural check and returns all failures at once. Input
/// paths are checked for existence relative to `base`.
pub fn validate_config(config: &PipelineConfig, base: &Path) -> Result<(), Vec<ConfigError>> {
    let mut errors = Vec::new();
    let invalid = |field: &str, message: String| ConfigError::Invalid {
        field: field.to_string(),
        message,
    };
    let check_path = |errors: &mut Vec<ConfigError>, field: String, path: &Path| {
        if !PipelineConfig::resolve(base, path).exists() {
            errors.push(ConfigError::MissingPath {
                field,
                path: path.to_path_buf(),
            });
        }
    };

    if config.embeddings.is_empty() {
        errors.push(invalid(
            "embeddings",
            "at least one embedding source is required".into(),
        ));
    }
    let mut names = HashSet::new();
    for (i, e) in config.embeddings.iter().enumerate() {
        if e.name.trim().is_empty() {
            errors.push(invalid(
                &format!("embeddings[{i}].name"),
                "empty source name".into(),
            ));
        } else if !names.insert(e.name.as_str()) {
            errors.push(ConfigError::DuplicateModel(e.name.clone()));
        }
        check_path(&mut errors, format!("embeddings[{i}].path"), &e.path);
    }
    let inputs = &config.inputs;
    check_path(&mut errors, "inputs.features".into(), &inputs.features);
    check_path(&mut errors, "inputs.judgments".into(), &inputs.judgments);
    for (field, path) in [
        ("inputs.ratings", &inputs.ratings),
        ("inputs.lexicon", &inputs.lexicon),
        ("inputs.train_words", &inputs.train_words),
        ("inputs.test_words", &inputs.test_words),
    ] {
        if let Some(p) = path {
            check_path(&mut errors, field.into(), p);
        }
    }

    let cols = config.columns.all();
    if cols.iter().any(|c| c.trim().is_empty()) {
        errors.push(invalid("columns", "column names must be nonempty".into()));
    }
    if cols.iter().collect::<HashSet<_>>().len() != cols.len() {
        errors.push(invalid("columns", "column names must be distinct".into()));
    }
    if config.stats.n_perm < 1 && config.stats.p_method == PMethodName::Permutation {
        errors.push(invalid(
            "stats.n_perm",
            format!(
                "permutation count must be positive, got {}",
                config.stats.n_perm
            ),
        ));
    } else if config.stats.n_perm < 0 {
        errors.push(invalid(
            "stats.n_perm",
            format!(
                "permutation count must be nonnegative, got {}",
                config.stats.n_perm
            ),
        ));
    }
    let ab = &config.ablation;
    if ab.folds < 2 {
        errors.push(invalid(
            "ablation.folds",
            format!("need at least 2 folds, got {}", ab.folds),
        ));
    }
    if ab.alpha_grid.is_empty() {
        errors.push(invalid("ablation.alpha_grid", "empty grid".into()));
    } else if ab.alpha_grid.iter().any(|a| !(a.is_finite() && *a >= 0.0)) {
        errors.push(invalid(
            "ablation.alpha_grid",
            "values must be finite and nonnegative".into(),
        ));
    }
    let feats = config.ablation_features();
    if feats.iter().collect::<HashSet<_>>().len() != feats.len() {
        errors.push(invalid("ablation.features", "duplicate feature".into()));
    }
    if config.output_dir.as_os_str().is_empty() {
        errors.push(invalid("output_dir", "empty path".into()));
    }

    if errors.is_empty() {
        Ok(())
    } else {
        Err(errors)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
output_dir = "out"
seed = 7

[[embeddings]]
name = "a"
path = "a.vec"

[inputs]
features = "features.csv"
judgments = "judgments.csv"
"#;

    fn touch(dir: &Path, names: &[&str]) {
        for n in names {
            std::fs::write(dir.join(n), "").unwrap();
        }
    }

    #[test]
    fn defaults_and_round_trip() {
        let c = PipelineConfig::from_toml(MINIMAL).unwrap();
        assert_eq!(c.seed, 7);
        assert_eq!(c.ablation.folds, 5);
        assert_eq!(c.ablation.alpha_grid.len(), 13);
        assert_eq!(c.stats.p_method, PMethodName::Analytic);
        assert_eq!(
            c.ablation_features(),
            ["concreteness", "log_frequency", "length", "old20"]
        );
        assert_eq!(PipelineConfig::from_toml(&c.to_toml()).unwrap(), c);
    }

    #[test]
    fn complete_config_validates() {
        let dir = tempfile::tempdir().unwrap();
        touch(dir.path(), &["a.vec", "features.csv", "judgments.csv"]);
        let c = PipelineConfig::from_toml(MINIMAL).unwrap();
        assert_eq!(validate_config(&c, dir.path()), Ok(()));
    }

    #[test]
    fn absent_embedding_path_is_the_single_error() {
        let dir = tempfile::tempdir().unwrap();
        touch(dir.path(), &["features.csv", "judgments.csv"]);
        let c = PipelineConfig::from_toml(MINIMAL).unwrap();
        let errs = validate_config(&c, dir.path()).unwrap_err();
        assert_eq!(
            errs,
            vec![ConfigError::MissingPath {
                field: "embeddings[0].path".into(),
                path: "a.vec".into()
            }]
        );
        assert!(errs[0].to_string().contains("a.vec"));
    }

    #[test]
    fn all_problems_reported_in_one_pass() {
        let mut c = PipelineConfig::from_toml(MINIMAL).unwrap();
        c.embeddings.push(EmbeddingSource {
            name: "a".into(),
            path: "b.vec".into(),
            merge_duplicates: false,
        });
        c.stats = StatsConfig {
            p_method: PMethodName::Permutation,
            n_perm: -5,
        };
        c.ablation.folds = 1;
        let dir = tempfile::tempdir().unwrap();
        let errs = validate_config(&c, dir.path()).unwrap_err();
        let text: Vec<String> = errs.iter().map(|e| e.to_string()).collect();
        assert!(
            errs.contains(&ConfigError::DuplicateModel("a".into())),
            "{text:?}"
        );
        assert!(text.iter().any(|e| e.starts_with("stats.n_perm")));
        assert!(text.iter().any(|e| e.starts_with("ablation.folds")));
        assert!(text.iter().any(|e| e.contains("features.csv")));
        assert!(text.iter().any(|e| e.contains("judgments.csv")));
        assert!(text.iter().any(|e| e.contains("b.vec")));
    }

    #[test]
    fn negative_permutation_count_is_rejected_even_when_analytic() {
        let dir = tempfile::tempdir().unwrap();
        touch(dir.path(), &["a.vec", "features.csv", "judgments.csv"]);
        let mut c = PipelineConfig::from_toml(MINIMAL).unwrap();
        c.stats.n_perm = -1;
        let errs = validate_config(&c, dir.path()).unwrap_err();
        assert_eq!(errs.len(), 1);
        assert!(errs[0].to_string().starts_with("stats.n_perm"));
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(PipelineConfig::from_toml(&format!("{MINIMAL}\n[bogus]\nx = 1\n")).is_err());
    }
}
