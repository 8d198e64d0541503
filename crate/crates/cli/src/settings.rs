//! The configuration document shared by all subcommands.
//!
//! One TOML file holds the report pipeline at top level plus optional
//! `[design]` and `[service]` tables. Relative paths inside it resolve
//! against the file's directory; paths given as flags resolve against the
//! working directory and win over the file.

use std::path::{Path, PathBuf};

use lexalign::report::{
    AblationConfig, ColumnNames, EmbeddingSource, InputPaths, PMethodName, PipelineConfig,
    StatsConfig,
};
use lexalign_service::ServiceConfig;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DesignSection {
    /// Embedding file used for the affinity matrix.
    pub embeddings: Option<PathBuf>,
    pub features: Option<PathBuf>,
    pub lexicon: Option<PathBuf>,
    /// Candidate pool, one word per line.
    pub candidates: Option<PathBuf>,
    pub stimuli: Option<PathBuf>,
    pub triplets: Option<PathBuf>,
    pub schedule: Option<PathBuf>,
    pub k: Option<usize>,
    pub n_components: Option<usize>,
    pub restarts: Option<usize>,
    pub group_size: Option<usize>,
    pub sd_threshold: Option<f64>,
    pub length_range: Option<(usize, usize)>,
    pub matching_tolerance_sd: Option<f64>,
    pub participants: Option<usize>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ServiceSection {
    pub schedule: Option<PathBuf>,
    pub stimuli: Option<PathBuf>,
    pub data_dir: Option<PathBuf>,
    pub bind: Option<String>,
    pub seed: Option<u64>,
    pub consent: Option<PathBuf>,
    pub admin_token: Option<String>,
}

#[derive(Debug, Clone, Default)]
pub struct Document {
    /// Directory relative paths in the file resolve against.
    pub base: PathBuf,
    pub path: Option<PathBuf>,
    pipeline: Option<toml::Table>,
    pub design: DesignSection,
    pub service: ServiceSection,
}

fn cwd() -> PathBuf {
    std::env::current_dir().unwrap_or_else(|_| PathBuf::from("."))
}

/// Absolute form of a path given on the command line.
pub fn flag_path(p: &Path) -> PathBuf {
    std::path::absolute(p).unwrap_or_else(|_| p.to_path_buf())
}

impl Document {
    pub fn load(path: Option<&Path>) -> Result<Document, CliError> {
        let Some(path) = path else {
            return Ok(Document {
                base: cwd(),
                ..Default::default()
            });
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
        let mut table: toml::Table = toml::from_str(&text)
            .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
        let section = |table: &mut toml::Table, key: &str| {
            table
                .remove(key)
                .unwrap_or(toml::Value::Table(Default::default()))
        };
        let bad = |what: &str, e: toml::de::Error| {
            CliError::Validation(format!("{}: [{what}]: {e}", path.display()))
        };
        let design = section(&mut table, "design")
            .try_into()
            .map_err(|e| bad("design", e))?;
        let service = section(&mut table, "service")
            .try_into()
            .map_err(|e| bad("service", e))?;
        let base = flag_path(path)
            .parent()
            .map(Path::to_path_buf)
            .unwrap_or_else(cwd);
        Ok(Document {
            base,
            path: Some(path.to_path_buf()),
            pipeline: (!table.is_empty()).then_some(table),
            design,
            service,
        })
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        PipelineConfig::resolve(&self.base, p)
    }

    /// The report pipeline with flag overrides applied.
    pub fn pipeline(&self, o: &PipelineOverrides) -> Result<PipelineConfig, CliError> {
        let cfg = self.pipeline_partial(o)?;
        for (field, p) in [
            ("inputs.features", &cfg.inputs.features),
            ("inputs.judgments", &cfg.inputs.judgments),
        ] {
            if p.as_os_str().is_empty() {
                return Err(CliError::Validation(format!(
                    "no {field} given (set it in the config or pass the matching flag)"
                )));
            }
        }
        Ok(cfg)
    }

    /// Like [`Self::pipeline`] but leaves unset input paths empty.
    pub fn pipeline_partial(&self, o: &PipelineOverrides) -> Result<PipelineConfig, CliError> {
        let mut cfg = match &self.pipeline {
            Some(t) => toml::Value::Table(t.clone())
                .try_into::<PipelineConfig>()
                .map_err(|e| {
                    CliError::Validation(format!(
                        "{}: {e}",
                        self.path
                            .as_deref()
                            .unwrap_or(Path::new("config"))
                            .display()
                    ))
                })?,
            None => PipelineConfig {
                output_dir: "report".into(),
                seed: 0,
                embeddings: Vec::new(),
                inputs: InputPaths {
                    features: PathBuf::new(),
                    judgments: PathBuf::new(),
                    ratings: None,
                    lexicon: None,
                    train_words: None,
                    test_words: None,
                },
                columns: ColumnNames::default(),
                stats: StatsConfig::default(),
                ablation: AblationConfig::default(),
            },
        };
        o.apply(&mut cfg);
        Ok(cfg)
    }

    /// Service settings from `[service]` plus flags.
    pub fn service(&self, o: &ServiceOverrides) -> Result<ServiceConfig, CliError> {
        let s = &self.service;
        let pick = |flag: &Option<PathBuf>, file: &Option<PathBuf>| {
            flag.as_deref()
                .map(flag_path)
                .or_else(|| file.as_deref().map(|p| self.resolve(p)))
        };
        let need = |v: Option<PathBuf>, what: &str| {
            v.ok_or_else(|| {
                CliError::Validation(format!(
                    "no service {what} given (set [service].{what} or --{})",
                    what.replace('_', "-")
                ))
            })
        };
        Ok(ServiceConfig {
            schedule: need(pick(&o.schedule, &s.schedule), "schedule")?,
            stimuli: pick(&o.stimuli, &s.stimuli),
            data_dir: need(pick(&o.data_dir, &s.data_dir), "data_dir")?,
            bind: o
                .bind
                .clone()
                .or_else(|| s.bind.clone())
                .unwrap_or_else(|| lexalign_service::config::DEFAULT_BIND.to_string()),
            seed: o.seed.or(s.seed).unwrap_or(0),
            consent: pick(&o.consent, &s.consent),
            admin_token: o.admin_token.clone().or_else(|| s.admin_token.clone()),
        })
    }

    /// A design path: the flag if given, else the `[design]` entry.
    pub fn design_path(
        &self,
        flag: &Option<PathBuf>,
        pick: impl Fn(&DesignSection) -> &Option<PathBuf>,
    ) -> Option<PathBuf> {
        flag.as_deref()
            .map(flag_path)
            .or_else(|| pick(&self.design).as_deref().map(|p| self.resolve(p)))
    }
}

/// `NAME=PATH` embedding source flag.
pub fn parse_source(s: &str) -> Result<EmbeddingSource, String> {
    let (name, path) = s
        .split_once('=')
        .ok_or_else(|| format!("expected NAME=PATH, got {s:?}"))?;
    if name.is_empty() || path.is_empty() {
        return Err(format!("expected NAME=PATH, got {s:?}"));
    }
    Ok(EmbeddingSource {
        name: name.to_string(),
        path: flag_path(Path::new(path)),
        merge_duplicates: false,
    })
}

#[derive(Debug, Clone, Default, clap::Args)]
pub struct PipelineOverrides {
    /// Embedding source as NAME=PATH; repeat for several. Replaces the
    /// config's list.
    #[arg(long = "embedding", value_name = "NAME=PATH", value_parser = parse_source)]
    pub embeddings: Vec<EmbeddingSource>,
    /// Average repeated words in embedding files given by --embedding.
    #[arg(long)]
    pub merge_duplicates: bool,
    #[arg(long)]
    pub features: Option<PathBuf>,
    #[arg(long)]
    pub judgments: Option<PathBuf>,
    #[arg(long)]
    pub ratings: Option<PathBuf>,
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
    #[arg(long)]
    pub train_words: Option<PathBuf>,
    #[arg(long)]
    pub test_words: Option<PathBuf>,
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Use permutation p-values with this many relabellings.
    #[arg(long)]
    pub permutations: Option<i64>,
}

impl PipelineOverrides {
    fn apply(&self, cfg: &mut PipelineConfig) {
        if !self.embeddings.is_empty() {
            cfg.embeddings = self.embeddings.clone();
            for e in &mut cfg.embeddings {
                e.merge_duplicates = self.merge_duplicates;
            }
        }
        let set = |slot: &mut PathBuf, v: &Option<PathBuf>| {
            if let Some(p) = v {
                *slot = flag_path(p);
            }
        };
        let set_opt = |slot: &mut Option<PathBuf>, v: &Option<PathBuf>| {
            if let Some(p) = v {
                *slot = Some(flag_path(p));
            }
        };
        set(&mut cfg.inputs.features, &self.features);
        set(&mut cfg.inputs.judgments, &self.judgments);
        set_opt(&mut cfg.inputs.ratings, &self.ratings);
        set_opt(&mut cfg.inputs.lexicon, &self.lexicon);
        set_opt(&mut cfg.inputs.train_words, &self.train_words);
        set_opt(&mut cfg.inputs.test_words, &self.test_words);
        set(&mut cfg.output_dir, &self.output_dir);
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(n) = self.permutations {
            cfg.stats.p_method = PMethodName::Permutation;
            cfg.stats.n_perm = n;
        }
    }
}

#[derive(Debug, Clone, Default, clap::Args)]
pub struct ServiceOverrides {
    #[arg(long)]
    pub schedule: Option<PathBuf>,
    #[arg(long)]
    pub stimuli: Option<PathBuf>,
    #[arg(long)]
    pub data_dir: Option<PathBuf>,
    /// Address to listen on, e.g. 127.0.0.1:8080.
    #[arg(long)]
    pub bind: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub consent: Option<PathBuf>,
    #[arg(long, env = "LEXALIGN_ADMIN_TOKEN")]
    pub admin_token: Option<String>,
}
