use std::collections::BTreeSet;
use std::fs::File;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use lexalign::design::{read_schedule_csv, read_stimulus_csv, TripletSchedule};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const DEFAULT_BIND: &str = "127.0.0.1:8080";

/// Service settings, read from TOML. Relative paths resolve against the
/// config file's directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ServiceConfig {
    /// Schedule CSV (`participant_slot,position,word_a,word_b,word_c`).
    pub schedule: PathBuf,
    /// Stimulus CSV; its words are the rating items. Without it, every word
    /// in the schedule is rated.
    #[serde(default)]
    pub stimuli: Option<PathBuf>,
    pub data_dir: PathBuf,
    #[serde(default = "default_bind")]
    pub bind: String,
    /// Seed for presentation order.
    #[serde(default)]
    pub seed: u64,
    /// Plain-text consent statement served at `/consent`.
    #[serde(default)]
    pub consent: Option<PathBuf>,
    /// Bearer token required by `/admin` routes. Admin routes are disabled
    /// when unset.
    #[serde(default)]
    pub admin_token: Option<String>,
}

fn default_bind() -> String {
    DEFAULT_BIND.to_string()
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("reading {}: {source}", .path.display())]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("parsing config: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("{}: {source}", .path.display())]
    Design {
        path: PathBuf,
        source: lexalign::design::DesignError,
    },
    #[error("invalid bind address {0:?}")]
    Bind(String),
    #[error("{0}")]
    Invalid(String),
}

/// Everything the service needs, loaded from disk.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub config: ServiceConfig,
    pub schedule: TripletSchedule,
    pub rating_words: Vec<String>,
    pub data_dir: PathBuf,
    pub consent: Option<String>,
    pub bind: SocketAddr,
}

impl ServiceConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        Ok(toml::from_str(text)?)
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml(&text)
    }

    pub fn load(self, base: &Path) -> Result<LoadedConfig, ConfigError> {
        let resolve = |p: &Path| {
            if p.is_absolute() {
                p.to_path_buf()
            } else {
                base.join(p)
            }
        };
        let open = |p: &Path| {
            File::open(p).map_err(|source| ConfigError::Read {
                path: p.to_path_buf(),
                source,
            })
        };
        let schedule_path = resolve(&self.schedule);
        let schedule = read_schedule_csv(open(&schedule_path)?, self.seed).map_err(|source| {
            ConfigError::Design {
                path: schedule_path.clone(),
                source,
            }
        })?;
        if schedule.blocks.is_empty() || schedule.blocks.iter().any(Vec::is_empty) {
            return Err(ConfigError::Invalid(format!(
                "{} has no trials for some participant slot",
                schedule_path.display()
            )));
        }
        let rating_words = match &self.stimuli {
            Some(p) => {
                let p = resolve(p);
                read_stimulus_csv(open(&p)?)
                    .map_err(|source| ConfigError::Design {
                        path: p.clone(),
                        source,
                    })?
                    .words()
            }
            None => schedule
                .blocks
                .iter()
                .flatten()
                .flatten()
                .cloned()
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect(),
        };
        let consent = match &self.consent {
            Some(p) => {
                let p = resolve(p);
                Some(
                    std::fs::read_to_string(&p)
                        .map_err(|source| ConfigError::Read { path: p, source })?,
                )
            }
            None => None,
        };
        let bind = self
            .bind
            .parse()
            .map_err(|_| ConfigError::Bind(self.bind.clone()))?;
        Ok(LoadedConfig {
            data_dir: resolve(&self.data_dir),
            schedule,
            rating_words,
            consent,
            bind,
            config: self,
        })
    }
}
