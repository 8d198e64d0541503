//! Stimulus design: cosine affinity, PCA + k-means++ clustering, selection
//! of the stimulus groups, triplet enumeration and participant scheduling.

mod affinity;
mod cluster;
mod kmeans;
mod pca;
mod schedule;
mod selection;
mod triplets;

pub use affinity::{build_affinity, AffinityMatrix, AffinityOptions};
pub use cluster::{cluster, pick_target_cluster, ClusterModel, ClusterOptions};
pub use kmeans::{kmeans, KMeansResult};
pub use pca::{pca, Pca, VARIANCE_TARGET};
pub use schedule::{read_schedule_csv, schedule_triplets, write_schedule_csv, TripletSchedule};
pub use selection::{
    read_stimulus_csv, select_stimuli, write_stimulus_csv, SelectionColumns, SelectionConfig,
    StimulusGroup, StimulusSet,
};
pub use triplets::{generate_triplets, Triple};

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DesignError {
    #[error("need at least {needed} words, got {got}")]
    TooFewWords { needed: usize, got: usize },
    #[error("duplicate word {0:?}")]
    DuplicateWord(String),
    #[error("word {0:?} is missing from the embedding table")]
    MissingWord(String),
    #[error("word {0:?} has a zero vector")]
    ZeroVector(String),
    #[error("affinity row {0:?} sums to zero after zeroing the diagonal")]
    ZeroRow(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("word {word:?} has no value for feature {feature:?}")]
    MissingFeature { word: String, feature: String },
    #[error("every cluster has a single member; concreteness variance is undefined")]
    AllSingletons,
    #[error("group {group} has {candidates} eligible candidates, needs {needed}")]
    Infeasible {
        group: StimulusGroup,
        candidates: usize,
        needed: usize,
    },
    #[error("invalid stimulus set: {0}")]
    InvalidStimulusSet(String),
    #[error("parse error at row {row}: {message}")]
    Parse { row: usize, message: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Sidecar record of the seeds and parameters behind a generated file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub artifact: String,
    pub seed: u64,
    #[serde(default)]
    pub parameters: BTreeMap<String, String>,
}

impl Manifest {
    pub fn new(artifact: impl Into<String>, seed: u64) -> Self {
        Manifest {
            artifact: artifact.into(),
            seed,
            parameters: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.parameters.insert(key.to_string(), value.to_string());
        self
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).unwrap_or_default()
    }
}
