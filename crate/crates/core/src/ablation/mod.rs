//! Linear feature removal: ridge regression from scalar features to
//! embeddings, residual embeddings, and the resulting change in alignment.

mod pipeline;
mod ridge;

pub use pipeline::{
    ablate, ablation_pipeline, write_ablation_csv, AblationInput, AblationOutcome, AblationReport,
    ABLATION_COLUMNS,
};
pub use ridge::{
    default_alpha_grid, fit_ridge, predict, residualize, ResidualSpace, RidgeFit, RidgeOptions,
    RIDGE_FORMAT,
};

use thiserror::Error;

use crate::rdm::RdmError;
use crate::stats::StatsError;

#[derive(Debug, Error)]
pub enum AblationError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("feature column {0} is constant")]
    ConstantFeature(usize),
    #[error("fold {fold}: {what} column {column} is constant on the training part")]
    SingularFold {
        fold: usize,
        what: &'static str,
        column: usize,
    },
    #[error("ridge normal equations are singular (alpha = {0})")]
    Singular(f64),
    #[error("expected {expected} columns, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("train and test sets share {} words, e.g. {:?}", .0.len(), .0.first())]
    Overlap(Vec<String>),
    #[error("word {word:?} has no value for feature {feature:?}")]
    MissingFeature { word: String, feature: String },
    #[error("word {0:?} has no embedding")]
    MissingEmbedding(String),
    #[error("unsupported ridge file: {0}")]
    Format(String),
    #[error(transparent)]
    Rdm(#[from] RdmError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
