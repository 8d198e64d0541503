//! Correlation statistics for comparing RDMs.

mod correlation;
mod partial;
mod rank;
mod rsa;
mod williams;

pub use correlation::{pearson, spearman, student_t_two_tailed};
pub use partial::{partial_correlation_ranked, partial_spearman};
pub use rank::average_ranks;
pub use rsa::{permutation_p, rsa};
pub use williams::{williams_t, WilliamsResult};

use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rdm::RdmError;

#[derive(Debug, Error)]
pub enum StatsError {
    #[error("inputs have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("need at least {needed} observations, got {got}")]
    TooFewObservations { needed: usize, got: usize },
    #[error("{0} input is constant")]
    Constant(&'static str),
    #[error("input contains non-finite values")]
    NonFinite,
    #[error("correlation {0} outside (-1, 1)")]
    InvalidCorrelation(f64),
    #[error("correlation triple is not positive definite (det = {0:e})")]
    ImpossibleCorrelations(f64),
    #[error("regression on the controls is singular: {0}")]
    Singular(String),
    #[error("permutation count must be at least 1")]
    NoPermutations,
    #[error(transparent)]
    Rdm(#[from] RdmError),
}

/// How a p-value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Analytic,
    Permutation,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Analytic => "analytic",
            Method::Permutation => "permutation",
        })
    }
}

/// P-value procedure for [`rsa`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PValueMethod {
    /// Student t on the condensed cells, `df = pairs - 2`.
    Analytic,
    /// Joint row/column relabelling of the model RDM.
    Permutation { n_perm: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlignmentResult {
    pub rho: f64,
    pub p_value: f64,
    pub n_pairs: usize,
    pub method: Method,
    /// Permutation seed, when one was used.
    pub seed: Option<u64>,
}

impl AlignmentResult {
    pub const CSV_HEADER: [&'static str; 5] = ["rho", "p", "n_pairs", "method", "seed"];

    pub fn csv_record(&self) -> [String; 5] {
        [
            self.rho.to_string(),
            self.p_value.to_string(),
            self.n_pairs.to_string(),
            self.method.to_string(),
            self.seed.map(|s| s.to_string()).unwrap_or_default(),
        ]
    }

    /// Writes a one-record delimited file.
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(Self::CSV_HEADER)?;
        w.write_record(self.csv_record())?;
        w.flush()?;
        Ok(())
    }
}

/// Significance stars: `***` p < .001, `**` p < .01, `*` p < .05.
pub fn stars(p: f64) -> &'static str {
    if p < 0.001 {
        "***"
    } else if p < 0.01 {
        "**"
    } else if p < 0.05 {
        "*"
    } else {
        ""
    }
}
