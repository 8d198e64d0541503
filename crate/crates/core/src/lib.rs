//! Tools for measuring representational alignment between human word
//! similarity judgments and word embeddings.
//!
//! The crate covers the whole analysis path:
//!
//! * [`ingest`] reads embedding files, feature tables, lexica and judgment
//!   logs, and computes OLD20 orthographic neighbourhood scores.
//! * [`design`] builds a stimulus set from a word pool (cosine affinity,
//!   PCA, k-means++), enumerates triplets and schedules them over
//!   participants.
//! * [`rdm`] builds representational dissimilarity matrices from
//!   embeddings, scalar features and odd-one-out judgments.
//! * [`stats`] holds Spearman/Pearson correlation, RSA with analytic or
//!   permutation p-values, partial Spearman correlation and the Williams
//!   test for dependent correlations.
//! * [`ablation`] removes the linear contribution of a feature from
//!   embeddings via ridge regression and measures the alignment drop.
//! * [`report`] glues everything into reproducible report bundles.
//!
//! ```
//! use lexalign::ingest::FeatureColumn;
//! use lexalign::rdm::feature_rdm;
//! use lexalign::stats::{rsa, PValueMethod};
//!
//! let labels: Vec<String> = ["a", "b", "c", "d"].iter().map(|s| s.to_string()).collect();
//! let column: FeatureColumn = labels.iter().cloned().zip([1.0, 4.0, 9.0, 16.0]).collect();
//! let rdm = feature_rdm(&column, &labels).unwrap();
//! let result = rsa(&rdm, &rdm, PValueMethod::Analytic).unwrap();
//! assert!((result.rho - 1.0).abs() < 1e-12);
//! ```

pub mod ablation;
pub mod design;
pub mod ingest;
pub mod rdm;
pub mod report;
pub mod seed;
pub mod stats;
pub mod synth;
pub mod text;

pub use ablation::{AblationReport, RidgeFit};
pub use ingest::{EmbeddingTable, FeatureTable, Lexicon, TripletJudgment};
pub use rdm::{CondensedVector, Rdm, RdmKind};
pub use stats::{AlignmentResult, WilliamsResult};
