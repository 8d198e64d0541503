//! Parsers for embeddings, feature tables, lexica, judgment and rating
//! logs, plus derived lexical variables.

mod embedding;
mod features;
mod judgments;
mod lexicon;
mod old20;
mod ratings;

pub use embedding::{average_token_vectors, parse_embedding_file, EmbeddingTable};
pub use features::{load_feature_table, FeatureBounds, FeatureColumn, FeatureTable};
pub use judgments::{load_judgments, write_judgments, TripletJudgment, JUDGMENT_COLUMNS};
pub use lexicon::{load_lexicon, Lexicon};
pub use old20::{compute_old20, compute_old_n, levenshtein, old20_batch, OLD_NEIGHBOURS};
pub use ratings::{
    load_ratings, mean_ratings, write_ratings, RatingRecord, RATING_COLUMNS, RATING_SCALE,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("line {line}: expected {expected} components, found {found}")]
    Dimension {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: component {token:?} is not a finite number")]
    NonNumeric { line: usize, token: String },
    #[error("line {line}: duplicate word {word:?}")]
    DuplicateWord { line: usize, word: String },
    #[error("embedding stream contains no vectors")]
    Empty,
    #[error("word {0:?} has an all-zero vector")]
    ZeroVector(String),
    #[error("cannot average an empty list of vectors")]
    EmptyRows,
    #[error("vector {index} has {found} components, expected {expected}")]
    RowDimension {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("missing header row")]
    MissingHeader,
    #[error("row {row}, column {column:?}: {value:?} is not a finite number")]
    NonNumericCell {
        row: usize,
        column: String,
        value: String,
    },
    #[error("row {row}: {column:?} = {value} lies outside [{min}, {max}]")]
    OutOfBounds {
        row: usize,
        column: String,
        value: f64,
        min: f64,
        max: f64,
    },
    #[error("row {row}: duplicate word {word:?}")]
    DuplicateRow { row: usize, word: String },
    #[error("lexicon has {available} entries distinct from {word:?}, need {needed}")]
    TooFewNeighbours {
        word: String,
        available: usize,
        needed: usize,
    },
    #[error("lexicon is empty")]
    EmptyLexicon,
    #[error("row {row}: odd word {odd:?} is not one of {triplet:?}")]
    OddNotInTriplet {
        row: usize,
        odd: String,
        triplet: [String; 3],
    },
    #[error("row {row}: {message}")]
    Malformed { row: usize, message: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub(crate) fn parse_finite(token: &str) -> Option<f64> {
    token.trim().parse::<f64>().ok().filter(|v| v.is_finite())
}
