//! Representational dissimilarity matrices.
//!
//! An [`Rdm`] is a labelled, symmetric, zero-diagonal matrix of pairwise
//! dissimilarities. Statistics operate on its [`CondensedVector`]: the upper
//! triangle in row-major order `(0,1), (0,2), …, (n-2,n-1)`.

mod build;
mod io;

pub use build::{behavioral_rdm, embedding_rdm, feature_rdm, vectors_rdm};
pub use io::{read_rdm_csv, write_condensed_csv, write_rdm_csv};

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

/// Symmetry tolerance for RDM validation.
pub const SYMMETRY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum RdmError {
    #[error("an RDM needs at least 2 conditions, got {0}")]
    TooFewConditions(usize),
    #[error("duplicate label {0:?}")]
    DuplicateLabel(String),
    #[error("expected {expected} values for {n} labels, got {found}")]
    Shape {
        n: usize,
        expected: usize,
        found: usize,
    },
    #[error("matrix is not symmetric at ({row}, {col}): difference {difference:e}")]
    Asymmetric {
        row: usize,
        col: usize,
        difference: f64,
    },
    #[error("diagonal entry {0} is not zero")]
    NonzeroDiagonal(usize),
    #[error("entry ({row}, {col}) is not finite")]
    NonFinite { row: usize, col: usize },
    #[error("entry ({row}, {col}) = {value} outside the {kind} range")]
    OutOfRange {
        row: usize,
        col: usize,
        value: f64,
        kind: RdmKind,
    },
    #[error("word {0:?} is missing")]
    MissingWord(String),
    #[error("word {0:?} has a zero vector")]
    ZeroVector(String),
    #[error("vectors have inconsistent dimensions")]
    DimensionMismatch,
    #[error("{} word pairs were never judged, e.g. {:?}", .0.len(), .0.first())]
    UnobservedPairs(Vec<(String, String)>),
    #[error("judgment references {0:?}, which is not in the word list")]
    UnknownWord(String),
    #[error("label sets differ: {0}")]
    LabelMismatch(String),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// How an RDM was derived; fixes its admissible value range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RdmKind {
    /// `1 - cos`, in `[0, 2]`.
    Cosine,
    /// `|x_i - x_j|` of a scalar feature.
    Euclidean1d,
    /// `1 - mean similarity code`, in `[0, 1]`.
    Behavioral,
}

impl RdmKind {
    pub fn as_str(self) -> &'static str {
        match self {
            RdmKind::Cosine => "cosine",
            RdmKind::Euclidean1d => "euclidean_1d",
            RdmKind::Behavioral => "behavioral",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "cosine" => Some(RdmKind::Cosine),
            "euclidean_1d" => Some(RdmKind::Euclidean1d),
            "behavioral" => Some(RdmKind::Behavioral),
            _ => None,
        }
    }

    fn range(self) -> (f64, f64) {
        match self {
            RdmKind::Cosine => (0.0, 2.0),
            RdmKind::Euclidean1d => (0.0, f64::INFINITY),
            RdmKind::Behavioral => (0.0, 1.0),
        }
    }
}

impl fmt::Display for RdmKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Rdm {
    labels: Vec<String>,
    values: Vec<f64>,
    kind: RdmKind,
}

impl Rdm {
    /// Validating constructor; `values` is the full `n × n` matrix, row-major.
    pub fn new(labels: Vec<String>, values: Vec<f64>, kind: RdmKind) -> Result<Self, RdmError> {
        let rdm = Rdm {
            labels,
            values,
            kind,
        };
        rdm.validate()?;
        Ok(rdm)
    }

    /// Checks every RDM invariant.
    pub fn validate(&self) -> Result<(), RdmError> {
        let n = self.labels.len();
        if n < 2 {
            return Err(RdmError::TooFewConditions(n));
        }
        let mut seen = HashSet::with_capacity(n);
        for label in &self.labels {
            if !seen.insert(label.as_str()) {
                return Err(RdmError::DuplicateLabel(label.clone()));
            }
        }
        if self.values.len() != n * n {
            return Err(RdmError::Shape {
                n,
                expected: n * n,
                found: self.values.len(),
            });
        }
        let (lo, hi) = self.kind.range();
        for row in 0..n {
            if self.get(row, row) != 0.0 {
                return Err(RdmError::NonzeroDiagonal(row));
            }
            for col in 0..n {
                let value = self.get(row, col);
                if !value.is_finite() {
                    return Err(RdmError::NonFinite { row, col });
                }
                if value < lo || value > hi {
                    return Err(RdmError::OutOfRange {
                        row,
                        col,
                        value,
                        kind: self.kind,
                    });
                }
                let difference = (value - self.get(col, row)).abs();
                if difference > SYMMETRY_TOLERANCE {
                    return Err(RdmError::Asymmetric {
                        row,
                        col,
                        difference,
                    });
                }
            }
        }
        Ok(())
    }

    /// Builds a matrix from a per-pair function evaluated once per unordered
    /// pair, so the result is exactly symmetric.
    pub(crate) fn from_pairs(
        labels: Vec<String>,
        kind: RdmKind,
        pair: impl Fn(usize, usize) -> f64 + Sync,
    ) -> Result<Self, RdmError> {
        use rayon::prelude::*;
        let n = labels.len();
        let rows: Vec<Vec<f64>> = (0..n)
            .into_par_iter()
            .map(|i| ((i + 1)..n).map(|j| pair(i, j)).collect())
            .collect();
        let mut values = vec![0.0; n * n];
        for (i, row) in rows.iter().enumerate() {
            for (offset, &v) in row.iter().enumerate() {
                let j = i + 1 + offset;
                values[i * n + j] = v;
                values[j * n + i] = v;
            }
        }
        Rdm::new(labels, values, kind)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn kind(&self) -> RdmKind {
        self.kind
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.labels.len() + col]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Sub-matrix over `labels`, in that order.
    pub fn subset(&self, labels: &[String]) -> Result<Rdm, RdmError> {
        let idx: Vec<usize> = labels
            .iter()
            .map(|l| {
                self.index_of(l)
                    .ok_or_else(|| RdmError::MissingWord(l.clone()))
            })
            .collect::<Result<_, _>>()?;
        let m = idx.len();
        let mut values = vec![0.0; m * m];
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                values[a * m + b] = self.get(i, j);
            }
        }
        Rdm::new(labels.to_vec(), values, self.kind)
    }

    /// Reorders this matrix to follow `other`'s labels. Both must carry the
    /// same label set.
    pub fn aligned_to(&self, other: &Rdm) -> Result<Rdm, RdmError> {
        if self.labels == other.labels {
            return Ok(self.clone());
        }
        let mine: HashSet<&String> = self.labels.iter().collect();
        let theirs: HashSet<&String> = other.labels.iter().collect();
        if mine != theirs {
            let mut only_mine: Vec<&&String> = mine.difference(&theirs).collect();
            let mut only_theirs: Vec<&&String> = theirs.difference(&mine).collect();
            only_mine.sort();
            only_theirs.sort();
            return Err(RdmError::LabelMismatch(format!(
                "only in first: {only_mine:?}; only in second: {only_theirs:?}"
            )));
        }
        self.subset(&other.labels)
    }

    /// Jointly permutes rows and columns: new condition `a` is old
    /// condition `perm[a]`. Labels stay in place.
    pub fn permute_conditions(&self, perm: &[usize]) -> Rdm {
        let n = self.len();
        let mut values = vec![0.0; n * n];
        for a in 0..n {
            for b in 0..n {
                values[a * n + b] = self.get(perm[a], perm[b]);
            }
        }
        Rdm {
            labels: self.labels.clone(),
            values,
            kind: self.kind,
        }
    }

    pub fn condense(&self) -> Result<CondensedVector, RdmError> {
        condense(self)
    }
}

/// Upper triangle of an RDM in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct CondensedVector {
    pub labels: Vec<String>,
    pub pair_labels: Vec<(String, String)>,
    pub values: Vec<f64>,
    pub kind: RdmKind,
}

impl CondensedVector {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Rebuilds the square matrix.
    pub fn expand(&self) -> Result<Rdm, RdmError> {
        let n = self.labels.len();
        let expected = n * n.saturating_sub(1) / 2;
        if self.values.len() != expected {
            return Err(RdmError::Shape {
                n,
                expected,
                found: self.values.len(),
            });
        }
        let mut values = vec![0.0; n * n];
        let mut k = 0;
        for i in 0..n {
            for j in (i + 1)..n {
                values[i * n + j] = self.values[k];
                values[j * n + i] = self.values[k];
                k += 1;
            }
        }
        Rdm::new(self.labels.clone(), values, self.kind)
    }
}

/// Number of unordered pairs among `n` conditions.
pub fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Condensed form of `rdm`, re-checking its invariants.
pub fn condense(rdm: &Rdm) -> Result<CondensedVector, RdmError> {
    rdm.validate()?;
    let n = rdm.len();
    let mut pair_labels = Vec::with_capacity(pair_count(n));
    let mut values = Vec::with_capacity(pair_count(n));
    for i in 0..n {
        for j in (i + 1)..n {
            pair_labels.push((rdm.labels[i].clone(), rdm.labels[j].clone()));
            values.push(rdm.get(i, j));
        }
    }
    Ok(CondensedVector {
        labels: rdm.labels.clone(),
        pair_labels,
        values,
        kind: rdm.kind,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn labels(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("w{i}")).collect()
    }

    #[test]
    fn condensed_order_is_row_major() {
        let rdm = Rdm::new(
            labels(3),
            vec![0.0, 1.0, 2.0, 1.0, 0.0, 3.0, 2.0, 3.0, 0.0],
            RdmKind::Euclidean1d,
        )
        .unwrap();
        let c = condense(&rdm).unwrap();
        assert_eq!(c.values, vec![1.0, 2.0, 3.0]);
        assert_eq!(
            c.pair_labels,
            vec![
                ("w0".to_string(), "w1".to_string()),
                ("w0".to_string(), "w2".to_string()),
                ("w1".to_string(), "w2".to_string())
            ]
        );
    }

    #[test]
    fn forty_conditions_give_780_pairs() {
        let rdm = Rdm::from_pairs(labels(40), RdmKind::Euclidean1d, |i, j| (j - i) as f64).unwrap();
        assert_eq!(condense(&rdm).unwrap().len(), 780);
    }

    #[test]
    fn asymmetry_beyond_tolerance_is_rejected() {
        let mut values = vec![0.0, 0.5, 0.5, 0.0];
        values[1] += 1e-11;
        assert!(matches!(
            Rdm::new(labels(2), values.clone(), RdmKind::Behavioral),
            Err(RdmError::Asymmetric { .. })
        ));
        values[1] = 0.5 + 1e-13;
        assert!(Rdm::new(labels(2), values, RdmKind::Behavioral).is_ok());
    }

    #[test]
    fn other_invariants() {
        assert!(matches!(
            Rdm::new(labels(1), vec![0.0], RdmKind::Cosine),
            Err(RdmError::TooFewConditions(1))
        ));
        assert!(matches!(
            Rdm::new(labels(2), vec![0.1, 0.5, 0.5, 0.0], RdmKind::Cosine),
            Err(RdmError::NonzeroDiagonal(0))
        ));
        assert!(matches!(
            Rdm::new(labels(2), vec![0.0, 1.5, 1.5, 0.0], RdmKind::Behavioral),
            Err(RdmError::OutOfRange { .. })
        ));
        assert!(matches!(
            Rdm::new(
                labels(2),
                vec![0.0, f64::NAN, f64::NAN, 0.0],
                RdmKind::Euclidean1d
            ),
            Err(RdmError::NonFinite { .. })
        ));
        assert!(matches!(
            Rdm::new(vec!["a".into(), "a".into()], vec![0.0; 4], RdmKind::Cosine),
            Err(RdmError::DuplicateLabel(_))
        ));
    }

    #[test]
    fn alignment_by_label() {
        let a = Rdm::new(
            vec!["x".into(), "y".into(), "z".into()],
            vec![0.0, 1.0, 2.0, 1.0, 0.0, 3.0, 2.0, 3.0, 0.0],
            RdmKind::Euclidean1d,
        )
        .unwrap();
        let b = a
            .subset(&["z".to_string(), "x".to_string(), "y".to_string()])
            .unwrap();
        assert_eq!(b.get(0, 1), 2.0);
        assert_eq!(b.aligned_to(&a).unwrap(), a);
        let c = a.subset(&["x".to_string(), "y".to_string()]).unwrap();
        assert!(matches!(c.aligned_to(&a), Err(RdmError::LabelMismatch(_))));
    }

    proptest! {
        #[test]
        fn condense_expand_is_identity(n in 2usize..12, seed in any::<u64>()) {
            use rand::Rng;
            let mut rng = crate::seed::rng(seed);
            let upper: Vec<f64> = (0..pair_count(n)).map(|_| rng.random::<f64>()).collect();
            let mut values = vec![0.0; n * n];
            let mut k = 0;
            for i in 0..n {
                for j in (i + 1)..n {
                    values[i * n + j] = upper[k];
                    values[j * n + i] = upper[k];
                    k += 1;
                }
            }
            let rdm = Rdm::new(labels(n), values, RdmKind::Behavioral).unwrap();
            let c = condense(&rdm).unwrap();
            prop_assert_eq!(&c.values, &upper);
            prop_assert_eq!(c.expand().unwrap(), rdm);
        }
    }
}
