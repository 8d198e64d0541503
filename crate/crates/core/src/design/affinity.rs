use super::DesignError;
use crate::ingest::EmbeddingTable;

/// Row-stochastic affinity matrix with zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct AffinityMatrix {
    pub labels: Vec<String>,
    /// Row-major `n × n`.
    pub values: Vec<f64>,
}

impl AffinityMatrix {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.len();
        &self.values[i * n..(i + 1) * n]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.len() + j]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffinityOptions {
    /// Whether the diagonal takes part in the min-max range.
    pub diagonal_in_range: bool,
}

impl Default for AffinityOptions {
    fn default() -> Self {
        AffinityOptions {
            diagonal_in_range: true,
        }
    }
}

/// Cosine similarity, min-max scaled to `[0, 1]` and with the diagonal
/// zeroed, before row normalization.
pub(crate) fn scaled_similarity(
    table: &EmbeddingTable,
    words: &[String],
    options: AffinityOptions,
) -> Result<Vec<f64>, DesignError> {
    let n = words.len();
    if n < 2 {
        return Err(DesignError::TooFewWords { needed: 2, got: n });
    }
    let mut rows = Vec::with_capacity(n);
    for w in words {
        let v = table
            .get(w)
            .ok_or_else(|| DesignError::MissingWord(w.clone()))?;
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(DesignError::ZeroVector(w.clone()));
        }
        rows.push(v.iter().map(|x| x / norm).collect::<Vec<f64>>());
    }
    let mut sim = vec![0.0; n * n];
    for i in 0..n {
        sim[i * n + i] = 1.0;
        for j in (i + 1)..n {
            let s: f64 = rows[i].iter().zip(&rows[j]).map(|(a, b)| a * b).sum();
            let s = s.clamp(-1.0, 1.0);
            sim[i * n + j] = s;
            sim[j * n + i] = s;
        }
    }
    let cells = (0..n * n).filter(|&c| options.diagonal_in_range || c / n != c % n);
    let (lo, hi) = cells.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), c| {
        (lo.min(sim[c]), hi.max(sim[c]))
    });
    let span = hi - lo;
    for (c, s) in sim.iter_mut().enumerate() {
        *s = if c / n == c % n {
            0.0
        } else if span > 0.0 {
            ((*s - lo) / span).clamp(0.0, 1.0)
        } else {
            0.0
        };
    }
    Ok(sim)
}

/// Affinity matrix of `words` from their embeddings: cosine similarity,
/// min-max normalized to `[0, 1]`, diagonal zeroed, rows scaled to sum to 1.
pub fn build_affinity(
    table: &EmbeddingTable,
    words: &[String],
    options: AffinityOptions,
) -> Result<AffinityMatrix, DesignError> {
    let mut values = scaled_similarity(table, words, options)?;
    let n = words.len();
    for (i, row) in values.chunks_mut(n).enumerate() {
        let sum: f64 = row.iter().sum();
        if sum.is_nan() || sum <= 0.0 {
            return Err(DesignError::ZeroRow(words[i].clone()));
        }
        row.iter_mut().for_each(|v| *v /= sum);
    }
    Ok(AffinityMatrix {
        labels: words.to_vec(),
        values,
    })
}
