use std::collections::HashMap;
use std::io::{BufRead, Write};

use super::{parse_finite, IngestError};
use crate::text::normalize;

/// Word vectors from one embedding source.
///
/// Insertion order is preserved so that serialization is stable.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    source_name: String,
    dim: usize,
    words: Vec<String>,
    vectors: Vec<Vec<f64>>,
    index: HashMap<String, usize>,
}

impl EmbeddingTable {
    /// Builds a table from `(word, vector)` pairs. Words are NFC-normalized.
    pub fn from_entries<I>(source_name: impl Into<String>, entries: I) -> Result<Self, IngestError>
    where
        I: IntoIterator<Item = (String, Vec<f64>)>,
    {
        let mut table = EmbeddingTable {
            source_name: source_name.into(),
            dim: 0,
            words: Vec::new(),
            vectors: Vec::new(),
            index: HashMap::new(),
        };
        for (line, (word, vector)) in entries.into_iter().enumerate() {
            let word = normalize(&word);
            if table.words.is_empty() {
                table.dim = vector.len();
            }
            if vector.len() != table.dim || vector.is_empty() {
                return Err(IngestError::Dimension {
                    line: line + 1,
                    expected: table.dim,
                    found: vector.len(),
                });
            }
            if let Some(bad) = vector.iter().find(|v| !v.is_finite()) {
                return Err(IngestError::NonNumeric {
                    line: line + 1,
                    token: bad.to_string(),
                });
            }
            if table.index.contains_key(&word) {
                return Err(IngestError::DuplicateWord {
                    line: line + 1,
                    word,
                });
            }
            table.push(word, vector)?;
        }
        if table.words.is_empty() {
            return Err(IngestError::Empty);
        }
        Ok(table)
    }

    fn push(&mut self, word: String, vector: Vec<f64>) -> Result<(), IngestError> {
        if vector.iter().all(|v| *v == 0.0) {
            return Err(IngestError::ZeroVector(word));
        }
        self.index.insert(word.clone(), self.words.len());
        self.words.push(word);
        self.vectors.push(vector);
        Ok(())
    }

    pub fn source_name(&self) -> &str {
        &self.source_name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn get(&self, word: &str) -> Option<&[f64]> {
        self.index.get(word).map(|&i| self.vectors[i].as_slice())
    }

    pub fn contains(&self, word: &str) -> bool {
        self.index.contains_key(word)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[f64])> {
        self.words
            .iter()
            .zip(&self.vectors)
            .map(|(w, v)| (w.as_str(), v.as_slice()))
    }

    /// Writes the table in headered text form ("count dim" first line).
    pub fn write<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{} {}", self.len(), self.dim)?;
        for (word, vector) in self.iter() {
            write!(out, "{word}")?;
            for v in vector {
                write!(out, " {v}")?;
            }
            writeln!(out)?;
        }
        out.flush()
    }
}

fn is_header(tokens: &[&str]) -> bool {
    tokens.len() == 2 && tokens.iter().all(|t| t.parse::<u64>().is_ok())
}

/// Reads whitespace-separated `word v1 ... vD` lines.
///
/// A first line made of exactly two integers is taken as a `count dim`
/// header. With `merge_duplicates`, repeated words are averaged
/// component-wise (one row per subword token upstream); otherwise a repeated
/// word is an error.
pub fn parse_embedding_file<R: BufRead>(
    reader: R,
    source_name: &str,
    merge_duplicates: bool,
) -> Result<EmbeddingTable, IngestError> {
    let mut header_dim = None;
    let mut dim = None;
    let mut order: Vec<String> = Vec::new();
    let mut rows: HashMap<String, Vec<Vec<f64>>> = HashMap::new();
    let mut first_content = true;

    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let line_no = idx + 1;
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        if first_content {
            first_content = false;
            if is_header(&tokens) {
                header_dim = tokens[1].parse::<usize>().ok();
                continue;
            }
        }
        let word = normalize(tokens[0]);
        let mut vector = Vec::with_capacity(tokens.len() - 1);
        for tok in &tokens[1..] {
            match parse_finite(tok) {
                Some(v) => vector.push(v),
                None => {
                    return Err(IngestError::NonNumeric {
                        line: line_no,
                        token: tok.to_string(),
                    })
                }
            }
        }
        let expected = *dim.get_or_insert(header_dim.unwrap_or(vector.len()));
        if vector.len() != expected || expected == 0 {
            return Err(IngestError::Dimension {
                line: line_no,
                expected,
                found: vector.len(),
            });
        }
        match rows.get_mut(&word) {
            Some(existing) if merge_duplicates => existing.push(vector),
            Some(_) => {
                return Err(IngestError::DuplicateWord {
                    line: line_no,
                    word,
                })
            }
            None => {
                order.push(word.clone());
                rows.insert(word, vec![vector]);
            }
        }
    }

    if order.is_empty() {
        return Err(IngestError::Empty);
    }
    let mut table = EmbeddingTable {
        source_name: source_name.to_string(),
        dim: dim.unwrap_or(0),
        words: Vec::with_capacity(order.len()),
        vectors: Vec::with_capacity(order.len()),
        index: HashMap::with_capacity(order.len()),
    };
    for word in order {
        let token_rows = rows.remove(&word).unwrap_or_default();
        let vector = if token_rows.len() == 1 {
            token_rows.into_iter().next().unwrap_or_default()
        } else {
            average_token_vectors(&token_rows)?
        };
        table.push(word, vector)?;
    }
    Ok(table)
}

/// Component-wise mean of token vectors.
pub fn average_token_vectors(rows: &[Vec<f64>]) -> Result<Vec<f64>, IngestError> {
    let first = rows.first().ok_or(IngestError::EmptyRows)?;
    let dim = first.len();
    let mut sum = vec![0.0; dim];
    for (index, row) in rows.iter().enumerate() {
        if row.len() != dim {
            return Err(IngestError::RowDimension {
                index,
                expected: dim,
                found: row.len(),
            });
        }
        for (s, v) in sum.iter_mut().zip(row) {
            *s += v;
        }
    }
    let n = rows.len() as f64;
    Ok(sum.into_iter().map(|s| s / n).collect())
}
