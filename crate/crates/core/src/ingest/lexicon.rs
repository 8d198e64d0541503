use std::collections::HashMap;
use std::io::{Read, Write};

use super::IngestError;
use crate::text::normalize;

/// Frequency lexicon: word → occurrence count.
#[derive(Debug, Clone, PartialEq)]
pub struct Lexicon {
    words: Vec<String>,
    counts: Vec<u64>,
    index: HashMap<String, usize>,
    total: u64,
}

impl Lexicon {
    /// Builds a lexicon; repeated words (after NFC normalization) have their
    /// counts summed.
    pub fn from_counts<I, S>(entries: I) -> Result<Self, IngestError>
    where
        I: IntoIterator<Item = (S, u64)>,
        S: AsRef<str>,
    {
        let mut index: HashMap<String, usize> = HashMap::new();
        let mut words = Vec::new();
        let mut counts: Vec<u64> = Vec::new();
        for (word, count) in entries {
            let word = normalize(word.as_ref());
            match index.get(&word) {
                Some(&i) => counts[i] += count,
                None => {
                    index.insert(word.clone(), words.len());
                    words.push(word);
                    counts.push(count);
                }
            }
        }
        if words.is_empty() {
            return Err(IngestError::EmptyLexicon);
        }
        let total = counts.iter().sum();
        Ok(Lexicon {
            words,
            counts,
            index,
            total,
        })
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn count(&self, word: &str) -> Option<u64> {
        self.index.get(word).map(|&i| self.counts[i])
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    /// `log10(count per million + constant)`.
    ///
    /// The constant has to be chosen by the caller; with `constant = 0` an
    /// unseen word yields `-inf`, returned as `None`.
    pub fn log_frequency(&self, word: &str, constant: f64) -> Option<f64> {
        let count = self.count(word).unwrap_or(0) as f64;
        let per_million = count * 1e6 / self.total.max(1) as f64;
        Some((per_million + constant).log10()).filter(|v| v.is_finite())
    }

    /// Writes the `word,count` format read by [`load_lexicon`].
    pub fn write<W: Write>(&self, out: W) -> Result<(), IngestError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["word", "count"])?;
        for (word, count) in self.words.iter().zip(&self.counts) {
            w.write_record([word.as_str(), &count.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Reads a comma-separated lexicon with a header row; the first column is
/// the word and the second its count.
pub fn load_lexicon<R: Read>(reader: R) -> Result<Lexicon, IngestError> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut entries = Vec::new();
    for (idx, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row = idx + 1;
        if rec.len() < 2 {
            return Err(IngestError::Malformed {
                row,
                message: "expected word and count".into(),
            });
        }
        let count = rec[1].parse::<u64>().map_err(|_| IngestError::Malformed {
            row,
            message: format!("count {:?} is not a nonnegative integer", &rec[1]),
        })?;
        entries.push((rec[0].to_string(), count));
    }
    Lexicon::from_counts(entries)
}
