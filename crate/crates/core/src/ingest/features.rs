use std::collections::{BTreeMap, HashMap, HashSet};
use std::io::{Read, Write};

use super::{parse_finite, IngestError};
use crate::text::normalize;

/// One scalar feature: word → value.
pub type FeatureColumn = HashMap<String, f64>;

/// Declared inclusive value bounds per feature name.
pub type FeatureBounds = HashMap<String, (f64, f64)>;

/// Named scalar features over a shared word list.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FeatureTable {
    words: Vec<String>,
    names: Vec<String>,
    columns: HashMap<String, FeatureColumn>,
    bounds: BTreeMap<String, (f64, f64)>,
}

impl FeatureTable {
    pub fn new(words: Vec<String>) -> Self {
        FeatureTable {
            words: words.iter().map(|w| normalize(w)).collect(),
            ..Default::default()
        }
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn feature_names(&self) -> &[String] {
        &self.names
    }

    pub fn column(&self, name: &str) -> Option<&FeatureColumn> {
        self.columns.get(name)
    }

    pub fn value(&self, name: &str, word: &str) -> Option<f64> {
        self.columns.get(name).and_then(|c| c.get(word)).copied()
    }

    pub fn bounds(&self, name: &str) -> Option<(f64, f64)> {
        self.bounds.get(name).copied()
    }

    /// Adds or replaces a column. Every listed word must have a finite value.
    pub fn insert_column(
        &mut self,
        name: &str,
        column: FeatureColumn,
        bounds: Option<(f64, f64)>,
    ) -> Result<(), IngestError> {
        for (row, word) in self.words.iter().enumerate() {
            let value = column.get(word).copied().filter(|v| v.is_finite());
            let Some(value) = value else {
                return Err(IngestError::Malformed {
                    row: row + 1,
                    message: format!("feature {name:?} has no finite value for {word:?}"),
                });
            };
            if let Some((min, max)) = bounds {
                if value < min || value > max {
                    return Err(IngestError::OutOfBounds {
                        row: row + 1,
                        column: name.to_string(),
                        value,
                        min,
                        max,
                    });
                }
            }
        }
        if !self.columns.contains_key(name) {
            self.names.push(name.to_string());
        }
        if let Some(b) = bounds {
            self.bounds.insert(name.to_string(), b);
        }
        let column = self.words.iter().map(|w| (w.clone(), column[w])).collect();
        self.columns.insert(name.to_string(), column);
        Ok(())
    }

    /// Keeps only `words` (in the given order). Missing words are ignored.
    pub fn restrict(&self, words: &[String]) -> FeatureTable {
        let keep: Vec<String> = words
            .iter()
            .filter(|w| self.words.contains(w))
            .cloned()
            .collect();
        let columns = self
            .columns
            .iter()
            .map(|(name, col)| {
                let sub = keep.iter().map(|w| (w.clone(), col[w])).collect();
                (name.clone(), sub)
            })
            .collect();
        FeatureTable {
            words: keep,
            names: self.names.clone(),
            columns,
            bounds: self.bounds.clone(),
        }
    }

    /// Writes a comma-separated table with a header row.
    pub fn write<W: Write>(&self, out: W) -> Result<(), IngestError> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["word".to_string()];
        header.extend(self.names.iter().cloned());
        w.write_record(&header)?;
        for word in &self.words {
            let mut rec = vec![word.clone()];
            for name in &self.names {
                rec.push(self.columns[name][word].to_string());
            }
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Reads a comma-separated feature table. The first column holds words, the
/// remaining columns are numeric features named by the header row.
pub fn load_feature_table<R: Read>(
    reader: R,
    bounds: &FeatureBounds,
) -> Result<FeatureTable, IngestError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut records = rdr.records();
    let header = match records.next() {
        Some(h) => h?,
        None => return Err(IngestError::MissingHeader),
    };
    if header.len() < 2 {
        return Err(IngestError::MissingHeader);
    }
    let names: Vec<String> = header.iter().skip(1).map(|s| s.to_string()).collect();
    let mut words = Vec::new();
    let mut seen = HashSet::new();
    let mut columns: Vec<FeatureColumn> = vec![HashMap::new(); names.len()];

    for (idx, rec) in records.enumerate() {
        let rec = rec?;
        let row = idx + 1;
        if rec.len() != names.len() + 1 {
            return Err(IngestError::Malformed {
                row,
                message: format!("expected {} cells, found {}", names.len() + 1, rec.len()),
            });
        }
        let word = normalize(&rec[0]);
        if !seen.insert(word.clone()) {
            return Err(IngestError::DuplicateRow { row, word });
        }
        for (j, name) in names.iter().enumerate() {
            let cell = &rec[j + 1];
            let value = parse_finite(cell).ok_or_else(|| IngestError::NonNumericCell {
                row,
                column: name.clone(),
                value: cell.to_string(),
            })?;
            if let Some(&(min, max)) = bounds.get(name) {
                if value < min || value > max {
                    return Err(IngestError::OutOfBounds {
                        row,
                        column: name.clone(),
                        value,
                        min,
                        max,
                    });
                }
            }
            columns[j].insert(word.clone(), value);
        }
        words.push(word);
    }

    let mut table = FeatureTable::new(words);
    for (name, column) in names.iter().zip(columns) {
        table.insert_column(name, column, bounds.get(name).copied())?;
    }
    Ok(table)
}
