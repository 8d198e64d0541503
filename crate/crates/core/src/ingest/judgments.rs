use std::io::{Read, Write};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use super::IngestError;
use crate::text::{canonical_triple, normalize};

/// Column order of judgment logs.
pub const JUDGMENT_COLUMNS: [&str; 7] = [
    "session_id",
    "word_a",
    "word_b",
    "word_c",
    "odd_word",
    "rt_ms",
    "timestamp",
];

/// One odd-one-out choice on one triplet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TripletJudgment {
    pub session_id: String,
    /// Canonical (sorted) triple.
    pub triplet: [String; 3],
    pub odd_word: String,
    pub response_time_ms: f64,
    pub timestamp: DateTime<Utc>,
}

impl TripletJudgment {
    /// Canonicalizes the triple and checks that `odd_word` belongs to it.
    pub fn new(
        session_id: impl Into<String>,
        words: [&str; 3],
        odd_word: &str,
        response_time_ms: f64,
        timestamp: DateTime<Utc>,
    ) -> Result<Self, IngestError> {
        let [a, b, c] = words.map(normalize);
        let triplet = canonical_triple(&a, &b, &c);
        let odd_word = normalize(odd_word);
        if !triplet.contains(&odd_word) {
            return Err(IngestError::OddNotInTriplet {
                row: 0,
                odd: odd_word,
                triplet,
            });
        }
        if triplet[0] == triplet[1] || triplet[1] == triplet[2] {
            return Err(IngestError::Malformed {
                row: 0,
                message: format!("triplet {triplet:?} repeats a word"),
            });
        }
        if !(response_time_ms.is_finite() && response_time_ms >= 0.0) {
            return Err(IngestError::Malformed {
                row: 0,
                message: format!("response time {response_time_ms} is not a nonnegative number"),
            });
        }
        Ok(TripletJudgment {
            session_id: session_id.into(),
            triplet,
            odd_word,
            response_time_ms,
            timestamp,
        })
    }

    /// The two words that were not chosen.
    pub fn similar_pair(&self) -> (&str, &str) {
        let mut rest = self.triplet.iter().filter(|w| **w != self.odd_word);
        let a = rest.next().map(String::as_str).unwrap_or_default();
        let b = rest.next().map(String::as_str).unwrap_or_default();
        (a, b)
    }
}

fn with_row(err: IngestError, row: usize) -> IngestError {
    match err {
        IngestError::OddNotInTriplet { odd, triplet, .. } => {
            IngestError::OddNotInTriplet { row, odd, triplet }
        }
        IngestError::Malformed { message, .. } => IngestError::Malformed { row, message },
        other => other,
    }
}

/// Reads a comma-separated judgment log (see [`JUDGMENT_COLUMNS`]).
/// Lines starting with `#` are comments.
pub fn load_judgments<R: Read>(reader: R) -> Result<Vec<TripletJudgment>, IngestError> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.is_empty() {
        return Ok(Vec::new());
    }
    let mut positions = [0usize; 7];
    for (slot, name) in positions.iter_mut().zip(JUDGMENT_COLUMNS) {
        *slot = headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| IngestError::Malformed {
                row: 0,
                message: format!("missing column {name:?}"),
            })?;
    }
    let mut out = Vec::new();
    for (idx, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row = idx + 1;
        let cell = |i: usize| -> Result<&str, IngestError> {
            rec.get(positions[i]).ok_or_else(|| IngestError::Malformed {
                row,
                message: format!("missing cell {:?}", JUDGMENT_COLUMNS[i]),
            })
        };
        let rt: f64 = cell(5)?.parse().map_err(|_| IngestError::Malformed {
            row,
            message: format!("rt_ms {:?} is not numeric", rec.get(positions[5])),
        })?;
        let ts = DateTime::parse_from_rfc3339(cell(6)?)
            .map_err(|e| IngestError::Malformed {
                row,
                message: format!("timestamp: {e}"),
            })?
            .with_timezone(&Utc);
        let judgment =
            TripletJudgment::new(cell(0)?, [cell(1)?, cell(2)?, cell(3)?], cell(4)?, rt, ts)
                .map_err(|e| with_row(e, row))?;
        out.push(judgment);
    }
    Ok(out)
}

/// Writes judgments in the format read by [`load_judgments`].
pub fn write_judgments<'a, W, I>(out: W, judgments: I) -> Result<(), IngestError>
where
    W: Write,
    I: IntoIterator<Item = &'a TripletJudgment>,
{
    let mut w = csv::Writer::from_writer(out);
    w.write_record(JUDGMENT_COLUMNS)?;
    for j in judgments {
        w.write_record([
            j.session_id.as_str(),
            &j.triplet[0],
            &j.triplet[1],
            &j.triplet[2],
            &j.odd_word,
            &j.response_time_ms.to_string(),
            &j.timestamp
                .to_rfc3339_opts(chrono::SecondsFormat::Millis, true),
        ])?;
    }
    w.flush()?;
    Ok(())
}
