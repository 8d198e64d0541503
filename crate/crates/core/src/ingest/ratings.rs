use std::collections::BTreeMap;
use std::io::{Read, Write};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use super::{FeatureColumn, IngestError};
use crate::text::normalize;

pub const RATING_COLUMNS: [&str; 5] = ["session_id", "word", "rating", "rt_ms", "timestamp"];

/// Lowest and highest point of the concreteness scale.
pub const RATING_SCALE: (u8, u8) = (1, 9);

/// One concreteness rating of one word.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatingRecord {
    pub session_id: String,
    pub word: String,
    pub rating: u8,
    pub response_time_ms: f64,
    pub timestamp: DateTime<Utc>,
}

fn malformed(row: usize, message: String) -> IngestError {
    IngestError::Malformed { row, message }
}

/// Reads a comma-separated rating log (see [`RATING_COLUMNS`]). Ratings must
/// be integers on the 1–9 scale. Lines starting with `#` are comments.
pub fn load_ratings<R: Read>(reader: R) -> Result<Vec<RatingRecord>, IngestError> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.is_empty() {
        return Ok(Vec::new());
    }
    let mut pos = [0usize; 5];
    for (slot, name) in pos.iter_mut().zip(RATING_COLUMNS) {
        *slot = headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| malformed(0, format!("missing column {name:?}")))?;
    }
    let mut out = Vec::new();
    for (idx, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row = idx + 1;
        let cell = |i: usize| rec.get(pos[i]).unwrap_or("");
        let rating: u8 = cell(2)
            .parse()
            .map_err(|_| malformed(row, format!("rating {:?} is not an integer", cell(2))))?;
        if !(RATING_SCALE.0..=RATING_SCALE.1).contains(&rating) {
            return Err(malformed(row, format!("rating {rating} is outside 1..9")));
        }
        let rt: f64 = cell(3)
            .parse()
            .map_err(|_| malformed(row, format!("rt_ms {:?} is not numeric", cell(3))))?;
        let timestamp = DateTime::parse_from_rfc3339(cell(4))
            .map_err(|e| malformed(row, format!("timestamp: {e}")))?
            .with_timezone(&Utc);
        let word = normalize(cell(1));
        if word.is_empty() {
            return Err(malformed(row, "empty word".into()));
        }
        out.push(RatingRecord {
            session_id: cell(0).to_string(),
            word,
            rating,
            response_time_ms: rt,
            timestamp,
        });
    }
    Ok(out)
}

pub fn write_ratings<'a, W, I>(out: W, ratings: I) -> Result<(), IngestError>
where
    W: Write,
    I: IntoIterator<Item = &'a RatingRecord>,
{
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RATING_COLUMNS)?;
    for r in ratings {
        w.write_record([
            r.session_id.as_str(),
            &r.word,
            &r.rating.to_string(),
            &r.response_time_ms.to_string(),
            &r.timestamp
                .to_rfc3339_opts(chrono::SecondsFormat::Millis, true),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Per-word mean rating across sessions.
pub fn mean_ratings(ratings: &[RatingRecord]) -> FeatureColumn {
    let mut acc: BTreeMap<&str, (u64, u64)> = BTreeMap::new();
    for r in ratings {
        let e = acc.entry(r.word.as_str()).or_default();
        e.0 += u64::from(r.rating);
        e.1 += 1;
    }
    acc.into_iter()
        .map(|(w, (sum, n))| (w.to_string(), sum as f64 / n as f64))
        .collect()
}
