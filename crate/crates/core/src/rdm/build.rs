use std::collections::HashMap;

use super::{pair_count, Rdm, RdmError, RdmKind};
use crate::ingest::{EmbeddingTable, FeatureColumn, TripletJudgment};

fn cosine_distance(a: &[f64], b: &[f64]) -> f64 {
    let mut dot = 0.0;
    let mut na = 0.0;
    let mut nb = 0.0;
    for (x, y) in a.iter().zip(b) {
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    // sqrt(na * nb) rather than sqrt(na) * sqrt(nb): identical vectors then
    // give a cosine of exactly 1.
    let cos = (dot / (na * nb).sqrt()).clamp(-1.0, 1.0);
    1.0 - cos
}

/// Cosine-distance RDM over row vectors.
pub fn vectors_rdm(labels: &[String], rows: &[Vec<f64>]) -> Result<Rdm, RdmError> {
    if labels.len() != rows.len() {
        return Err(RdmError::Shape {
            n: labels.len(),
            expected: labels.len(),
            found: rows.len(),
        });
    }
    if let Some(first) = rows.first() {
        if rows.iter().any(|r| r.len() != first.len()) {
            return Err(RdmError::DimensionMismatch);
        }
    }
    for (label, row) in labels.iter().zip(rows) {
        if row.iter().all(|v| *v == 0.0) {
            return Err(RdmError::ZeroVector(label.clone()));
        }
    }
    Rdm::from_pairs(labels.to_vec(), RdmKind::Cosine, |i, j| {
        cosine_distance(&rows[i], &rows[j])
    })
}

/// `1 - cos(v_i, v_j)` for the given words of an embedding table.
pub fn embedding_rdm(table: &EmbeddingTable, words: &[String]) -> Result<Rdm, RdmError> {
    let rows: Vec<Vec<f64>> = words
        .iter()
        .map(|w| {
            table
                .get(w)
                .map(<[f64]>::to_vec)
                .ok_or_else(|| RdmError::MissingWord(w.clone()))
        })
        .collect::<Result<_, _>>()?;
    vectors_rdm(words, &rows)
}

/// `|x_i - x_j|` for a scalar feature.
pub fn feature_rdm(column: &FeatureColumn, words: &[String]) -> Result<Rdm, RdmError> {
    let xs: Vec<f64> = words
        .iter()
        .map(|w| {
            column
                .get(w)
                .copied()
                .ok_or_else(|| RdmError::MissingWord(w.clone()))
        })
        .collect::<Result<_, _>>()?;
    Rdm::from_pairs(words.to_vec(), RdmKind::Euclidean1d, |i, j| {
        (xs[i] - xs[j]).abs()
    })
}

/// Behavioral RDM from odd-one-out judgments.
///
/// In each judgment the two unchosen words get similarity code 1 and each
/// of them paired with the odd word gets 0. A pair's similarity is the mean
/// code over every judgment containing it; dissimilarity is one minus that.
pub fn behavioral_rdm(judgments: &[TripletJudgment], words: &[String]) -> Result<Rdm, RdmError> {
    let n = words.len();
    if n < 2 {
        return Err(RdmError::TooFewConditions(n));
    }
    let index: HashMap<&str, usize> = words
        .iter()
        .enumerate()
        .map(|(i, w)| (w.as_str(), i))
        .collect();
    if index.len() != n {
        let mut sorted = words.to_vec();
        sorted.sort();
        let dup = sorted
            .windows(2)
            .find(|w| w[0] == w[1])
            .map(|w| w[0].clone())
            .unwrap_or_default();
        return Err(RdmError::DuplicateLabel(dup));
    }
    let mut similar = vec![0u32; n * n];
    let mut seen = vec![0u32; n * n];
    let slot = |a: usize, b: usize| if a < b { a * n + b } else { b * n + a };

    for j in judgments {
        let idx: Vec<usize> = j
            .triplet
            .iter()
            .map(|w| {
                index
                    .get(w.as_str())
                    .copied()
                    .ok_or_else(|| RdmError::UnknownWord(w.clone()))
            })
            .collect::<Result<_, _>>()?;
        let odd = index
            .get(j.odd_word.as_str())
            .copied()
            .ok_or_else(|| RdmError::UnknownWord(j.odd_word.clone()))?;
        for (p, &a) in idx.iter().enumerate() {
            for &b in &idx[p + 1..] {
                let s = slot(a, b);
                seen[s] += 1;
                if a != odd && b != odd {
                    similar[s] += 1;
                }
            }
        }
    }

    let mut missing = Vec::new();
    for a in 0..n {
        for b in (a + 1)..n {
            if seen[a * n + b] == 0 {
                missing.push((words[a].clone(), words[b].clone()));
            }
        }
    }
    if !missing.is_empty() {
        debug_assert!(missing.len() <= pair_count(n));
        return Err(RdmError::UnobservedPairs(missing));
    }
    Rdm::from_pairs(words.to_vec(), RdmKind::Behavioral, |a, b| {
        let s = a * n + b;
        1.0 - f64::from(similar[s]) / f64::from(seen[s])
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design::generate_triplets;
    use chrono::{TimeZone, Utc};

    fn words(ws: &[&str]) -> Vec<String> {
        ws.iter().map(|w| w.to_string()).collect()
    }

    fn judge(t: [&str; 3], odd: &str) -> TripletJudgment {
        TripletJudgment::new("s", t, odd, 100.0, Utc.timestamp_opt(0, 0).unwrap()).unwrap()
    }

    #[test]
    fn cosine_extremes() {
        let table = EmbeddingTable::from_entries(
            "m",
            [
                ("a".to_string(), vec![1.0, 2.0, 3.0]),
                ("b".to_string(), vec![1.0, 2.0, 3.0]),
                ("c".to_string(), vec![-1.0, -2.0, -3.0]),
                ("d".to_string(), vec![3.0, 0.0, -1.0]),
            ],
        )
        .unwrap();
        let rdm = embedding_rdm(&table, &words(&["a", "b", "c", "d"])).unwrap();
        assert_eq!(rdm.get(0, 1), 0.0);
        assert_eq!(rdm.get(0, 2), 2.0);
        assert!((rdm.get(0, 3) - 1.0).abs() < 1e-15);
        assert!(matches!(
            embedding_rdm(&table, &words(&["a", "zz"])),
            Err(RdmError::MissingWord(_))
        ));
    }

    #[test]
    fn feature_distances() {
        let col: FeatureColumn = [("a", 1.0), ("b", 4.0), ("c", 9.0)]
            .iter()
            .map(|(w, v)| (w.to_string(), *v))
            .collect();
        let rdm = feature_rdm(&col, &words(&["a", "b", "c"])).unwrap();
        assert_eq!(rdm.get(0, 1), 3.0);
        assert_eq!(rdm.get(0, 2), 8.0);
        assert_eq!(rdm.get(1, 2), 5.0);

        let constant: FeatureColumn = [("a", 2.0), ("b", 2.0)]
            .iter()
            .map(|(w, v)| (w.to_string(), *v))
            .collect();
        let flat = feature_rdm(&constant, &words(&["a", "b"])).unwrap();
        assert_eq!(flat.get(0, 1), 0.0);

        let ratings: FeatureColumn = [("haus", 8.1), ("idee", 2.0)]
            .iter()
            .map(|(w, v)| (w.to_string(), *v))
            .collect();
        let r = feature_rdm(&ratings, &words(&["haus", "idee"])).unwrap();
        assert!((r.get(0, 1) - 6.1).abs() < 1e-12);
        assert!(feature_rdm(&ratings, &words(&["haus", "baum"])).is_err());
    }

    #[test]
    fn single_judgment_coding() {
        let rdm = behavioral_rdm(&[judge(["a", "b", "c"], "c")], &words(&["a", "b", "c"])).unwrap();
        assert_eq!(rdm.get(0, 1), 0.0);
        assert_eq!(rdm.get(0, 2), 1.0);
        assert_eq!(rdm.get(1, 2), 1.0);
    }

    #[test]
    fn unobserved_pairs_and_unknown_words() {
        let err = behavioral_rdm(
            &[judge(["a", "b", "c"], "c")],
            &words(&["a", "b", "c", "d"]),
        )
        .unwrap_err();
        match err {
            RdmError::UnobservedPairs(pairs) => assert_eq!(pairs.len(), 3),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            behavioral_rdm(&[judge(["a", "b", "x"], "x")], &words(&["a", "b"])),
            Err(RdmError::UnknownWord(_))
        ));
    }

    #[test]
    fn full_design_averages_n_minus_two_codes() {
        let ws: Vec<String> = (0..8).map(|i| format!("w{i}")).collect();
        let triplets = generate_triplets(&ws).unwrap();
        // always pick the lexicographically largest word as odd
        let js: Vec<TripletJudgment> = triplets
            .iter()
            .map(|t| judge([&t[0], &t[1], &t[2]], &t[2]))
            .collect();
        let rdm = behavioral_rdm(&js, &ws).unwrap();
        // pair (w0, w1) is similar whenever the third word is larger: 6 of 6.
        assert_eq!(rdm.get(0, 1), 0.0);
        // pair (w6, w7): w7 is always the odd one, never similar.
        assert_eq!(rdm.get(6, 7), 1.0);
        // pair (w0, w3): similar when the third word is w4..w7, 4 of 6.
        assert!((rdm.get(0, 3) - (1.0 - 4.0 / 6.0)).abs() < 1e-15);
    }

    #[test]
    fn judgment_order_and_sessions_do_not_matter() {
        let ws = words(&["a", "b", "c", "d"]);
        let mut js = vec![
            judge(["a", "b", "c"], "a"),
            judge(["a", "b", "d"], "d"),
            judge(["a", "c", "d"], "c"),
            judge(["b", "c", "d"], "b"),
            judge(["a", "b", "c"], "c"),
        ];
        let first = behavioral_rdm(&js, &ws).unwrap();
        js.reverse();
        for (i, j) in js.iter_mut().enumerate() {
            j.session_id = format!("other{i}");
        }
        assert_eq!(behavioral_rdm(&js, &ws).unwrap(), first);
    }

    #[test]
    fn cosine_is_scale_invariant() {
        let entries: Vec<(String, Vec<f64>)> = (0..6)
            .map(|i| {
                let x = i as f64;
                (format!("w{i}"), vec![x.sin() + 1.5, x.cos(), 0.3 * x - 1.0])
            })
            .collect();
        let scaled: Vec<(String, Vec<f64>)> = entries
            .iter()
            .map(|(w, v)| (w.clone(), v.iter().map(|x| x * 7.25).collect()))
            .collect();
        let ws: Vec<String> = entries.iter().map(|e| e.0.clone()).collect();
        let a = embedding_rdm(&EmbeddingTable::from_entries("a", entries).unwrap(), &ws).unwrap();
        let b = embedding_rdm(&EmbeddingTable::from_entries("b", scaled).unwrap(), &ws).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!((x - y).abs() < 1e-12);
        }
    }
}
