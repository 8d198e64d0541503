use rayon::prelude::*;

use super::{IngestError, Lexicon};

/// Neighbour count of the OLD20 measure.
pub const OLD_NEIGHBOURS: usize = 20;

/// Levenshtein distance over Unicode scalar values (unit costs).
pub fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    levenshtein_chars(&a, &b)
}

fn levenshtein_chars(a: &[char], b: &[char]) -> usize {
    if a.is_empty() {
        return b.len();
    }
    if b.is_empty() {
        return a.len();
    }
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut curr = vec![0; b.len() + 1];
    for (i, ca) in a.iter().enumerate() {
        curr[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(ca != cb);
            curr[j + 1] = sub.min(prev[j + 1] + 1).min(curr[j] + 1);
        }
        std::mem::swap(&mut prev, &mut curr);
    }
    prev[b.len()]
}

/// Mean edit distance from `word` to its `n` closest lexicon entries,
/// excluding entries identical to `word`.
pub fn compute_old_n(word: &str, lexicon: &Lexicon, n: usize) -> Result<f64, IngestError> {
    let probe: Vec<char> = word.chars().collect();
    let mut distances: Vec<usize> = lexicon
        .words()
        .iter()
        .filter(|w| w.as_str() != word)
        .map(|w| {
            let w: Vec<char> = w.chars().collect();
            levenshtein_chars(&probe, &w)
        })
        .collect();
    if n == 0 || distances.len() < n {
        return Err(IngestError::TooFewNeighbours {
            word: word.to_string(),
            available: distances.len(),
            needed: n,
        });
    }
    if distances.len() > n {
        distances.select_nth_unstable(n - 1);
    }
    let sum: usize = distances[..n].iter().sum();
    Ok(sum as f64 / n as f64)
}

/// OLD20 of `word` against `lexicon`.
pub fn compute_old20(word: &str, lexicon: &Lexicon) -> Result<f64, IngestError> {
    compute_old_n(word, lexicon, OLD_NEIGHBOURS)
}

/// OLD20 for many words in parallel, results in input order.
pub fn old20_batch(words: &[String], lexicon: &Lexicon) -> Vec<Result<f64, IngestError>> {
    words
        .par_iter()
        .map(|w| compute_old20(w, lexicon))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Full-matrix Wagner–Fischer, kept separate from the two-row version.
    fn oracle_distance(a: &str, b: &str) -> usize {
        let a: Vec<char> = a.chars().collect();
        let b: Vec<char> = b.chars().collect();
        let mut d = vec![vec![0usize; b.len() + 1]; a.len() + 1];
        for (i, row) in d.iter_mut().enumerate() {
            row[0] = i;
        }
        for j in 0..=b.len() {
            d[0][j] = j;
        }
        for i in 1..=a.len() {
            for j in 1..=b.len() {
                let cost = if a[i - 1] == b[j - 1] { 0 } else { 1 };
                d[i][j] = (d[i - 1][j] + 1)
                    .min(d[i][j - 1] + 1)
                    .min(d[i - 1][j - 1] + cost);
            }
        }
        d[a.len()][b.len()]
    }

    fn oracle_old20(word: &str, lexicon: &[&str]) -> f64 {
        let mut all: Vec<usize> = lexicon
            .iter()
            .filter(|w| **w != word)
            .map(|w| oracle_distance(word, w))
            .collect();
        all.sort_unstable();
        all[..20].iter().sum::<usize>() as f64 / 20.0
    }

    #[test]
    fn distance_basics() {
        assert_eq!(levenshtein("kitten", "sitting"), 3);
        assert_eq!(levenshtein("", "abc"), 3);
        assert_eq!(levenshtein("abc", ""), 3);
        assert_eq!(levenshtein("Straße", "Strasse"), 2);
        assert_eq!(levenshtein("same", "same"), 0);
    }

    #[test]
    fn all_single_substitutions_give_one() {
        let probe = "abcde";
        let mut words = Vec::new();
        for pos in 0..5 {
            for c in ['x', 'y', 'z', 'w'] {
                let mut chars: Vec<char> = probe.chars().collect();
                chars[pos] = c;
                words.push((chars.into_iter().collect::<String>(), 1u64));
            }
        }
        assert_eq!(words.len(), 20);
        let lex = Lexicon::from_counts(words).unwrap();
        assert_eq!(compute_old20(probe, &lex).unwrap(), 1.0);
    }

    #[test]
    fn synthetic_lexicon_matches_oracle() {
        let words = [
            "cat", "bat", "hat", "cart", "cast", "coat", "scat", "at", "ca", "cut", "cot", "dog",
            "catalog", "act", "tac", "chat", "that", "what", "mat", "rat", "sat", "cap", "can",
            "car", "cab",
        ];
        assert_eq!(words.len(), 25);
        let lex = Lexicon::from_counts(words.iter().map(|w| (*w, 1u64))).unwrap();
        let got = compute_old20("cat", &lex).unwrap();
        assert_eq!(got, oracle_old20("cat", &words));
        // 24 neighbours after dropping "cat" itself.
        assert!(got > 1.0 && got < 2.0);
    }

    #[test]
    fn too_small_lexicon() {
        let lex = Lexicon::from_counts((0..10).map(|i| (format!("w{i}"), 1u64))).unwrap();
        assert!(matches!(
            compute_old20("cat", &lex),
            Err(IngestError::TooFewNeighbours { available: 10, .. })
        ));
    }

    #[test]
    fn identical_entry_is_excluded() {
        let mut words: Vec<(String, u64)> = (0..20).map(|i| (format!("ab{i:02}"), 1)).collect();
        words.push(("abcd".into(), 1));
        let lex = Lexicon::from_counts(words).unwrap();
        // exactly 20 other entries, each at distance 2.
        assert_eq!(compute_old20("abcd", &lex).unwrap(), 2.0);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;
        use rand::seq::SliceRandom;

        fn word() -> impl Strategy<Value = String> {
            "[abcde]{1,7}"
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(48))]
            #[test]
            fn matches_oracle_and_ignores_order(
                probe in word(),
                lexicon in prop::collection::hash_set(word(), 22..200),
                seed in any::<u64>(),
            ) {
                let mut words: Vec<String> = lexicon.into_iter().collect();
                words.sort();
                let refs: Vec<&str> = words.iter().map(|s| s.as_str()).collect();
                let eligible = refs.iter().filter(|w| **w != probe).count();
                prop_assume!(eligible >= 20);
                let lex = Lexicon::from_counts(words.iter().map(|w| (w.as_str(), 1u64))).unwrap();
                let got = compute_old20(&probe, &lex).unwrap();
                prop_assert_eq!(got, oracle_old20(&probe, &refs));

                let mut shuffled = words.clone();
                shuffled.shuffle(&mut crate::seed::rng(seed));
                let lex2 = Lexicon::from_counts(shuffled.iter().map(|w| (w.as_str(), 1u64))).unwrap();
                prop_assert_eq!(compute_old20(&probe, &lex2).unwrap(), got);
            }

            #[test]
            fn two_row_distance_matches_full_matrix(a in "[a-zäöü]{0,12}", b in "[a-zäöü]{0,12}") {
                prop_assert_eq!(levenshtein(&a, &b), oracle_distance(&a, &b));
            }
        }
    }
}
