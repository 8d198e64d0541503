use std::collections::HashSet;

use super::DesignError;
use crate::text::word_order;

/// A canonical (sorted) word triple.
pub type Triple = [String; 3];

/// All `C(n, 3)` triples of `words`, canonicalized and in lexicographic
/// order.
pub fn generate_triplets(words: &[String]) -> Result<Vec<Triple>, DesignError> {
    if words.len() < 3 {
        return Err(DesignError::TooFewWords {
            needed: 3,
            got: words.len(),
        });
    }
    let mut seen = HashSet::with_capacity(words.len());
    for w in words {
        if !seen.insert(w.as_str()) {
            return Err(DesignError::DuplicateWord(w.clone()));
        }
    }
    let mut sorted: Vec<&String> = words.iter().collect();
    sorted.sort_by(|a, b| word_order(a, b));
    let n = sorted.len();
    let mut out = Vec::with_capacity(n * (n - 1) * (n - 2) / 6);
    for i in 0..n {
        for j in (i + 1)..n {
            for k in (j + 1)..n {
                out.push([sorted[i].clone(), sorted[j].clone(), sorted[k].clone()]);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    fn words(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("w{i:02}")).collect()
    }

    #[test]
    fn small_counts() {
        assert_eq!(generate_triplets(&words(3)).unwrap().len(), 1);
        let four = generate_triplets(&words(4)).unwrap();
        assert_eq!(four.len(), 4);
        assert_eq!(four[0], ["w00", "w01", "w02"]);
        assert_eq!(four[3], ["w01", "w02", "w03"]);
    }

    #[test]
    fn forty_words() {
        let ts = generate_triplets(&words(40)).unwrap();
        assert_eq!(ts.len(), 9880);
        let mut pairs: HashMap<(&str, &str), usize> = HashMap::new();
        for t in &ts {
            assert!(t[0] < t[1] && t[1] < t[2]);
            for (a, b) in [(0, 1), (0, 2), (1, 2)] {
                *pairs.entry((&t[a], &t[b])).or_default() += 1;
            }
        }
        assert_eq!(pairs.len(), 780);
        assert!(pairs.values().all(|&c| c == 38));
        let mut sorted = ts.clone();
        sorted.sort();
        assert_eq!(sorted, ts);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            generate_triplets(&words(2)),
            Err(DesignError::TooFewWords { got: 2, .. })
        ));
        let dup = vec!["a".to_string(), "b".to_string(), "a".to_string()];
        assert!(matches!(
            generate_triplets(&dup),
            Err(DesignError::DuplicateWord(_))
        ));
    }
}
