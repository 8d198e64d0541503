//! Word normalization and canonical ordering.

use std::cmp::Ordering;

use unicode_normalization::UnicodeNormalization;

/// NFC-normalizes a word and strips surrounding whitespace.
pub fn normalize(word: &str) -> String {
    word.trim().nfc().collect()
}

/// Fixed total order on words: code-point order of the NFC form.
///
/// Inputs are expected to be normalized already; this is plain `str` ordering
/// and exists so call sites say what they mean.
pub fn word_order(a: &str, b: &str) -> Ordering {
    a.cmp(b)
}

/// Sorts three words into canonical order.
pub fn canonical_triple(a: &str, b: &str, c: &str) -> [String; 3] {
    let mut t = [a.to_string(), b.to_string(), c.to_string()];
    t.sort_by(|x, y| word_order(x, y));
    t
}

/// Length in Unicode scalar values.
pub fn char_len(word: &str) -> usize {
    word.chars().count()
}
