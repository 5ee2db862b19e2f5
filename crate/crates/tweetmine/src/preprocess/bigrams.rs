//! Corpus-wide bigram detection and merging.
//!
//! Two-phase: a counting pass over every adjacent token pair, then a
//! left-to-right, non-overlapping rewrite of accepted pairs as single
//! underscore-joined tokens ("side effect" -> "side_effect").

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

/// Accepted phrases with their collocation scores, strongest first
/// (ties broken alphabetically).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PhraseTable {
    pub entries: Vec<(String, f64)>,
}

impl PhraseTable {
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn contains(&self, phrase: &str) -> bool {
        self.entries.iter().any(|(p, _)| p == phrase)
    }
}

/// Find adjacent pairs worth merging and rewrite the corpus.
///
/// A pair (a, b) is accepted when it occurs at least `min_count` times and
/// its collocation score
///
/// ```text
/// score(a, b) = (count(a, b) - min_count) * V / (count(a) * count(b))
/// ```
///
/// reaches `threshold`, where `V` is the number of distinct unigram types.
/// Rewriting is a single left-to-right pass per document, so accepted pairs
/// never overlap and each merge shortens the document by exactly one token.
pub fn detect_bigrams(
    docs: &[Vec<String>],
    min_count: u64,
    threshold: f64,
) -> (PhraseTable, Vec<Vec<String>>) {
    let mut unigrams: HashMap<&str, u64> = HashMap::new();
    let mut pairs: HashMap<(&str, &str), u64> = HashMap::new();
    for doc in docs {
        for token in doc {
            *unigrams.entry(token.as_str()).or_insert(0) += 1;
        }
        for pair in doc.windows(2) {
            *pairs.entry((pair[0].as_str(), pair[1].as_str())).or_insert(0) += 1;
        }
    }
    let vocab_size = unigrams.len() as f64;

    let mut accepted: HashMap<(&str, &str), f64> = HashMap::new();
    for (&(a, b), &count) in &pairs {
        if count < min_count {
            continue;
        }
        let score =
            (count - min_count) as f64 * vocab_size / (unigrams[a] * unigrams[b]) as f64;
        if score >= threshold {
            accepted.insert((a, b), score);
        }
    }

    let rewritten: Vec<Vec<String>> = docs
        .iter()
        .map(|doc| {
            let mut out = Vec::with_capacity(doc.len());
            let mut i = 0;
            while i < doc.len() {
                if i + 1 < doc.len()
                    && accepted.contains_key(&(doc[i].as_str(), doc[i + 1].as_str()))
                {
                    out.push(format!("{}_{}", doc[i], doc[i + 1]));
                    i += 2;
                } else {
                    out.push(doc[i].clone());
                    i += 1;
                }
            }
            out
        })
        .collect();

    let mut entries: Vec<(String, f64)> = accepted
        .into_iter()
        .map(|((a, b), score)| (format!("{a}_{b}"), score))
        .collect();
    entries.sort_by(|x, y| {
        y.1.partial_cmp(&x.1)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| x.0.cmp(&y.0))
    });

    (PhraseTable { entries }, rewritten)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(words: &[&str]) -> Vec<String> {
        words.iter().map(|w| w.to_string()).collect()
    }

    #[test]
    fn merges_planted_collocation() {
        // count(side) = 55, count(effect) = 52, count(side, effect) = 50
        let mut docs: Vec<Vec<String>> = Vec::new();
        for _ in 0..50 {
            docs.push(toks(&["side", "effect"]));
        }
        for _ in 0..5 {
            docs.push(toks(&["side", "note"]));
        }
        for _ in 0..2 {
            docs.push(toks(&["effect", "size"]));
        }
        let (table, rewritten) = detect_bigrams(&docs, 5, 0.05);
        assert!(table.contains("side_effect"), "table: {:?}", table.entries);
        assert_eq!(rewritten[0], vec!["side_effect".to_string()]);
    }

    #[test]
    fn below_min_count_leaves_docs_unchanged() {
        let docs = vec![toks(&["a", "b"]), toks(&["c", "d"])];
        let (table, rewritten) = detect_bigrams(&docs, 5, 0.0);
        assert!(table.is_empty());
        assert_eq!(rewritten, docs);
    }

    #[test]
    fn single_doc_repeated_pair_accepted() {
        let docs = vec![toks(&["a", "b", "a", "b"])];
        let (table, rewritten) = detect_bigrams(&docs, 2, 0.0);
        assert!(table.contains("a_b"));
        assert_eq!(rewritten[0], vec!["a_b".to_string(), "a_b".to_string()]);
    }

    #[test]
    fn rewrite_is_non_overlapping_left_to_right() {
        // both (a,a) pairs qualify, but the pass must not reuse the middle token
        let docs = vec![toks(&["a", "a", "a"]); 10];
        let (table, rewritten) = detect_bigrams(&docs, 2, 0.0);
        assert!(table.contains("a_a"));
        assert_eq!(rewritten[0], vec!["a_a".to_string(), "a".to_string()]);
    }

    #[test]
    fn each_merge_shortens_doc_by_one() {
        let docs = vec![
            toks(&["x", "y", "z", "x", "y"]),
            toks(&["x", "y", "q"]),
            toks(&["x", "y"]),
            toks(&["x", "y"]),
        ];
        let (table, rewritten) = detect_bigrams(&docs, 2, 0.0);
        let merges: usize = table.len();
        assert!(merges > 0);
        let before: usize = docs.iter().map(Vec::len).sum();
        let after: usize = rewritten.iter().map(Vec::len).sum();
        let merged_occurrences = before - after;
        let pair_occurrences = docs
            .iter()
            .flat_map(|d| d.windows(2))
            .filter(|w| table.contains(&format!("{}_{}", w[0], w[1])))
            .count();
        assert!(merged_occurrences <= pair_occurrences);
    }
}
