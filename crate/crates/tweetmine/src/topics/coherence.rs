//! UMass topic coherence and the topic-count sweep.
//!
//! For a topic's top-n words ordered by descending corpus document
//! frequency, the score sums `ln((D(w_i, w_j) + 1) / D(w_i))` over pairs
//! `i < j`, where `D` counts documents containing the word(s). The model
//! score is the average over topics. Co-occurrence needs no external
//! reference corpus, which is why this variant drives the topic-count
//! selection.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{fit, LdaConfig, TopicModel, TopicsError};
use crate::preprocess::Document;

/// Per-K coherence scores and the selected topic count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoherenceResult {
    pub per_k: BTreeMap<usize, f64>,
    pub best_k: usize,
    pub top_n: usize,
}

/// UMass coherence of a fitted model, averaged over topics, computed on
/// `docs` (normally the training documents; pass a held-out split to score
/// generalization instead).
pub fn umass_coherence(
    model: &TopicModel,
    docs: &[Document],
    top_n: usize,
) -> Result<f64, TopicsError> {
    // the distinct-word sets per document, restricted to words we will need
    let mut needed: HashSet<&str> = HashSet::new();
    let mut topic_tops: Vec<Vec<String>> = Vec::with_capacity(model.num_topics());
    for k in 0..model.num_topics() {
        let tops = model.top_words(k, top_n)?;
        topic_tops.push(tops);
    }
    for tops in &topic_tops {
        for w in tops {
            needed.insert(w.as_str());
        }
    }

    let mut doc_sets: Vec<HashSet<&str>> = Vec::with_capacity(docs.len());
    for doc in docs {
        let set: HashSet<&str> = doc
            .tokens
            .iter()
            .map(String::as_str)
            .filter(|t| needed.contains(t))
            .collect();
        doc_sets.push(set);
    }
    let mut df: HashMap<&str, u64> = HashMap::new();
    for set in &doc_sets {
        for &w in set {
            *df.entry(w).or_insert(0) += 1;
        }
    }
    let co_df = |a: &str, b: &str| -> u64 {
        doc_sets
            .iter()
            .filter(|s| s.contains(a) && s.contains(b))
            .count() as u64
    };

    let mut total = 0.0;
    for tops in &topic_tops {
        // order by descending document frequency, ties lexicographic
        let mut ordered: Vec<&str> = tops.iter().map(String::as_str).collect();
        ordered.sort_by(|a, b| {
            df.get(b)
                .unwrap_or(&0)
                .cmp(df.get(a).unwrap_or(&0))
                .then_with(|| a.cmp(b))
        });
        let mut topic_score = 0.0;
        for i in 0..ordered.len() {
            let d_i = *df.get(ordered[i]).unwrap_or(&0);
            if d_i == 0 {
                return Err(TopicsError::ZeroDocumentFrequency(ordered[i].to_string()));
            }
            for j in (i + 1)..ordered.len() {
                let d_ij = co_df(ordered[i], ordered[j]);
                topic_score += (((d_ij + 1) as f64) / d_i as f64).ln();
            }
        }
        total += topic_score;
    }
    Ok(total / model.num_topics() as f64)
}

/// Fit one model per topic count in `k_range` (seeded `base seed + K`),
/// score each with UMass coherence, and pick the argmax, preferring the
/// smallest K on ties. A K whose fit fails is recorded as absent.
pub fn sweep_k(
    docs: &[Document],
    k_range: RangeInclusive<usize>,
    cfg: &LdaConfig,
    top_n: usize,
) -> Result<CoherenceResult, TopicsError> {
    let ks: Vec<usize> = k_range.filter(|&k| k >= 1).collect();
    if ks.is_empty() {
        return Err(TopicsError::EmptyRange);
    }

    let scored: Vec<(usize, Option<f64>)> = ks
        .par_iter()
        .map(|&k| {
            let mut cfg_k = cfg.clone();
            cfg_k.k = k;
            cfg_k.seed = cfg.seed.wrapping_add(k as u64);
            let score = fit(docs, &cfg_k)
                .and_then(|model| umass_coherence(&model, docs, top_n))
                .ok();
            (k, score)
        })
        .collect();

    let mut per_k = BTreeMap::new();
    for (k, score) in scored {
        if let Some(s) = score {
            per_k.insert(k, s);
        }
    }
    // ascending iteration yields the smallest argmax on ties; scores within
    // numerical noise of the current best count as ties (distinct topic
    // counts can produce identical averages up to summation rounding)
    let mut best: Option<(usize, f64)> = None;
    for (&k, &s) in &per_k {
        let improves = match best {
            None => true,
            Some((_, best_s)) => s > best_s + 1e-9 * best_s.abs().max(1.0),
        };
        if improves {
            best = Some((k, s));
        }
    }
    let (best_k, _) = best.ok_or(TopicsError::SweepProducedNothing)?;
    Ok(CoherenceResult {
        per_k,
        best_k,
        top_n,
    })
}
