//! Shared test support: synthetic corpora drawn from the LDA generative
//! process with planted, disjoint topic vocabularies.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};

use tweetmine::preprocess::Document;

pub struct PlantedCorpus {
    pub docs: Vec<Document>,
    /// Planted dominant topic per document.
    pub doc_topic: Vec<usize>,
    /// Planted vocabulary per topic.
    pub topic_vocab: Vec<BTreeSet<String>>,
}

/// Draw a corpus from the generative process: per-document topic
/// proportions from a symmetric Dirichlet(alpha), a topic per position,
/// and a word uniform over the chosen topic's planted vocabulary.
///
/// Words are named so that lexicographic order interleaves the topic
/// vocabularies; a degenerate topic whose word distribution is uniform
/// therefore surfaces a cross-topic word mix.
pub fn planted_corpus(
    n_topics: usize,
    words_per_topic: usize,
    n_docs: usize,
    tokens_per_doc: usize,
    alpha: f64,
    seed: u64,
) -> PlantedCorpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vocab: Vec<Vec<String>> = (0..n_topics)
        .map(|t| {
            (0..words_per_topic)
                .map(|j| format!("w{j:02}x{t}"))
                .collect()
        })
        .collect();

    let mut docs = Vec::with_capacity(n_docs);
    let mut doc_topic = Vec::with_capacity(n_docs);
    for d in 0..n_docs {
        let theta = dirichlet_symmetric(n_topics, alpha, &mut rng);
        let mut counts = vec![0usize; n_topics];
        let mut tokens = Vec::with_capacity(tokens_per_doc);
        for _ in 0..tokens_per_doc {
            let z = sample_categorical(&theta, &mut rng);
            counts[z] += 1;
            let w = rng.gen_range(0..words_per_topic);
            tokens.push(vocab[z][w].clone());
        }
        let dominant = counts
            .iter()
            .enumerate()
            .max_by_key(|(t, c)| (**c, std::cmp::Reverse(*t)))
            .map(|(t, _)| t)
            .unwrap();
        doc_topic.push(dominant);
        docs.push(Document {
            tweet_id: format!("doc{d}"),
            tokens,
            country: None,
            brands: BTreeSet::new(),
        });
    }
    PlantedCorpus {
        docs,
        doc_topic,
        topic_vocab: vocab
            .into_iter()
            .map(|words| words.into_iter().collect())
            .collect(),
    }
}

/// A planted corpus whose topics are exact mirrors of one another: topic t's
/// j-th document uses the same word-index sequence as topic 0's j-th
/// document, renamed into topic t's vocabulary. Every per-topic document
/// frequency pattern is therefore identical, which pins the coherence of a
/// cleanly recovered topic to a single shared value regardless of which
/// vocabulary it covers.
pub fn mirrored_planted_corpus(
    n_topics: usize,
    words_per_topic: usize,
    docs_per_topic: usize,
    tokens_per_doc: usize,
    seed: u64,
) -> PlantedCorpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vocab: Vec<Vec<String>> = (0..n_topics)
        .map(|t| {
            (0..words_per_topic)
                .map(|j| format!("w{j:02}x{t}"))
                .collect()
        })
        .collect();
    let blueprints: Vec<Vec<usize>> = (0..docs_per_topic)
        .map(|_| {
            (0..tokens_per_doc)
                .map(|_| rng.gen_range(0..words_per_topic))
                .collect()
        })
        .collect();
    let mut docs = Vec::with_capacity(n_topics * docs_per_topic);
    let mut doc_topic = Vec::with_capacity(n_topics * docs_per_topic);
    for (j, blueprint) in blueprints.iter().enumerate() {
        for t in 0..n_topics {
            docs.push(Document {
                tweet_id: format!("doc{t}_{j}"),
                tokens: blueprint.iter().map(|&w| vocab[t][w].clone()).collect(),
                country: None,
                brands: BTreeSet::new(),
            });
            doc_topic.push(t);
        }
    }
    PlantedCorpus {
        docs,
        doc_topic,
        topic_vocab: vocab
            .into_iter()
            .map(|words| words.into_iter().collect())
            .collect(),
    }
}

fn dirichlet_symmetric(k: usize, alpha: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let gamma = Gamma::new(alpha, 1.0).expect("valid shape");
    let mut draws: Vec<f64> = (0..k).map(|_| gamma.sample(rng)).collect();
    let sum: f64 = draws.iter().sum();
    if sum <= 0.0 || !sum.is_finite() {
        // tiny shapes can underflow every component; fall back to a one-hot
        let hot = rng.gen_range(0..k);
        for (i, d) in draws.iter_mut().enumerate() {
            *d = if i == hot { 1.0 } else { 0.0 };
        }
        return draws;
    }
    for d in &mut draws {
        *d /= sum;
    }
    draws
}

fn sample_categorical(weights: &[f64], rng: &mut ChaCha8Rng) -> usize {
    let total: f64 = weights.iter().sum();
    let mut target = rng.gen::<f64>() * total;
    for (i, w) in weights.iter().enumerate() {
        target -= w;
        if target <= 0.0 {
            return i;
        }
    }
    weights.len() - 1
}

/// Fraction of fitted-topic top words that belong to a single planted
/// vocabulary, averaged over fitted topics.
pub fn top_word_purity(
    model: &tweetmine::topics::TopicModel,
    planted: &[BTreeSet<String>],
    top_n: usize,
) -> f64 {
    let k = model.num_topics();
    let mut pure = 0usize;
    let mut total = 0usize;
    for t in 0..k {
        let tops = model.top_words(t, top_n).unwrap();
        let best = planted
            .iter()
            .map(|vocab| tops.iter().filter(|w| vocab.contains(*w)).count())
            .max()
            .unwrap_or(0);
        pure += best;
        total += tops.len();
    }
    pure as f64 / total as f64
}
