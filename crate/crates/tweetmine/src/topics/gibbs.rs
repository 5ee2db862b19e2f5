//! The collapsed Gibbs sampler.
//!
//! State is the per-position topic assignment plus three count tables. One
//! sweep resamples every position in document order from the conditional
//!
//! ```text
//! p(z = k | rest) ∝ (n_dk + alpha) * (n_kw + eta) / (n_k + V * eta)
//! ```
//!
//! with the position's own assignment removed from the counts first.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{LdaConfig, TopicModel, TopicsError, Vocab};
use crate::preprocess::Document;

/// A single sampler chain. Drive it with [`GibbsSampler::sweep`] and convert
/// to a [`TopicModel`] when done; [`GibbsSampler::snapshot`] gives the state
/// mid-run for invariant checks.
pub struct GibbsSampler {
    cfg: LdaConfig,
    vocab: Vocab,
    docs: Vec<Vec<u32>>,
    z: Vec<Vec<u32>>,
    doc_topic: Vec<u32>,  // D x K
    word_topic: Vec<u32>, // V x K
    topic_total: Vec<u32>,
    rng: ChaCha8Rng,
    weights: Vec<f64>,
}

impl GibbsSampler {
    /// Map documents into the vocabulary and initialize assignments
    /// uniformly at random from the seed.
    pub fn new(documents: &[Document], cfg: &LdaConfig) -> Result<GibbsSampler, TopicsError> {
        cfg.validate()?;
        if documents.is_empty() {
            return Err(TopicsError::EmptyCorpus);
        }
        for (d, document) in documents.iter().enumerate() {
            if document.tokens.is_empty() {
                return Err(TopicsError::EmptyDocument(d));
            }
        }
        let vocab = Vocab::from_docs(documents);
        let docs: Vec<Vec<u32>> = documents
            .iter()
            .map(|d| {
                d.tokens
                    .iter()
                    .map(|t| vocab.index_of(t).expect("token in vocab"))
                    .collect()
            })
            .collect();

        let k = cfg.k;
        let v = vocab.len();
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut doc_topic = vec![0u32; docs.len() * k];
        let mut word_topic = vec![0u32; v * k];
        let mut topic_total = vec![0u32; k];
        let mut z = Vec::with_capacity(docs.len());
        for (d, doc) in docs.iter().enumerate() {
            let mut zs = Vec::with_capacity(doc.len());
            for &w in doc {
                let t = rng.gen_range(0..k) as u32;
                zs.push(t);
                doc_topic[d * k + t as usize] += 1;
                word_topic[w as usize * k + t as usize] += 1;
                topic_total[t as usize] += 1;
            }
            z.push(zs);
        }
        Ok(GibbsSampler {
            cfg: cfg.clone(),
            vocab,
            docs,
            z,
            doc_topic,
            word_topic,
            topic_total,
            rng,
            weights: vec![0.0; k],
        })
    }

    pub fn vocab(&self) -> &Vocab {
        &self.vocab
    }

    /// Resample every token assignment once.
    pub fn sweep(&mut self) {
        let k = self.cfg.k;
        let v_eta = self.vocab.len() as f64 * self.cfg.eta;
        let alpha = self.cfg.alpha;
        let eta = self.cfg.eta;
        for d in 0..self.docs.len() {
            let doc_row = d * k;
            for n in 0..self.docs[d].len() {
                let w = self.docs[d][n] as usize;
                let word_row = w * k;
                let old = self.z[d][n] as usize;

                self.doc_topic[doc_row + old] -= 1;
                self.word_topic[word_row + old] -= 1;
                self.topic_total[old] -= 1;

                let mut total = 0.0;
                for t in 0..k {
                    let weight = (self.doc_topic[doc_row + t] as f64 + alpha)
                        * (self.word_topic[word_row + t] as f64 + eta)
                        / (self.topic_total[t] as f64 + v_eta);
                    self.weights[t] = weight;
                    total += weight;
                }
                let mut target = self.rng.gen::<f64>() * total;
                let mut new = k - 1;
                for (t, &weight) in self.weights.iter().enumerate() {
                    target -= weight;
                    if target <= 0.0 {
                        new = t;
                        break;
                    }
                }

                self.z[d][n] = new as u32;
                self.doc_topic[doc_row + new] += 1;
                self.word_topic[word_row + new] += 1;
                self.topic_total[new] += 1;
            }
        }
    }

    /// Total token-assignment updates performed by one sweep.
    pub fn tokens_per_sweep(&self) -> usize {
        self.docs.iter().map(Vec::len).sum()
    }

    /// Clone the current state into a model (for mid-run inspection).
    pub fn snapshot(&self) -> TopicModel {
        TopicModel::from_assignments(
            self.cfg.clone(),
            self.vocab.clone(),
            self.docs.clone(),
            self.z.clone(),
        )
        .expect("sampler state is consistent")
    }

    pub fn into_model(self) -> TopicModel {
        TopicModel::from_assignments(self.cfg, self.vocab, self.docs, self.z)
            .expect("sampler state is consistent")
    }
}
