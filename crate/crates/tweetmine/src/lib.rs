//! Text-mining engine for tweet corpora.
//!
//! The pipeline has five stages, each usable as a library module and wired
//! together by the `tweetmine` binary:
//!
//! 1. [`corpus`] — CSV ingestion, free-text location resolution against a
//!    gazetteer, and vaccine-brand tagging.
//! 2. [`preprocess`] — entity stripping, token normalization, lemmatization,
//!    bigram merging, and the short-document filter.
//! 3. [`sentiment`] — a lexicon-and-rule sentiment scorer (the VADER rule set)
//!    applied to raw tweet text, with three-way polarity classification.
//! 4. [`topics`] — LDA via collapsed Gibbs sampling, UMass coherence, and a
//!    coherence-driven sweep over the number of topics.
//! 5. [`analytics`] — frequency tables, word-cloud weights, per-brand
//!    emotional vocabularies, country/brand sentiment distributions, and
//!    per-polarity topic rankings.
//!
//! Every stage is deterministic: identical inputs, configuration, and seed
//! produce byte-identical outputs.

pub mod analytics;
pub mod config;
pub mod corpus;
pub mod manifest;
pub mod preprocess;
pub mod report;
pub mod sentiment;
pub mod snapshot;
pub mod topics;
