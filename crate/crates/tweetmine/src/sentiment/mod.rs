//! Lexicon-and-rule sentiment scoring (the VADER rule set) with three-way
//! polarity classification.
//!
//! Scoring runs on raw tweet text: capitalization, punctuation, emoticons,
//! and emoji all carry signal, so this module deliberately consumes the
//! unpreprocessed text while the topic-modeling path consumes normalized
//! tokens.

mod lexicon;
mod scorer;

pub use lexicon::{SentimentLexicon, LexiconError, VADER_LEXICON_TSV};

use serde::{Deserialize, Serialize};

/// Compound-score threshold separating positive/negative from neutral.
pub const POLARITY_THRESHOLD: f64 = 0.05;

/// Per-text sentiment proportions plus the rule-adjusted compound score.
///
/// `pos + neu + neg` is 1 (within float noise) whenever any token scored;
/// all four fields are 0 for text with no tokens.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SentimentScore {
    pub pos: f64,
    pub neu: f64,
    pub neg: f64,
    pub compound: f64,
}

impl SentimentScore {
    pub const ZERO: SentimentScore = SentimentScore {
        pos: 0.0,
        neu: 0.0,
        neg: 0.0,
        compound: 0.0,
    };

    pub fn polarity(&self) -> Polarity {
        classify(self)
    }
}

/// Discrete sentiment label from thresholding the compound score.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    Positive,
    Neutral,
    Negative,
}

impl Polarity {
    pub fn as_str(self) -> &'static str {
        match self {
            Polarity::Positive => "positive",
            Polarity::Neutral => "neutral",
            Polarity::Negative => "negative",
        }
    }
}

impl std::fmt::Display for Polarity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Score raw text against the lexicon and rules.
pub fn score(text: &str, lex: &SentimentLexicon) -> SentimentScore {
    scorer::polarity_scores(text, lex)
}

/// Three-way classification: positive iff compound >= 0.05, negative iff
/// compound <= -0.05, neutral otherwise. Both boundaries are inclusive.
pub fn classify(score: &SentimentScore) -> Polarity {
    if score.compound >= POLARITY_THRESHOLD {
        Polarity::Positive
    } else if score.compound <= -POLARITY_THRESHOLD {
        Polarity::Negative
    } else {
        Polarity::Neutral
    }
}

/// Tag preprocessed tokens that appear in the sentiment lexicon with the
/// sign of their valence. Tokens absent from the lexicon are skipped.
pub fn emotional_words<'a>(
    tokens: &'a [String],
    lex: &SentimentLexicon,
) -> Vec<(&'a str, Polarity)> {
    tokens
        .iter()
        .filter_map(|t| {
            lex.valence(t).map(|v| {
                let tag = if v > 0.0 {
                    Polarity::Positive
                } else if v < 0.0 {
                    Polarity::Negative
                } else {
                    Polarity::Neutral
                };
                (t.as_str(), tag)
            })
        })
        .collect()
}
