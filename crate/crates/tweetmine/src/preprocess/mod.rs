//! Text normalization: entity stripping, tokenization, lemmatization, and
//! the short-document filter.
//!
//! The chain runs per tweet in this order: [`strip_entities`], then
//! [`tokenize_normalize`], then the corpus-wide bigram pass
//! ([`bigrams::detect_bigrams`]), then [`filter_short`]. Every step is a pure
//! function of its inputs; the whole chain is deterministic and
//! order-preserving.

mod bigrams;
mod lemma;

pub use bigrams::{detect_bigrams, PhraseTable};

use std::collections::{BTreeSet, HashMap, HashSet};
use std::path::Path;
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{BrandId, Tweet};

/// Bundled stopword list. Derived from the 318-word Glasgow IR list, minus
/// words the bundled lemmatizer can produce from non-stopword surface forms
/// ("got" -> "get"); dropping those would make the token stream depend on how
/// many times it was normalized.
pub const STOPWORDS_TXT: &str = include_str!("../../resources/stopwords.txt");
/// Bundled irregular-form table consulted before the suffix rules.
pub const LEMMA_EXCEPTIONS_TSV: &str = include_str!("../../resources/lemma_exceptions.tsv");

/// Documents shorter than this many tokens are filtered out.
pub const MIN_DOC_TOKENS: usize = 4;

#[derive(Debug, Error)]
pub enum PreprocessError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("bad lemma line {line}: expected surface<TAB>lemma")]
    BadLemmaLine { line: usize },
}

/// A preprocessed token sequence tied back to its source tweet.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub tweet_id: String,
    pub tokens: Vec<String>,
    pub country: Option<String>,
    pub brands: BTreeSet<BrandId>,
}

impl Document {
    pub fn from_tweet(tweet: &Tweet, tokens: Vec<String>) -> Document {
        Document {
            tweet_id: tweet.id.clone(),
            tokens,
            country: tweet.country.clone(),
            brands: tweet.brands.clone(),
        }
    }
}

/// Predicate deciding which tokens count as words worth keeping.
#[derive(Debug, Clone, Default)]
pub enum CharsetFilter {
    /// Keep tokens consisting entirely of ASCII letters.
    #[default]
    AsciiAlpha,
    /// Keep only tokens found in the supplied wordlist.
    Wordlist(HashSet<String>),
}

impl CharsetFilter {
    fn keep(&self, token: &str) -> bool {
        match self {
            CharsetFilter::AsciiAlpha => {
                !token.is_empty() && token.bytes().all(|b| b.is_ascii_lowercase())
            }
            CharsetFilter::Wordlist(words) => words.contains(token),
        }
    }
}

/// Stopword list, lemma table, and word filter used by normalization.
#[derive(Debug, Clone)]
pub struct Lexicons {
    stopwords: HashSet<String>,
    lemma_exceptions: HashMap<String, String>,
    charset: CharsetFilter,
}

impl Lexicons {
    pub fn bundled() -> Result<Lexicons, PreprocessError> {
        Ok(Lexicons {
            stopwords: parse_wordlist(STOPWORDS_TXT),
            lemma_exceptions: parse_lemma_table(LEMMA_EXCEPTIONS_TSV)?,
            charset: CharsetFilter::AsciiAlpha,
        })
    }

    pub fn with_stopwords_file(mut self, path: &Path) -> Result<Lexicons, PreprocessError> {
        self.stopwords = parse_wordlist(&read_file(path)?);
        Ok(self)
    }

    /// Extend the stopword list with a user-supplied "meaningless words" file.
    pub fn with_extra_stopwords(mut self, path: &Path) -> Result<Lexicons, PreprocessError> {
        self.stopwords.extend(parse_wordlist(&read_file(path)?));
        Ok(self)
    }

    pub fn with_lemma_file(mut self, path: &Path) -> Result<Lexicons, PreprocessError> {
        self.lemma_exceptions = parse_lemma_table(&read_file(path)?)?;
        Ok(self)
    }

    /// Restrict tokens to an English wordlist instead of the ASCII-letter
    /// predicate.
    pub fn with_wordlist_file(mut self, path: &Path) -> Result<Lexicons, PreprocessError> {
        self.charset = CharsetFilter::Wordlist(parse_wordlist(&read_file(path)?));
        Ok(self)
    }

    pub fn is_stopword(&self, token: &str) -> bool {
        self.stopwords.contains(token)
    }

    pub fn stopword_count(&self) -> usize {
        self.stopwords.len()
    }

    /// Lemma lookup: exception table first, then the suffix rules, iterated
    /// to a fixed point so the result never lemmatizes further
    /// ("blessings" -> "blessing" -> "bless"). Unknown shapes pass through.
    pub fn lemmatize(&self, word: &str) -> String {
        let mut current = word.to_string();
        for _ in 0..5 {
            let next = match self.lemma_exceptions.get(&current) {
                Some(lemma) => lemma.clone(),
                None => lemma::apply_suffix_rules(&current),
            };
            if next == current {
                break;
            }
            current = next;
        }
        current
    }
}

fn parse_wordlist(data: &str) -> HashSet<String> {
    data.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| l.to_lowercase())
        .collect()
}

fn parse_lemma_table(data: &str) -> Result<HashMap<String, String>, PreprocessError> {
    let mut table = HashMap::new();
    for (idx, raw) in data.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (surface, lemma) = line
            .split_once('\t')
            .ok_or(PreprocessError::BadLemmaLine { line: idx + 1 })?;
        table.insert(
            surface.trim().to_lowercase(),
            lemma.trim().to_lowercase(),
        );
    }
    Ok(table)
}

fn read_file(path: &Path) -> Result<String, PreprocessError> {
    std::fs::read_to_string(path).map_err(|source| PreprocessError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn entity_regexes() -> &'static [Regex; 4] {
    static RE: OnceLock<[Regex; 4]> = OnceLock::new();
    RE.get_or_init(|| {
        [
            // URLs, including bare t.co shorteners
            Regex::new(r"(?:https?://\S+|\bt\.co/\S+)").unwrap(),
            // @-handles
            Regex::new(r"@\w+").unwrap(),
            // #hashtags
            Regex::new(r"#\w+").unwrap(),
            // pictographic emoji plus presentation/skin-tone modifiers,
            // regional-indicator pairs, keycaps, variation selectors, ZWJ
            Regex::new(concat!(
                "[\\p{Extended_Pictographic}\\p{Emoji_Presentation}",
                "\u{FE0E}\u{FE0F}\u{200D}\u{20E3}",
                "\u{1F1E6}-\u{1F1FF}\u{1F3FB}-\u{1F3FF}]"
            ))
            .unwrap(),
        ]
    })
}

/// Remove Twitter handles, URLs, emoji, and hashtags, then collapse runs of
/// whitespace to single spaces.
pub fn strip_entities(text: &str) -> String {
    let mut cleaned = text.to_string();
    for re in entity_regexes() {
        cleaned = re.replace_all(&cleaned, " ").into_owned();
    }
    cleaned.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Split on non-alphanumeric boundaries, lowercase, drop stopwords and
/// digit-only tokens and tokens failing the word filter, then lemmatize.
///
/// The stopword filter runs on the surface form and again on the lemma
/// ("toes" -> "to" is dropped); combined with the fixed-point lemmatizer
/// this makes normalization idempotent on its own output.
pub fn tokenize_normalize(text: &str, lex: &Lexicons) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .filter(|t| !t.bytes().all(|b| b.is_ascii_digit()))
        .filter(|t| !lex.is_stopword(t))
        .filter(|t| lex.charset.keep(t))
        .map(|t| lex.lemmatize(&t))
        .filter(|t| !lex.is_stopword(t))
        .collect()
}

/// Drop documents with fewer than [`MIN_DOC_TOKENS`] tokens. Returns the
/// surviving documents and the number dropped.
pub fn filter_short(docs: Vec<Document>) -> (Vec<Document>, u64) {
    let before = docs.len();
    let kept: Vec<Document> = docs
        .into_iter()
        .filter(|d| d.tokens.len() >= MIN_DOC_TOKENS)
        .collect();
    let dropped = (before - kept.len()) as u64;
    (kept, dropped)
}
