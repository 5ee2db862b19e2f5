//! Sentiment lexicon resources: word valences, emoji descriptions, degree
//! modifiers, negation tokens, and valence-overriding idioms.

use std::collections::{HashMap, HashSet};
use std::path::Path;
use std::sync::OnceLock;

use thiserror::Error;

/// Bundled word-valence table (`token<TAB>mean valence`, ~7.5k entries).
pub const VADER_LEXICON_TSV: &str = include_str!("../../resources/vader_lexicon.tsv");
/// Bundled emoji-to-description table.
pub const EMOJI_MAP_TSV: &str = include_str!("../../resources/emoji_map.tsv");
const BOOSTERS_TSV: &str = include_str!("../../resources/boosters.tsv");
const NEGATIONS_TXT: &str = include_str!("../../resources/negations.txt");
const SPECIAL_CASES_TSV: &str = include_str!("../../resources/special_cases.tsv");

/// ALL-CAPS emphasis increment.
pub(crate) const CAPS_INCR: f64 = 0.733;
/// Negation flip factor.
pub(crate) const NEGATION_SCALAR: f64 = -0.74;

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("bad lexicon line {line}: {reason}")]
    BadLine { line: usize, reason: String },
    #[error("valence {value} for {token:?} outside [-4, 4]")]
    ValenceOutOfRange { token: String, value: f64 },
}

/// Immutable scoring tables. Build once, share freely across threads.
#[derive(Debug, Clone)]
pub struct SentimentLexicon {
    valences: HashMap<String, f64>,
    emoji: HashMap<char, String>,
    boosters: HashMap<String, f64>,
    negations: HashSet<String>,
    special_cases: HashMap<String, f64>,
}

impl SentimentLexicon {
    /// The bundled lexicon, loaded once per process.
    pub fn bundled() -> &'static SentimentLexicon {
        static LEX: OnceLock<SentimentLexicon> = OnceLock::new();
        LEX.get_or_init(|| {
            SentimentLexicon::from_tsv_data(VADER_LEXICON_TSV, EMOJI_MAP_TSV)
                .expect("bundled lexicon is valid")
        })
    }

    /// Load replacement valence/emoji tables from files, keeping the bundled
    /// rule tables.
    pub fn from_files(lexicon: &Path, emoji: Option<&Path>) -> Result<SentimentLexicon, LexiconError> {
        let lex_data = read_file(lexicon)?;
        let emoji_data = match emoji {
            Some(p) => read_file(p)?,
            None => EMOJI_MAP_TSV.to_string(),
        };
        SentimentLexicon::from_tsv_data(&lex_data, &emoji_data)
    }

    /// Parse `token<TAB>valence` and `emoji<TAB>description` tables.
    pub fn from_tsv_data(lexicon: &str, emoji: &str) -> Result<SentimentLexicon, LexiconError> {
        let mut valences = HashMap::new();
        for (idx, raw) in lexicon.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split('\t');
            let token = fields.next().unwrap_or_default();
            let value: f64 = fields
                .next()
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| LexiconError::BadLine {
                    line: idx + 1,
                    reason: "expected token<TAB>valence".to_string(),
                })?;
            if !(-4.0..=4.0).contains(&value) {
                return Err(LexiconError::ValenceOutOfRange {
                    token: token.to_string(),
                    value,
                });
            }
            valences.insert(token.to_string(), value);
        }

        let mut emoji_map = HashMap::new();
        for raw in emoji.lines() {
            let line = raw.trim_end_matches(['\r', '\n']);
            if line.is_empty() {
                continue;
            }
            if let Some((key, description)) = line.trim().split_once('\t') {
                // only single-codepoint emoji are replaceable during the
                // character scan; longer sequences stay in the text
                let mut chars = key.chars();
                if let (Some(c), None) = (chars.next(), chars.next()) {
                    emoji_map.insert(c, description.to_string());
                }
            }
        }

        let mut boosters = HashMap::new();
        for (idx, raw) in BOOSTERS_TSV.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (token, incr) = line.split_once('\t').ok_or_else(|| LexiconError::BadLine {
                line: idx + 1,
                reason: "expected token<TAB>increment".to_string(),
            })?;
            boosters.insert(token.to_string(), incr.parse().unwrap_or(0.0));
        }

        let negations = NEGATIONS_TXT
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(str::to_string)
            .collect();

        let mut special_cases = HashMap::new();
        for raw in SPECIAL_CASES_TSV.lines() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some((phrase, value)) = line.split_once('\t') {
                special_cases.insert(phrase.to_string(), value.parse().unwrap_or(0.0));
            }
        }

        Ok(SentimentLexicon {
            valences,
            emoji: emoji_map,
            boosters,
            negations,
            special_cases,
        })
    }

    pub fn valence(&self, token: &str) -> Option<f64> {
        self.valences.get(token).copied()
    }

    pub fn contains(&self, token: &str) -> bool {
        self.valences.contains_key(token)
    }

    pub fn len(&self) -> usize {
        self.valences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.valences.is_empty()
    }

    /// Iterate over `(token, valence)` entries in unspecified order.
    pub fn entries(&self) -> impl Iterator<Item = (&str, f64)> {
        self.valences.iter().map(|(k, &v)| (k.as_str(), v))
    }

    pub(crate) fn emoji_description(&self, c: char) -> Option<&str> {
        self.emoji.get(&c).map(String::as_str)
    }

    pub(crate) fn booster(&self, token_lower: &str) -> Option<f64> {
        self.boosters.get(token_lower).copied()
    }

    pub(crate) fn is_negation(&self, token_lower: &str) -> bool {
        self.negations.contains(token_lower) || token_lower.contains("n't")
    }

    pub(crate) fn special_case(&self, phrase: &str) -> Option<f64> {
        self.special_cases.get(phrase).copied()
    }
}

fn read_file(path: &Path) -> Result<String, LexiconError> {
    std::fs::read_to_string(path).map_err(|source| LexiconError::Io {
        path: path.display().to_string(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_lexicon_loads_with_expected_shape() {
        let lex = SentimentLexicon::bundled();
        assert!(lex.len() > 7000, "got {}", lex.len());
        assert_eq!(lex.valence("smart"), Some(1.7));
        assert_eq!(lex.valence("handsome"), Some(2.2));
        assert_eq!(lex.valence("funny"), Some(1.9));
        assert_eq!(lex.valence("sux"), Some(-1.5));
        assert_eq!(lex.valence(":)"), Some(2.0));
        assert!(lex.valence("zzzznotaword").is_none());
    }

    #[test]
    fn all_valences_within_bounds() {
        let lex = SentimentLexicon::bundled();
        for (token, v) in lex.entries() {
            assert!((-4.0..=4.0).contains(&v), "{token:?} has valence {v}");
        }
    }

    #[test]
    fn booster_increments_are_exactly_plus_minus_0293() {
        let lex = SentimentLexicon::bundled();
        for (token, incr) in &lex.boosters {
            assert!(
                *incr == 0.293 || *incr == -0.293,
                "{token:?} has increment {incr}"
            );
        }
    }

    #[test]
    fn negations_include_contractions() {
        let lex = SentimentLexicon::bundled();
        assert!(lex.is_negation("not"));
        assert!(lex.is_negation("never"));
        assert!(lex.is_negation("couldn't"));
        assert!(lex.is_negation("shan't"));
        assert!(!lex.is_negation("knot"));
    }

    #[test]
    fn emoji_map_translates_single_codepoints() {
        let lex = SentimentLexicon::bundled();
        assert_eq!(
            lex.emoji_description('\u{1F601}'),
            Some("beaming face with smiling eyes")
        );
        assert_eq!(lex.emoji_description('x'), None);
    }

    #[test]
    fn out_of_range_valence_rejected() {
        let err = SentimentLexicon::from_tsv_data("huge\t4.5\n", "");
        assert!(matches!(err, Err(LexiconError::ValenceOutOfRange { .. })));
    }
}
