//! Differential conformance against the reference scorer.
//!
//! `fixtures/vader_reference_scores.json` holds inputs with the reference
//! implementation's outputs (pos/neu/neg rounded to 3 decimals, compound to
//! 4). Raw scores here must match within rounding distance, so any rule or
//! tokenization drift fails loudly.

use serde::Deserialize;
use tweetmine::sentiment::{score, SentimentLexicon};

#[derive(Deserialize)]
struct ReferenceCase {
    text: String,
    pos: f64,
    neu: f64,
    neg: f64,
    compound: f64,
}

fn reference_cases() -> Vec<ReferenceCase> {
    let path = concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/tests/fixtures/vader_reference_scores.json"
    );
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

// reference values are rounded; allow that rounding plus float noise
const PROPORTION_TOL: f64 = 5.1e-4;
const COMPOUND_TOL: f64 = 5.1e-5;

#[test]
fn matches_reference_scorer_on_all_cases() {
    let lex = SentimentLexicon::bundled();
    let cases = reference_cases();
    assert!(cases.len() >= 300, "fixture unexpectedly small");
    let mut failures = Vec::new();
    for case in &cases {
        let s = score(&case.text, lex);
        let bad = (s.pos - case.pos).abs() > PROPORTION_TOL
            || (s.neu - case.neu).abs() > PROPORTION_TOL
            || (s.neg - case.neg).abs() > PROPORTION_TOL
            || (s.compound - case.compound).abs() > COMPOUND_TOL;
        if bad {
            failures.push(format!(
                "{:?}: got (pos {:.4} neu {:.4} neg {:.4} compound {:.5}), want (pos {} neu {} neg {} compound {})",
                case.text, s.pos, s.neu, s.neg, s.compound,
                case.pos, case.neu, case.neg, case.compound
            ));
        }
    }
    assert!(
        failures.is_empty(),
        "{} of {} cases diverged:\n{}",
        failures.len(),
        cases.len(),
        failures.join("\n")
    );
}
