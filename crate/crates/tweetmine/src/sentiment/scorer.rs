//! The sentiment rule engine.
//!
//! Rule set and constants follow the published VADER scorer so that its
//! documented example outputs reproduce exactly: per-token lexicon valence,
//! ALL-CAPS emphasis (0.733), degree modifiers within a three-token window
//! damped by distance (x0.95, x0.9), negation flip (x-0.74) over the
//! preceding trigram, "but" clause reweighting (x0.5 before / x1.5 after),
//! idiom overrides, punctuation amplification, and compound normalization
//! s / sqrt(s^2 + 15).

use super::lexicon::{SentimentLexicon, CAPS_INCR, NEGATION_SCALAR};
use super::SentimentScore;

const PUNCTUATION: &[char] = &[
    '!', '"', '#', '$', '%', '&', '\'', '(', ')', '*', '+', ',', '-', '.', '/', ':', ';',
    '<', '=', '>', '?', '@', '[', '\\', ']', '^', '_', '`', '{', '|', '}', '~',
];

const NORMALIZE_ALPHA: f64 = 15.0;
const EXCLAMATION_INCR: f64 = 0.292;
const QUESTION_INCR: f64 = 0.18;
const QUESTION_CAP: f64 = 0.96;
const BUT_BEFORE: f64 = 0.5;
const BUT_AFTER: f64 = 1.5;
const NEVER_SO_BOOST: f64 = 1.25;
const DAMP_TWO_BACK: f64 = 0.95;
const DAMP_THREE_BACK: f64 = 0.9;

pub(super) fn polarity_scores(text: &str, lex: &SentimentLexicon) -> SentimentScore {
    // replace single-codepoint emoji with their descriptions, inserting a
    // space before the description when the previous character was not one
    let mut translated = String::with_capacity(text.len());
    let mut prev_space = true;
    for c in text.chars() {
        if let Some(description) = lex.emoji_description(c) {
            if !prev_space {
                translated.push(' ');
            }
            translated.push_str(description);
            prev_space = false;
        } else {
            translated.push(c);
            prev_space = c == ' ';
        }
    }
    let text = translated.trim();

    let words: Vec<String> = text.split_whitespace().map(strip_punc_if_word).collect();
    let words_lower: Vec<String> = words.iter().map(|w| w.to_lowercase()).collect();
    let is_cap_diff = allcap_differential(&words);

    let mut sentiments: Vec<f64> = Vec::with_capacity(words.len());
    for i in 0..words.len() {
        // modifier words hold no valence of their own
        if lex.booster(&words_lower[i]).is_some()
            || (i < words.len() - 1 && words_lower[i] == "kind" && words_lower[i + 1] == "of")
        {
            sentiments.push(0.0);
            continue;
        }
        sentiments.push(token_valence(lex, &words, &words_lower, is_cap_diff, i));
    }

    but_check(&words_lower, &mut sentiments);
    score_valence(&sentiments, text)
}

/// Strip leading/trailing ASCII punctuation unless that would reduce the
/// token to two or fewer characters (which indicates an emoticon like ":)").
fn strip_punc_if_word(token: &str) -> String {
    let stripped = token.trim_matches(PUNCTUATION);
    if stripped.chars().count() <= 2 {
        token.to_string()
    } else {
        stripped.to_string()
    }
}

/// True when the token has at least one cased character and every cased
/// character is uppercase.
fn is_all_caps(token: &str) -> bool {
    let mut cased = false;
    for c in token.chars() {
        if c.is_lowercase() {
            return false;
        }
        if c.is_uppercase() {
            cased = true;
        }
    }
    cased
}

/// Some but not all tokens are ALL CAPS.
fn allcap_differential(words: &[String]) -> bool {
    let allcaps = words.iter().filter(|w| is_all_caps(w)).count();
    allcaps > 0 && allcaps < words.len()
}

/// Booster/dampener contribution of a preceding word, sign-aligned with the
/// target valence and amplified when the modifier itself is ALL CAPS.
fn scalar_inc_dec(word: &str, word_lower: &str, valence: f64, is_cap_diff: bool, lex: &SentimentLexicon) -> f64 {
    let Some(mut scalar) = lex.booster(word_lower) else {
        return 0.0;
    };
    if valence < 0.0 {
        scalar = -scalar;
    }
    if is_all_caps(word) && is_cap_diff {
        if valence > 0.0 {
            scalar += CAPS_INCR;
        } else {
            scalar -= CAPS_INCR;
        }
    }
    scalar
}

fn token_valence(
    lex: &SentimentLexicon,
    words: &[String],
    words_lower: &[String],
    is_cap_diff: bool,
    i: usize,
) -> f64 {
    let item_lower = &words_lower[i];
    let Some(base) = lex.valence(item_lower) else {
        return 0.0;
    };
    let mut valence = base;

    // "no" directly before a lexicon word acts as a negator, not a word
    if item_lower == "no" && i != words.len() - 1 && lex.contains(&words_lower[i + 1]) {
        valence = 0.0;
    }
    if (i > 0 && words_lower[i - 1] == "no")
        || (i > 1 && words_lower[i - 2] == "no")
        || (i > 2
            && words_lower[i - 3] == "no"
            && (words_lower[i - 1] == "or" || words_lower[i - 1] == "nor"))
    {
        valence = base * NEGATION_SCALAR;
    }

    if is_all_caps(&words[i]) && is_cap_diff {
        if valence > 0.0 {
            valence += CAPS_INCR;
        } else {
            valence -= CAPS_INCR;
        }
    }

    for back in 0..3usize {
        // look back up to three tokens, skipping lexicon words; damp the
        // modifier effect with distance
        if i > back && !lex.contains(&words_lower[i - (back + 1)]) {
            let mut s = scalar_inc_dec(
                &words[i - (back + 1)],
                &words_lower[i - (back + 1)],
                valence,
                is_cap_diff,
                lex,
            );
            if back == 1 && s != 0.0 {
                s *= DAMP_TWO_BACK;
            }
            if back == 2 && s != 0.0 {
                s *= DAMP_THREE_BACK;
            }
            valence += s;
            valence = negation_check(lex, valence, words_lower, back, i);
            if back == 2 {
                valence = special_idioms_check(lex, valence, words_lower, i);
            }
        }
    }

    least_check(lex, valence, words_lower, i)
}

fn negation_check(
    lex: &SentimentLexicon,
    mut valence: f64,
    words_lower: &[String],
    back: usize,
    i: usize,
) -> f64 {
    match back {
        0 => {
            if lex.is_negation(&words_lower[i - 1]) {
                valence *= NEGATION_SCALAR;
            }
        }
        1 => {
            if words_lower[i - 2] == "never"
                && (words_lower[i - 1] == "so" || words_lower[i - 1] == "this")
            {
                valence *= NEVER_SO_BOOST;
            } else if words_lower[i - 2] == "without" && words_lower[i - 1] == "doubt" {
                // no change
            } else if lex.is_negation(&words_lower[i - 2]) {
                valence *= NEGATION_SCALAR;
            }
        }
        2 => {
            // grouping mirrors the reference scorer: "so"/"this" one back
            // triggers the boost even without a leading "never"
            if (words_lower[i - 3] == "never"
                && (words_lower[i - 2] == "so" || words_lower[i - 2] == "this"))
                || (words_lower[i - 1] == "so" || words_lower[i - 1] == "this")
            {
                valence *= NEVER_SO_BOOST;
            } else if words_lower[i - 3] == "without"
                && (words_lower[i - 2] == "doubt" || words_lower[i - 1] == "doubt")
            {
                // no change
            } else if lex.is_negation(&words_lower[i - 3]) {
                valence *= NEGATION_SCALAR;
            }
        }
        _ => {}
    }
    valence
}

fn special_idioms_check(
    lex: &SentimentLexicon,
    mut valence: f64,
    words_lower: &[String],
    i: usize,
) -> f64 {
    // i > 2 is guaranteed: this only runs for the three-back window
    let onezero = format!("{} {}", words_lower[i - 1], words_lower[i]);
    let twoonezero = format!(
        "{} {} {}",
        words_lower[i - 2],
        words_lower[i - 1],
        words_lower[i]
    );
    let twoone = format!("{} {}", words_lower[i - 2], words_lower[i - 1]);
    let threetwoone = format!(
        "{} {} {}",
        words_lower[i - 3],
        words_lower[i - 2],
        words_lower[i - 1]
    );
    let threetwo = format!("{} {}", words_lower[i - 3], words_lower[i - 2]);

    for seq in [&onezero, &twoonezero, &twoone, &threetwoone, &threetwo] {
        if let Some(v) = lex.special_case(seq) {
            valence = v;
            break;
        }
    }
    if words_lower.len() - 1 > i {
        let zeroone = format!("{} {}", words_lower[i], words_lower[i + 1]);
        if let Some(v) = lex.special_case(&zeroone) {
            valence = v;
        }
    }
    if words_lower.len() - 1 > i + 1 {
        let zeroonetwo = format!(
            "{} {} {}",
            words_lower[i],
            words_lower[i + 1],
            words_lower[i + 2]
        );
        if let Some(v) = lex.special_case(&zeroonetwo) {
            valence = v;
        }
    }

    // multi-word boosters such as "sort of" / "kind of"
    for n_gram in [&threetwoone, &threetwo, &twoone] {
        if let Some(b) = lex.booster(n_gram) {
            valence += b;
        }
    }
    valence
}

fn least_check(
    lex: &SentimentLexicon,
    mut valence: f64,
    words_lower: &[String],
    i: usize,
) -> f64 {
    if i > 1 && !lex.contains(&words_lower[i - 1]) && words_lower[i - 1] == "least" {
        if words_lower[i - 2] != "at" && words_lower[i - 2] != "very" {
            valence *= NEGATION_SCALAR;
        }
    } else if i > 0 && !lex.contains(&words_lower[i - 1]) && words_lower[i - 1] == "least" {
        valence *= NEGATION_SCALAR;
    }
    valence
}

/// Reweight around a contrastive "but": halve sentiments before it,
/// amplify the ones after. Matches the reference scorer's in-place update,
/// which locates each value by first occurrence; duplicate values therefore
/// rescale the earliest equal entry.
fn but_check(words_lower: &[String], sentiments: &mut [f64]) {
    let Some(but_idx) = words_lower.iter().position(|w| w == "but") else {
        return;
    };
    for idx in 0..sentiments.len() {
        let value = sentiments[idx];
        let si = sentiments
            .iter()
            .position(|&x| x == value)
            .expect("value exists");
        if si < but_idx {
            sentiments[si] = value * BUT_BEFORE;
        } else if si > but_idx {
            sentiments[si] = value * BUT_AFTER;
        }
    }
}

fn punctuation_emphasis(text: &str) -> f64 {
    let ep_count = text.matches('!').count().min(4);
    let ep = ep_count as f64 * EXCLAMATION_INCR;
    let qm_count = text.matches('?').count();
    let qm = if qm_count > 1 {
        if qm_count <= 3 {
            qm_count as f64 * QUESTION_INCR
        } else {
            QUESTION_CAP
        }
    } else {
        0.0
    };
    ep + qm
}

fn normalize(score: f64) -> f64 {
    let norm = score / (score * score + NORMALIZE_ALPHA).sqrt();
    norm.clamp(-1.0, 1.0)
}

fn score_valence(sentiments: &[f64], text: &str) -> SentimentScore {
    if sentiments.is_empty() {
        return SentimentScore::ZERO;
    }
    let mut sum_s: f64 = sentiments.iter().sum();
    let amplifier = punctuation_emphasis(text);
    if sum_s > 0.0 {
        sum_s += amplifier;
    } else if sum_s < 0.0 {
        sum_s -= amplifier;
    }
    let compound = normalize(sum_s);

    let mut pos_sum = 0.0;
    let mut neg_sum = 0.0;
    let mut neu_count = 0.0;
    for &s in sentiments {
        if s > 0.0 {
            pos_sum += s + 1.0; // the +1 counts the word itself, like a neutral
        }
        if s < 0.0 {
            neg_sum += s - 1.0;
        }
        if s == 0.0 {
            neu_count += 1.0;
        }
    }
    if pos_sum > neg_sum.abs() {
        pos_sum += amplifier;
    } else if pos_sum < neg_sum.abs() {
        neg_sum -= amplifier;
    }
    let total = pos_sum + neg_sum.abs() + neu_count;
    SentimentScore {
        pos: (pos_sum / total).abs(),
        neu: (neu_count / total).abs(),
        neg: (neg_sum / total).abs(),
        compound,
    }
}
