//! Suffix-rule lemmatizer fallback: plural rules (-ies/-es/-s) followed by
//! verb-inflection rules (-eed/-ed/-ing) with the standard stem fixups
//! (add 'e' after at/bl/iz, undouble trailing consonants, add 'e' to short
//! CVC stems). Irregular forms are handled upstream by the exception table.

/// Apply the suffix rules to a lowercase word. Unknown shapes pass through
/// unchanged.
pub fn apply_suffix_rules(word: &str) -> String {
    let w = word;
    let n = w.len();

    // plural endings
    if n >= 5 && w.ends_with("ies") {
        return format!("{}y", &w[..n - 3]);
    }
    if n >= 5 && w.ends_with("ied") {
        return format!("{}y", &w[..n - 3]);
    }
    if w.ends_with("sses") || w.ends_with("zzes") {
        return w[..n - 2].to_string();
    }
    if w.ends_with("ches") || w.ends_with("shes") || w.ends_with("xes") || w.ends_with("oes") {
        return w[..n - 2].to_string();
    }
    if n >= 4 && w.ends_with("es") {
        return w[..n - 1].to_string();
    }
    if n >= 4
        && w.ends_with('s')
        && !w.ends_with("ss")
        && !w.ends_with("us")
        && !w.ends_with("is")
    {
        return w[..n - 1].to_string();
    }

    // verb endings
    if w.ends_with("eed") {
        // strip only the 'd', and only when the prefix has a vowel-consonant
        // sequence ("agreed" -> "agree", but "feed" stays)
        if measure(&w[..n - 3]) > 0 {
            return w[..n - 1].to_string();
        }
        return w.to_string();
    }
    if n >= 5 && w.ends_with("ed") {
        let stem = &w[..n - 2];
        if stem.len() >= 3 && has_vowel(stem) {
            return fixup_stem(stem);
        }
        return w.to_string();
    }
    if n >= 6 && w.ends_with("ing") {
        let stem = &w[..n - 3];
        if stem.len() >= 3 && has_vowel(stem) {
            return fixup_stem(stem);
        }
        return w.to_string();
    }

    w.to_string()
}

/// Repair a stem left over after removing -ed/-ing.
fn fixup_stem(stem: &str) -> String {
    // -ate/-ble/-ize verbs lose their final e before inflection; restore it
    // ("vaccinat" -> "vaccinate") unless the prefix is too short to be such
    // a verb ("beat" stays)
    if let Some(prefix) = stem
        .strip_suffix("at")
        .or_else(|| stem.strip_suffix("bl"))
        .or_else(|| stem.strip_suffix("iz"))
    {
        if measure(prefix) > 0 {
            return format!("{stem}e");
        }
    }
    let bytes = stem.as_bytes();
    let n = bytes.len();
    if n >= 2 && bytes[n - 1] == bytes[n - 2] && is_consonant(bytes, n - 1) {
        let last = bytes[n - 1];
        if last != b'l' && last != b's' && last != b'z' {
            return stem[..n - 1].to_string();
        }
    }
    // verbs whose stem ends in a single s take a silent e (appease, raise);
    // without it the plural rule would strip the s on a later pass
    if stem.ends_with('s') && !stem.ends_with("ss") && !stem.ends_with("us") {
        return format!("{stem}e");
    }
    if measure(stem) == 1 && ends_cvc(bytes) {
        return format!("{stem}e");
    }
    stem.to_string()
}

/// A letter is a consonant unless it is a/e/i/o/u, or a 'y' that follows a
/// consonant (so the 'y' in "dying" counts as a vowel).
fn is_consonant(bytes: &[u8], i: usize) -> bool {
    match bytes[i] {
        b'a' | b'e' | b'i' | b'o' | b'u' => false,
        b'y' => i == 0 || !is_consonant(bytes, i - 1),
        _ => true,
    }
}

fn has_vowel(stem: &str) -> bool {
    let bytes = stem.as_bytes();
    (0..bytes.len()).any(|i| !is_consonant(bytes, i))
}

/// Number of vowel-to-consonant transitions (the Porter measure).
fn measure(stem: &str) -> usize {
    let bytes = stem.as_bytes();
    let mut m = 0;
    let mut prev_vowel = false;
    for i in 0..bytes.len() {
        let vowel = !is_consonant(bytes, i);
        if prev_vowel && !vowel {
            m += 1;
        }
        prev_vowel = vowel;
    }
    m
}

/// Stem ends consonant-vowel-consonant where the final consonant is not
/// w, x, or y ("hop" yes, "box" no).
fn ends_cvc(bytes: &[u8]) -> bool {
    let n = bytes.len();
    if n < 3 {
        return false;
    }
    is_consonant(bytes, n - 3)
        && !is_consonant(bytes, n - 2)
        && is_consonant(bytes, n - 1)
        && !matches!(bytes[n - 1], b'w' | b'x' | b'y')
}
