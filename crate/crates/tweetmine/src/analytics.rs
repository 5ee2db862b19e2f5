//! Aggregation reports: frequency tables, word-cloud weights, per-brand
//! emotional vocabularies, country/brand sentiment distributions, and
//! per-polarity topic rankings.
//!
//! Every function here is a pure fold over its inputs with fully ordered
//! output, so reports are byte-stable across runs.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::corpus::BrandId;
use crate::preprocess::Document;
use crate::sentiment::{Polarity, SentimentLexicon};
use crate::topics::TopicModel;

/// Term counts sorted by count descending, ties lexicographic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyTable {
    pub scope: String,
    pub entries: Vec<(String, u64)>,
}

/// Which documents a frequency table covers.
#[derive(Debug, Clone)]
pub enum Scope {
    Global,
    Country(String),
    Brand(BrandId),
}

impl Scope {
    fn descriptor(&self) -> String {
        match self {
            Scope::Global => "global".to_string(),
            Scope::Country(code) => format!("country:{code}"),
            Scope::Brand(brand) => format!("brand:{brand}"),
        }
    }

    fn matches(&self, doc: &Document) -> bool {
        match self {
            Scope::Global => true,
            Scope::Country(code) => doc.country.as_deref() == Some(code.as_str()),
            Scope::Brand(brand) => doc.brands.contains(brand),
        }
    }
}

/// Count tokens over the documents in scope and keep the `n` most frequent.
/// An empty scope yields an empty table.
pub fn top_terms(docs: &[Document], n: usize, scope: Scope) -> FrequencyTable {
    let mut counts: HashMap<&str, u64> = HashMap::new();
    for doc in docs.iter().filter(|d| scope.matches(d)) {
        for token in &doc.tokens {
            *counts.entry(token.as_str()).or_insert(0) += 1;
        }
    }
    let mut entries: Vec<(String, u64)> = counts
        .into_iter()
        .map(|(t, c)| (t.to_string(), c))
        .collect();
    entries.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    entries.truncate(n);
    FrequencyTable {
        scope: scope.descriptor(),
        entries,
    }
}

/// Scale counts into (0, 1] weights relative to the most frequent term,
/// preserving order.
pub fn wordcloud_weights(table: &FrequencyTable) -> Vec<(String, f64)> {
    let max = table.entries.first().map(|(_, c)| *c).unwrap_or(0);
    table
        .entries
        .iter()
        .map(|(t, c)| (t.clone(), *c as f64 / max as f64))
        .collect()
}

/// Top emotional words of one brand, split by valence sign.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EmotionalWords {
    pub positive: Vec<(String, u64)>,
    pub negative: Vec<(String, u64)>,
    pub neutral: Vec<(String, u64)>,
}

/// For each brand: rank lexicon-hit tokens by frequency, take the top
/// `limit` (30 in the reports), and partition them by valence sign.
pub fn emotional_top_words(
    docs: &[Document],
    lex: &SentimentLexicon,
    limit: usize,
) -> BTreeMap<BrandId, EmotionalWords> {
    let mut per_brand: BTreeMap<BrandId, HashMap<&str, u64>> = BTreeMap::new();
    for doc in docs {
        for brand in &doc.brands {
            let counts = per_brand.entry(*brand).or_default();
            for token in &doc.tokens {
                if lex.contains(token) {
                    *counts.entry(token.as_str()).or_insert(0) += 1;
                }
            }
        }
    }
    per_brand
        .into_iter()
        .map(|(brand, counts)| {
            let mut ranked: Vec<(&str, u64)> = counts.into_iter().collect();
            ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
            ranked.truncate(limit);
            let mut words = EmotionalWords::default();
            for (token, count) in ranked {
                let v = lex.valence(token).unwrap_or(0.0);
                let bucket = if v > 0.0 {
                    &mut words.positive
                } else if v < 0.0 {
                    &mut words.negative
                } else {
                    &mut words.neutral
                };
                bucket.push((token.to_string(), count));
            }
            (brand, words)
        })
        .collect()
}

/// Polarity counts for one (country, brand) cell.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentimentDistribution {
    pub country: String,
    pub brand: String,
    pub positive: u64,
    pub neutral: u64,
    pub negative: u64,
}

impl SentimentDistribution {
    pub fn total(&self) -> u64 {
        self.positive + self.neutral + self.negative
    }
}

/// Cell label for tweets with no tagged brand.
pub const UNTAGGED_BRAND: &str = "(untagged)";
/// Cell label for tweets with no resolved country.
pub const UNKNOWN_COUNTRY: &str = "(unknown)";

/// Count polarities per (country, brand). A tweet with several brands counts
/// once in each brand's cell; a tweet with none lands in the untagged cell.
pub fn sentiment_distribution<'a, I>(rows: I) -> Vec<SentimentDistribution>
where
    I: IntoIterator<Item = (Option<&'a str>, &'a std::collections::BTreeSet<BrandId>, Polarity)>,
{
    let mut cells: BTreeMap<(String, String), [u64; 3]> = BTreeMap::new();
    for (country, brands, polarity) in rows {
        let country = country.unwrap_or(UNKNOWN_COUNTRY).to_string();
        let slot = match polarity {
            Polarity::Positive => 0,
            Polarity::Neutral => 1,
            Polarity::Negative => 2,
        };
        if brands.is_empty() {
            cells
                .entry((country.clone(), UNTAGGED_BRAND.to_string()))
                .or_default()[slot] += 1;
        } else {
            for brand in brands {
                cells
                    .entry((country.clone(), brand.canonical_name().to_string()))
                    .or_default()[slot] += 1;
            }
        }
    }
    cells
        .into_iter()
        .map(|((country, brand), counts)| SentimentDistribution {
            country,
            brand,
            positive: counts[0],
            neutral: counts[1],
            negative: counts[2],
        })
        .collect()
}

/// One topic's share of a polarity class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicRankEntry {
    pub topic: usize,
    pub tweets: u64,
    pub top_words: Vec<String>,
}

/// Topics of one polarity class ranked by how many tweets they dominate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicRanking {
    pub polarity: Polarity,
    pub ranked: Vec<TopicRankEntry>,
}

impl TopicRanking {
    pub fn total_tweets(&self) -> u64 {
        self.ranked.iter().map(|e| e.tweets).sum()
    }

    pub fn top(&self, n: usize) -> &[TopicRankEntry] {
        &self.ranked[..n.min(self.ranked.len())]
    }
}

/// Attribute each document to its dominant topic (theta argmax, ties to the
/// smallest index) and count per topic within the positive and negative
/// classes. `polarities` must align with the model's fit documents.
pub fn topic_popularity(
    model: &TopicModel,
    polarities: &[Polarity],
    words_per_topic: usize,
) -> (TopicRanking, TopicRanking) {
    assert_eq!(
        polarities.len(),
        model.num_docs(),
        "one polarity per fitted document"
    );
    let k = model.num_topics();
    let mut counts = [vec![0u64; k], vec![0u64; k]];
    for (d, polarity) in polarities.iter().enumerate() {
        let bucket = match polarity {
            Polarity::Positive => 0,
            Polarity::Negative => 1,
            Polarity::Neutral => continue,
        };
        counts[bucket][model.dominant_topic(d)] += 1;
    }
    let build = |polarity: Polarity, topic_counts: &[u64]| -> TopicRanking {
        let mut ranked: Vec<TopicRankEntry> = topic_counts
            .iter()
            .enumerate()
            .map(|(topic, &tweets)| TopicRankEntry {
                topic,
                tweets,
                top_words: model
                    .top_words(topic, words_per_topic)
                    .expect("topic index in range"),
            })
            .collect();
        ranked.sort_by(|a, b| b.tweets.cmp(&a.tweets).then_with(|| a.topic.cmp(&b.topic)));
        TopicRanking { polarity, ranked }
    };
    (
        build(Polarity::Positive, &counts[0]),
        build(Polarity::Negative, &counts[1]),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topics::{fit, LdaConfig};
    use std::collections::BTreeSet;

    fn doc(id: &str, tokens: &[&str], country: Option<&str>, brands: &[BrandId]) -> Document {
        Document {
            tweet_id: id.to_string(),
            tokens: tokens.iter().map(|t| t.to_string()).collect(),
            country: country.map(str::to_string),
            brands: brands.iter().copied().collect(),
        }
    }

    fn fixture_docs() -> Vec<Document> {
        vec![
            doc(
                "1",
                &["vaccine", "dose", "vaccine", "thank"],
                Some("IN"),
                &[BrandId::Covaxin],
            ),
            doc(
                "2",
                &["vaccine", "pain", "arm", "dose"],
                Some("IN"),
                &[BrandId::PfizerBiontech],
            ),
            doc(
                "3",
                &["thank", "nurse", "dose", "vaccine"],
                Some("US"),
                &[BrandId::PfizerBiontech],
            ),
            doc("4", &["arm", "sore", "fever", "pain"], Some("US"), &[]),
        ]
    }

    #[test]
    fn top_terms_global_hand_counted() {
        let table = top_terms(&fixture_docs(), 3, Scope::Global);
        assert_eq!(table.scope, "global");
        assert_eq!(
            table.entries,
            vec![
                ("vaccine".to_string(), 4),
                ("dose".to_string(), 3),
                ("arm".to_string(), 2),
            ]
        );
    }

    #[test]
    fn top_terms_ties_break_lexicographically() {
        let docs = vec![doc("1", &["b", "a", "c", "a", "b", "c"], None, &[])];
        let table = top_terms(&docs, 3, Scope::Global);
        assert_eq!(
            table.entries,
            vec![
                ("a".to_string(), 2),
                ("b".to_string(), 2),
                ("c".to_string(), 2),
            ]
        );
    }

    #[test]
    fn top_terms_scopes_filter() {
        let docs = fixture_docs();
        let by_country = top_terms(&docs, 10, Scope::Country("IN".to_string()));
        assert_eq!(by_country.scope, "country:IN");
        assert_eq!(by_country.entries[0], ("vaccine".to_string(), 3));
        let by_brand = top_terms(&docs, 10, Scope::Brand(BrandId::Covaxin));
        assert_eq!(by_brand.entries[0], ("vaccine".to_string(), 2));
        let empty = top_terms(&docs, 10, Scope::Country("ZZ".to_string()));
        assert!(empty.entries.is_empty());
    }

    #[test]
    fn top_terms_n_is_a_prefix_of_n_plus_one() {
        let docs = fixture_docs();
        for n in 1..8 {
            let a = top_terms(&docs, n, Scope::Global);
            let b = top_terms(&docs, n + 1, Scope::Global);
            assert_eq!(a.entries[..], b.entries[..a.entries.len()]);
        }
    }

    #[test]
    fn top_terms_clamps_to_distinct_terms() {
        let docs = vec![doc("1", &["x", "y"], None, &[])];
        let table = top_terms(&docs, 99, Scope::Global);
        assert_eq!(table.entries.len(), 2);
    }

    #[test]
    fn wordcloud_weight_is_count_over_max() {
        let table = FrequencyTable {
            scope: "global".to_string(),
            entries: vec![("vaccine".to_string(), 100), ("dose".to_string(), 50)],
        };
        assert_eq!(
            wordcloud_weights(&table),
            vec![("vaccine".to_string(), 1.0), ("dose".to_string(), 0.5)]
        );
        let singleton = FrequencyTable {
            scope: "global".to_string(),
            entries: vec![("only".to_string(), 7)],
        };
        assert_eq!(wordcloud_weights(&singleton), vec![("only".to_string(), 1.0)]);
    }

    #[test]
    fn wordcloud_weights_in_unit_interval_with_max_one() {
        let table = top_terms(&fixture_docs(), 10, Scope::Global);
        let weights = wordcloud_weights(&table);
        assert_eq!(weights[0].1, 1.0);
        assert!(weights.iter().all(|(_, w)| *w > 0.0 && *w <= 1.0));
    }

    #[test]
    fn emotional_words_partition_by_sign() {
        let lex = SentimentLexicon::bundled();
        let docs = vec![doc(
            "1",
            &["thank", "thank", "pain", "dose"],
            Some("IN"),
            &[BrandId::Moderna],
        )];
        let result = emotional_top_words(&docs, lex, 30);
        let words = &result[&BrandId::Moderna];
        assert_eq!(words.positive, vec![("thank".to_string(), 2)]);
        assert_eq!(words.negative, vec![("pain".to_string(), 1)]);
        assert!(words.neutral.is_empty());
    }

    #[test]
    fn emotional_words_empty_when_no_hits() {
        let lex = SentimentLexicon::bundled();
        let docs = vec![doc("1", &["dose", "arm"], None, &[BrandId::Sinovac])];
        let result = emotional_top_words(&docs, lex, 30);
        assert_eq!(result[&BrandId::Sinovac], EmotionalWords::default());
    }

    #[test]
    fn distribution_counts_cells_exactly() {
        let pf: BTreeSet<BrandId> = [BrandId::PfizerBiontech].into_iter().collect();
        let rows = vec![
            (Some("IN"), &pf, Polarity::Positive),
            (Some("IN"), &pf, Polarity::Positive),
            (Some("IN"), &pf, Polarity::Positive),
            (Some("IN"), &pf, Polarity::Negative),
        ];
        let dist = sentiment_distribution(rows);
        assert_eq!(dist.len(), 1);
        assert_eq!(dist[0].positive, 3);
        assert_eq!(dist[0].neutral, 0);
        assert_eq!(dist[0].negative, 1);
        assert_eq!(dist[0].total(), 4);
    }

    #[test]
    fn distribution_multi_brand_counts_once_per_brand() {
        let two: BTreeSet<BrandId> =
            [BrandId::Covaxin, BrandId::SputnikV].into_iter().collect();
        let none: BTreeSet<BrandId> = BTreeSet::new();
        let rows = vec![
            (Some("IN"), &two, Polarity::Neutral),
            (None, &none, Polarity::Positive),
        ];
        let dist = sentiment_distribution(rows);
        assert_eq!(dist.len(), 3);
        let brands: Vec<&str> = dist.iter().map(|d| d.brand.as_str()).collect();
        assert!(brands.contains(&"Covaxin"));
        assert!(brands.contains(&"Sputnik V"));
        assert!(brands.contains(&UNTAGGED_BRAND));
        let untagged = dist.iter().find(|d| d.brand == UNTAGGED_BRAND).unwrap();
        assert_eq!(untagged.country, UNKNOWN_COUNTRY);
        assert_eq!(untagged.positive, 1);
    }

    #[test]
    fn topic_popularity_counts_partition_docs() {
        let docs: Vec<Document> = (0..12)
            .map(|i| {
                if i % 2 == 0 {
                    doc(&format!("{i}"), &["cat", "dog", "pet", "fur"], None, &[])
                } else {
                    doc(&format!("{i}"), &["rust", "code", "bug", "fix"], None, &[])
                }
            })
            .collect();
        let mut cfg = LdaConfig::new(2);
        cfg.iterations = 100;
        cfg.burn_in = 10;
        cfg.seed = 3;
        let model = fit(&docs, &cfg).unwrap();
        let polarities: Vec<Polarity> = (0..12)
            .map(|i| {
                if i % 3 == 0 {
                    Polarity::Neutral
                } else if i % 2 == 0 {
                    Polarity::Positive
                } else {
                    Polarity::Negative
                }
            })
            .collect();
        let (pos, neg) = topic_popularity(&model, &polarities, 3);
        let n_pos = polarities.iter().filter(|p| **p == Polarity::Positive).count() as u64;
        let n_neg = polarities.iter().filter(|p| **p == Polarity::Negative).count() as u64;
        assert_eq!(pos.total_tweets(), n_pos);
        assert_eq!(neg.total_tweets(), n_neg);
        assert!(pos.ranked.windows(2).all(|w| w[0].tweets >= w[1].tweets));
        assert_eq!(pos.top(1).len(), 1);
        for entry in &pos.ranked {
            assert_eq!(entry.top_words.len(), 3);
        }
    }
}
