//! Report bundle emission.
//!
//! Every report is written as a CSV/JSON pair (plus an optional SVG bar
//! chart for the sentiment distribution). Rows are fully ordered and floats
//! print with shortest round-trip formatting, so the bundle is byte-stable
//! for identical inputs.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use crate::analytics::{
    self, sentiment_distribution, top_terms, topic_popularity, wordcloud_weights,
    FrequencyTable, Scope, SentimentDistribution, TopicRanking,
};
use crate::config::ReportConfig;
use crate::corpus::Tweet;
use crate::preprocess::Document;
use crate::sentiment::SentimentLexicon;
use crate::snapshot::ScoreRecord;
use crate::topics::TopicModel;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("report serialization: {0}")]
    Serialize(#[from] serde_json::Error),
    #[error("data mismatch: {0}")]
    Mismatch(String),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> ReportError + '_ {
    move |source| ReportError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Everything the report stage consumes.
pub struct ReportInputs<'a> {
    pub tweets: &'a [Tweet],
    pub docs: &'a [Document],
    pub scores: &'a [ScoreRecord],
    pub model: &'a TopicModel,
    pub lexicon: &'a SentimentLexicon,
}

/// Write the full bundle into `dir`; returns the files written, in order.
pub fn write_reports(
    dir: &Path,
    inputs: &ReportInputs<'_>,
    cfg: &ReportConfig,
) -> Result<Vec<PathBuf>, ReportError> {
    if inputs.model.num_docs() != inputs.docs.len() {
        return Err(ReportError::Mismatch(format!(
            "model was fitted on {} documents but the snapshot has {}",
            inputs.model.num_docs(),
            inputs.docs.len()
        )));
    }
    let by_id: BTreeMap<&str, &ScoreRecord> = inputs
        .scores
        .iter()
        .map(|r| (r.tweet_id.as_str(), r))
        .collect();
    let tweet_by_id: BTreeMap<&str, &Tweet> =
        inputs.tweets.iter().map(|t| (t.id.as_str(), t)).collect();
    let doc_polarities = inputs
        .docs
        .iter()
        .map(|d| {
            by_id
                .get(d.tweet_id.as_str())
                .map(|r| r.polarity)
                .ok_or_else(|| {
                    ReportError::Mismatch(format!("no sentiment score for tweet {}", d.tweet_id))
                })
        })
        .collect::<Result<Vec<_>, _>>()?;

    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut written = Vec::new();

    // global and per-country term frequencies
    let global = top_terms(inputs.docs, cfg.top_terms, Scope::Global);
    write_terms_csv(dir.join("top_terms.csv"), None, &global, &mut written)?;
    write_json(dir.join("top_terms.json"), &global, &mut written)?;

    let countries: BTreeSet<String> = inputs
        .docs
        .iter()
        .filter_map(|d| d.country.clone())
        .collect();
    let per_country: Vec<(String, FrequencyTable)> = countries
        .iter()
        .map(|c| {
            (
                c.clone(),
                top_terms(inputs.docs, cfg.top_terms, Scope::Country(c.clone())),
            )
        })
        .collect();
    {
        let path = dir.join("top_terms_by_country.csv");
        let mut out = BufWriter::new(File::create(&path).map_err(io_err(&path))?);
        writeln!(out, "country,rank,term,count").map_err(io_err(&path))?;
        for (country, table) in &per_country {
            for (rank, (term, count)) in table.entries.iter().enumerate() {
                writeln!(out, "{country},{},{},{count}", rank + 1, csv_field(term))
                    .map_err(io_err(&path))?;
            }
        }
        out.flush().map_err(io_err(&path))?;
        written.push(path);
    }
    write_json(
        dir.join("top_terms_by_country.json"),
        &per_country,
        &mut written,
    )?;

    // word-cloud weights (what a renderer would consume)
    let cloud_global = top_terms(inputs.docs, cfg.wordcloud_terms, Scope::Global);
    let weights = wordcloud_weights(&cloud_global);
    write_weights_csv(dir.join("wordcloud_weights.csv"), None, &weights, &mut written)?;
    write_json(dir.join("wordcloud_weights.json"), &weights, &mut written)?;

    let cloud_by_country: Vec<(String, Vec<(String, f64)>)> = countries
        .iter()
        .map(|c| {
            let table = top_terms(inputs.docs, cfg.wordcloud_terms, Scope::Country(c.clone()));
            (c.clone(), wordcloud_weights(&table))
        })
        .collect();
    {
        let path = dir.join("wordcloud_weights_by_country.csv");
        let mut out = BufWriter::new(File::create(&path).map_err(io_err(&path))?);
        writeln!(out, "country,term,weight").map_err(io_err(&path))?;
        for (country, weights) in &cloud_by_country {
            for (term, weight) in weights {
                writeln!(out, "{country},{},{weight}", csv_field(term)).map_err(io_err(&path))?;
            }
        }
        out.flush().map_err(io_err(&path))?;
        written.push(path);
    }
    write_json(
        dir.join("wordcloud_weights_by_country.json"),
        &cloud_by_country,
        &mut written,
    )?;

    // per-brand emotional vocabulary split by polarity
    let emotional = analytics::emotional_top_words(inputs.docs, inputs.lexicon, cfg.emotional_words);
    {
        let path = dir.join("emotional_words_by_brand.csv");
        let mut out = BufWriter::new(File::create(&path).map_err(io_err(&path))?);
        writeln!(out, "brand,polarity,rank,word,count").map_err(io_err(&path))?;
        for (brand, words) in &emotional {
            for (label, bucket) in [
                ("positive", &words.positive),
                ("negative", &words.negative),
                ("neutral", &words.neutral),
            ] {
                for (rank, (word, count)) in bucket.iter().enumerate() {
                    writeln!(
                        out,
                        "{},{label},{},{},{count}",
                        csv_field(brand.canonical_name()),
                        rank + 1,
                        csv_field(word)
                    )
                    .map_err(io_err(&path))?;
                }
            }
        }
        out.flush().map_err(io_err(&path))?;
        written.push(path);
    }
    let emotional_json: Vec<(String, &analytics::EmotionalWords)> = emotional
        .iter()
        .map(|(brand, words)| (brand.canonical_name().to_string(), words))
        .collect();
    write_json(
        dir.join("emotional_words_by_brand.json"),
        &emotional_json,
        &mut written,
    )?;

    // country x brand polarity counts (and shares)
    let rows = inputs.tweets.iter().filter_map(|t| {
        by_id
            .get(t.id.as_str())
            .map(|r| (t.country.as_deref(), &t.brands, r.polarity))
    });
    // every scored tweet must exist in the snapshot
    for record in inputs.scores {
        if !tweet_by_id.contains_key(record.tweet_id.as_str()) {
            return Err(ReportError::Mismatch(format!(
                "score for unknown tweet {}",
                record.tweet_id
            )));
        }
    }
    let distribution = sentiment_distribution(rows);
    {
        let path = dir.join("sentiment_distribution.csv");
        let mut out = BufWriter::new(File::create(&path).map_err(io_err(&path))?);
        writeln!(
            out,
            "country,brand,positive,neutral,negative,total,positive_share,neutral_share,negative_share"
        )
        .map_err(io_err(&path))?;
        for cell in &distribution {
            let total = cell.total();
            writeln!(
                out,
                "{},{},{},{},{},{total},{},{},{}",
                cell.country,
                csv_field(&cell.brand),
                cell.positive,
                cell.neutral,
                cell.negative,
                cell.positive as f64 / total as f64,
                cell.neutral as f64 / total as f64,
                cell.negative as f64 / total as f64,
            )
            .map_err(io_err(&path))?;
        }
        out.flush().map_err(io_err(&path))?;
        written.push(path);
    }
    write_json(
        dir.join("sentiment_distribution.json"),
        &distribution,
        &mut written,
    )?;
    if cfg.svg {
        let path = dir.join("sentiment_distribution.svg");
        std::fs::write(&path, distribution_svg(&distribution)).map_err(io_err(&path))?;
        written.push(path);
    }

    // per-polarity topic rankings
    let (positive, negative) = topic_popularity(inputs.model, &doc_polarities, 10);
    let listed = cfg.topics_listed;
    {
        let path = dir.join("topic_rankings.csv");
        let mut out = BufWriter::new(File::create(&path).map_err(io_err(&path))?);
        writeln!(out, "polarity,rank,topic,tweets,top_words").map_err(io_err(&path))?;
        for ranking in [&positive, &negative] {
            for (rank, entry) in ranking.top(listed).iter().enumerate() {
                writeln!(
                    out,
                    "{},{},{},{},{}",
                    ranking.polarity,
                    rank + 1,
                    entry.topic,
                    entry.tweets,
                    csv_field(&entry.top_words.join(" "))
                )
                .map_err(io_err(&path))?;
            }
        }
        out.flush().map_err(io_err(&path))?;
        written.push(path);
    }
    #[derive(Serialize)]
    struct RankingsJson<'a> {
        positive: &'a TopicRanking,
        negative: &'a TopicRanking,
        listed: usize,
    }
    write_json(
        dir.join("topic_rankings.json"),
        &RankingsJson {
            positive: &positive,
            negative: &negative,
            listed,
        },
        &mut written,
    )?;

    Ok(written)
}

fn write_terms_csv(
    path: PathBuf,
    country: Option<&str>,
    table: &FrequencyTable,
    written: &mut Vec<PathBuf>,
) -> Result<(), ReportError> {
    let mut out = BufWriter::new(File::create(&path).map_err(io_err(&path))?);
    match country {
        Some(_) => writeln!(out, "country,rank,term,count").map_err(io_err(&path))?,
        None => writeln!(out, "rank,term,count").map_err(io_err(&path))?,
    }
    for (rank, (term, count)) in table.entries.iter().enumerate() {
        match country {
            Some(c) => writeln!(out, "{c},{},{},{count}", rank + 1, csv_field(term))
                .map_err(io_err(&path))?,
            None => {
                writeln!(out, "{},{},{count}", rank + 1, csv_field(term)).map_err(io_err(&path))?
            }
        }
    }
    out.flush().map_err(io_err(&path))?;
    written.push(path);
    Ok(())
}

fn write_weights_csv(
    path: PathBuf,
    country: Option<&str>,
    weights: &[(String, f64)],
    written: &mut Vec<PathBuf>,
) -> Result<(), ReportError> {
    let mut out = BufWriter::new(File::create(&path).map_err(io_err(&path))?);
    match country {
        Some(_) => writeln!(out, "country,term,weight").map_err(io_err(&path))?,
        None => writeln!(out, "term,weight").map_err(io_err(&path))?,
    }
    for (term, weight) in weights {
        match country {
            Some(c) => {
                writeln!(out, "{c},{},{weight}", csv_field(term)).map_err(io_err(&path))?
            }
            None => writeln!(out, "{},{weight}", csv_field(term)).map_err(io_err(&path))?,
        }
    }
    out.flush().map_err(io_err(&path))?;
    written.push(path);
    Ok(())
}

fn write_json<T: Serialize>(
    path: PathBuf,
    value: &T,
    written: &mut Vec<PathBuf>,
) -> Result<(), ReportError> {
    let mut out = BufWriter::new(File::create(&path).map_err(io_err(&path))?);
    serde_json::to_writer_pretty(&mut out, value)?;
    out.write_all(b"\n").map_err(io_err(&path))?;
    out.flush().map_err(io_err(&path))?;
    written.push(path);
    Ok(())
}

fn csv_field(field: &str) -> String {
    if field.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

/// Grouped bar chart of polarity counts per (country, brand) cell.
fn distribution_svg(cells: &[SentimentDistribution]) -> String {
    const BAR_H: u64 = 12;
    const GROUP_GAP: u64 = 10;
    const LABEL_W: u64 = 260;
    const CHART_W: u64 = 600;
    let max = cells
        .iter()
        .flat_map(|c| [c.positive, c.neutral, c.negative])
        .max()
        .unwrap_or(1)
        .max(1);
    let group_h = 3 * BAR_H + GROUP_GAP;
    let height = cells.len() as u64 * group_h + 20;
    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{height}\">\n",
        LABEL_W + CHART_W + 60
    ));
    for (i, cell) in cells.iter().enumerate() {
        let y0 = 10 + i as u64 * group_h;
        svg.push_str(&format!(
            "<text x=\"4\" y=\"{}\" font-size=\"11\">{} / {}</text>\n",
            y0 + 2 * BAR_H,
            xml_escape(&cell.country),
            xml_escape(&cell.brand)
        ));
        for (j, (count, color)) in [
            (cell.positive, "#2a9d4e"),
            (cell.neutral, "#9a9a9a"),
            (cell.negative, "#c0392b"),
        ]
        .iter()
        .enumerate()
        {
            let w = count * CHART_W / max;
            let y = y0 + j as u64 * BAR_H;
            svg.push_str(&format!(
                "<rect x=\"{LABEL_W}\" y=\"{y}\" width=\"{w}\" height=\"{}\" fill=\"{color}\"/>\n",
                BAR_H - 2
            ));
            svg.push_str(&format!(
                "<text x=\"{}\" y=\"{}\" font-size=\"10\">{count}</text>\n",
                LABEL_W + w + 4,
                y + BAR_H - 3
            ));
        }
    }
    svg.push_str("</svg>\n");
    svg
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sentiment::Polarity;
    use crate::topics::{fit, LdaConfig};
    use chrono::{TimeZone, Utc};
    use std::collections::BTreeSet;

    fn fixture() -> (Vec<Tweet>, Vec<Document>, Vec<ScoreRecord>, TopicModel) {
        let mk_tweet = |id: &str, text: &str, country: &str| Tweet {
            id: id.to_string(),
            text: text.to_string(),
            location_raw: country.to_string(),
            created_at: Utc.with_ymd_and_hms(2021, 1, 1, 0, 0, 0).unwrap(),
            country: Some(country.to_string()),
            brands: BTreeSet::new(),
        };
        let tweets = vec![
            mk_tweet("1", "thank you, vaccine works great", "IN"),
            mk_tweet("2", "sore arm and fever, awful night", "IN"),
            mk_tweet("3", "second dose done, feeling fine", "US"),
        ];
        let docs: Vec<Document> = vec![
            Document {
                tweet_id: "1".to_string(),
                tokens: ["thank", "vaccine", "work", "great"]
                    .iter()
                    .map(|s| s.to_string())
                    .collect(),
                country: Some("IN".to_string()),
                brands: BTreeSet::new(),
            },
            Document {
                tweet_id: "2".to_string(),
                tokens: ["sore", "arm", "fever", "awful"]
                    .iter()
                    .map(|s| s.to_string())
                    .collect(),
                country: Some("IN".to_string()),
                brands: BTreeSet::new(),
            },
            Document {
                tweet_id: "3".to_string(),
                tokens: ["second", "dose", "do", "feel", "fine"]
                    .iter()
                    .map(|s| s.to_string())
                    .collect(),
                country: Some("US".to_string()),
                brands: BTreeSet::new(),
            },
        ];
        let scores = vec![
            ScoreRecord {
                tweet_id: "1".to_string(),
                pos: 0.6,
                neu: 0.4,
                neg: 0.0,
                compound: 0.8,
                polarity: Polarity::Positive,
            },
            ScoreRecord {
                tweet_id: "2".to_string(),
                pos: 0.0,
                neu: 0.4,
                neg: 0.6,
                compound: -0.7,
                polarity: Polarity::Negative,
            },
            ScoreRecord {
                tweet_id: "3".to_string(),
                pos: 0.3,
                neu: 0.7,
                neg: 0.0,
                compound: 0.3,
                polarity: Polarity::Positive,
            },
        ];
        let mut cfg = LdaConfig::new(2);
        cfg.iterations = 30;
        cfg.burn_in = 5;
        let model = fit(&docs, &cfg).unwrap();
        (tweets, docs, scores, model)
    }

    #[test]
    fn bundle_writes_every_report_and_is_deterministic() {
        let (tweets, docs, scores, model) = fixture();
        let lexicon = SentimentLexicon::bundled();
        let inputs = ReportInputs {
            tweets: &tweets,
            docs: &docs,
            scores: &scores,
            model: &model,
            lexicon,
        };
        let mut cfg = ReportConfig::default();
        cfg.svg = true;
        let d1 = tempfile::tempdir().unwrap();
        let d2 = tempfile::tempdir().unwrap();
        let w1 = write_reports(d1.path(), &inputs, &cfg).unwrap();
        let w2 = write_reports(d2.path(), &inputs, &cfg).unwrap();
        assert_eq!(w1.len(), w2.len());
        assert!(w1.len() >= 13);
        for (a, b) in w1.iter().zip(&w2) {
            assert_eq!(a.file_name(), b.file_name());
            assert_eq!(
                std::fs::read(a).unwrap(),
                std::fs::read(b).unwrap(),
                "{a:?} differs"
            );
        }
    }

    #[test]
    fn missing_score_is_a_mismatch_error() {
        let (tweets, docs, mut scores, model) = fixture();
        scores.remove(1);
        let inputs = ReportInputs {
            tweets: &tweets,
            docs: &docs,
            scores: &scores,
            model: &model,
            lexicon: SentimentLexicon::bundled(),
        };
        let dir = tempfile::tempdir().unwrap();
        let err = write_reports(dir.path(), &inputs, &ReportConfig::default());
        assert!(matches!(err, Err(ReportError::Mismatch(_))));
    }

    #[test]
    fn stale_model_is_a_mismatch_error() {
        let (tweets, mut docs, scores, model) = fixture();
        docs.pop();
        let inputs = ReportInputs {
            tweets: &tweets,
            docs: &docs,
            scores: &scores,
            model: &model,
            lexicon: SentimentLexicon::bundled(),
        };
        let dir = tempfile::tempdir().unwrap();
        let err = write_reports(dir.path(), &inputs, &ReportConfig::default());
        assert!(matches!(err, Err(ReportError::Mismatch(_))));
    }
}
