//! Stage snapshot files.
//!
//! Each pipeline command reads the previous stage's snapshot and writes its
//! own, so every stage is independently reproducible. Tweets and documents
//! are JSON Lines; per-tweet scores are CSV. All writers emit records in
//! input order with stable field order.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::Tweet;
use crate::preprocess::{Document, PhraseTable};
use crate::sentiment::{Polarity, SentimentScore};

pub const TWEETS_FILE: &str = "tweets.jsonl";
pub const INGEST_STATS_FILE: &str = "ingest_stats.json";
pub const DOCS_FILE: &str = "docs.jsonl";
pub const PREPROCESS_STATS_FILE: &str = "preprocess_stats.json";
pub const PHRASES_FILE: &str = "phrases.tsv";
pub const SCORES_FILE: &str = "scores.csv";
pub const SENTIMENT_STATS_FILE: &str = "sentiment_stats.json";
pub const MODEL_FILE: &str = "model.json";
pub const SWEEP_FILE: &str = "sweep.json";

#[derive(Debug, Error)]
pub enum SnapshotError {
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}:{line}: {reason}")]
    BadRecord {
        path: String,
        line: usize,
        reason: String,
    },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> SnapshotError + '_ {
    move |source| SnapshotError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// One row of the per-tweet score file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreRecord {
    pub tweet_id: String,
    pub pos: f64,
    pub neu: f64,
    pub neg: f64,
    pub compound: f64,
    pub polarity: Polarity,
}

impl ScoreRecord {
    pub fn new(tweet_id: &str, score: SentimentScore) -> ScoreRecord {
        ScoreRecord {
            tweet_id: tweet_id.to_string(),
            pos: score.pos,
            neu: score.neu,
            neg: score.neg,
            compound: score.compound,
            polarity: score.polarity(),
        }
    }
}

pub fn write_jsonl<T: Serialize>(path: &Path, records: &[T]) -> Result<(), SnapshotError> {
    let mut out = BufWriter::new(File::create(path).map_err(io_err(path))?);
    for record in records {
        let line = serde_json::to_string(record).map_err(|e| SnapshotError::BadRecord {
            path: path.display().to_string(),
            line: 0,
            reason: e.to_string(),
        })?;
        out.write_all(line.as_bytes()).map_err(io_err(path))?;
        out.write_all(b"\n").map_err(io_err(path))?;
    }
    out.flush().map_err(io_err(path))
}

pub fn read_jsonl<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>, SnapshotError> {
    let file = File::open(path).map_err(io_err(path))?;
    let mut records = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(io_err(path))?;
        if line.trim().is_empty() {
            continue;
        }
        let record = serde_json::from_str(&line).map_err(|e| SnapshotError::BadRecord {
            path: path.display().to_string(),
            line: idx + 1,
            reason: e.to_string(),
        })?;
        records.push(record);
    }
    Ok(records)
}

pub fn write_tweets(path: &Path, tweets: &[Tweet]) -> Result<(), SnapshotError> {
    write_jsonl(path, tweets)
}

pub fn read_tweets(path: &Path) -> Result<Vec<Tweet>, SnapshotError> {
    read_jsonl(path)
}

pub fn write_docs(path: &Path, docs: &[Document]) -> Result<(), SnapshotError> {
    write_jsonl(path, docs)
}

pub fn read_docs(path: &Path) -> Result<Vec<Document>, SnapshotError> {
    read_jsonl(path)
}

pub fn write_scores(path: &Path, records: &[ScoreRecord]) -> Result<(), SnapshotError> {
    let mut out = BufWriter::new(File::create(path).map_err(io_err(path))?);
    writeln!(out, "tweet_id,pos,neu,neg,compound,polarity").map_err(io_err(path))?;
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            csv_escape(&r.tweet_id),
            r.pos,
            r.neu,
            r.neg,
            r.compound,
            r.polarity
        )
        .map_err(io_err(path))?;
    }
    out.flush().map_err(io_err(path))
}

pub fn read_scores(path: &Path) -> Result<Vec<ScoreRecord>, SnapshotError> {
    let mut reader = csv::ReaderBuilder::new()
        .from_path(path)
        .map_err(|e| SnapshotError::BadRecord {
            path: path.display().to_string(),
            line: 0,
            reason: e.to_string(),
        })?;
    let mut records = Vec::new();
    for (idx, row) in reader.records().enumerate() {
        let row = row.map_err(|e| SnapshotError::BadRecord {
            path: path.display().to_string(),
            line: idx + 2,
            reason: e.to_string(),
        })?;
        let bad = |reason: &str| SnapshotError::BadRecord {
            path: path.display().to_string(),
            line: idx + 2,
            reason: reason.to_string(),
        };
        let parse = |i: usize| -> Result<f64, SnapshotError> {
            row.get(i)
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| bad("bad numeric field"))
        };
        let polarity = match row.get(5) {
            Some("positive") => Polarity::Positive,
            Some("neutral") => Polarity::Neutral,
            Some("negative") => Polarity::Negative,
            _ => return Err(bad("bad polarity field")),
        };
        records.push(ScoreRecord {
            tweet_id: row.get(0).ok_or_else(|| bad("missing id"))?.to_string(),
            pos: parse(1)?,
            neu: parse(2)?,
            neg: parse(3)?,
            compound: parse(4)?,
            polarity,
        });
    }
    Ok(records)
}

/// Scores keyed by tweet id for joining against documents.
pub fn scores_by_id(records: &[ScoreRecord]) -> BTreeMap<&str, &ScoreRecord> {
    records.iter().map(|r| (r.tweet_id.as_str(), r)).collect()
}

fn csv_escape(field: &str) -> String {
    if field.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

pub fn write_phrases(path: &Path, table: &PhraseTable) -> Result<(), SnapshotError> {
    let mut out = BufWriter::new(File::create(path).map_err(io_err(path))?);
    for (phrase, score) in &table.entries {
        writeln!(out, "{phrase}\t{score}").map_err(io_err(path))?;
    }
    out.flush().map_err(io_err(path))
}

pub fn write_json_pretty<T: Serialize>(path: &Path, value: &T) -> Result<(), SnapshotError> {
    let mut out = BufWriter::new(File::create(path).map_err(io_err(path))?);
    serde_json::to_writer_pretty(&mut out, value).map_err(|e| SnapshotError::BadRecord {
        path: path.display().to_string(),
        line: 0,
        reason: e.to_string(),
    })?;
    out.write_all(b"\n").map_err(io_err(path))?;
    out.flush().map_err(io_err(path))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::BrandId;
    use chrono::{TimeZone, Utc};
    use std::collections::BTreeSet;

    #[test]
    fn tweets_round_trip() {
        let tweets = vec![Tweet {
            id: "1".to_string(),
            text: "hello, \"world\"\nsecond line \u{1F600}".to_string(),
            location_raw: "New Delhi, India".to_string(),
            created_at: Utc.with_ymd_and_hms(2021, 3, 4, 5, 6, 7).unwrap(),
            country: Some("IN".to_string()),
            brands: [BrandId::Covaxin].into_iter().collect::<BTreeSet<_>>(),
        }];
        let tmp = tempfile::NamedTempFile::new().unwrap();
        write_tweets(tmp.path(), &tweets).unwrap();
        let back = read_tweets(tmp.path()).unwrap();
        assert_eq!(tweets, back);
    }

    #[test]
    fn scores_round_trip_with_full_precision() {
        let records = vec![ScoreRecord {
            tweet_id: "a,b".to_string(),
            pos: 0.7063829787234043,
            neu: 0.29361702127659574,
            neg: 0.0,
            compound: 0.946890212588855,
            polarity: Polarity::Positive,
        }];
        let tmp = tempfile::NamedTempFile::new().unwrap();
        write_scores(tmp.path(), &records).unwrap();
        let back = read_scores(tmp.path()).unwrap();
        assert_eq!(records, back);
    }

    #[test]
    fn jsonl_writing_is_deterministic() {
        let docs = vec![Document {
            tweet_id: "1".to_string(),
            tokens: vec!["a".to_string(), "b".to_string()],
            country: None,
            brands: BTreeSet::new(),
        }];
        let t1 = tempfile::NamedTempFile::new().unwrap();
        let t2 = tempfile::NamedTempFile::new().unwrap();
        write_docs(t1.path(), &docs).unwrap();
        write_docs(t2.path(), &docs).unwrap();
        assert_eq!(
            std::fs::read(t1.path()).unwrap(),
            std::fs::read(t2.path()).unwrap()
        );
    }
}
