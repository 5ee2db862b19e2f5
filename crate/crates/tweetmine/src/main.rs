//! `tweetmine` — staged tweet-mining pipeline.
//!
//! Each subcommand reads the previous stage's snapshot from the output
//! directory and writes its own snapshot plus a manifest, so any stage can
//! be re-run in isolation and compared byte for byte.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rayon::prelude::*;

use tweetmine::config::RunConfig;
use tweetmine::corpus::{self, BrandTable, Gazetteer};
use tweetmine::manifest::RunManifest;
use tweetmine::preprocess::{self, Document, Lexicons};
use tweetmine::report::{write_reports, ReportInputs};
use tweetmine::sentiment::{self, SentimentLexicon};
use tweetmine::snapshot::{self, ScoreRecord};
use tweetmine::topics::{self, LdaConfig, TopicModel};

const EXIT_USAGE: u8 = 2;
const EXIT_MISSING_ARTIFACT: u8 = 3;
const EXIT_DATA: u8 = 4;

#[derive(Parser)]
#[command(name = "tweetmine", version, about = "Tweet corpus mining pipeline")]
struct Cli {
    /// Run configuration file (TOML).
    #[arg(long, global = true, default_value = "tweetmine.toml")]
    config: PathBuf,
    /// Override the configured RNG seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Cap worker threads (0 = library default).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Override the configured output directory.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load the tweet CSV, filter and tag it, and snapshot the corpus.
    Ingest,
    /// Normalize tweets into token documents (strip, tokenize, merge
    /// bigrams, drop short documents).
    Preprocess,
    /// Score every ingested tweet's raw text and classify its polarity.
    Sentiment,
    /// Fit the topic model (running the coherence sweep first when k_range
    /// is configured).
    Topics,
    /// Sweep the topic count over k_range and report coherence per K.
    SweepK,
    /// Emit the aggregation report bundle.
    Report,
}

enum CliError {
    Usage(String),
    MissingArtifact(String),
    Data(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::MissingArtifact(_) => EXIT_MISSING_ARTIFACT,
            CliError::Data(_) => EXIT_DATA,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::MissingArtifact(m) | CliError::Data(m) => m,
        }
    }
}

fn data_err<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Data(e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut config =
        RunConfig::load(&cli.config).map_err(|e| CliError::Usage(e.to_string()))?;
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(threads) = cli.threads {
        config.threads = threads;
    }
    if let Some(output) = cli.output {
        config.output.dir = output;
    }
    if config.threads > 0 {
        // a failure here means a pool already exists, which is fine
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(config.threads)
            .build_global();
    }
    std::fs::create_dir_all(&config.output.dir)
        .map_err(|e| CliError::Data(format!("cannot create output dir: {e}")))?;

    match cli.command {
        Command::Ingest => cmd_ingest(&config),
        Command::Preprocess => cmd_preprocess(&config),
        Command::Sentiment => cmd_sentiment(&config),
        Command::Topics => cmd_topics(&config),
        Command::SweepK => cmd_sweep_k(&config),
        Command::Report => cmd_report(&config),
    }
}

fn config_value(config: &RunConfig) -> serde_json::Value {
    serde_json::to_value(config).unwrap_or(serde_json::Value::Null)
}

fn out_path(config: &RunConfig, name: &str) -> PathBuf {
    config.output.dir.join(name)
}

fn require_artifact(config: &RunConfig, name: &str) -> Result<PathBuf, CliError> {
    let path = out_path(config, name);
    if !path.exists() {
        return Err(CliError::MissingArtifact(format!(
            "{} not found; run the producing stage first",
            path.display()
        )));
    }
    Ok(path)
}

fn load_gazetteer(config: &RunConfig) -> Result<Gazetteer, CliError> {
    match &config.resources.gazetteer {
        Some(path) => Gazetteer::from_path(path).map_err(data_err),
        None => Gazetteer::bundled().map_err(data_err),
    }
}

fn load_brands(config: &RunConfig) -> Result<BrandTable, CliError> {
    match &config.resources.brands {
        Some(path) => BrandTable::from_path(path).map_err(data_err),
        None => BrandTable::bundled().map_err(data_err),
    }
}

fn load_lexicons(config: &RunConfig) -> Result<Lexicons, CliError> {
    let mut lex = Lexicons::bundled().map_err(data_err)?;
    if let Some(path) = &config.resources.stopwords {
        lex = lex.with_stopwords_file(path).map_err(data_err)?;
    }
    if let Some(path) = &config.resources.extra_stopwords {
        lex = lex.with_extra_stopwords(path).map_err(data_err)?;
    }
    if let Some(path) = &config.resources.lemmas {
        lex = lex.with_lemma_file(path).map_err(data_err)?;
    }
    if let Some(path) = &config.resources.english_wordlist {
        lex = lex.with_wordlist_file(path).map_err(data_err)?;
    }
    Ok(lex)
}

fn load_sentiment_lexicon(config: &RunConfig) -> Result<SentimentLexicon, CliError> {
    match &config.resources.lexicon {
        Some(path) => {
            SentimentLexicon::from_files(path, config.resources.emoji_map.as_deref())
                .map_err(data_err)
        }
        None => Ok(SentimentLexicon::bundled().clone()),
    }
}

fn finish_manifest(
    mut manifest: RunManifest,
    outputs: &[(&str, &Path)],
    config: &RunConfig,
) -> Result<(), CliError> {
    for (name, path) in outputs {
        manifest.add_output(name, path).map_err(data_err)?;
    }
    manifest.write(&config.output.dir).map_err(data_err)?;
    Ok(())
}

fn cmd_ingest(config: &RunConfig) -> Result<(), CliError> {
    let schema = config
        .input
        .csv_schema()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let gazetteer = load_gazetteer(config)?;
    let brands = load_brands(config)?;

    let (tweets, stats) = corpus::ingest_csv(&config.input.path, &schema, &gazetteer, &brands)
        .map_err(|e| match e {
            corpus::CorpusError::MissingColumn(_) | corpus::CorpusError::MissingHeader => {
                CliError::Usage(e.to_string())
            }
            other => CliError::Data(other.to_string()),
        })?;

    let tweets_path = out_path(config, snapshot::TWEETS_FILE);
    snapshot::write_tweets(&tweets_path, &tweets).map_err(data_err)?;
    let stats_path = out_path(config, snapshot::INGEST_STATS_FILE);
    snapshot::write_json_pretty(&stats_path, &stats).map_err(data_err)?;

    let mut manifest = RunManifest::new("ingest", config.seed, config_value(config));
    manifest
        .add_input("input_csv", &config.input.path)
        .map_err(data_err)?;
    finish_manifest(
        manifest,
        &[
            (snapshot::TWEETS_FILE, &tweets_path),
            (snapshot::INGEST_STATS_FILE, &stats_path),
        ],
        config,
    )?;

    println!(
        "ingest: {} rows -> {} tweets ({} empty location, {} unresolved location, {} malformed, {} duplicate)",
        stats.total_rows,
        stats.emitted,
        stats.dropped_empty_location,
        stats.dropped_unresolved_location,
        stats.dropped_malformed,
        stats.dropped_duplicate_id,
    );
    Ok(())
}

#[derive(serde::Serialize)]
struct PreprocessStats {
    tweets_in: usize,
    docs_out: usize,
    dropped_short: u64,
    phrases_found: usize,
}

fn cmd_preprocess(config: &RunConfig) -> Result<(), CliError> {
    let tweets_path = require_artifact(config, snapshot::TWEETS_FILE)?;
    let tweets = snapshot::read_tweets(&tweets_path).map_err(data_err)?;
    let lexicons = load_lexicons(config)?;

    let token_lists: Vec<Vec<String>> = tweets
        .par_iter()
        .map(|t| {
            let stripped = preprocess::strip_entities(&t.text);
            preprocess::tokenize_normalize(&stripped, &lexicons)
        })
        .collect();

    let (phrases, rewritten) = preprocess::detect_bigrams(
        &token_lists,
        config.preprocess.bigram_min_count,
        config.preprocess.bigram_threshold,
    );
    let docs: Vec<Document> = tweets
        .iter()
        .zip(rewritten)
        .map(|(tweet, tokens)| Document::from_tweet(tweet, tokens))
        .collect();
    let (docs, dropped_short) = preprocess::filter_short(docs);

    let docs_path = out_path(config, snapshot::DOCS_FILE);
    snapshot::write_docs(&docs_path, &docs).map_err(data_err)?;
    let phrases_path = out_path(config, snapshot::PHRASES_FILE);
    snapshot::write_phrases(&phrases_path, &phrases).map_err(data_err)?;
    let stats = PreprocessStats {
        tweets_in: tweets.len(),
        docs_out: docs.len(),
        dropped_short,
        phrases_found: phrases.len(),
    };
    let stats_path = out_path(config, snapshot::PREPROCESS_STATS_FILE);
    snapshot::write_json_pretty(&stats_path, &stats).map_err(data_err)?;

    let mut manifest = RunManifest::new("preprocess", config.seed, config_value(config));
    manifest
        .add_input(snapshot::TWEETS_FILE, &tweets_path)
        .map_err(data_err)?;
    finish_manifest(
        manifest,
        &[
            (snapshot::DOCS_FILE, &docs_path),
            (snapshot::PHRASES_FILE, &phrases_path),
            (snapshot::PREPROCESS_STATS_FILE, &stats_path),
        ],
        config,
    )?;

    println!(
        "preprocess: {} tweets -> {} docs ({} short dropped, {} phrases)",
        stats.tweets_in, stats.docs_out, stats.dropped_short, stats.phrases_found
    );
    Ok(())
}

#[derive(serde::Serialize)]
struct SentimentStats {
    scored: usize,
    positive: usize,
    neutral: usize,
    negative: usize,
}

fn cmd_sentiment(config: &RunConfig) -> Result<(), CliError> {
    let tweets_path = require_artifact(config, snapshot::TWEETS_FILE)?;
    let tweets = snapshot::read_tweets(&tweets_path).map_err(data_err)?;
    let lexicon = load_sentiment_lexicon(config)?;

    let records: Vec<ScoreRecord> = tweets
        .par_iter()
        .map(|t| ScoreRecord::new(&t.id, sentiment::score(&t.text, &lexicon)))
        .collect();

    let scores_path = out_path(config, snapshot::SCORES_FILE);
    snapshot::write_scores(&scores_path, &records).map_err(data_err)?;
    let stats = SentimentStats {
        scored: records.len(),
        positive: records
            .iter()
            .filter(|r| r.polarity == sentiment::Polarity::Positive)
            .count(),
        neutral: records
            .iter()
            .filter(|r| r.polarity == sentiment::Polarity::Neutral)
            .count(),
        negative: records
            .iter()
            .filter(|r| r.polarity == sentiment::Polarity::Negative)
            .count(),
    };
    let stats_path = out_path(config, snapshot::SENTIMENT_STATS_FILE);
    snapshot::write_json_pretty(&stats_path, &stats).map_err(data_err)?;

    let mut manifest = RunManifest::new("sentiment", config.seed, config_value(config));
    manifest
        .add_input(snapshot::TWEETS_FILE, &tweets_path)
        .map_err(data_err)?;
    finish_manifest(
        manifest,
        &[
            (snapshot::SCORES_FILE, &scores_path),
            (snapshot::SENTIMENT_STATS_FILE, &stats_path),
        ],
        config,
    )?;

    println!(
        "sentiment: {} tweets scored ({} positive, {} neutral, {} negative)",
        stats.scored, stats.positive, stats.neutral, stats.negative
    );
    Ok(())
}

fn read_pipeline_docs(config: &RunConfig) -> Result<(PathBuf, Vec<Document>), CliError> {
    let docs_path = require_artifact(config, snapshot::DOCS_FILE)?;
    let docs = snapshot::read_docs(&docs_path).map_err(data_err)?;
    if docs.is_empty() {
        return Err(CliError::Data(
            "document snapshot is empty; nothing to fit".to_string(),
        ));
    }
    Ok((docs_path, docs))
}

fn cmd_topics(config: &RunConfig) -> Result<(), CliError> {
    let (docs_path, docs) = read_pipeline_docs(config)?;
    let mut lda_cfg: LdaConfig = config.lda.lda_config(config.seed);

    let mut sweep_written: Option<PathBuf> = None;
    if let Some([low, high]) = config.lda.k_range {
        let result = topics::sweep_k(&docs, low..=high, &lda_cfg, config.lda.top_n)
            .map_err(data_err)?;
        lda_cfg.k = result.best_k;
        let sweep_path = out_path(config, snapshot::SWEEP_FILE);
        snapshot::write_json_pretty(&sweep_path, &result).map_err(data_err)?;
        println!("topics: sweep selected k = {}", result.best_k);
        sweep_written = Some(sweep_path);
    }

    for warning in topics::config_warnings(&docs, &lda_cfg) {
        eprintln!("warning: {warning}");
    }
    let model = topics::fit(&docs, &lda_cfg).map_err(data_err)?;
    let model_path = out_path(config, snapshot::MODEL_FILE);
    model.save(&model_path).map_err(data_err)?;

    let mut manifest = RunManifest::new("topics", config.seed, config_value(config));
    manifest
        .add_input(snapshot::DOCS_FILE, &docs_path)
        .map_err(data_err)?;
    let mut outputs: Vec<(&str, &Path)> = vec![(snapshot::MODEL_FILE, &model_path)];
    if let Some(sweep_path) = &sweep_written {
        outputs.push((snapshot::SWEEP_FILE, sweep_path));
    }
    finish_manifest(manifest, &outputs, config)?;

    println!(
        "topics: fitted k = {} over {} docs ({} tokens, vocab {})",
        model.num_topics(),
        model.num_docs(),
        model.total_tokens(),
        model.vocab_size()
    );
    Ok(())
}

fn cmd_sweep_k(config: &RunConfig) -> Result<(), CliError> {
    let Some([low, high]) = config.lda.k_range else {
        return Err(CliError::Usage(
            "sweep-k requires lda.k_range in the configuration".to_string(),
        ));
    };
    let (docs_path, docs) = read_pipeline_docs(config)?;
    let lda_cfg = config.lda.lda_config(config.seed);
    let result =
        topics::sweep_k(&docs, low..=high, &lda_cfg, config.lda.top_n).map_err(data_err)?;
    let sweep_path = out_path(config, snapshot::SWEEP_FILE);
    snapshot::write_json_pretty(&sweep_path, &result).map_err(data_err)?;

    let mut manifest = RunManifest::new("sweep-k", config.seed, config_value(config));
    manifest
        .add_input(snapshot::DOCS_FILE, &docs_path)
        .map_err(data_err)?;
    finish_manifest(manifest, &[(snapshot::SWEEP_FILE, &sweep_path)], config)?;

    println!("sweep-k: best k = {} over K in [{low}, {high}]", result.best_k);
    for (k, score) in &result.per_k {
        println!("  k = {k}: coherence {score:.6}");
    }
    Ok(())
}

fn cmd_report(config: &RunConfig) -> Result<(), CliError> {
    let tweets_path = require_artifact(config, snapshot::TWEETS_FILE)?;
    let docs_path = require_artifact(config, snapshot::DOCS_FILE)?;
    let scores_path = require_artifact(config, snapshot::SCORES_FILE)?;
    let model_path = require_artifact(config, snapshot::MODEL_FILE)?;

    let tweets = snapshot::read_tweets(&tweets_path).map_err(data_err)?;
    let docs = snapshot::read_docs(&docs_path).map_err(data_err)?;
    let scores = snapshot::read_scores(&scores_path).map_err(data_err)?;
    let model = TopicModel::load(&model_path).map_err(data_err)?;
    let lexicon = load_sentiment_lexicon(config)?;

    let report_dir = out_path(config, "report");
    let inputs = ReportInputs {
        tweets: &tweets,
        docs: &docs,
        scores: &scores,
        model: &model,
        lexicon: &lexicon,
    };
    let written = write_reports(&report_dir, &inputs, &config.report).map_err(data_err)?;

    let mut manifest = RunManifest::new("report", config.seed, config_value(config));
    manifest
        .add_input(snapshot::TWEETS_FILE, &tweets_path)
        .map_err(data_err)?;
    manifest
        .add_input(snapshot::DOCS_FILE, &docs_path)
        .map_err(data_err)?;
    manifest
        .add_input(snapshot::SCORES_FILE, &scores_path)
        .map_err(data_err)?;
    manifest
        .add_input(snapshot::MODEL_FILE, &model_path)
        .map_err(data_err)?;
    let output_pairs: Vec<(String, &Path)> = written
        .iter()
        .map(|p| {
            (
                format!(
                    "report/{}",
                    p.file_name().unwrap_or_default().to_string_lossy()
                ),
                p.as_path(),
            )
        })
        .collect();
    for (name, path) in &output_pairs {
        manifest.add_output(name, path).map_err(data_err)?;
    }
    manifest.write(&config.output.dir).map_err(data_err)?;

    let countries: BTreeSet<&str> = tweets
        .iter()
        .filter_map(|t| t.country.as_deref())
        .collect();
    println!(
        "report: {} files for {} tweets across {} countries",
        written.len(),
        tweets.len(),
        countries.len()
    );
    Ok(())
}
