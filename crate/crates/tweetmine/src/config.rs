//! Run configuration: a single TOML file with one section per pipeline
//! stage. Command-line flags override file values; resource paths default to
//! the bundled tables.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::CsvSchema;
use crate::topics::LdaConfig;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("config parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("config error: {0}")]
    Invalid(String),
    #[error("configured file does not exist: {0}")]
    MissingFile(PathBuf),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Worker-thread cap; 0 means the rayon default.
    #[serde(default)]
    pub threads: usize,
    pub input: InputConfig,
    #[serde(default)]
    pub resources: ResourceConfig,
    #[serde(default)]
    pub preprocess: PreprocessConfig,
    #[serde(default)]
    pub lda: LdaSection,
    #[serde(default)]
    pub report: ReportConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

fn default_seed() -> u64 {
    42
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputConfig {
    pub path: PathBuf,
    #[serde(default = "default_id_column")]
    pub id_column: String,
    #[serde(default = "default_text_column")]
    pub text_column: String,
    #[serde(default = "default_location_column")]
    pub location_column: String,
    #[serde(default = "default_date_column")]
    pub date_column: String,
    #[serde(default = "default_date_format")]
    pub date_format: String,
    #[serde(default = "default_delimiter")]
    pub delimiter: String,
}

fn default_id_column() -> String {
    "id".to_string()
}
fn default_text_column() -> String {
    "text".to_string()
}
fn default_location_column() -> String {
    "user_location".to_string()
}
fn default_date_column() -> String {
    "date".to_string()
}
fn default_date_format() -> String {
    "%Y-%m-%d %H:%M:%S".to_string()
}
fn default_delimiter() -> String {
    ",".to_string()
}

impl InputConfig {
    pub fn csv_schema(&self) -> Result<CsvSchema, ConfigError> {
        let delim = self.delimiter.as_bytes();
        if delim.len() != 1 {
            return Err(ConfigError::Invalid(format!(
                "delimiter must be a single byte, got {:?}",
                self.delimiter
            )));
        }
        Ok(CsvSchema {
            id_column: self.id_column.clone(),
            text_column: self.text_column.clone(),
            location_column: self.location_column.clone(),
            date_column: self.date_column.clone(),
            date_format: self.date_format.clone(),
            delimiter: delim[0],
        })
    }
}

/// Optional overrides for the bundled resource tables.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResourceConfig {
    pub lexicon: Option<PathBuf>,
    pub emoji_map: Option<PathBuf>,
    pub stopwords: Option<PathBuf>,
    /// Extra "meaningless words" appended to the stopword list.
    pub extra_stopwords: Option<PathBuf>,
    pub lemmas: Option<PathBuf>,
    pub gazetteer: Option<PathBuf>,
    pub brands: Option<PathBuf>,
    /// Restrict tokens to this wordlist instead of the ASCII-letter filter.
    pub english_wordlist: Option<PathBuf>,
}

impl ResourceConfig {
    fn paths(&self) -> impl Iterator<Item = &PathBuf> {
        [
            &self.lexicon,
            &self.emoji_map,
            &self.stopwords,
            &self.extra_stopwords,
            &self.lemmas,
            &self.gazetteer,
            &self.brands,
            &self.english_wordlist,
        ]
        .into_iter()
        .flatten()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PreprocessConfig {
    #[serde(default = "default_bigram_min_count")]
    pub bigram_min_count: u64,
    #[serde(default = "default_bigram_threshold")]
    pub bigram_threshold: f64,
}

fn default_bigram_min_count() -> u64 {
    5
}
fn default_bigram_threshold() -> f64 {
    10.0
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        PreprocessConfig {
            bigram_min_count: default_bigram_min_count(),
            bigram_threshold: default_bigram_threshold(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LdaSection {
    #[serde(default = "default_k")]
    pub k: usize,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_eta")]
    pub eta: f64,
    #[serde(default = "default_iterations")]
    pub iterations: usize,
    #[serde(default = "default_burn_in")]
    pub burn_in: usize,
    /// Inclusive `[low, high]` sweep range for the topic count.
    pub k_range: Option<[usize; 2]>,
    #[serde(default = "default_top_n")]
    pub top_n: usize,
}

fn default_k() -> usize {
    10
}
fn default_alpha() -> f64 {
    0.01
}
fn default_eta() -> f64 {
    0.1
}
fn default_iterations() -> usize {
    1000
}
fn default_burn_in() -> usize {
    200
}
fn default_top_n() -> usize {
    10
}

impl Default for LdaSection {
    fn default() -> Self {
        LdaSection {
            k: default_k(),
            alpha: default_alpha(),
            eta: default_eta(),
            iterations: default_iterations(),
            burn_in: default_burn_in(),
            k_range: None,
            top_n: default_top_n(),
        }
    }
}

impl LdaSection {
    pub fn lda_config(&self, seed: u64) -> LdaConfig {
        LdaConfig {
            k: self.k,
            alpha: self.alpha,
            eta: self.eta,
            iterations: self.iterations,
            burn_in: self.burn_in,
            seed,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportConfig {
    #[serde(default = "default_top_terms")]
    pub top_terms: usize,
    #[serde(default = "default_wordcloud_terms")]
    pub wordcloud_terms: usize,
    #[serde(default = "default_emotional_words")]
    pub emotional_words: usize,
    #[serde(default = "default_topics_listed")]
    pub topics_listed: usize,
    #[serde(default)]
    pub svg: bool,
}

fn default_top_terms() -> usize {
    10
}
fn default_wordcloud_terms() -> usize {
    50
}
fn default_emotional_words() -> usize {
    30
}
fn default_topics_listed() -> usize {
    5
}

impl Default for ReportConfig {
    fn default() -> Self {
        ReportConfig {
            top_terms: default_top_terms(),
            wordcloud_terms: default_wordcloud_terms(),
            emotional_words: default_emotional_words(),
            topics_listed: default_topics_listed(),
            svg: false,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_output_dir")]
    pub dir: PathBuf,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            dir: default_output_dir(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let config: RunConfig = toml::from_str(&text)?;
        config.validate()?;
        Ok(config)
    }

    /// Check structural constraints and that every referenced file exists.
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.input.csv_schema()?;
        if !self.input.path.exists() {
            return Err(ConfigError::MissingFile(self.input.path.clone()));
        }
        for path in self.resources.paths() {
            if !path.exists() {
                return Err(ConfigError::MissingFile(path.clone()));
            }
        }
        if let Some([low, high]) = self.lda.k_range {
            if low < 1 || low > high {
                return Err(ConfigError::Invalid(format!(
                    "k_range [{low}, {high}] is not a non-empty range starting at 1 or above"
                )));
            }
        }
        if self.lda.k < 1 {
            return Err(ConfigError::Invalid("lda.k must be >= 1".to_string()));
        }
        if self.lda.burn_in >= self.lda.iterations {
            return Err(ConfigError::Invalid(
                "lda.burn_in must be < lda.iterations".to_string(),
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_config(dir: &Path, body: &str) -> PathBuf {
        let path = dir.join("run.toml");
        let mut f = std::fs::File::create(&path).unwrap();
        f.write_all(body.as_bytes()).unwrap();
        path
    }

    #[test]
    fn minimal_config_gets_defaults() {
        let dir = tempfile::tempdir().unwrap();
        let input = dir.path().join("in.csv");
        std::fs::write(&input, "id,text\n").unwrap();
        let path = write_config(
            dir.path(),
            &format!("[input]\npath = {:?}\n", input.to_str().unwrap()),
        );
        let config = RunConfig::load(&path).unwrap();
        assert_eq!(config.seed, 42);
        assert_eq!(config.lda.alpha, 0.01);
        assert_eq!(config.lda.eta, 0.1);
        assert_eq!(config.preprocess.bigram_min_count, 5);
        assert_eq!(config.report.emotional_words, 30);
    }

    #[test]
    fn missing_input_file_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_config(dir.path(), "[input]\npath = \"/does/not/exist.csv\"\n");
        assert!(matches!(
            RunConfig::load(&path),
            Err(ConfigError::MissingFile(_))
        ));
    }

    #[test]
    fn bad_k_range_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let input = dir.path().join("in.csv");
        std::fs::write(&input, "id,text\n").unwrap();
        let path = write_config(
            dir.path(),
            &format!(
                "[input]\npath = {:?}\n[lda]\nk_range = [5, 2]\n",
                input.to_str().unwrap()
            ),
        );
        assert!(matches!(
            RunConfig::load(&path),
            Err(ConfigError::Invalid(_))
        ));
    }

    #[test]
    fn unknown_keys_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let input = dir.path().join("in.csv");
        std::fs::write(&input, "id,text\n").unwrap();
        let path = write_config(
            dir.path(),
            &format!(
                "[input]\npath = {:?}\ntypo_key = 3\n",
                input.to_str().unwrap()
            ),
        );
        assert!(matches!(RunConfig::load(&path), Err(ConfigError::Parse(_))));
    }
}
