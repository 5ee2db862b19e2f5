//! Corpus loading: CSV ingestion, location resolution, brand tagging.
//!
//! Ingestion is a single sequential pass over the input file. Rows are
//! dropped (and counted) rather than aborting the run, except for structural
//! problems: a missing file or a missing configured column is fatal.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{BufReader, Read};
use std::path::Path;

use chrono::{DateTime, NaiveDateTime, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Bundled location-alias table.
pub const GAZETTEER_TSV: &str = include_str!("../resources/gazetteer.tsv");
/// Bundled brand-alias table.
pub const BRANDS_TSV: &str = include_str!("../resources/brands.tsv");

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot open {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("input is missing configured column {0:?}")]
    MissingColumn(String),
    #[error("input has no header row")]
    MissingHeader,
    #[error("bad resource line {line}: {reason}")]
    BadResource { line: usize, reason: String },
    #[error("brand alias {alias:?} is assigned to more than one brand")]
    DuplicateAlias { alias: String },
    #[error("unknown brand name {0:?}")]
    UnknownBrand(String),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

/// One of the seven vaccine brands tracked by the engine.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub enum BrandId {
    #[serde(rename = "Pfizer/BioNTech")]
    PfizerBiontech,
    #[serde(rename = "Sinopharm")]
    Sinopharm,
    #[serde(rename = "Sinovac")]
    Sinovac,
    #[serde(rename = "Oxford/AstraZeneca")]
    OxfordAstrazeneca,
    #[serde(rename = "Moderna")]
    Moderna,
    #[serde(rename = "Covaxin")]
    Covaxin,
    #[serde(rename = "Sputnik V")]
    SputnikV,
}

impl BrandId {
    pub const ALL: [BrandId; 7] = [
        BrandId::PfizerBiontech,
        BrandId::Sinopharm,
        BrandId::Sinovac,
        BrandId::OxfordAstrazeneca,
        BrandId::Moderna,
        BrandId::Covaxin,
        BrandId::SputnikV,
    ];

    pub fn canonical_name(self) -> &'static str {
        match self {
            BrandId::PfizerBiontech => "Pfizer/BioNTech",
            BrandId::Sinopharm => "Sinopharm",
            BrandId::Sinovac => "Sinovac",
            BrandId::OxfordAstrazeneca => "Oxford/AstraZeneca",
            BrandId::Moderna => "Moderna",
            BrandId::Covaxin => "Covaxin",
            BrandId::SputnikV => "Sputnik V",
        }
    }

    pub fn from_canonical_name(name: &str) -> Option<BrandId> {
        BrandId::ALL
            .iter()
            .copied()
            .find(|b| b.canonical_name() == name)
    }
}

impl fmt::Display for BrandId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.canonical_name())
    }
}

/// One raw corpus record that survived the ingestion filters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tweet {
    pub id: String,
    pub text: String,
    pub location_raw: String,
    pub created_at: DateTime<Utc>,
    pub country: Option<String>,
    pub brands: BTreeSet<BrandId>,
}

/// Alias table mapping free-text location substrings to country codes.
///
/// Lookup is deterministic: the longest alias contained in the input wins,
/// ties broken lexicographically by alias.
#[derive(Debug, Clone)]
pub struct Gazetteer {
    // sorted by (length desc, alias asc) so the first hit is the winner
    entries: Vec<(String, String)>,
}

impl Gazetteer {
    pub fn bundled() -> Result<Gazetteer, CorpusError> {
        Gazetteer::from_tsv(GAZETTEER_TSV)
    }

    pub fn from_path(path: &Path) -> Result<Gazetteer, CorpusError> {
        Gazetteer::from_tsv(&read_file(path)?)
    }

    /// Parse `alias<TAB>code` lines; `#` starts a comment, blank lines skipped.
    pub fn from_tsv(data: &str) -> Result<Gazetteer, CorpusError> {
        let mut entries = Vec::new();
        for (alias, code, line_no) in resource_pairs(data)? {
            if code.len() != 2 || !code.chars().all(|c| c.is_ascii_uppercase()) {
                return Err(CorpusError::BadResource {
                    line: line_no,
                    reason: format!("{code:?} is not an ISO 3166-1 alpha-2 code"),
                });
            }
            entries.push((alias.to_lowercase(), code.to_string()));
        }
        entries.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then_with(|| a.0.cmp(&b.0)));
        entries.dedup_by(|a, b| a.0 == b.0);
        Ok(Gazetteer { entries })
    }

    /// All alias entries in match-priority order.
    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    /// Resolve a free-text location to a country code, if any alias matches.
    pub fn resolve(&self, location_raw: &str) -> Option<&str> {
        if location_raw.is_empty() {
            return None;
        }
        let needle = location_raw.to_lowercase();
        self.entries
            .iter()
            .find(|(alias, _)| needle.contains(alias.as_str()))
            .map(|(_, code)| code.as_str())
    }
}

/// Alias table for attributing tweets to vaccine brands.
#[derive(Debug, Clone)]
pub struct BrandTable {
    aliases: Vec<(String, BrandId)>,
}

impl BrandTable {
    pub fn bundled() -> Result<BrandTable, CorpusError> {
        BrandTable::from_tsv(BRANDS_TSV)
    }

    pub fn from_path(path: &Path) -> Result<BrandTable, CorpusError> {
        BrandTable::from_tsv(&read_file(path)?)
    }

    /// Parse `alias<TAB>brand` lines. Alias sets must be disjoint across
    /// brands after lowercasing.
    pub fn from_tsv(data: &str) -> Result<BrandTable, CorpusError> {
        let mut aliases: Vec<(String, BrandId)> = Vec::new();
        let mut seen = HashSet::new();
        for (alias, brand_name, _line) in resource_pairs(data)? {
            let brand = BrandId::from_canonical_name(brand_name)
                .ok_or_else(|| CorpusError::UnknownBrand(brand_name.to_string()))?;
            let alias = alias.to_lowercase();
            if !seen.insert(alias.clone()) {
                return Err(CorpusError::DuplicateAlias { alias });
            }
            aliases.push((alias, brand));
        }
        aliases.sort();
        Ok(BrandTable { aliases })
    }

    pub fn aliases(&self) -> &[(String, BrandId)] {
        &self.aliases
    }

    /// Every brand whose alias occurs in `text` as a word-bounded,
    /// case-insensitive substring.
    pub fn tag(&self, text: &str) -> BTreeSet<BrandId> {
        let haystack = text.to_lowercase();
        self.aliases
            .iter()
            .filter(|(alias, _)| contains_word_bounded(&haystack, alias))
            .map(|(_, brand)| *brand)
            .collect()
    }
}

/// Substring match where both ends fall on non-alphanumeric boundaries.
fn contains_word_bounded(haystack: &str, needle: &str) -> bool {
    if needle.is_empty() {
        return false;
    }
    let mut start = 0;
    while let Some(pos) = haystack[start..].find(needle) {
        let begin = start + pos;
        let end = begin + needle.len();
        let left_ok = begin == 0
            || !haystack[..begin]
                .chars()
                .next_back()
                .is_some_and(|c| c.is_alphanumeric());
        let right_ok = end == haystack.len()
            || !haystack[end..]
                .chars()
                .next()
                .is_some_and(|c| c.is_alphanumeric());
        if left_ok && right_ok {
            return true;
        }
        start = begin + needle.chars().next().map_or(1, char::len_utf8);
    }
    false
}

fn resource_pairs(data: &str) -> Result<Vec<(&str, &str, usize)>, CorpusError> {
    let mut pairs = Vec::new();
    for (idx, raw) in data.lines().enumerate() {
        let line = raw.trim_end_matches('\r');
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (a, b) = line.split_once('\t').ok_or_else(|| CorpusError::BadResource {
            line: idx + 1,
            reason: "expected two tab-separated fields".to_string(),
        })?;
        let (a, b) = (a.trim(), b.trim());
        if a.is_empty() || b.is_empty() {
            return Err(CorpusError::BadResource {
                line: idx + 1,
                reason: "empty field".to_string(),
            });
        }
        pairs.push((a, b, idx + 1));
    }
    Ok(pairs)
}

fn read_file(path: &Path) -> Result<String, CorpusError> {
    let mut buf = String::new();
    File::open(path)
        .and_then(|f| {
            let mut r = BufReader::new(f);
            r.read_to_string(&mut buf)
        })
        .map_err(|source| CorpusError::Io {
            path: path.display().to_string(),
            source,
        })?;
    Ok(buf)
}

/// Column names and CSV dialect for the input file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CsvSchema {
    pub id_column: String,
    pub text_column: String,
    pub location_column: String,
    pub date_column: String,
    /// `chrono` format string for the date column.
    pub date_format: String,
    pub delimiter: u8,
}

impl Default for CsvSchema {
    fn default() -> Self {
        CsvSchema {
            id_column: "id".to_string(),
            text_column: "text".to_string(),
            location_column: "user_location".to_string(),
            date_column: "date".to_string(),
            date_format: "%Y-%m-%d %H:%M:%S".to_string(),
            delimiter: b',',
        }
    }
}

/// Per-run ingestion counters. `total_rows` always equals `emitted` plus the
/// sum of all drop counters.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestStats {
    pub total_rows: u64,
    pub emitted: u64,
    /// Rows with an empty or whitespace-only location.
    pub dropped_empty_location: u64,
    /// Rows whose location matched no gazetteer alias.
    pub dropped_unresolved_location: u64,
    /// Rows with missing fields, empty text, or an unparseable date.
    pub dropped_malformed: u64,
    /// Rows repeating an already-seen tweet id (first occurrence kept).
    pub dropped_duplicate_id: u64,
}

impl IngestStats {
    pub fn dropped_location(&self) -> u64 {
        self.dropped_empty_location + self.dropped_unresolved_location
    }

    pub fn dropped_total(&self) -> u64 {
        self.dropped_location() + self.dropped_malformed + self.dropped_duplicate_id
    }

    pub fn arithmetic_holds(&self) -> bool {
        self.total_rows == self.emitted + self.dropped_total()
    }
}

/// Ingest a tweet CSV: apply the location filter, resolve countries, tag
/// brands, and drop duplicates/malformed rows while counting every drop.
///
/// Row order is preserved; the same file and configuration always yield the
/// same tweet sequence.
pub fn ingest_csv(
    path: &Path,
    schema: &CsvSchema,
    gazetteer: &Gazetteer,
    brands: &BrandTable,
) -> Result<(Vec<Tweet>, IngestStats), CorpusError> {
    let file = File::open(path).map_err(|source| CorpusError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(schema.delimiter)
        .flexible(true)
        .from_reader(BufReader::new(file));

    let headers = reader.headers().map_err(|_| CorpusError::MissingHeader)?;
    let col = |name: &str| -> Result<usize, CorpusError> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CorpusError::MissingColumn(name.to_string()))
    };
    let id_idx = col(&schema.id_column)?;
    let text_idx = col(&schema.text_column)?;
    let loc_idx = col(&schema.location_column)?;
    let date_idx = col(&schema.date_column)?;

    let mut stats = IngestStats::default();
    let mut seen_ids: HashSet<String> = HashSet::new();
    let mut tweets = Vec::new();

    for record in reader.records() {
        stats.total_rows += 1;
        let record = match record {
            Ok(r) => r,
            Err(_) => {
                stats.dropped_malformed += 1;
                continue;
            }
        };
        let field = |idx: usize| record.get(idx).map(str::trim);
        let (id, text, location, date) = match (
            field(id_idx),
            field(text_idx),
            field(loc_idx),
            field(date_idx),
        ) {
            (Some(id), Some(text), Some(loc), Some(date)) => (id, text, loc, date),
            _ => {
                stats.dropped_malformed += 1;
                continue;
            }
        };
        if id.is_empty() || text.is_empty() {
            stats.dropped_malformed += 1;
            continue;
        }
        let created_at = match NaiveDateTime::parse_from_str(date, &schema.date_format) {
            Ok(dt) => DateTime::<Utc>::from_naive_utc_and_offset(dt, Utc),
            Err(_) => {
                stats.dropped_malformed += 1;
                continue;
            }
        };
        if location.is_empty() {
            stats.dropped_empty_location += 1;
            continue;
        }
        let country = match gazetteer.resolve(location) {
            Some(code) => code.to_string(),
            None => {
                stats.dropped_unresolved_location += 1;
                continue;
            }
        };
        if seen_ids.contains(id) {
            stats.dropped_duplicate_id += 1;
            continue;
        }
        seen_ids.insert(id.to_string());
        let tagged = brands.tag(text);
        tweets.push(Tweet {
            id: id.to_string(),
            text: text.to_string(),
            location_raw: location.to_string(),
            created_at,
            country: Some(country),
            brands: tagged,
        });
        stats.emitted += 1;
    }
    debug_assert!(stats.arithmetic_holds());
    Ok((tweets, stats))
}
