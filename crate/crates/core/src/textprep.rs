//! Data-cleaning transforms: topic-tag removal, geographic-name removal,
//! stop-word removal, and their composition variants O, S, SG, and SGT.
//!
//! All transforms operate on raw character strings — no word segmentation.
//! Inside one transform, entries are deleted longest-first so that longer
//! names shadow their substrings, scanning left to right and restarting
//! after each deletion.

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Ordered list of stop words. No duplicates, no empty strings.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StopWordList {
    entries: Vec<String>,
}

/// Ordered list of geographic location names. No duplicates, no empty strings.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GeoLexicon {
    entries: Vec<String>,
}

fn validate_entries(raw: impl IntoIterator<Item = String>) -> Result<Vec<String>> {
    let mut entries = Vec::new();
    for entry in raw {
        if entry.is_empty() {
            return Err(Error::InvalidArgument(
                "lexicon entries must be non-empty".into(),
            ));
        }
        if !entries.contains(&entry) {
            entries.push(entry);
        }
    }
    Ok(entries)
}

/// One entry per line; blank lines and `#`-prefixed comment lines ignored.
fn entries_from_file(path: &Path) -> Result<Vec<String>> {
    let raw = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let lines = raw
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_string);
    validate_entries(lines)
}

impl StopWordList {
    pub fn from_entries<I, S>(entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Ok(StopWordList {
            entries: validate_entries(entries.into_iter().map(Into::into))?,
        })
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        Ok(StopWordList {
            entries: entries_from_file(path.as_ref())?,
        })
    }

    /// The small Chinese stop list shipped with the crate.
    pub fn builtin_zh() -> Self {
        StopWordList::from_entries(
            include_str!("../fixtures/stopwords_zh.txt")
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#')),
        )
        .expect("builtin stop list is valid")
    }

    pub fn entries(&self) -> &[String] {
        &self.entries
    }
}

impl GeoLexicon {
    pub fn from_entries<I, S>(entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Ok(GeoLexicon {
            entries: validate_entries(entries.into_iter().map(Into::into))?,
        })
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        Ok(GeoLexicon {
            entries: entries_from_file(path.as_ref())?,
        })
    }

    pub fn entries(&self) -> &[String] {
        &self.entries
    }
}

/// Which of the three transforms to apply. The four named variants are
/// O (none), S (stop words), SG (stop words + geo), and SGT (all three).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CleaningConfig {
    pub remove_stopwords: bool,
    pub remove_geo: bool,
    pub remove_topic_tags: bool,
}

impl CleaningConfig {
    /// Original text, no cleaning.
    pub const O: CleaningConfig = CleaningConfig {
        remove_stopwords: false,
        remove_geo: false,
        remove_topic_tags: false,
    };
    /// Stop-word removal only.
    pub const S: CleaningConfig = CleaningConfig {
        remove_stopwords: true,
        remove_geo: false,
        remove_topic_tags: false,
    };
    /// Stop-word and geographic-name removal.
    pub const SG: CleaningConfig = CleaningConfig {
        remove_stopwords: true,
        remove_geo: true,
        remove_topic_tags: false,
    };
    /// Stop-word, geographic-name, and topic-tag removal.
    pub const SGT: CleaningConfig = CleaningConfig {
        remove_stopwords: true,
        remove_geo: true,
        remove_topic_tags: true,
    };

    pub fn label(&self) -> &'static str {
        match (self.remove_stopwords, self.remove_geo, self.remove_topic_tags) {
            (false, false, false) => "o",
            (true, false, false) => "s",
            (true, true, false) => "sg",
            (true, true, true) => "sgt",
            _ => "custom",
        }
    }

    pub fn is_noop(&self) -> bool {
        *self == CleaningConfig::O
    }
}

impl FromStr for CleaningConfig {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_lowercase().as_str() {
            "o" => Ok(CleaningConfig::O),
            "s" => Ok(CleaningConfig::S),
            "sg" => Ok(CleaningConfig::SG),
            "sgt" => Ok(CleaningConfig::SGT),
            other => Err(Error::InvalidArgument(format!(
                "unknown cleaning mode {other:?} (expected o, s, sg, or sgt)"
            ))),
        }
    }
}

impl fmt::Display for CleaningConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Deletes every occurrence of every entry, longest entry first.
fn delete_entries(text: &str, entries: &[String]) -> String {
    let mut order: Vec<&String> = entries.iter().collect();
    order.sort_by_key(|e| std::cmp::Reverse(e.chars().count()));
    let mut out = text.to_string();
    for entry in order {
        while let Some(pos) = out.find(entry.as_str()) {
            out.replace_range(pos..pos + entry.len(), "");
        }
    }
    out
}

/// Deletes every `#…#` span, both delimiters included. Pairing is
/// shortest-match: the first `#` closes with the next one, with no
/// nesting. A trailing unpaired `#` is left untouched.
pub fn remove_topic_tags(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut rest = text;
    loop {
        match rest.find('#') {
            None => {
                out.push_str(rest);
                break;
            }
            Some(open) => {
                out.push_str(&rest[..open]);
                let after = &rest[open + 1..];
                match after.find('#') {
                    Some(close) => rest = &after[close + 1..],
                    None => {
                        out.push('#');
                        out.push_str(after);
                        break;
                    }
                }
            }
        }
    }
    out
}

/// Deletes every occurrence of every location name, longest-first.
pub fn remove_geo(text: &str, geo: &GeoLexicon) -> String {
    delete_entries(text, &geo.entries)
}

/// Deletes every occurrence of every stop word, longest-first.
pub fn remove_stopwords(text: &str, stops: &StopWordList) -> String {
    delete_entries(text, &stops.entries)
}

/// Applies the enabled transforms in order: topic tags, then geographic
/// names, then stop words.
pub fn apply_cleaning(
    text: &str,
    config: CleaningConfig,
    stops: &StopWordList,
    geo: &GeoLexicon,
) -> String {
    let mut out = if config.remove_topic_tags {
        remove_topic_tags(text)
    } else {
        text.to_string()
    };
    if config.remove_geo {
        out = remove_geo(&out, geo);
    }
    if config.remove_stopwords {
        out = remove_stopwords(&out, stops);
    }
    out
}
