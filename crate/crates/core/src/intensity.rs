//! Keyword-based physical impact rating: a four-level disaster lexicon
//! organized by aspect, priority-ordered matching, and level-distribution
//! statistics.
//!
//! Matching is raw substring containment — no segmentation, no regex.
//! Two rules resolve texts that hit keywords at several levels:
//!
//! 1. A match strictly contained in a longer match is shadowed and
//!    ignored, so a qualifier keyword beats the bare keyword inside it
//!    ("轻微开裂" at level 2 wins over its substrings "轻微" at level 1 and
//!    "开裂" at level 3).
//! 2. Among the surviving matches the lowest-numbered level wins
//!    (priority L1 > L2 > L3 > L4). Keywords duplicated verbatim across
//!    levels ("被困" at L2 and L3) therefore resolve to the lower level.
//!
//! Texts matching nothing are unrated and drop out of impact statistics.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;
use std::sync::OnceLock;

use aho_corasick::AhoCorasick;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Physical impact levels, least severe first. Lower levels match with
/// higher priority.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub enum DisasterLevel {
    L1,
    L2,
    L3,
    L4,
}

impl DisasterLevel {
    pub const ALL: [DisasterLevel; 4] = [
        DisasterLevel::L1,
        DisasterLevel::L2,
        DisasterLevel::L3,
        DisasterLevel::L4,
    ];

    pub fn number(self) -> u8 {
        match self {
            DisasterLevel::L1 => 1,
            DisasterLevel::L2 => 2,
            DisasterLevel::L3 => 3,
            DisasterLevel::L4 => 4,
        }
    }

    pub fn from_number(n: u8) -> Option<DisasterLevel> {
        match n {
            1 => Some(DisasterLevel::L1),
            2 => Some(DisasterLevel::L2),
            3 => Some(DisasterLevel::L3),
            4 => Some(DisasterLevel::L4),
            _ => None,
        }
    }
}

impl fmt::Display for DisasterLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "L{}", self.number())
    }
}

/// The five observation aspects of the lexicon. Aspects organize the
/// keyword lists; they do not affect the rating verdict.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(rename_all = "snake_case")]
pub enum Aspect {
    HumanFeeling,
    HouseDamage,
    OtherPhenomena,
    Casualties,
    Lifeline,
}

impl Aspect {
    pub const ALL: [Aspect; 5] = [
        Aspect::HumanFeeling,
        Aspect::HouseDamage,
        Aspect::OtherPhenomena,
        Aspect::Casualties,
        Aspect::Lifeline,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Aspect::HumanFeeling => "human feeling",
            Aspect::HouseDamage => "house damage",
            Aspect::OtherPhenomena => "other phenomena",
            Aspect::Casualties => "casualties",
            Aspect::Lifeline => "lifeline",
        }
    }
}

impl fmt::Display for Aspect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Deserialize)]
struct LexiconFile {
    levels: Vec<LevelBlock>,
}

#[derive(Deserialize)]
struct LevelBlock {
    level: u8,
    human_feeling: Vec<String>,
    house_damage: Vec<String>,
    other_phenomena: Vec<String>,
    casualties: Vec<String>,
    lifeline: Vec<String>,
}

impl LevelBlock {
    fn aspect(&self, aspect: Aspect) -> &[String] {
        match aspect {
            Aspect::HumanFeeling => &self.human_feeling,
            Aspect::HouseDamage => &self.house_damage,
            Aspect::OtherPhenomena => &self.other_phenomena,
            Aspect::Casualties => &self.casualties,
            Aspect::Lifeline => &self.lifeline,
        }
    }
}

/// Keyword lists per (level, aspect) cell plus a pooled multi-pattern
/// matcher. Immutable after load; rating is a pure function of the text.
#[derive(Debug, Clone)]
pub struct KeywordLexicon {
    cells: BTreeMap<(DisasterLevel, Aspect), Vec<String>>,
    matcher: Option<AhoCorasick>,
    pattern_levels: Vec<DisasterLevel>,
}

impl KeywordLexicon {
    pub fn from_json_str(raw: &str, origin: &Path) -> Result<Self> {
        let file: LexiconFile = serde_json::from_str(raw)
            .map_err(|e| Error::schema(origin, format!("invalid lexicon JSON: {e}")))?;

        let mut cells = BTreeMap::new();
        for block in &file.levels {
            let level = DisasterLevel::from_number(block.level).ok_or_else(|| {
                Error::schema(origin, format!("unknown level {} (expected 1–4)", block.level))
            })?;
            for aspect in Aspect::ALL {
                let keywords = block.aspect(aspect);
                let mut cell = Vec::with_capacity(keywords.len());
                for kw in keywords {
                    if kw.is_empty() {
                        return Err(Error::schema(
                            origin,
                            format!("empty keyword under level {} {aspect}", block.level),
                        ));
                    }
                    if cell.contains(kw) {
                        return Err(Error::schema(
                            origin,
                            format!("duplicate keyword {kw:?} under level {} {aspect}", block.level),
                        ));
                    }
                    cell.push(kw.clone());
                }
                if cells.insert((level, aspect), cell).is_some() {
                    return Err(Error::schema(
                        origin,
                        format!("level {} appears more than once", block.level),
                    ));
                }
            }
        }
        for level in DisasterLevel::ALL {
            if !cells.contains_key(&(level, Aspect::HumanFeeling)) {
                return Err(Error::schema(origin, format!("missing level {}", level.number())));
            }
        }

        let mut patterns = Vec::new();
        let mut pattern_levels = Vec::new();
        for ((level, _), keywords) in &cells {
            for kw in keywords {
                patterns.push(kw.clone());
                pattern_levels.push(*level);
            }
        }
        let matcher = if patterns.is_empty() {
            None
        } else {
            Some(
                AhoCorasick::new(&patterns)
                    .map_err(|e| Error::schema(origin, format!("cannot build matcher: {e}")))?,
            )
        };

        Ok(KeywordLexicon {
            cells,
            matcher,
            pattern_levels,
        })
    }

    pub fn keywords(&self, level: DisasterLevel, aspect: Aspect) -> &[String] {
        self.cells
            .get(&(level, aspect))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// Every (keyword, level, aspect) triple in the lexicon.
    pub fn iter_keywords(
        &self,
    ) -> impl Iterator<Item = (&str, DisasterLevel, Aspect)> + '_ {
        self.cells.iter().flat_map(|(&(level, aspect), keywords)| {
            keywords.iter().map(move |kw| (kw.as_str(), level, aspect))
        })
    }

    /// Rates a text: collect every keyword occurrence, drop occurrences
    /// strictly contained in a longer one, and return the lowest level
    /// among the survivors. No surviving match means unrated (`None`).
    pub fn rate(&self, text: &str) -> Option<DisasterLevel> {
        let matcher = self.matcher.as_ref()?;
        let spans: Vec<(usize, usize, DisasterLevel)> = matcher
            .find_overlapping_iter(text)
            .map(|m| (m.start(), m.end(), self.pattern_levels[m.pattern().as_usize()]))
            .collect();

        let mut best: Option<DisasterLevel> = None;
        'spans: for &(start, end, level) in &spans {
            for &(other_start, other_end, _) in &spans {
                let strictly_longer = (other_end - other_start) > (end - start);
                if strictly_longer && other_start <= start && end <= other_end {
                    continue 'spans; // shadowed by a longer match
                }
            }
            best = Some(match best {
                Some(current) if current <= level => current,
                _ => level,
            });
        }
        best
    }
}

/// Loads and validates a lexicon JSON file.
pub fn load_lexicon(path: impl AsRef<Path>) -> Result<KeywordLexicon> {
    let path = path.as_ref();
    let raw = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    KeywordLexicon::from_json_str(&raw, path)
}

/// The default lexicon shipped with the crate (the full Chinese keyword
/// table, all four levels by five aspects).
pub fn builtin_lexicon() -> &'static KeywordLexicon {
    static LEXICON: OnceLock<KeywordLexicon> = OnceLock::new();
    LEXICON.get_or_init(|| {
        KeywordLexicon::from_json_str(
            include_str!("../fixtures/intensity_lexicon.json"),
            Path::new("fixtures/intensity_lexicon.json"),
        )
        .expect("builtin lexicon is valid")
    })
}

/// Counts per level, unrated tally, and per-level shares of rated posts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelDistribution {
    pub counts: BTreeMap<DisasterLevel, u64>,
    pub unrated: u64,
    pub rated_total: u64,
    /// Share of rated posts per level; all zeros when nothing was rated.
    pub percentages: BTreeMap<DisasterLevel, f64>,
}

impl LevelDistribution {
    pub fn share(&self, level: DisasterLevel) -> f64 {
        self.percentages[&level]
    }

    pub fn total(&self) -> u64 {
        self.rated_total + self.unrated
    }
}

/// Aggregates ratings into a level distribution. Percentages are taken
/// over rated posts only.
pub fn distribution<I>(ratings: I) -> LevelDistribution
where
    I: IntoIterator<Item = Option<DisasterLevel>>,
{
    let mut counts: BTreeMap<DisasterLevel, u64> =
        DisasterLevel::ALL.into_iter().map(|l| (l, 0)).collect();
    let mut unrated = 0u64;
    for rating in ratings {
        match rating {
            Some(level) => *counts.get_mut(&level).unwrap() += 1,
            None => unrated += 1,
        }
    }
    let rated_total: u64 = counts.values().sum();
    let percentages = DisasterLevel::ALL
        .into_iter()
        .map(|l| {
            let share = if rated_total == 0 {
                0.0
            } else {
                counts[&l] as f64 / rated_total as f64
            };
            (l, share)
        })
        .collect();
    LevelDistribution {
        counts,
        unrated,
        rated_total,
        percentages,
    }
}
