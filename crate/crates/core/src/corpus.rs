//! Microblog records, JSONL ingestion, id-based deduplication, and the
//! golden-rescue-window filter.
//!
//! The corpus wire format is UTF-8 JSONL, one object per line with keys
//! `id`, `text`, `published_at` (`YYYY-MM-DD HH:MM`), and an optional
//! `user_id`. Unknown keys are ignored. Timestamps carry no timezone; a
//! single-event corpus is assumed to share one local zone.

use std::collections::HashSet;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use chrono::{Duration, NaiveDateTime};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Timestamp layout shared by corpus files, label files, and reports.
pub const MINUTE_FORMAT: &str = "%Y-%m-%d %H:%M";

/// Length of the golden rescue window in hours.
pub const GOLDEN_RESCUE_HOURS: u32 = 48;

pub fn parse_minute(raw: &str) -> Result<NaiveDateTime> {
    NaiveDateTime::parse_from_str(raw.trim(), MINUTE_FORMAT).map_err(|e| {
        Error::InvalidArgument(format!(
            "bad timestamp {raw:?} (expected \"YYYY-MM-DD HH:MM\"): {e}"
        ))
    })
}

pub fn format_minute(t: NaiveDateTime) -> String {
    t.format(MINUTE_FORMAT).to_string()
}

/// Serde adapter keeping timestamps in the minute-precision wire format.
pub mod minute_fmt {
    use super::{NaiveDateTime, MINUTE_FORMAT};
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(t: &NaiveDateTime, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&t.format(MINUTE_FORMAT).to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<NaiveDateTime, D::Error> {
        let raw = String::deserialize(d)?;
        NaiveDateTime::parse_from_str(&raw, MINUTE_FORMAT).map_err(de::Error::custom)
    }

    /// Same format for `Vec<NaiveDateTime>` fields.
    pub mod vec {
        use super::*;

        pub fn serialize<S: Serializer>(v: &[NaiveDateTime], s: S) -> Result<S::Ok, S::Error> {
            s.collect_seq(v.iter().map(|t| t.format(MINUTE_FORMAT).to_string()))
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(
            d: D,
        ) -> Result<Vec<NaiveDateTime>, D::Error> {
            let raw: Vec<String> = Vec::deserialize(d)?;
            raw.iter()
                .map(|s| {
                    NaiveDateTime::parse_from_str(s, MINUTE_FORMAT).map_err(de::Error::custom)
                })
                .collect()
        }
    }
}

/// One microblog post as crawled: unique id, text, minute-precision
/// publication time, optional author id.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Microblog {
    pub id: String,
    pub text: String,
    #[serde(with = "minute_fmt")]
    pub published_at: NaiveDateTime,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub user_id: Option<String>,
}

/// Half-open analysis window `[event_time, event_time + duration_hours)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EventWindow {
    event_time: NaiveDateTime,
    duration_hours: u32,
}

impl EventWindow {
    pub fn new(event_time: NaiveDateTime, duration_hours: u32) -> Result<Self> {
        if duration_hours == 0 {
            return Err(Error::InvalidArgument(
                "window duration must be at least one hour".into(),
            ));
        }
        Ok(EventWindow {
            event_time,
            duration_hours,
        })
    }

    /// The standard 48-hour window after an event.
    pub fn golden_rescue(event_time: NaiveDateTime) -> Self {
        EventWindow {
            event_time,
            duration_hours: GOLDEN_RESCUE_HOURS,
        }
    }

    pub fn event_time(&self) -> NaiveDateTime {
        self.event_time
    }

    pub fn duration_hours(&self) -> u32 {
        self.duration_hours
    }

    pub fn end(&self) -> NaiveDateTime {
        self.event_time + Duration::hours(i64::from(self.duration_hours))
    }

    /// True iff `t` lies in `[event_time, end)`.
    pub fn contains(&self, t: NaiveDateTime) -> bool {
        t >= self.event_time && t < self.end()
    }

    /// Index of the hourly bucket holding `t`, or `None` outside the window.
    /// Bucket `i` covers `[event_time + i·1h, event_time + (i+1)·1h)`.
    pub fn hour_index(&self, t: NaiveDateTime) -> Option<usize> {
        if !self.contains(t) {
            return None;
        }
        let minutes = (t - self.event_time).num_minutes();
        Some((minutes / 60) as usize)
    }
}

/// The six content categories of earthquake-related microblogs.
///
/// Declaration order is fixed: it breaks posterior ties in the classifier
/// and orders every report table.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    LossDescription,
    Education,
    Notification,
    Rescue,
    RelatedInformation,
    Unrelated,
}

impl Category {
    pub const ALL: [Category; 6] = [
        Category::LossDescription,
        Category::Education,
        Category::Notification,
        Category::Rescue,
        Category::RelatedInformation,
        Category::Unrelated,
    ];

    /// Canonical lower-case name used in TSV label files.
    pub fn canonical_name(self) -> &'static str {
        match self {
            Category::LossDescription => "loss description",
            Category::Education => "education",
            Category::Notification => "notification",
            Category::Rescue => "rescue",
            Category::RelatedInformation => "related information",
            Category::Unrelated => "unrelated",
        }
    }

    /// Case-insensitive match against the six canonical names.
    /// Underscores are accepted in place of spaces.
    pub fn parse_name(raw: &str) -> Option<Category> {
        let normalized = raw.trim().to_lowercase().replace('_', " ");
        Category::ALL
            .into_iter()
            .find(|c| c.canonical_name() == normalized)
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.canonical_name())
    }
}

/// Correlation strength between a category and actual earthquake impact.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(rename_all = "snake_case")]
pub enum Relevance {
    Strong,
    Weak,
    None,
}

impl Relevance {
    pub const ALL: [Relevance; 3] = [Relevance::Strong, Relevance::Weak, Relevance::None];
}

impl fmt::Display for Relevance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relevance::Strong => "strong",
            Relevance::Weak => "weak",
            Relevance::None => "none",
        })
    }
}

/// Loss descriptions are the only strongly correlated category; unrelated
/// posts carry no correlation; everything else is weak.
pub fn relevance_of(category: Category) -> Relevance {
    match category {
        Category::LossDescription => Relevance::Strong,
        Category::Education
        | Category::Notification
        | Category::Rescue
        | Category::RelatedInformation => Relevance::Weak,
        Category::Unrelated => Relevance::None,
    }
}

/// A microblog paired with its gold or predicted category.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledMicroblog {
    pub microblog: Microblog,
    pub category: Category,
}

/// A line skipped during ingestion, with its 1-based line number.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkippedLine {
    pub line: usize,
    pub message: String,
}

/// Result of loading a JSONL corpus: parsed records in file order plus
/// diagnostics for every malformed line.
#[derive(Debug, Default)]
pub struct CorpusLoad {
    pub posts: Vec<Microblog>,
    pub skipped: Vec<SkippedLine>,
}

#[derive(Deserialize)]
struct RawRecord {
    id: Option<String>,
    text: Option<String>,
    published_at: Option<String>,
    user_id: Option<String>,
}

fn record_from_line(line: &str) -> std::result::Result<Microblog, String> {
    let raw: RawRecord =
        serde_json::from_str(line).map_err(|e| format!("invalid JSON object: {e}"))?;
    let id = match raw.id {
        Some(id) if !id.trim().is_empty() => id,
        Some(_) => return Err("empty id field".into()),
        None => return Err("missing id field".into()),
    };
    let text = match raw.text {
        Some(text) if !text.is_empty() => text,
        Some(_) => return Err("empty text at ingestion".into()),
        None => return Err("missing text field".into()),
    };
    let published_at = match raw.published_at {
        Some(ref ts) => NaiveDateTime::parse_from_str(ts, MINUTE_FORMAT)
            .map_err(|e| format!("unparseable timestamp {ts:?}: {e}"))?,
        None => return Err("missing published_at field".into()),
    };
    Ok(Microblog {
        id,
        text,
        published_at,
        user_id: raw.user_id,
    })
}

/// Reads a JSONL corpus. Malformed records are skipped with per-line
/// diagnostics rather than aborting the run; only an unreadable file is
/// fatal. Blank lines are ignored.
pub fn load_corpus(path: impl AsRef<Path>) -> Result<CorpusLoad> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::new(file);
    let mut load = CorpusLoad::default();
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        match record_from_line(&line) {
            Ok(post) => load.posts.push(post),
            Err(message) => load.skipped.push(SkippedLine {
                line: idx + 1,
                message,
            }),
        }
    }
    Ok(load)
}

/// Keeps the first occurrence of each microblog id, preserving order.
pub fn deduplicate(mut posts: Vec<Microblog>) -> Vec<Microblog> {
    let mut seen = HashSet::with_capacity(posts.len());
    posts.retain(|p| seen.insert(p.id.clone()));
    posts
}

/// Keeps posts published inside the window, preserving order.
pub fn window_filter(mut posts: Vec<Microblog>, window: &EventWindow) -> Vec<Microblog> {
    posts.retain(|p| window.contains(p.published_at));
    posts
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::io::Write;

    fn minute(s: &str) -> NaiveDateTime {
        parse_minute(s).unwrap()
    }

    fn post(id: &str, at: &str) -> Microblog {
        Microblog {
            id: id.into(),
            text: "地震了".into(),
            published_at: minute(at),
            user_id: None,
        }
    }

    #[test]
    fn relevance_matches_category_table() {
        let expected = [
            (Category::LossDescription, Relevance::Strong),
            (Category::Education, Relevance::Weak),
            (Category::Notification, Relevance::Weak),
            (Category::Rescue, Relevance::Weak),
            (Category::RelatedInformation, Relevance::Weak),
            (Category::Unrelated, Relevance::None),
        ];
        for (category, relevance) in expected {
            assert_eq!(relevance_of(category), relevance, "{category}");
        }
    }

    #[test]
    fn category_name_round_trip() {
        for c in Category::ALL {
            assert_eq!(Category::parse_name(c.canonical_name()), Some(c));
            assert_eq!(
                Category::parse_name(&c.canonical_name().to_uppercase()),
                Some(c)
            );
        }
        assert_eq!(Category::parse_name("Loss_Description"), Some(Category::LossDescription));
        assert_eq!(Category::parse_name("damage"), None);
    }

    #[test]
    fn dedup_keeps_first_occurrence() {
        let posts = vec![
            post("a", "2020-07-12 06:40"),
            post("b", "2020-07-12 06:41"),
            post("a", "2020-07-12 06:42"),
            post("c", "2020-07-12 06:43"),
        ];
        let out = deduplicate(posts);
        let ids: Vec<&str> = out.iter().map(|p| p.id.as_str()).collect();
        assert_eq!(ids, ["a", "b", "c"]);
        assert_eq!(out[0].published_at, minute("2020-07-12 06:40"));
    }

    #[test]
    fn dedup_keeps_first_text_on_conflicting_duplicates() {
        let mut first = post("a", "2020-07-12 06:40");
        first.text = "first".into();
        let mut second = post("a", "2020-07-12 06:40");
        second.text = "second".into();
        let out = deduplicate(vec![first, second]);
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].text, "first");
    }

    #[test]
    fn dedup_is_identity_on_unique_input() {
        let posts = vec![post("a", "2020-07-12 06:40"), post("b", "2020-07-12 06:41")];
        assert_eq!(deduplicate(posts.clone()), posts);
    }

    #[test]
    fn window_boundaries_are_half_open() {
        // Guye event time: 6:38 on July 12, 2020.
        let window = EventWindow::golden_rescue(minute("2020-07-12 06:38"));
        let keep = window_filter(vec![post("x", "2020-07-12 06:38")], &window);
        assert_eq!(keep.len(), 1, "event-time post is kept");
        let drop_end = window_filter(vec![post("x", "2020-07-14 06:38")], &window);
        assert!(drop_end.is_empty(), "exactly +48h is dropped");
        let drop_before = window_filter(vec![post("x", "2020-07-12 06:37")], &window);
        assert!(drop_before.is_empty(), "pre-event post is dropped");
        let last_minute = window_filter(vec![post("x", "2020-07-14 06:37")], &window);
        assert_eq!(last_minute.len(), 1, "last in-window minute is kept");
    }

    #[test]
    fn hour_index_buckets_by_half_open_hours() {
        let window = EventWindow::golden_rescue(minute("2020-07-12 06:38"));
        assert_eq!(window.hour_index(minute("2020-07-12 06:38")), Some(0));
        assert_eq!(window.hour_index(minute("2020-07-12 07:37")), Some(0));
        assert_eq!(window.hour_index(minute("2020-07-12 07:38")), Some(1));
        assert_eq!(window.hour_index(minute("2020-07-14 06:37")), Some(47));
        assert_eq!(window.hour_index(minute("2020-07-14 06:38")), None);
        assert_eq!(window.hour_index(minute("2020-07-12 06:37")), None);
    }

    #[test]
    fn zero_hour_window_is_rejected() {
        assert!(EventWindow::new(minute("2020-07-12 06:38"), 0).is_err());
    }

    #[test]
    fn load_corpus_parses_record_and_reports_bad_lines() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        let lines = [
            r#"{"id":"1","text":"地震了","published_at":"2020-07-12 06:40"}"#,
            r#"{"text":"x","published_at":"2020-07-12 06:40"}"#,
            r#"{"id":"3","text":"x","published_at":"07/12/2020"}"#,
            r#"{"id":"4","text":"ok","published_at":"2020-07-12 06:41","extra":1}"#,
        ];
        file.write_all(lines.join("\n").as_bytes()).unwrap();

        let load = load_corpus(file.path()).unwrap();
        assert_eq!(load.posts.len(), 2);
        assert_eq!(load.posts[0].id, "1");
        assert_eq!(load.posts[0].text, "地震了");
        assert_eq!(load.posts[0].published_at, minute("2020-07-12 06:40"));
        assert_eq!(load.posts[1].id, "4", "unknown keys are ignored");

        assert_eq!(load.skipped.len(), 2);
        assert_eq!(load.skipped[0].line, 2);
        assert!(load.skipped[0].message.contains("id"));
        assert_eq!(load.skipped[1].line, 3);
        assert!(load.skipped[1].message.contains("timestamp"));
    }

    #[test]
    fn load_corpus_empty_file_is_empty_and_clean() {
        let file = tempfile::NamedTempFile::new().unwrap();
        let load = load_corpus(file.path()).unwrap();
        assert!(load.posts.is_empty());
        assert!(load.skipped.is_empty());
    }

    #[test]
    fn load_corpus_missing_file_is_fatal() {
        assert!(matches!(
            load_corpus("/nonexistent/corpus.jsonl"),
            Err(Error::Io { .. })
        ));
    }

    #[test]
    fn load_corpus_rejects_empty_text_at_ingestion() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        file.write_all(r#"{"id":"1","text":"","published_at":"2020-07-12 06:40"}"#.as_bytes())
            .unwrap();
        let load = load_corpus(file.path()).unwrap();
        assert!(load.posts.is_empty());
        assert_eq!(load.skipped.len(), 1);
    }

    #[test]
    fn microblog_jsonl_round_trip_preserves_wire_format() {
        let p = Microblog {
            id: "9".into(),
            text: "震感明显".into(),
            published_at: minute("2020-07-12 06:40"),
            user_id: Some("u1".into()),
        };
        let line = serde_json::to_string(&p).unwrap();
        assert!(line.contains(r#""published_at":"2020-07-12 06:40""#), "{line}");
        let back: Microblog = serde_json::from_str(&line).unwrap();
        assert_eq!(back, p);
    }

    fn arb_posts() -> impl Strategy<Value = Vec<Microblog>> {
        // Small id pool so duplicates actually occur.
        proptest::collection::vec((0u8..8, 0i64..72), 0..40).prop_map(|raw| {
            raw.into_iter()
                .map(|(id, offset)| Microblog {
                    id: format!("id{id}"),
                    text: "t".into(),
                    published_at: parse_minute("2020-07-12 06:38").unwrap()
                        + Duration::minutes(offset * 60),
                    user_id: None,
                })
                .collect()
        })
    }

    proptest! {
        #[test]
        fn dedup_is_idempotent_and_counts_distinct_ids(posts in arb_posts()) {
            let distinct: HashSet<&str> = posts.iter().map(|p| p.id.as_str()).collect();
            let once = deduplicate(posts.clone());
            prop_assert_eq!(once.len(), distinct.len());
            let twice = deduplicate(once.clone());
            prop_assert_eq!(once, twice);
        }

        #[test]
        fn window_filter_is_a_subsequence_and_idempotent(posts in arb_posts()) {
            let window = EventWindow::golden_rescue(parse_minute("2020-07-12 06:38").unwrap());
            let once = window_filter(posts.clone(), &window);
            // Subsequence: every kept post appears in the input in order.
            let mut cursor = posts.iter();
            for kept in &once {
                prop_assert!(cursor.any(|p| p == kept));
            }
            let twice = window_filter(once.clone(), &window);
            prop_assert_eq!(once, twice);
        }

        #[test]
        fn dedup_and_window_commute_on_exact_duplicates(ids in proptest::collection::vec(0u8..8, 0..40)) {
            // Crawled duplicates are exact record copies, so the two stage
            // orders are observationally identical.
            let event = parse_minute("2020-07-12 06:38").unwrap();
            let posts: Vec<Microblog> = ids
                .into_iter()
                .map(|id| Microblog {
                    id: format!("id{id}"),
                    text: "t".into(),
                    published_at: event + Duration::hours(i64::from(id) * 7),
                    user_id: None,
                })
                .collect();
            let window = EventWindow::golden_rescue(event);
            let a = window_filter(deduplicate(posts.clone()), &window);
            let b = deduplicate(window_filter(posts, &window));
            prop_assert_eq!(a, b);
        }
    }
}
