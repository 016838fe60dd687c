//! Hourly public-opinion and sentiment time series over the event window.
//!
//! Buckets anchor at the event time, not wall-clock hour boundaries:
//! bucket `i` covers `[event_time + i·1h, event_time + (i+1)·1h)`.

use chrono::{Duration, NaiveDateTime};
use serde::{Deserialize, Serialize};

use crate::corpus::{format_minute, minute_fmt, EventWindow, Microblog};
use crate::error::{Error, Result};
use crate::sentiment::Polarity;

/// Post counts per hour after the event.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrendSeries {
    #[serde(with = "minute_fmt::vec")]
    pub bucket_starts: Vec<NaiveDateTime>,
    pub counts: Vec<u64>,
}

impl TrendSeries {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Plot-ready CSV: `hour_index,bucket_start,count`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("hour_index,bucket_start,count\n");
        for (i, (start, count)) in self.bucket_starts.iter().zip(&self.counts).enumerate() {
            out.push_str(&format!("{i},{},{count}\n", format_minute(*start)));
        }
        out
    }
}

/// Positive/negative tallies for one hourly bucket. `proportion_negative`
/// is 0 with the `empty` flag set when the bucket holds no posts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SentimentBucket {
    pub n_positive: u64,
    pub n_negative: u64,
    pub proportion_negative: f64,
    pub empty: bool,
}

impl SentimentBucket {
    fn from_counts(n_positive: u64, n_negative: u64) -> Self {
        let total = n_positive + n_negative;
        SentimentBucket {
            n_positive,
            n_negative,
            proportion_negative: if total == 0 {
                0.0
            } else {
                n_negative as f64 / total as f64
            },
            empty: total == 0,
        }
    }

    pub fn count(&self) -> u64 {
        self.n_positive + self.n_negative
    }
}

/// Per-hour sentiment tallies over the same post set as the trend series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SentimentSeries {
    #[serde(with = "minute_fmt::vec")]
    pub bucket_starts: Vec<NaiveDateTime>,
    pub buckets: Vec<SentimentBucket>,
}

impl SentimentSeries {
    pub fn total(&self) -> u64 {
        self.buckets.iter().map(SentimentBucket::count).sum()
    }

    /// Plot-ready CSV:
    /// `hour_index,bucket_start,count,n_positive,n_negative,proportion_negative`.
    pub fn to_csv(&self) -> String {
        let mut out =
            String::from("hour_index,bucket_start,count,n_positive,n_negative,proportion_negative\n");
        for (i, (start, b)) in self.bucket_starts.iter().zip(&self.buckets).enumerate() {
            out.push_str(&format!(
                "{i},{},{},{},{},{:.6}\n",
                format_minute(*start),
                b.count(),
                b.n_positive,
                b.n_negative,
                b.proportion_negative
            ));
        }
        out
    }
}

fn bucket_starts(window: &EventWindow) -> Vec<NaiveDateTime> {
    (0..window.duration_hours())
        .map(|i| window.event_time() + Duration::hours(i64::from(i)))
        .collect()
}

/// Counts posts per hourly bucket. Every post must already be inside the
/// window; an out-of-window post is an error naming its id.
pub fn hourly_counts(posts: &[Microblog], window: &EventWindow) -> Result<TrendSeries> {
    let mut counts = vec![0u64; window.duration_hours() as usize];
    for post in posts {
        let bucket = window.hour_index(post.published_at).ok_or_else(|| Error::OutOfWindow {
            id: post.id.clone(),
            at: format_minute(post.published_at),
        })?;
        counts[bucket] += 1;
    }
    Ok(TrendSeries {
        bucket_starts: bucket_starts(window),
        counts,
    })
}

/// Tallies positive/negative posts per hourly bucket.
pub fn sentiment_series(
    posts: &[(Microblog, Polarity)],
    window: &EventWindow,
) -> Result<SentimentSeries> {
    let hours = window.duration_hours() as usize;
    let mut positive = vec![0u64; hours];
    let mut negative = vec![0u64; hours];
    for (post, polarity) in posts {
        let bucket = window.hour_index(post.published_at).ok_or_else(|| Error::OutOfWindow {
            id: post.id.clone(),
            at: format_minute(post.published_at),
        })?;
        match polarity {
            Polarity::Positive => positive[bucket] += 1,
            Polarity::Negative => negative[bucket] += 1,
        }
    }
    let buckets = positive
        .into_iter()
        .zip(negative)
        .map(|(p, n)| SentimentBucket::from_counts(p, n))
        .collect();
    Ok(SentimentSeries {
        bucket_starts: bucket_starts(window),
        buckets,
    })
}
