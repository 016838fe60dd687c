//! Rapid earthquake impact assessment from microblog streams.
//!
//! The library ingests earthquake-related microblogs, filters noise by
//! relevance category, and derives three views of an event within its
//! 48-hour golden rescue window: hourly public-opinion trends, positive/
//! negative sentiment trends, and a keyword-based physical damage rating.
//! A metrics module reproduces the macro-F1 evaluation arithmetic used to
//! score classifiers.
//!
//! Modules follow the pipeline:
//!
//! - [`corpus`] — records, JSONL ingestion, deduplication, window filter
//! - [`textprep`] — the O/S/SG/SGT cleaning transforms
//! - [`classify`] — trainable category baseline + external predictions
//! - [`sentiment`] — trainable binary polarity scorer
//! - [`evaluate`] — precision/recall/F1, macro F1, F1 stddev
//! - [`intensity`] — four-level keyword lexicon and damage rating
//! - [`trends`] — hourly trend and sentiment series
//! - [`pipeline`] — end-to-end assessment and report emission

pub mod classify;
pub mod corpus;
pub mod error;
pub mod evaluate;
pub mod intensity;
pub mod nb;
pub mod pipeline;
pub mod sentiment;
pub mod textprep;
pub mod trends;

pub use error::{Error, Result};
