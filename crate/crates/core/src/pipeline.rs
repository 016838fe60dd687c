//! End-to-end orchestration: ingest → deduplicate → window-filter →
//! classify → route by relevance → trend, sentiment, and intensity
//! analyses → report emission.
//!
//! Routing follows the relevance column: strongly and weakly correlated
//! posts feed the trend and sentiment series, loss descriptions alone feed
//! the filtered intensity distribution, and the unfiltered intensity
//! distribution covers every in-window post as the before-classification
//! baseline. Unrelated posts stay in the ingest totals for audit but are
//! excluded from all three analyses.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use chrono::NaiveDateTime;
use serde::{Deserialize, Serialize};

use crate::classify::{self, ClassifierModel};
use crate::corpus::{
    self, relevance_of, Category, EventWindow, Microblog, Relevance, SkippedLine,
};
use crate::error::{Error, Result};
use crate::evaluate::EvalReport;
use crate::intensity::{self, KeywordLexicon, LevelDistribution};
use crate::sentiment::{self, Polarity, SentimentModel};
use crate::textprep::{CleaningConfig, GeoLexicon, StopWordList};
use crate::trends::{self, SentimentSeries, TrendSeries};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Where category labels come from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClassifierBackend {
    /// A persisted built-in model, applied to (optionally cleaned) text.
    Builtin { model: PathBuf },
    /// An `id<TAB>category` file produced by any external model.
    External { predictions: PathBuf },
}

/// Everything `assess` needs besides the corpus itself.
#[derive(Debug, Clone)]
pub struct AssessmentConfig {
    pub event_time: NaiveDateTime,
    pub duration_hours: u32,
    /// Cleaning applied to classifier input only; sentiment scoring and
    /// intensity matching always run on raw text.
    pub cleaning: CleaningConfig,
    /// Stop list for cleaning; the builtin Chinese list when absent.
    pub stopwords: Option<PathBuf>,
    /// Geo lexicon for cleaning; required when `cleaning.remove_geo` is set.
    pub geo: Option<PathBuf>,
    pub backend: ClassifierBackend,
    /// Intensity lexicon; the builtin table when absent.
    pub lexicon: Option<PathBuf>,
    pub sentiment_model: PathBuf,
    pub output_dir: PathBuf,
}

/// The full assessment output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssessmentReport {
    pub schema_version: u32,
    /// Wall-clock emission time; excluded in comparison mode.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generated_at: Option<String>,
    pub total_ingested: u64,
    pub skipped_lines: u64,
    pub total_after_dedup: u64,
    pub total_in_window: u64,
    pub category_counts: BTreeMap<Category, u64>,
    pub relevance_counts: BTreeMap<Relevance, u64>,
    pub trend: TrendSeries,
    pub sentiment: SentimentSeries,
    /// All in-window posts, the before-classification baseline.
    pub intensity_unfiltered: LevelDistribution,
    /// Loss-description posts only.
    pub intensity_filtered: LevelDistribution,
}

impl AssessmentReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// JSON with the emission timestamp stripped; byte-identical across
    /// runs on identical inputs.
    pub fn to_canonical_json(&self) -> String {
        let mut copy = self.clone();
        copy.generated_at = None;
        copy.to_json()
    }

    /// Writes `report.json`, `trend.csv`, `sentiment.csv`, and
    /// `intensity.csv` under `dir`.
    pub fn write_files(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let write = |name: &str, contents: String| -> Result<()> {
            let path = dir.join(name);
            fs::write(&path, contents).map_err(|e| Error::io(path, e))
        };
        write("report.json", self.to_json())?;
        write("trend.csv", self.trend.to_csv())?;
        write("sentiment.csv", self.sentiment.to_csv())?;
        write("intensity.csv", self.intensity_csv())
    }

    /// Side-by-side level distributions:
    /// `level,count_all,share_all,count_strong,share_strong`.
    pub fn intensity_csv(&self) -> String {
        let mut out = String::from("level,count_all,share_all,count_strong,share_strong\n");
        for level in intensity::DisasterLevel::ALL {
            out.push_str(&format!(
                "{level},{},{:.6},{},{:.6}\n",
                self.intensity_unfiltered.counts[&level],
                self.intensity_unfiltered.share(level),
                self.intensity_filtered.counts[&level],
                self.intensity_filtered.share(level),
            ));
        }
        out.push_str(&format!(
            "unrated,{},,{},\n",
            self.intensity_unfiltered.unrated, self.intensity_filtered.unrated
        ));
        out
    }
}

fn categorize_posts(
    posts: &[Microblog],
    backend: &ClassifierBackend,
    cleaning: CleaningConfig,
    stops: &StopWordList,
    geo: &GeoLexicon,
) -> Result<Vec<(Microblog, Category)>> {
    match backend {
        ClassifierBackend::Builtin { model } => {
            let model = ClassifierModel::load(model)?;
            Ok(posts
                .iter()
                .map(|p| {
                    let text = if cleaning.is_noop() {
                        p.text.clone()
                    } else {
                        crate::textprep::apply_cleaning(&p.text, cleaning, stops, geo)
                    };
                    let (category, _) = model.predict(&text);
                    (p.clone(), category)
                })
                .collect())
        }
        ClassifierBackend::External { predictions } => {
            let map = classify::load_external_predictions(predictions)?;
            let uncovered: Vec<String> = posts
                .iter()
                .filter(|p| !map.contains_key(&p.id))
                .map(|p| p.id.clone())
                .collect();
            if !uncovered.is_empty() {
                return Err(Error::MissingIds {
                    context: "external predictions do not cover the corpus".into(),
                    ids: uncovered,
                });
            }
            Ok(posts.iter().map(|p| (p.clone(), map[&p.id])).collect())
        }
    }
}

/// Runs the full assessment over a JSONL corpus. Pure given its inputs;
/// the emission timestamp is left unset.
pub fn assess(corpus_path: &Path, config: &AssessmentConfig) -> Result<AssessmentReport> {
    let window = EventWindow::new(config.event_time, config.duration_hours)?;

    if config.cleaning.remove_geo && config.geo.is_none() {
        return Err(Error::InvalidArgument(
            "geo cleaning is enabled but no geo lexicon was given".into(),
        ));
    }
    let stops = match &config.stopwords {
        Some(path) => StopWordList::from_file(path)?,
        None => StopWordList::builtin_zh(),
    };
    let geo = match &config.geo {
        Some(path) => GeoLexicon::from_file(path)?,
        None => GeoLexicon::default(),
    };
    let lexicon: KeywordLexicon = match &config.lexicon {
        Some(path) => intensity::load_lexicon(path)?,
        None => intensity::builtin_lexicon().clone(),
    };
    let sentiment_model = SentimentModel::load(&config.sentiment_model)?;

    let load = corpus::load_corpus(corpus_path)?;
    let total_ingested = load.posts.len() as u64;
    let skipped_lines = load.skipped.len() as u64;

    let deduped = corpus::deduplicate(load.posts);
    let total_after_dedup = deduped.len() as u64;

    let in_window = corpus::window_filter(deduped, &window);
    let total_in_window = in_window.len() as u64;

    let categorized = categorize_posts(&in_window, &config.backend, config.cleaning, &stops, &geo)?;

    let mut category_counts: BTreeMap<Category, u64> =
        Category::ALL.into_iter().map(|c| (c, 0)).collect();
    let mut relevance_counts: BTreeMap<Relevance, u64> =
        Relevance::ALL.into_iter().map(|r| (r, 0)).collect();
    for (_, category) in &categorized {
        *category_counts.get_mut(category).unwrap() += 1;
        *relevance_counts.get_mut(&relevance_of(*category)).unwrap() += 1;
    }

    // Strong + Weak posts feed the trend and sentiment series.
    let correlated: Vec<&(Microblog, Category)> = categorized
        .iter()
        .filter(|(_, c)| relevance_of(*c) != Relevance::None)
        .collect();
    let correlated_posts: Vec<Microblog> = correlated.iter().map(|(p, _)| p.clone()).collect();
    let trend = trends::hourly_counts(&correlated_posts, &window)?;

    let scored: Vec<(Microblog, Polarity)> = correlated
        .iter()
        .map(|(p, _)| {
            let polarity = sentiment::polarity(sentiment::score(&sentiment_model, &p.text));
            (p.clone(), polarity)
        })
        .collect();
    let sentiment_series = trends::sentiment_series(&scored, &window)?;

    let intensity_unfiltered =
        intensity::distribution(in_window.iter().map(|p| lexicon.rate(&p.text)));
    let intensity_filtered = intensity::distribution(
        categorized
            .iter()
            .filter(|(_, c)| *c == Category::LossDescription)
            .map(|(p, _)| lexicon.rate(&p.text)),
    );

    debug_assert_eq!(
        category_counts.values().sum::<u64>(),
        total_in_window,
        "category counts partition the window"
    );
    debug_assert_eq!(
        trend.total() + category_counts[&Category::Unrelated],
        total_in_window,
        "trend series covers exactly the correlated posts"
    );

    Ok(AssessmentReport {
        schema_version: REPORT_SCHEMA_VERSION,
        generated_at: None,
        total_ingested,
        skipped_lines,
        total_after_dedup,
        total_in_window,
        category_counts,
        relevance_counts,
        trend,
        sentiment: sentiment_series,
        intensity_unfiltered,
        intensity_filtered,
    })
}

/// Scores a predictions file against a gold file (both `id<TAB>category`).
pub fn evaluate_files(
    gold_path: &Path,
    pred_path: &Path,
    gold_categories_only: bool,
) -> Result<EvalReport> {
    let gold = classify::load_external_predictions(gold_path)?;
    let pred = classify::load_external_predictions(pred_path)?;
    EvalReport::compute(&gold, &pred, gold_categories_only)
}

/// Knobs shared by the two training commands.
#[derive(Debug, Clone, Copy)]
pub struct TrainOptions {
    pub ratio: f64,
    pub seed: u64,
    pub ngram: usize,
    pub alpha: f64,
}

impl Default for TrainOptions {
    fn default() -> Self {
        TrainOptions {
            ratio: 0.8,
            seed: 42,
            ngram: classify::DEFAULT_NGRAM,
            alpha: classify::DEFAULT_ALPHA,
        }
    }
}

/// Trains the built-in classifier on the training side of a deterministic
/// split, persists it, and reports validation quality (macro F1 over the
/// categories present in the validation gold).
pub fn train_classifier_command(
    data_path: &Path,
    model_out: &Path,
    opts: TrainOptions,
) -> Result<EvalReport> {
    let rows = classify::load_labeled_tsv(data_path)?;
    if rows.is_empty() {
        return Err(Error::Training(format!(
            "no labeled rows in {}",
            data_path.display()
        )));
    }
    let (train, val) = classify::split_train_val(&rows, opts.ratio, opts.seed)?;
    let model = ClassifierModel::train(&train, opts.ngram, opts.alpha)?;
    model.save(model_out)?;

    let gold: BTreeMap<String, Category> = val
        .iter()
        .enumerate()
        .map(|(i, (_, c))| (i.to_string(), *c))
        .collect();
    let pred: BTreeMap<String, Category> = val
        .iter()
        .enumerate()
        .map(|(i, (text, _))| (i.to_string(), model.predict(text).0))
        .collect();
    EvalReport::compute(&gold, &pred, true)
}

/// Validation summary of a sentiment training run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SentimentValidation {
    pub n_train: usize,
    pub n_val: usize,
    pub accuracy: f64,
}

/// Trains the sentiment scorer the same way and reports validation accuracy.
pub fn train_sentiment_command(
    data_path: &Path,
    model_out: &Path,
    opts: TrainOptions,
) -> Result<SentimentValidation> {
    let rows = sentiment::load_sentiment_corpus(data_path)?;
    if rows.is_empty() {
        return Err(Error::Training(format!(
            "no labeled rows in {}",
            data_path.display()
        )));
    }
    let (train, val) = classify::split_train_val(&rows, opts.ratio, opts.seed)?;
    let model = sentiment::train_sentiment(&train, opts.ngram, opts.alpha)?;
    model.save(model_out)?;

    let correct = val
        .iter()
        .filter(|(text, gold)| sentiment::polarity(sentiment::score(&model, text)) == *gold)
        .count();
    let accuracy = if val.is_empty() {
        1.0
    } else {
        correct as f64 / val.len() as f64
    };
    Ok(SentimentValidation {
        n_train: train.len(),
        n_val: val.len(),
        accuracy,
    })
}

/// Assessment settings read from a TOML file; command-line flags override
/// any value set here.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AssessFileConfig {
    pub corpus: Option<PathBuf>,
    pub event_time: Option<String>,
    pub duration_hours: Option<u32>,
    pub cleaning: Option<String>,
    pub stopwords: Option<PathBuf>,
    pub geo: Option<PathBuf>,
    pub lexicon: Option<PathBuf>,
    pub sentiment_model: Option<PathBuf>,
    pub output_dir: Option<PathBuf>,
    pub model: Option<PathBuf>,
    pub predictions: Option<PathBuf>,
    pub seed: Option<u64>,
}

pub fn load_assess_config(path: &Path) -> Result<AssessFileConfig> {
    let raw = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    toml::from_str(&raw).map_err(|e| Error::schema(path, format!("invalid config: {e}")))
}

/// Summary counts printed by the ingest command.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct IngestSummary {
    pub total_lines_parsed: u64,
    pub skipped_lines: u64,
    pub after_dedup: u64,
    pub in_window: Option<u64>,
}

/// Ingest: load, report bad lines, deduplicate, optionally window-filter.
/// Returns the surviving posts along with summary counts and diagnostics.
pub fn ingest(
    corpus_path: &Path,
    window: Option<&EventWindow>,
) -> Result<(Vec<Microblog>, IngestSummary, Vec<SkippedLine>)> {
    let load = corpus::load_corpus(corpus_path)?;
    let total = load.posts.len() as u64;
    let skipped = load.skipped.len() as u64;
    let deduped = corpus::deduplicate(load.posts);
    let after_dedup = deduped.len() as u64;
    let (posts, in_window) = match window {
        Some(w) => {
            let filtered = corpus::window_filter(deduped, w);
            let n = filtered.len() as u64;
            (filtered, Some(n))
        }
        None => (deduped, None),
    };
    Ok((
        posts,
        IngestSummary {
            total_lines_parsed: total,
            skipped_lines: skipped,
            after_dedup,
            in_window,
        },
        load.skipped,
    ))
}
