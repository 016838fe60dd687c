//! Per-category precision/recall/F1, macro F1, and the sample standard
//! deviation of the per-category F1 scores.
//!
//! Degenerate cases resolve to zero by convention: precision is 0 when
//! nothing was labeled with the category, recall is 0 when the category
//! has no gold members, and F1 is 0 when precision + recall is 0. This
//! keeps the macro average total on imbalanced fixtures.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::corpus::Category;
use crate::error::{Error, Result};

/// Raw agreement counts for one category.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PerCategoryCounts {
    /// Predicted as this category and correct.
    pub n_correct: u64,
    /// Predicted as this category (among gold-covered ids).
    pub n_labeled: u64,
    /// Gold members of this category.
    pub n_true: u64,
}

/// Precision, recall, and F1 for one category.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CategoryMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Counts agreement between gold and predicted labels per category.
///
/// Every gold id must be covered by a prediction; ids predicted but not
/// in the gold set are ignored.
pub fn confusion(
    gold: &BTreeMap<String, Category>,
    pred: &BTreeMap<String, Category>,
) -> Result<BTreeMap<Category, PerCategoryCounts>> {
    let missing: Vec<String> = gold
        .keys()
        .filter(|id| !pred.contains_key(*id))
        .cloned()
        .collect();
    if !missing.is_empty() {
        return Err(Error::MissingIds {
            context: "predictions do not cover the gold set".into(),
            ids: missing,
        });
    }

    let mut counts: BTreeMap<Category, PerCategoryCounts> = Category::ALL
        .into_iter()
        .map(|c| (c, PerCategoryCounts::default()))
        .collect();
    for (id, &gold_cat) in gold {
        let pred_cat = pred[id];
        counts.get_mut(&gold_cat).unwrap().n_true += 1;
        counts.get_mut(&pred_cat).unwrap().n_labeled += 1;
        if gold_cat == pred_cat {
            counts.get_mut(&gold_cat).unwrap().n_correct += 1;
        }
    }
    Ok(counts)
}

/// P = correct/labeled, R = correct/true, F1 = 2PR/(P+R), with the
/// zero conventions described at module level.
pub fn per_category_metrics(counts: &PerCategoryCounts) -> CategoryMetrics {
    let precision = if counts.n_labeled == 0 {
        0.0
    } else {
        counts.n_correct as f64 / counts.n_labeled as f64
    };
    let recall = if counts.n_true == 0 {
        0.0
    } else {
        counts.n_correct as f64 / counts.n_true as f64
    };
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    CategoryMetrics {
        precision,
        recall,
        f1,
    }
}

/// Arithmetic mean of the per-category F1 scores.
pub fn macro_f1(f1s: &[f64]) -> Result<f64> {
    if f1s.is_empty() {
        return Err(Error::InvalidArgument(
            "macro F1 needs at least one category".into(),
        ));
    }
    Ok(f1s.iter().sum::<f64>() / f1s.len() as f64)
}

/// Sample standard deviation (divisor m − 1) of the F1 scores.
pub fn f1_stddev(f1s: &[f64]) -> Result<f64> {
    if f1s.len() < 2 {
        return Err(Error::InvalidArgument(
            "F1 standard deviation needs at least two categories".into(),
        ));
    }
    let mean = f1s.iter().sum::<f64>() / f1s.len() as f64;
    let ss: f64 = f1s.iter().map(|f| (f - mean) * (f - mean)).sum();
    Ok((ss / (f1s.len() - 1) as f64).sqrt())
}

/// Full evaluation over the six-way taxonomy (or restricted to categories
/// present in the gold set).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub per_category: BTreeMap<Category, CategoryMetrics>,
    /// Number of categories averaged.
    pub m: usize,
    pub macro_f1: f64,
    /// Absent when fewer than two categories were averaged.
    pub f1_stddev: Option<f64>,
}

impl EvalReport {
    /// When `gold_categories_only` is set, categories with no gold members
    /// are excluded from the macro average (they still appear in the
    /// per-category table with zero metrics).
    pub fn compute(
        gold: &BTreeMap<String, Category>,
        pred: &BTreeMap<String, Category>,
        gold_categories_only: bool,
    ) -> Result<EvalReport> {
        let counts = confusion(gold, pred)?;
        let per_category: BTreeMap<Category, CategoryMetrics> = counts
            .iter()
            .map(|(&c, k)| (c, per_category_metrics(k)))
            .collect();

        let averaged: Vec<f64> = Category::ALL
            .into_iter()
            .filter(|c| !gold_categories_only || counts[c].n_true > 0)
            .map(|c| per_category[&c].f1)
            .collect();
        let macro_value = macro_f1(&averaged)?;
        let stddev = if averaged.len() >= 2 {
            Some(f1_stddev(&averaged)?)
        } else {
            None
        };
        Ok(EvalReport {
            per_category,
            m: averaged.len(),
            macro_f1: macro_value,
            f1_stddev: stddev,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Aligned plain-text table with one row per category.
    pub fn render_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{:<22} {:>9} {:>9} {:>9}", "category", "precision", "recall", "f1");
        for (category, m) in &self.per_category {
            let _ = writeln!(
                out,
                "{:<22} {:>9.4} {:>9.4} {:>9.4}",
                category.canonical_name(),
                m.precision,
                m.recall,
                m.f1
            );
        }
        let _ = writeln!(out, "{:<22} {:>9.4}  (m = {})", "macro F1", self.macro_f1, self.m);
        match self.f1_stddev {
            Some(sd) => {
                let _ = writeln!(out, "{:<22} {:>9.4}", "F1 stddev", sd);
            }
            None => {
                let _ = writeln!(out, "{:<22} {:>9}", "F1 stddev", "n/a");
            }
        }
        out
    }
}
