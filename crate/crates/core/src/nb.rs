//! Multinomial naive Bayes over character n-grams, shared by the
//! six-category classifier and the binary sentiment scorer.
//!
//! Training is closed-form and deterministic: all tables live in ordered
//! maps, so the same documents produce byte-identical persisted models
//! regardless of insertion order. Smoothing is add-alpha over the pooled
//! vocabulary; n-grams never seen in training carry no evidence at
//! prediction time, so an all-unseen text falls back to the class priors.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite, ordered label set. The order of [`ClassLabel::all`] is the
/// declaration order of the label enum and breaks posterior ties: the
/// earlier label wins.
pub trait ClassLabel:
    Copy + Eq + Ord + std::fmt::Debug + Serialize + DeserializeOwned + 'static
{
    fn all() -> &'static [Self];
    fn label_name(&self) -> &'static str;
}

/// Character n-gram counts of one text, with multiplicity.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureVector {
    counts: BTreeMap<String, u32>,
}

impl FeatureVector {
    pub fn counts(&self) -> &BTreeMap<String, u32> {
        &self.counts
    }

    /// Sum of all counts: `max(0, chars(text) − n + 1)` for the source text.
    pub fn total(&self) -> u32 {
        self.counts.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }
}

/// Sliding-window character n-grams. Texts shorter than `n` yield the
/// empty vector.
pub fn featurize(text: &str, n: usize) -> Result<FeatureVector> {
    if n < 1 {
        return Err(Error::InvalidArgument(
            "n-gram order must be at least 1".into(),
        ));
    }
    let chars: Vec<char> = text.chars().collect();
    let mut counts = BTreeMap::new();
    if chars.len() >= n {
        for window in chars.windows(n) {
            *counts
                .entry(window.iter().collect::<String>())
                .or_insert(0u32) += 1;
        }
    }
    Ok(FeatureVector { counts })
}

/// A trained multinomial naive Bayes model.
///
/// Invariants: priors exponentiate and sum to 1; for each class the
/// likelihoods over the vocabulary exponentiate and sum to 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "L: ClassLabel", deserialize = "L: ClassLabel"))]
pub struct NaiveBayes<L: ClassLabel> {
    n: usize,
    alpha: f64,
    log_priors: BTreeMap<L, f64>,
    log_likelihoods: BTreeMap<L, BTreeMap<String, f64>>,
    vocabulary: BTreeSet<String>,
}

impl<L: ClassLabel> NaiveBayes<L> {
    /// Trains on `(text, label)` pairs with add-alpha smoothing.
    ///
    /// Priors are smoothed with the same alpha, so labels absent from the
    /// training data still receive a nonzero prior.
    pub fn train(docs: &[(String, L)], n: usize, alpha: f64) -> Result<Self> {
        if docs.is_empty() {
            return Err(Error::Training("no training documents".into()));
        }
        if !alpha.is_finite() || alpha <= 0.0 {
            return Err(Error::InvalidArgument(
                "smoothing alpha must be positive".into(),
            ));
        }
        let classes = L::all();
        let mut doc_counts: BTreeMap<L, u64> = classes.iter().map(|&c| (c, 0)).collect();
        let mut gram_counts: BTreeMap<L, BTreeMap<String, u64>> =
            classes.iter().map(|&c| (c, BTreeMap::new())).collect();
        let mut vocabulary = BTreeSet::new();

        for (text, label) in docs {
            *doc_counts
                .get_mut(label)
                .ok_or_else(|| Error::Training(format!("unknown label {label:?}")))? += 1;
            let per_class = gram_counts.get_mut(label).expect("label checked above");
            for (gram, k) in featurize(text, n)?.counts() {
                *per_class.entry(gram.clone()).or_insert(0) += u64::from(*k);
                vocabulary.insert(gram.clone());
            }
        }

        let total_docs = docs.len() as f64;
        let class_count = classes.len() as f64;
        let log_priors: BTreeMap<L, f64> = doc_counts
            .iter()
            .map(|(&c, &k)| {
                let p = (k as f64 + alpha) / (total_docs + alpha * class_count);
                (c, p.ln())
            })
            .collect();

        let vocab_size = vocabulary.len() as f64;
        let mut log_likelihoods = BTreeMap::new();
        for &c in classes {
            let per_class = &gram_counts[&c];
            let total: u64 = per_class.values().sum();
            let denom = total as f64 + alpha * vocab_size;
            let table: BTreeMap<String, f64> = vocabulary
                .iter()
                .map(|gram| {
                    let k = per_class.get(gram).copied().unwrap_or(0) as f64;
                    (gram.clone(), ((k + alpha) / denom).ln())
                })
                .collect();
            log_likelihoods.insert(c, table);
        }

        Ok(NaiveBayes {
            n,
            alpha,
            log_priors,
            log_likelihoods,
            vocabulary,
        })
    }

    /// Normalized posterior over all labels, in label declaration order.
    /// The probabilities sum to 1.
    pub fn posterior(&self, text: &str) -> Vec<(L, f64)> {
        let feats = featurize(text, self.n).expect("order validated at training time");
        let mut scores: Vec<(L, f64)> = L::all()
            .iter()
            .map(|&c| {
                let table = &self.log_likelihoods[&c];
                let mut score = self.log_priors[&c];
                for (gram, k) in feats.counts() {
                    if let Some(ll) = table.get(gram) {
                        score += f64::from(*k) * ll;
                    }
                }
                (c, score)
            })
            .collect();

        let max = scores
            .iter()
            .map(|&(_, s)| s)
            .fold(f64::NEG_INFINITY, f64::max);
        let z: f64 = scores.iter().map(|&(_, s)| (s - max).exp()).sum();
        for (_, s) in scores.iter_mut() {
            *s = (*s - max).exp() / z;
        }
        scores
    }

    /// Argmax of the posterior with its normalized probability. Exact ties
    /// go to the label earliest in declaration order.
    pub fn predict(&self, text: &str) -> (L, f64) {
        let posterior = self.posterior(text);
        let mut best = posterior[0];
        for &(c, p) in &posterior[1..] {
            if p > best.1 {
                best = (c, p);
            }
        }
        best
    }

    pub fn ngram_order(&self) -> usize {
        self.n
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn vocabulary(&self) -> &BTreeSet<String> {
        &self.vocabulary
    }

    pub fn log_priors(&self) -> &BTreeMap<L, f64> {
        &self.log_priors
    }

    pub fn log_likelihoods(&self) -> &BTreeMap<L, BTreeMap<String, f64>> {
        &self.log_likelihoods
    }

    /// Persists the model as a single JSON document. Output is
    /// byte-deterministic for a given model.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let json = serde_json::to_string_pretty(self).expect("model serializes");
        fs::write(path, json).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let raw = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&raw)
            .map_err(|e| Error::schema(path, format!("not a valid model file: {e}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Category;

    #[test]
    fn featurize_slides_a_character_window() {
        let fv = featurize("abc", 2).unwrap();
        let expected: BTreeMap<String, u32> =
            [("ab".to_string(), 1), ("bc".to_string(), 1)].into();
        assert_eq!(fv.counts(), &expected);

        let fv = featurize("aaa", 2).unwrap();
        assert_eq!(fv.counts().get("aa"), Some(&2));
        assert_eq!(fv.total(), 2);

        assert!(featurize("a", 2).unwrap().is_empty());
        assert!(featurize("", 2).unwrap().is_empty());
        assert!(featurize("", 0).is_err());
    }

    #[test]
    fn featurize_counts_total_chars_minus_n_plus_one() {
        let text = "一二三四五";
        for n in 1..=6 {
            let fv = featurize(text, n).unwrap();
            let expected = 5usize.saturating_sub(n - 1);
            assert_eq!(fv.total() as usize, expected, "n={n}");
        }
    }

    fn docs(pairs: &[(&str, Category)]) -> Vec<(String, Category)> {
        pairs.iter().map(|(t, c)| (t.to_string(), *c)).collect()
    }

    #[test]
    fn alpha_zero_is_rejected() {
        let data = docs(&[("aaaa", Category::LossDescription)]);
        assert!(NaiveBayes::train(&data, 2, 0.0).is_err());
        assert!(NaiveBayes::train(&data, 2, -1.0).is_err());
        assert!(NaiveBayes::train(&data, 2, f64::NAN).is_err());
    }

    #[test]
    fn empty_training_data_is_rejected() {
        let data: Vec<(String, Category)> = Vec::new();
        assert!(NaiveBayes::train(&data, 2, 1.0).is_err());
    }

    #[test]
    fn model_invariants_hold() {
        let data = docs(&[
            ("aaaa", Category::LossDescription),
            ("bbbb", Category::Education),
            ("abab", Category::Notification),
        ]);
        let model = NaiveBayes::train(&data, 2, 1.0).unwrap();

        let prior_sum: f64 = model.log_priors().values().map(|l| l.exp()).sum();
        assert!((prior_sum - 1.0).abs() < 1e-9, "priors sum to {prior_sum}");

        for (class, table) in model.log_likelihoods() {
            let sum: f64 = table.values().map(|l| l.exp()).sum();
            assert!(
                (sum - 1.0).abs() < 1e-9,
                "likelihoods for {class:?} sum to {sum}"
            );
        }
    }

    #[test]
    fn posterior_sums_to_one() {
        let data = docs(&[
            ("aaaa", Category::LossDescription),
            ("bbbb", Category::Education),
        ]);
        let model = NaiveBayes::train(&data, 2, 1.0).unwrap();
        for text in ["aaaa", "abba", "zzzz", ""] {
            let sum: f64 = model.posterior(text).iter().map(|&(_, p)| p).sum();
            assert!((sum - 1.0).abs() < 1e-9, "{text:?} posterior sums to {sum}");
        }
    }

    /// Hand-run oracle for the prior-argmax case: three `aaaa` docs in one
    /// class, one `bbbb` doc in another, query with every n-gram unseen.
    #[test]
    fn unseen_query_falls_back_to_prior_argmax() {
        let data = docs(&[
            ("aaaa", Category::LossDescription),
            ("aaaa", Category::LossDescription),
            ("aaaa", Category::LossDescription),
            ("bbbb", Category::Education),
        ]);
        let model = NaiveBayes::train(&data, 2, 1.0).unwrap();

        // Oracle: smoothed priors (k + 1) / (4 + 6) over the six categories.
        let oracle_prior = |k: f64| (k + 1.0) / (4.0 + 6.0);
        let expected: Vec<f64> = [3.0, 1.0, 0.0, 0.0, 0.0, 0.0]
            .iter()
            .map(|&k| oracle_prior(k))
            .collect();

        let posterior = model.posterior("cc");
        for ((label, p), want) in posterior.iter().zip(&expected) {
            assert!(
                (p - want).abs() < 1e-12,
                "{label:?}: got {p}, oracle says {want}"
            );
        }
        let (winner, confidence) = model.predict("cc");
        assert_eq!(winner, Category::LossDescription);
        assert!((confidence - 0.4).abs() < 1e-12);

        // Empty text is the same no-evidence path.
        let (winner, confidence) = model.predict("");
        assert_eq!(winner, Category::LossDescription);
        assert!((confidence - 0.4).abs() < 1e-12);
    }

    #[test]
    fn separable_training_documents_predict_their_own_class() {
        let data = docs(&[
            ("aaaa", Category::LossDescription),
            ("bbbb", Category::Education),
            ("cccc", Category::Notification),
            ("dddd", Category::Rescue),
            ("eeee", Category::RelatedInformation),
            ("ffff", Category::Unrelated),
        ]);
        let model = NaiveBayes::train(&data, 2, 1.0).unwrap();
        for (text, label) in &data {
            let (got, confidence) = model.predict(text);
            assert_eq!(got, *label, "{text}");
            assert!(confidence > 1.0 / 6.0);
        }
    }

    #[test]
    fn training_is_permutation_invariant() {
        let mut data = docs(&[
            ("地震了好可怕", Category::LossDescription),
            ("自救知识普及", Category::Education),
            ("官方通报震级", Category::Notification),
            ("救援队已出发", Category::Rescue),
            ("希望大家平安", Category::RelatedInformation),
            ("纯蹭热度内容", Category::Unrelated),
            ("房子晃得厉害", Category::LossDescription),
        ]);
        let base = NaiveBayes::train(&data, 2, 1.0).unwrap();
        data.reverse();
        let reversed = NaiveBayes::train(&data, 2, 1.0).unwrap();
        assert_eq!(base, reversed);
        assert_eq!(
            serde_json::to_string(&base).unwrap(),
            serde_json::to_string(&reversed).unwrap()
        );
    }

    #[test]
    fn exact_posterior_tie_breaks_by_declaration_order() {
        // Symmetric corpus: the two classes see identical documents, so
        // their likelihood tables are equal and every query ties exactly.
        let data = docs(&[
            ("xx", Category::Education),
            ("xx", Category::Rescue),
        ]);
        let model = NaiveBayes::train(&data, 2, 1.0).unwrap();
        let posterior = model.posterior("xx");
        let p_edu = posterior
            .iter()
            .find(|(c, _)| *c == Category::Education)
            .unwrap()
            .1;
        let p_rescue = posterior
            .iter()
            .find(|(c, _)| *c == Category::Rescue)
            .unwrap()
            .1;
        assert_eq!(p_edu, p_rescue, "fixture must tie exactly");
        assert!(p_edu > posterior[0].1, "tied pair beats the other classes");
        let (winner, _) = model.predict("xx");
        assert_eq!(winner, Category::Education, "earlier declaration wins");
    }

    #[test]
    fn predict_is_deterministic() {
        let data = docs(&[
            ("震感强烈楼都在晃", Category::LossDescription),
            ("地震科普请牢记", Category::Education),
        ]);
        let model = NaiveBayes::train(&data, 2, 1.0).unwrap();
        let first = model.predict("楼在晃");
        for _ in 0..10 {
            assert_eq!(model.predict("楼在晃"), first);
        }
    }

    #[test]
    fn save_and_load_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        let data = docs(&[
            ("aaaa", Category::LossDescription),
            ("bbbb", Category::Education),
        ]);
        let model = NaiveBayes::train(&data, 2, 1.0).unwrap();
        model.save(&path).unwrap();
        let loaded: NaiveBayes<Category> = NaiveBayes::load(&path).unwrap();
        assert_eq!(model, loaded);
    }
}
