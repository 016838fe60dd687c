//! Binary positive/negative sentiment scoring with a strict 50% positivity
//! threshold. The scorer is a trainable naive Bayes model over character
//! n-grams; it runs on raw, uncleaned text.

use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nb::{ClassLabel, NaiveBayes};

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(rename_all = "snake_case")]
pub enum Polarity {
    Positive,
    Negative,
}

impl Polarity {
    pub const ALL: [Polarity; 2] = [Polarity::Positive, Polarity::Negative];

    pub fn parse_name(raw: &str) -> Option<Polarity> {
        match raw.trim().to_lowercase().as_str() {
            "positive" => Some(Polarity::Positive),
            "negative" => Some(Polarity::Negative),
            _ => None,
        }
    }
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Polarity::Positive => "positive",
            Polarity::Negative => "negative",
        })
    }
}

impl ClassLabel for Polarity {
    fn all() -> &'static [Self] {
        &Polarity::ALL
    }

    fn label_name(&self) -> &'static str {
        match self {
            Polarity::Positive => "positive",
            Polarity::Negative => "negative",
        }
    }
}

/// The trainable binary sentiment model.
pub type SentimentModel = NaiveBayes<Polarity>;

/// Probability that a text carries positive emotion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SentimentScore {
    pub p_positive: f64,
}

/// Trains the scorer. Both polarities must be present in the data.
pub fn train_sentiment(
    data: &[(String, Polarity)],
    n: usize,
    alpha: f64,
) -> Result<SentimentModel> {
    for polarity in Polarity::ALL {
        if !data.iter().any(|(_, p)| *p == polarity) {
            return Err(Error::Training(format!(
                "no {polarity} documents in the training corpus"
            )));
        }
    }
    NaiveBayes::train(data, n, alpha)
}

/// Normalized posterior of the positive class.
pub fn score(model: &SentimentModel, text: &str) -> SentimentScore {
    let p_positive = model
        .posterior(text)
        .into_iter()
        .find(|(c, _)| *c == Polarity::Positive)
        .map(|(_, p)| p)
        .expect("posterior covers both polarities");
    SentimentScore { p_positive }
}

/// Positive iff the positive probability strictly exceeds 50%;
/// exactly 0.5 maps to negative.
pub fn polarity(score: SentimentScore) -> Polarity {
    if score.p_positive > 0.5 {
        Polarity::Positive
    } else {
        Polarity::Negative
    }
}

/// Reads a `text<TAB>positive|negative` training TSV. The label is the
/// field after the last tab.
pub fn load_sentiment_corpus(path: impl AsRef<Path>) -> Result<Vec<(String, Polarity)>> {
    let path = path.as_ref();
    let raw = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut rows = Vec::new();
    for (idx, line) in raw.lines().enumerate() {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let (text, name) = line.rsplit_once('\t').ok_or_else(|| {
            Error::parse(path, line_no, "expected two tab-separated columns: text, polarity")
        })?;
        if text.is_empty() {
            return Err(Error::parse(path, line_no, "empty text"));
        }
        let polarity = Polarity::parse_name(name).ok_or_else(|| {
            Error::parse(
                path,
                line_no,
                format!("unknown polarity {:?} (expected positive or negative)", name.trim()),
            )
        })?;
        rows.push((text.to_string(), polarity));
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn docs(pairs: &[(&str, Polarity)]) -> Vec<(String, Polarity)> {
        pairs.iter().map(|(t, p)| (t.to_string(), *p)).collect()
    }

    /// Hand-run naive Bayes oracle for a two-document corpus, independent
    /// of the training code: add-one smoothing over the pooled bigram
    /// vocabulary, priors smoothed the same way.
    fn two_doc_oracle_p_positive(pos_doc: &str, neg_doc: &str, query: &str) -> f64 {
        let bigrams = |s: &str| -> Vec<String> {
            let chars: Vec<char> = s.chars().collect();
            chars.windows(2).map(|w| w.iter().collect()).collect()
        };
        let pos_grams = bigrams(pos_doc);
        let neg_grams = bigrams(neg_doc);
        let mut vocab: Vec<String> = pos_grams.iter().chain(neg_grams.iter()).cloned().collect();
        vocab.sort();
        vocab.dedup();
        let v = vocab.len() as f64;

        let count_in = |grams: &[String], g: &str| grams.iter().filter(|x| *x == g).count() as f64;
        let prior: f64 = (1.0 + 1.0) / (2.0 + 2.0); // same for both classes
        let mut log_pos = prior.ln();
        let mut log_neg = prior.ln();
        for g in bigrams(query) {
            if !vocab.contains(&g) {
                continue;
            }
            log_pos += ((count_in(&pos_grams, &g) + 1.0) / (pos_grams.len() as f64 + v)).ln();
            log_neg += ((count_in(&neg_grams, &g) + 1.0) / (neg_grams.len() as f64 + v)).ln();
        }
        let max = log_pos.max(log_neg);
        let zp = (log_pos - max).exp();
        let zn = (log_neg - max).exp();
        zp / (zp + zn)
    }

    #[test]
    fn two_doc_corpus_matches_the_hand_oracle() {
        let data = docs(&[("平安无事", Polarity::Positive), ("房屋倒塌伤亡", Polarity::Negative)]);
        let model = train_sentiment(&data, 2, 1.0).unwrap();

        for query in ["平安", "倒塌", "平安无事", "伤亡惨重", ""] {
            let got = score(&model, query).p_positive;
            let want = two_doc_oracle_p_positive("平安无事", "房屋倒塌伤亡", query);
            assert!(
                (got - want).abs() < 1e-12,
                "{query:?}: got {got}, oracle {want}"
            );
        }
        assert!(score(&model, "平安").p_positive > 0.5);
        assert!(score(&model, "倒塌").p_positive < 0.5);
    }

    #[test]
    fn single_polarity_corpus_is_rejected() {
        let only_pos = docs(&[("平安", Polarity::Positive)]);
        assert!(matches!(
            train_sentiment(&only_pos, 2, 1.0),
            Err(Error::Training(_))
        ));
        let only_neg = docs(&[("倒塌", Polarity::Negative)]);
        assert!(train_sentiment(&only_neg, 2, 1.0).is_err());
    }

    #[test]
    fn uniform_duplication_preserves_decisions() {
        let base = docs(&[
            ("平安无事谢谢关心", Polarity::Positive),
            ("有序撤离没有伤亡", Polarity::Positive),
            ("房屋倒塌多人被困", Polarity::Negative),
            ("道路中断物资告急", Polarity::Negative),
        ]);
        let mut doubled = base.clone();
        doubled.extend(base.clone());

        let model_a = train_sentiment(&base, 2, 1.0).unwrap();
        let model_b = train_sentiment(&doubled, 2, 1.0).unwrap();
        for query in ["平安", "倒塌", "撤离顺利", "被困多人", "今天天气"] {
            assert_eq!(
                polarity(score(&model_a, query)),
                polarity(score(&model_b, query)),
                "{query}"
            );
        }
    }

    #[test]
    fn empty_text_scores_the_positive_prior() {
        let data = docs(&[
            ("平安", Polarity::Positive),
            ("平好", Polarity::Positive),
            ("倒塌", Polarity::Negative),
        ]);
        let model = train_sentiment(&data, 2, 1.0).unwrap();
        let got = score(&model, "").p_positive;
        // Smoothed prior: (2 + 1) / (3 + 2).
        let want = 3.0 / 5.0;
        assert!((got - want).abs() < 1e-12, "got {got}, want {want}");
    }

    #[test]
    fn symmetric_corpus_scores_one_half() {
        // Identical documents under both labels: every query ties at 0.5.
        let data = docs(&[("地震了", Polarity::Positive), ("地震了", Polarity::Negative)]);
        let model = train_sentiment(&data, 2, 1.0).unwrap();
        for query in ["地震了", "震感", ""] {
            let s = score(&model, query).p_positive;
            assert!((s - 0.5).abs() < 1e-9, "{query:?} scored {s}");
        }
    }

    #[test]
    fn threshold_is_strictly_greater_than_half() {
        assert_eq!(polarity(SentimentScore { p_positive: 0.51 }), Polarity::Positive);
        assert_eq!(polarity(SentimentScore { p_positive: 0.50 }), Polarity::Negative);
        assert_eq!(polarity(SentimentScore { p_positive: 0.49 }), Polarity::Negative);
    }

    #[test]
    fn positive_markers_never_decrease_the_score() {
        let data = docs(&[
            ("好好好好", Polarity::Positive),
            ("坏坏坏坏", Polarity::Negative),
        ]);
        let model = train_sentiment(&data, 2, 1.0).unwrap();
        let mut text = String::from("坏");
        let mut last = score(&model, &text).p_positive;
        for _ in 0..6 {
            text.push('好');
            let next = score(&model, &text).p_positive;
            assert!(next >= last, "appending a positive marker dropped {last} → {next}");
            last = next;
        }
    }

    #[test]
    fn fixture_corpus_loads_and_trains() {
        let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/sentiment_corpus.tsv");
        let rows = load_sentiment_corpus(path).unwrap();
        assert!(rows.len() >= 40, "fixture has {} rows", rows.len());
        assert!(rows.iter().any(|(_, p)| *p == Polarity::Positive));
        assert!(rows.iter().any(|(_, p)| *p == Polarity::Negative));

        let model = train_sentiment(&rows, 2, 1.0).unwrap();
        assert!(score(&model, "大家都平安无事，没有人员伤亡").p_positive > 0.5);
        assert!(score(&model, "房屋倒塌，道路中断，多人被困").p_positive < 0.5);
    }
}
