//! Six-category relevance classification: a trainable character n-gram
//! baseline plus ingestion of predictions produced by any external model.
//!
//! The baseline is multinomial naive Bayes over character bigrams by
//! default — segmentation-free, closed-form, and deterministic. External
//! models slot in through a two-column `id<TAB>category` TSV file.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::Serialize;

use crate::corpus::{Category, LabeledMicroblog};
use crate::error::{Error, Result};
use crate::nb::{ClassLabel, NaiveBayes};

pub use crate::nb::{featurize, FeatureVector};

/// Default character n-gram order.
pub const DEFAULT_NGRAM: usize = 2;
/// Default add-alpha smoothing constant.
pub const DEFAULT_ALPHA: f64 = 1.0;

impl ClassLabel for Category {
    fn all() -> &'static [Self] {
        &Category::ALL
    }

    fn label_name(&self) -> &'static str {
        self.canonical_name()
    }
}

/// The trainable six-category baseline model.
pub type ClassifierModel = NaiveBayes<Category>;

/// One model decision for one post.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PredictionRecord {
    pub id: String,
    pub category: Category,
    pub confidence: f64,
}

/// Deterministic shuffled split: the first `⌈ratio·N⌉` records go to the
/// training side. The same seed always produces the same split.
pub fn split_train_val<T: Clone>(data: &[T], ratio: f64, seed: u64) -> Result<(Vec<T>, Vec<T>)> {
    if !ratio.is_finite() || ratio <= 0.0 || ratio >= 1.0 {
        return Err(Error::InvalidArgument(format!(
            "split ratio must be strictly between 0 and 1, got {ratio}"
        )));
    }
    let mut indices: Vec<usize> = (0..data.len()).collect();
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    indices.shuffle(&mut rng);
    let n_train = ((ratio * data.len() as f64).ceil() as usize).min(data.len());
    let train = indices[..n_train].iter().map(|&i| data[i].clone()).collect();
    let val = indices[n_train..].iter().map(|&i| data[i].clone()).collect();
    Ok((train, val))
}

/// Trains the baseline on labeled microblogs.
pub fn train_baseline(
    data: &[LabeledMicroblog],
    n: usize,
    alpha: f64,
) -> Result<ClassifierModel> {
    let pairs: Vec<(String, Category)> = data
        .iter()
        .map(|d| (d.microblog.text.clone(), d.category))
        .collect();
    NaiveBayes::train(&pairs, n, alpha)
}

/// Classifies `(id, text)` pairs, producing one record per post.
pub fn classify_posts<'a, I>(model: &ClassifierModel, posts: I) -> Vec<PredictionRecord>
where
    I: IntoIterator<Item = (&'a str, &'a str)>,
{
    posts
        .into_iter()
        .map(|(id, text)| {
            let (category, confidence) = model.predict(text);
            PredictionRecord {
                id: id.to_string(),
                category,
                confidence,
            }
        })
        .collect()
}

/// Reads an `id<TAB>category` TSV into a complete id → category map.
/// Category names are matched case-insensitively against the six
/// canonical names. Unknown names and duplicate ids are fatal.
pub fn load_external_predictions(path: impl AsRef<Path>) -> Result<BTreeMap<String, Category>> {
    let path = path.as_ref();
    let raw = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut map = BTreeMap::new();
    for (idx, line) in raw.lines().enumerate() {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let (id, name) = line.split_once('\t').ok_or_else(|| {
            Error::parse(path, line_no, "expected two tab-separated columns: id, category")
        })?;
        let id = id.trim();
        if id.is_empty() {
            return Err(Error::parse(path, line_no, "empty id"));
        }
        let category = Category::parse_name(name).ok_or_else(|| {
            Error::parse(
                path,
                line_no,
                format!("unknown category {:?}", name.trim()),
            )
        })?;
        if map.insert(id.to_string(), category).is_some() {
            return Err(Error::parse(path, line_no, format!("duplicate id {id:?}")));
        }
    }
    Ok(map)
}

/// Writes predictions in the same `id<TAB>category` format the loader reads.
pub fn write_predictions(path: impl AsRef<Path>, records: &[PredictionRecord]) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::new();
    for r in records {
        out.push_str(&r.id);
        out.push('\t');
        out.push_str(r.category.canonical_name());
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Reads a `text<TAB>category` training TSV. The label is the field after
/// the last tab, so texts containing tabs survive.
pub fn load_labeled_tsv(path: impl AsRef<Path>) -> Result<Vec<(String, Category)>> {
    let path = path.as_ref();
    let raw = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut rows = Vec::new();
    for (idx, line) in raw.lines().enumerate() {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let (text, name) = line.rsplit_once('\t').ok_or_else(|| {
            Error::parse(path, line_no, "expected two tab-separated columns: text, category")
        })?;
        if text.is_empty() {
            return Err(Error::parse(path, line_no, "empty text"));
        }
        let category = Category::parse_name(name).ok_or_else(|| {
            Error::parse(
                path,
                line_no,
                format!("unknown category {:?}", name.trim()),
            )
        })?;
        rows.push((text.to_string(), category));
    }
    Ok(rows)
}
