use std::collections::{HashMap, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::tasks::{nfc, SentencePairTask, ValenceLexicon, WordPairTask};
use crate::geometry::{self_similarity_over, SelfSimilarityResult};
use crate::ledf::{EmbeddingDump, ItemKind};
use crate::matrix::Matrix;
use crate::metrics::{cosine, pearson, sc_weat, spearman, AttributeSets};

/// What to do when an evaluation word has no embedding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoveragePolicy {
    #[default]
    Strict,
    /// Skip pairs or words without embeddings and report the gap.
    Permissive,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct Coverage {
    /// Units (pairs or lexicon words) that were scored.
    pub covered: usize,
    pub total: usize,
    /// Distinct missing surfaces, first-appearance order.
    pub missing: Vec<String>,
}

impl Coverage {
    pub fn is_complete(&self) -> bool {
        self.covered == self.total
    }

    pub fn ratio(&self) -> f64 {
        if self.total == 0 {
            1.0
        } else {
            self.covered as f64 / self.total as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Score {
    pub value: f64,
    pub coverage: Coverage,
}

/// Source of embeddings keyed by surface form.
pub trait VectorLookup {
    fn lookup(&self, key: &str) -> Option<&[f32]>;
}

impl VectorLookup for HashMap<String, Vec<f32>> {
    fn lookup(&self, key: &str) -> Option<&[f32]> {
        self.get(key).map(Vec::as_slice)
    }
}

/// Surface-to-item index over a dump. Surfaces are NFC-normalized; when a
/// surface repeats, its first item wins.
#[derive(Debug, Clone)]
pub struct SurfaceIndex {
    ids: HashMap<String, usize>,
}

impl SurfaceIndex {
    pub fn new(dump: &EmbeddingDump) -> Self {
        let mut ids = HashMap::with_capacity(dump.items.len());
        for (i, item) in dump.items.iter().enumerate() {
            ids.entry(nfc(&item.surface)).or_insert(i);
        }
        Self { ids }
    }

    pub fn get(&self, surface: &str) -> Option<usize> {
        self.ids.get(surface).copied()
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }
}

/// One layer of a dump viewed through a [`SurfaceIndex`].
#[derive(Debug, Clone, Copy)]
pub struct LayerView<'a> {
    pub matrix: &'a Matrix,
    pub index: &'a SurfaceIndex,
}

impl VectorLookup for LayerView<'_> {
    fn lookup(&self, key: &str) -> Option<&[f32]> {
        self.index.get(key).map(|i| self.matrix.row(i))
    }
}

fn record_missing(missing: &mut Vec<String>, seen: &mut HashSet<String>, w: &str) {
    if seen.insert(w.to_string()) {
        missing.push(w.to_string());
    }
}

fn enforce_policy(kind: &str, missing: &[String], policy: CoveragePolicy) -> Result<()> {
    if policy == CoveragePolicy::Strict && !missing.is_empty() {
        return Err(Error::Missing {
            kind: kind.to_string(),
            missing: missing.to_vec(),
        });
    }
    Ok(())
}

/// Spearman correlation between pair cosines and gold ratings.
pub fn eval_word_task<V: VectorLookup + ?Sized>(
    task: &WordPairTask,
    vectors: &V,
    policy: CoveragePolicy,
) -> Result<Score> {
    let mut sims = Vec::with_capacity(task.pairs.len());
    let mut gold = Vec::with_capacity(task.pairs.len());
    let mut missing = Vec::new();
    let mut seen = HashSet::new();
    for pair in &task.pairs {
        let a = vectors.lookup(&pair.a);
        let b = vectors.lookup(&pair.b);
        if a.is_none() {
            record_missing(&mut missing, &mut seen, &pair.a);
        }
        if b.is_none() {
            record_missing(&mut missing, &mut seen, &pair.b);
        }
        if let (Some(a), Some(b)) = (a, b) {
            sims.push(cosine(a, b)?);
            gold.push(pair.gold);
        }
    }
    enforce_policy(&format!("{} words", task.name), &missing, policy)?;
    let coverage = Coverage {
        covered: sims.len(),
        total: task.pairs.len(),
        missing,
    };
    Ok(Score {
        value: spearman(&sims, &gold)?,
        coverage,
    })
}

/// Embeds the lexicon's attribute words. Under the permissive policy
/// missing attribute words are dropped as long as each set keeps one word.
pub fn attribute_sets_for<V: VectorLookup + ?Sized>(
    lexicon: &ValenceLexicon,
    vectors: &V,
    policy: CoveragePolicy,
) -> Result<AttributeSets> {
    let mut missing = Vec::new();
    let mut seen = HashSet::new();
    let mut embed = |words: &[String]| -> Vec<Vec<f32>> {
        words
            .iter()
            .filter_map(|w| {
                let v = vectors.lookup(w);
                if v.is_none() {
                    record_missing(&mut missing, &mut seen, w);
                }
                v.map(<[f32]>::to_vec)
            })
            .collect()
    };
    let pleasant = embed(&lexicon.pleasant);
    let unpleasant = embed(&lexicon.unpleasant);
    enforce_policy("attribute words", &missing, policy)?;
    AttributeSets::new(&pleasant, &unpleasant)
}

/// Pearson correlation between per-word association effect sizes and
/// human valence ratings.
pub fn eval_valnorm<V: VectorLookup + ?Sized>(
    lexicon: &ValenceLexicon,
    vectors: &V,
    attrs: &AttributeSets,
    policy: CoveragePolicy,
) -> Result<Score> {
    let mut effects = Vec::with_capacity(lexicon.entries.len());
    let mut ratings = Vec::with_capacity(lexicon.entries.len());
    let mut missing = Vec::new();
    let mut seen = HashSet::new();
    for (word, rating) in &lexicon.entries {
        match vectors.lookup(word) {
            Some(v) => {
                effects.push(sc_weat(v, attrs)?.0);
                ratings.push(*rating);
            }
            None => record_missing(&mut missing, &mut seen, word),
        }
    }
    enforce_policy("lexicon words", &missing, policy)?;
    let coverage = Coverage {
        covered: effects.len(),
        total: lexicon.entries.len(),
        missing,
    };
    if effects.len() >= 3 && effects.iter().all(|&e| e == effects[0]) {
        return Err(Error::Degenerate("effect sizes have zero variance".into()));
    }
    Ok(Score {
        value: pearson(&effects, &ratings)?,
        coverage,
    })
}

/// Spearman correlation between sentence-pair cosines and gold scores.
/// Every sentence must be embedded.
pub fn eval_sts<V: VectorLookup + ?Sized>(task: &SentencePairTask, vectors: &V) -> Result<Score> {
    let mut sims = Vec::with_capacity(task.pairs.len());
    let mut gold = Vec::with_capacity(task.pairs.len());
    let mut missing = Vec::new();
    let mut seen = HashSet::new();
    for pair in &task.pairs {
        match (vectors.lookup(&pair.a), vectors.lookup(&pair.b)) {
            (Some(a), Some(b)) => {
                sims.push(cosine(a, b)?);
                gold.push(pair.gold);
            }
            (a, b) => {
                if a.is_none() {
                    record_missing(&mut missing, &mut seen, &pair.a);
                }
                if b.is_none() {
                    record_missing(&mut missing, &mut seen, &pair.b);
                }
            }
        }
    }
    enforce_policy("sentences", &missing, CoveragePolicy::Strict)?;
    Ok(Score {
        value: spearman(&sims, &gold)?,
        coverage: Coverage {
            covered: sims.len(),
            total: task.pairs.len(),
            missing,
        },
    })
}

/// An evaluation that can be applied to one layer at a time.
#[derive(Debug, Clone)]
pub enum Evaluator {
    WordTask {
        task: WordPairTask,
        policy: CoveragePolicy,
    },
    /// Attribute words are looked up in the same layer as the lexicon.
    ValNorm {
        lexicon: ValenceLexicon,
        policy: CoveragePolicy,
    },
    Sts {
        task: SentencePairTask,
    },
}

impl Evaluator {
    pub fn metric_name(&self) -> String {
        match self {
            Evaluator::WordTask { task, .. } => task.name.to_string(),
            Evaluator::ValNorm { .. } => "valnorm".to_string(),
            Evaluator::Sts { .. } => "sts".to_string(),
        }
    }

    pub fn evaluate<V: VectorLookup + ?Sized>(&self, vectors: &V) -> Result<Score> {
        match self {
            Evaluator::WordTask { task, policy } => eval_word_task(task, vectors, *policy),
            Evaluator::ValNorm { lexicon, policy } => {
                let attrs = attribute_sets_for(lexicon, vectors, *policy)?;
                eval_valnorm(lexicon, vectors, &attrs, *policy)
            }
            Evaluator::Sts { task } => eval_sts(task, vectors),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LayerSweepReport {
    pub metric_name: String,
    pub per_layer: Vec<f64>,
    /// Lowest layer index attaining the maximum, with that value.
    pub best_layer: (usize, f64),
    pub top_layer_value: f64,
    pub coverage: Option<Coverage>,
}

impl LayerSweepReport {
    pub fn from_values(metric_name: impl Into<String>, per_layer: Vec<f64>) -> Result<Self> {
        let Some(&top_layer_value) = per_layer.last() else {
            return Err(Error::Degenerate("layer sweep over zero layers".into()));
        };
        if per_layer.iter().any(|v| !v.is_finite()) {
            return Err(Error::Degenerate("non-finite per-layer value".into()));
        }
        let mut best_layer = (0, per_layer[0]);
        for (l, &v) in per_layer.iter().enumerate().skip(1) {
            if v > best_layer.1 {
                best_layer = (l, v);
            }
        }
        Ok(Self {
            metric_name: metric_name.into(),
            per_layer,
            best_layer,
            top_layer_value,
            coverage: None,
        })
    }

    /// `best(L)=value, top=value` with six decimals.
    pub fn summary(&self) -> String {
        format!(
            "best({})={:.6}, top={:.6}",
            self.best_layer.0, self.best_layer.1, self.top_layer_value
        )
    }
}

/// Evaluates every layer of `dump`; results are assembled in layer order.
pub fn sweep_layers(dump: &EmbeddingDump, evaluator: &Evaluator) -> Result<LayerSweepReport> {
    dump.check_shape()?;
    let index = SurfaceIndex::new(dump);
    let scores = dump
        .layers
        .par_iter()
        .map(|matrix| evaluator.evaluate(&LayerView { matrix, index: &index }))
        .collect::<Result<Vec<Score>>>()?;
    let coverage = scores.first().map(|s| s.coverage.clone());
    let mut report =
        LayerSweepReport::from_values(evaluator.metric_name(), scores.iter().map(|s| s.value).collect())?;
    report.coverage = coverage;
    Ok(report)
}

/// Self-similarity at every layer over all sentences of a deduplicated
/// sentence dump.
pub fn sentence_self_similarity(dump: &EmbeddingDump) -> Result<SelfSimilarityResult> {
    dump.check_shape()?;
    if dump.header.item_kind != ItemKind::Sentence {
        return Err(Error::InvalidMetadata(format!(
            "sentence self-similarity needs a sentence dump, got {:?}",
            dump.header.item_kind
        )));
    }
    let mut seen = HashSet::new();
    let mut duplicates = Vec::new();
    let mut dup_seen = HashSet::new();
    for item in &dump.items {
        if !seen.insert(item.surface.as_str()) {
            record_missing(&mut duplicates, &mut dup_seen, &item.surface);
        }
    }
    if !duplicates.is_empty() {
        return Err(Error::InvalidMetadata(format!(
            "{} duplicate sentence surfaces, e.g. {:?}",
            duplicates.len(),
            duplicates[0]
        )));
    }
    let item_ids: Vec<usize> = (0..dump.item_count()).collect();
    let per_layer = self_similarity_over(dump, &item_ids)?;
    Ok(SelfSimilarityResult {
        per_layer,
        spec: None,
        item_ids,
    })
}
