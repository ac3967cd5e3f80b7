//! Intra-layer anisotropy probes.
//!
//! Self-similarity is the mean cosine over all ordered pairs of distinct
//! rows. With unit rows `u_i` the double sum collapses to
//! `(|sum u_i|^2 - n) / (n^2 - n)`, which is what [`self_similarity`]
//! computes in one O(n d) pass.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ledf::EmbeddingDump;
use crate::matrix::Matrix;

pub const DEFAULT_SAMPLE_SIZE: usize = 10_000;
pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Eligibility {
    AllItems,
    /// Skip items whose surface is a model control token such as
    /// `<|endoftext|>`.
    #[default]
    ExcludeSpecialTokens,
}

/// Returns true for control-token surfaces of the form `<|...|>`.
pub fn is_special_token(surface: &str) -> bool {
    surface.len() > 4 && surface.starts_with("<|") && surface.ends_with("|>")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleSpec {
    pub sample_size: usize,
    pub seed: u64,
    pub eligibility: Eligibility,
}

impl Default for SampleSpec {
    fn default() -> Self {
        Self {
            sample_size: DEFAULT_SAMPLE_SIZE,
            seed: DEFAULT_SEED,
            eligibility: Eligibility::default(),
        }
    }
}

impl SampleSpec {
    pub fn new(sample_size: usize, seed: u64) -> Self {
        Self {
            sample_size,
            seed,
            ..Self::default()
        }
    }

    pub fn with_eligibility(mut self, eligibility: Eligibility) -> Self {
        self.eligibility = eligibility;
        self
    }
}

/// Draws `spec.sample_size` distinct eligible item ids, sorted ascending.
///
/// The result depends only on the spec and the dump's item list.
pub fn sample_items(dump: &EmbeddingDump, spec: &SampleSpec) -> Result<Vec<usize>> {
    let eligible: Vec<usize> = match spec.eligibility {
        Eligibility::AllItems => (0..dump.items.len()).collect(),
        Eligibility::ExcludeSpecialTokens => dump
            .items
            .iter()
            .enumerate()
            .filter(|(_, it)| !is_special_token(&it.surface))
            .map(|(i, _)| i)
            .collect(),
    };
    if spec.sample_size < 2 {
        return Err(Error::Degenerate(format!(
            "sample_size must be at least 2, got {}",
            spec.sample_size
        )));
    }
    if spec.sample_size > eligible.len() {
        return Err(Error::OutOfRange(format!(
            "sample_size {} exceeds the {} eligible items",
            spec.sample_size,
            eligible.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut ids: Vec<usize> = rand::seq::index::sample(&mut rng, eligible.len(), spec.sample_size)
        .into_iter()
        .map(|i| eligible[i])
        .collect();
    ids.sort_unstable();
    Ok(ids)
}

/// Self-similarity over an arbitrary sequence of rows.
pub fn self_similarity_rows<'a, I>(rows: I) -> Result<f64>
where
    I: IntoIterator<Item = &'a [f32]>,
{
    let mut sum: Vec<f64> = Vec::new();
    let mut n = 0usize;
    for (i, row) in rows.into_iter().enumerate() {
        if i == 0 {
            sum = vec![0.0; row.len()];
        } else if row.len() != sum.len() {
            return Err(Error::DimensionMismatch {
                left: sum.len(),
                right: row.len(),
            });
        }
        let norm = row
            .iter()
            .map(|&x| f64::from(x) * f64::from(x))
            .sum::<f64>()
            .sqrt();
        if norm == 0.0 {
            return Err(Error::ZeroVector(format!("row {i}")));
        }
        for (acc, &x) in sum.iter_mut().zip(row) {
            *acc += f64::from(x) / norm;
        }
        n += 1;
    }
    if n < 2 {
        return Err(Error::Degenerate(format!(
            "self-similarity needs at least 2 rows, got {n}"
        )));
    }
    let n = n as f64;
    let sq: f64 = sum.iter().map(|x| x * x).sum();
    Ok(((sq - n) / (n * n - n)).clamp(-1.0, 1.0))
}

/// Mean pairwise cosine over all ordered pairs of distinct rows.
pub fn self_similarity(vectors: &Matrix) -> Result<f64> {
    self_similarity_rows(vectors.iter_rows())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelfSimilarityResult {
    pub per_layer: Vec<f64>,
    /// `None` when every item was used.
    pub spec: Option<SampleSpec>,
    pub item_ids: Vec<usize>,
}

/// Self-similarity at every layer over the given fixed item ids.
pub fn self_similarity_over(dump: &EmbeddingDump, ids: &[usize]) -> Result<Vec<f64>> {
    dump.check_shape()?;
    if let Some(&bad) = ids.iter().find(|&&i| i >= dump.item_count()) {
        return Err(Error::OutOfRange(format!(
            "item {bad} (dump has {} items)",
            dump.item_count()
        )));
    }
    dump.layers
        .par_iter()
        .enumerate()
        .map(|(l, m)| {
            self_similarity_rows(ids.iter().map(|&i| m.row(i)))
                .map_err(|e| annotate_layer(e, l, ids))
        })
        .collect()
}

fn annotate_layer(err: Error, layer: usize, ids: &[usize]) -> Error {
    match err {
        Error::ZeroVector(what) => {
            let item = what
                .strip_prefix("row ")
                .and_then(|r| r.parse::<usize>().ok())
                .and_then(|r| ids.get(r));
            match item {
                Some(item) => Error::ZeroVector(format!("layer {layer}, item {item}")),
                None => Error::ZeroVector(format!("layer {layer}, {what}")),
            }
        }
        other => other,
    }
}

/// Draws one sample per `spec` and measures self-similarity on it at
/// every layer.
pub fn layer_self_similarity(
    dump: &EmbeddingDump,
    spec: &SampleSpec,
) -> Result<SelfSimilarityResult> {
    dump.check_shape()?;
    let item_ids = sample_items(dump, spec)?;
    let per_layer = self_similarity_over(dump, &item_ids)?;
    Ok(SelfSimilarityResult {
        per_layer,
        spec: Some(*spec),
        item_ids,
    })
}

/// How the share of a vector held by its largest components is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MagnitudeMode {
    /// Sum of the k largest `|v_i|` over the sum of all `|v_i|`.
    #[default]
    L1,
    /// Euclidean length of the k largest components over the length of `v`.
    L2,
}

/// Top-k shares of `v` for each `k` in `ks`.
///
/// Components are sorted once by magnitude and prefix-summed, so shares
/// are non-decreasing in k and exactly 1 at `k = v.len()`.
pub fn concentration_profile(v: &[f32], ks: &[usize], mode: MagnitudeMode) -> Result<Vec<f64>> {
    if let Some(&k) = ks.iter().find(|&&k| k == 0 || k > v.len()) {
        return Err(Error::OutOfRange(format!(
            "k = {k} outside 1..={}",
            v.len()
        )));
    }
    let mut mags: Vec<f64> = v
        .iter()
        .map(|&x| match mode {
            MagnitudeMode::L1 => f64::from(x).abs(),
            MagnitudeMode::L2 => f64::from(x) * f64::from(x),
        })
        .collect();
    mags.sort_unstable_by(|a, b| b.total_cmp(a));
    let mut prefix = Vec::with_capacity(mags.len() + 1);
    let mut acc = 0.0;
    prefix.push(acc);
    for m in &mags {
        acc += m;
        prefix.push(acc);
    }
    let total = acc;
    if total == 0.0 {
        return Err(Error::ZeroVector("magnitude of an all-zero vector".into()));
    }
    Ok(ks
        .iter()
        .map(|&k| {
            let share = prefix[k] / total;
            match mode {
                MagnitudeMode::L1 => share,
                MagnitudeMode::L2 => share.sqrt(),
            }
        })
        .collect())
}

/// Share of `v`'s magnitude carried by its `k` largest components.
pub fn magnitude_concentration(v: &[f32], k: usize, mode: MagnitudeMode) -> Result<f64> {
    Ok(concentration_profile(v, &[k], mode)?[0])
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MagnitudeResult {
    pub ks: Vec<usize>,
    /// `per_layer_per_k[layer][j]` is the mean share for `ks[j]`.
    pub per_layer_per_k: Vec<Vec<f64>>,
    pub mode: MagnitudeMode,
    pub item_ids: Vec<usize>,
}

/// Mean top-k share over a seeded sample, per layer and per k.
pub fn layer_magnitude(
    dump: &EmbeddingDump,
    ks: &[usize],
    spec: &SampleSpec,
    mode: MagnitudeMode,
) -> Result<MagnitudeResult> {
    dump.check_shape()?;
    if ks.is_empty() {
        return Err(Error::Degenerate("no k values requested".into()));
    }
    let item_ids = sample_items(dump, spec)?;
    let per_layer_per_k = dump
        .layers
        .par_iter()
        .enumerate()
        .map(|(l, m)| {
            let mut sums = vec![0.0; ks.len()];
            for &id in &item_ids {
                let profile = concentration_profile(m.row(id), ks, mode).map_err(|e| match e {
                    Error::ZeroVector(_) => Error::ZeroVector(format!("layer {l}, item {id}")),
                    other => other,
                })?;
                for (s, p) in sums.iter_mut().zip(profile) {
                    *s += p;
                }
            }
            let n = item_ids.len() as f64;
            Ok(sums.into_iter().map(|s| s / n).collect())
        })
        .collect::<Result<Vec<Vec<f64>>>>()?;
    Ok(MagnitudeResult {
        ks: ks.to_vec(),
        per_layer_per_k,
        mode,
        item_ids,
    })
}
