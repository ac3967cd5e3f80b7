//! Cosine similarity, rank and product-moment correlation, and the
//! single-category association effect size.
//!
//! Inputs may be `f32` or `f64`; every accumulation runs in `f64`.

use crate::error::{Error, Result};

fn dot_and_norms<T: Copy + Into<f64>>(u: &[T], v: &[T]) -> (f64, f64, f64) {
    let mut dot = 0.0;
    let mut uu = 0.0;
    let mut vv = 0.0;
    for (&a, &b) in u.iter().zip(v) {
        let (a, b) = (a.into(), b.into());
        dot += a * b;
        uu += a * a;
        vv += b * b;
    }
    (dot, uu, vv)
}

/// Cosine similarity, clamped to `[-1, 1]`. Zero vectors are an error.
pub fn cosine<T: Copy + Into<f64>>(u: &[T], v: &[T]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch {
            left: u.len(),
            right: v.len(),
        });
    }
    let (dot, uu, vv) = dot_and_norms(u, v);
    if uu == 0.0 {
        return Err(Error::ZeroVector("left operand of cosine".into()));
    }
    if vv == 0.0 {
        return Err(Error::ZeroVector("right operand of cosine".into()));
    }
    let denom = match (uu * vv).sqrt() {
        d if d.is_finite() && d > 0.0 => d,
        _ => uu.sqrt() * vv.sqrt(),
    };
    Ok((dot / denom).clamp(-1.0, 1.0))
}

fn check_pair(xs: &[f64], ys: &[f64]) -> Result<()> {
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch {
            left: xs.len(),
            right: ys.len(),
        });
    }
    if xs.len() < 3 {
        return Err(Error::Degenerate(format!(
            "correlation needs at least 3 observations, got {}",
            xs.len()
        )));
    }
    if xs.iter().chain(ys).any(|x| !x.is_finite()) {
        return Err(Error::Degenerate("non-finite observation".into()));
    }
    Ok(())
}

fn is_constant(xs: &[f64]) -> bool {
    xs.iter().all(|&x| x == xs[0])
}

/// Pearson product-moment correlation.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64> {
    check_pair(xs, ys)?;
    if is_constant(xs) || is_constant(ys) {
        return Err(Error::Degenerate("constant input to pearson".into()));
    }
    Ok(pearson_unchecked(xs, ys))
}

fn pearson_unchecked(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    // sqrt of the product, not the product of sqrts: sqrt(fl(s * s)) == s, so
    // identical or mirrored inputs give exactly +-1.
    (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0)
}

/// 1-based ranks with ties sharing the mean of the positions they span.
pub fn fractional_ranks(xs: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut ranks = vec![0.0; xs.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && xs[order[end]] == xs[order[start]] {
            end += 1;
        }
        // positions start..end hold 1-based ranks start+1 ..= end
        let rank = (start + end + 1) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = rank;
        }
        start = end;
    }
    ranks
}

/// Spearman's rank correlation: Pearson over fractional ranks.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Result<f64> {
    check_pair(xs, ys)?;
    if is_constant(xs) || is_constant(ys) {
        return Err(Error::Degenerate("constant input to spearman".into()));
    }
    Ok(pearson_unchecked(
        &fractional_ranks(xs),
        &fractional_ranks(ys),
    ))
}

/// The two attribute sets of a single-category association test.
#[derive(Debug, Clone, PartialEq)]
pub struct AttributeSets {
    pleasant: Vec<Vec<f64>>,
    unpleasant: Vec<Vec<f64>>,
}

impl AttributeSets {
    pub fn new<T, A, B>(pleasant: &[A], unpleasant: &[B]) -> Result<Self>
    where
        T: Copy + Into<f64>,
        A: AsRef<[T]>,
        B: AsRef<[T]>,
    {
        fn convert<T: Copy + Into<f64>, V: AsRef<[T]>>(
            set: &[V],
            name: &str,
        ) -> Result<Vec<Vec<f64>>> {
            if set.is_empty() {
                return Err(Error::Degenerate(format!("{name} attribute set is empty")));
            }
            set.iter()
                .enumerate()
                .map(|(i, v)| {
                    let v: Vec<f64> = v.as_ref().iter().map(|&x| x.into()).collect();
                    if v.iter().all(|&x| x == 0.0) {
                        return Err(Error::ZeroVector(format!("{name} attribute vector {i}")));
                    }
                    Ok(v)
                })
                .collect()
        }
        let pleasant = convert(pleasant, "pleasant")?;
        let unpleasant = convert(unpleasant, "unpleasant")?;
        let dim = pleasant[0].len();
        if let Some(v) = pleasant.iter().chain(&unpleasant).find(|v| v.len() != dim) {
            return Err(Error::DimensionMismatch {
                left: dim,
                right: v.len(),
            });
        }
        Ok(Self {
            pleasant,
            unpleasant,
        })
    }

    pub fn pleasant(&self) -> &[Vec<f64>] {
        &self.pleasant
    }

    pub fn unpleasant(&self) -> &[Vec<f64>] {
        &self.unpleasant
    }

    pub fn dim(&self) -> usize {
        self.pleasant[0].len()
    }

    /// The same sets with roles exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            pleasant: self.unpleasant.clone(),
            unpleasant: self.pleasant.clone(),
        }
    }
}

/// Standardized association score of one word with two attribute sets.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct EffectSize(pub f64);

/// Single-category WEAT effect size: the difference of mean cosines to the
/// pleasant and unpleasant sets over the sample standard deviation of all
/// cosines in their union.
pub fn sc_weat<T: Copy + Into<f64>>(w: &[T], attrs: &AttributeSets) -> Result<EffectSize> {
    if w.len() != attrs.dim() {
        return Err(Error::DimensionMismatch {
            left: w.len(),
            right: attrs.dim(),
        });
    }
    let w: Vec<f64> = w.iter().map(|&x| x.into()).collect();
    let a: Vec<f64> = attrs
        .pleasant
        .iter()
        .map(|v| cosine(&w, v))
        .collect::<Result<_>>()?;
    let b: Vec<f64> = attrs
        .unpleasant
        .iter()
        .map(|v| cosine(&w, v))
        .collect::<Result<_>>()?;

    let mean = |s: &[f64]| s.iter().sum::<f64>() / s.len() as f64;
    let numerator = mean(&a) - mean(&b);

    let n = a.len() + b.len();
    if n < 2 {
        return Err(Error::Degenerate(
            "sample standard deviation needs at least two attribute vectors".into(),
        ));
    }
    // Per-set partial sums combined with a single commutative `+` keep the
    // result bit-identical when the two sets trade places.
    let union_mean = (a.iter().sum::<f64>() + b.iter().sum::<f64>()) / n as f64;
    let sq_dev = |s: &[f64]| -> f64 {
        s.iter()
            .map(|&x| (x - union_mean) * (x - union_mean))
            .sum()
    };
    let sd = ((sq_dev(&a) + sq_dev(&b)) / (n - 1) as f64).sqrt();
    if sd == 0.0 {
        return Err(Error::Degenerate(
            "association scores have zero variance across the attribute union".into(),
        ));
    }
    Ok(EffectSize(numerator / sd))
}
