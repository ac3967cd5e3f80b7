//! Test-only oracles and generators. Nothing here calls into the crate's
//! numeric code, so the oracles stay independent of what they check.

#![allow(dead_code)]

use geoprobe::{EmbeddingDump, ItemKind, ItemRecord, Matrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_rows(rng: &mut ChaCha8Rng, n: usize, d: usize) -> Vec<Vec<f32>> {
    (0..n)
        .map(|_| loop {
            let v: Vec<f32> = (0..d).map(|_| rng.random_range(-1.0f32..1.0)).collect();
            if v.iter().any(|&x| x != 0.0) {
                break v;
            }
        })
        .collect()
}

/// Mean cosine over ordered pairs i != j, summed pair by pair.
pub fn naive_self_similarity(rows: &[Vec<f32>]) -> f64 {
    let n = rows.len();
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let (mut dot, mut a, mut b) = (0.0f64, 0.0f64, 0.0f64);
            for (&x, &y) in rows[i].iter().zip(&rows[j]) {
                let (x, y) = (x as f64, y as f64);
                dot += x * y;
                a += x * x;
                b += y * y;
            }
            total += dot / (a.sqrt() * b.sqrt());
        }
    }
    total / (n * n - n) as f64
}

/// Rank of each value: 1 + (# strictly smaller) + (# equal others) / 2.
pub fn brute_ranks(xs: &[f64]) -> Vec<f64> {
    xs.iter()
        .map(|&x| {
            let below = xs.iter().filter(|&&y| y < x).count() as f64;
            let equal = xs.iter().filter(|&&y| y == x).count() as f64;
            1.0 + below + (equal - 1.0) / 2.0
        })
        .collect()
}

/// Product-moment correlation from raw moment sums.
pub fn brute_pearson(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let syy: f64 = ys.iter().map(|y| y * y).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
    (n * sxy - sx * sy) / ((n * sxx - sx * sx).sqrt() * (n * syy - sy * sy).sqrt())
}

pub fn brute_spearman(xs: &[f64], ys: &[f64]) -> f64 {
    brute_pearson(&brute_ranks(xs), &brute_ranks(ys))
}

pub fn brute_cosine(u: &[f64], v: &[f64]) -> f64 {
    let dot: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
    let nu: f64 = u.iter().map(|a| a * a).sum::<f64>().sqrt();
    let nv: f64 = v.iter().map(|a| a * a).sum::<f64>().sqrt();
    dot / (nu * nv)
}

/// Effect size written straight from its definition, sample stdev.
pub fn brute_sc_weat(w: &[f64], a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    let ca: Vec<f64> = a.iter().map(|x| brute_cosine(w, x)).collect();
    let cb: Vec<f64> = b.iter().map(|x| brute_cosine(w, x)).collect();
    let all: Vec<f64> = ca.iter().chain(&cb).copied().collect();
    let mean = |s: &[f64]| s.iter().sum::<f64>() / s.len() as f64;
    let m = mean(&all);
    let var = all.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (all.len() - 1) as f64;
    (mean(&ca) - mean(&cb)) / var.sqrt()
}

pub fn random_dump(rng: &mut ChaCha8Rng, layers: usize, items: usize, dim: usize, kind: ItemKind) -> EmbeddingDump {
    let records = (0..items)
        .map(|i| {
            let mut r = ItemRecord::new(i as u64, format!("tok{i}_{}", rng.random_range(0..1000)), "synthetic");
            if rng.random_bool(0.5) {
                r = r.with_position(rng.random_range(0..77));
            }
            r
        })
        .collect();
    let mats = (0..layers)
        .map(|_| {
            let data = (0..items * dim)
                .map(|_| rng.random_range(-1e3f32..1e3) * if rng.random_bool(0.1) { 1e-30 } else { 1.0 })
                .collect();
            Matrix::new(items, dim, data).unwrap()
        })
        .collect();
    EmbeddingDump::new(format!("model-{}", rng.random_range(0..100)), kind, records, mats).unwrap()
}

/// Dump with one item per `(surface, per-layer vectors)` entry.
pub fn dump_from(kind: ItemKind, entries: &[(String, Vec<Vec<f32>>)]) -> EmbeddingDump {
    let layers = entries[0].1.len();
    let items = entries
        .iter()
        .enumerate()
        .map(|(i, (s, _))| ItemRecord::new(i as u64, s.clone(), "synthetic"))
        .collect();
    let mats = (0..layers)
        .map(|l| Matrix::from_rows(&entries.iter().map(|(_, v)| v[l].clone()).collect::<Vec<_>>()).unwrap())
        .collect();
    EmbeddingDump::new("synthetic", kind, items, mats).unwrap()
}

/// The dump stored in `tests/fixtures/tiny_words.ledf`.
pub fn fixture_dump() -> EmbeddingDump {
    let surfaces = ["coast", "shore", "café", "<|endoftext|>"];
    let items = surfaces
        .iter()
        .enumerate()
        .map(|(i, s)| ItemRecord::new(i as u64, *s, "fixture").with_position(i as u64 + 1))
        .collect();
    let layers = (0..3)
        .map(|l| {
            let data = (0..4 * 3).map(|j| (j as f32 - 5.5) * 0.25 + l as f32).collect();
            Matrix::new(4, 3, data).unwrap()
        })
        .collect();
    EmbeddingDump::new("fixture-model", ItemKind::Word, items, layers).unwrap()
}

pub fn fixture_path() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/tiny_words.ledf")
}
