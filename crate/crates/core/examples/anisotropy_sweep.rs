// Layerwise anisotropy of a synthetic corpus dump: self-similarity of a
// seeded token sample and how much of each vector's magnitude sits in its
// largest components.
//
//     cargo run --example anisotropy_sweep

use geoprobe::geometry::{layer_magnitude, layer_self_similarity, MagnitudeMode, SampleSpec};
use geoprobe::{EmbeddingDump, ItemKind, ItemRecord, Matrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Layers drift toward one rogue dimension, the way deep layers of some
/// language models do.
fn synthetic_corpus(tokens: usize, dim: usize, layers: usize) -> geoprobe::Result<EmbeddingDump> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let items = (0..tokens)
        .map(|i| {
            let surface = if i % 50 == 0 { "<|endoftext|>".to_string() } else { format!("tok{i}") };
            ItemRecord::new(i as u64, surface, "synthetic-corpus").with_position((i % 40) as u64)
        })
        .collect();
    let matrices = (0..layers)
        .map(|l| {
            let rogue = 0.6 * l as f32;
            let data = (0..tokens * dim)
                .map(|j| rng.random_range(-1.0f32..1.0) + if j % dim == 7 { rogue } else { 0.0 })
                .collect();
            Matrix::new(tokens, dim, data)
        })
        .collect::<geoprobe::Result<Vec<_>>>()?;
    EmbeddingDump::new("synthetic-lm", ItemKind::CorpusToken, items, matrices)
}

pub fn run_example() -> geoprobe::Result<()> {
    let dump = synthetic_corpus(2_000, 32, 13)?;
    let spec = SampleSpec::new(500, 42);
    let sim = layer_self_similarity(&dump, &spec)?;
    let mag = layer_magnitude(&dump, &[1, 5], &spec, MagnitudeMode::L1)?;
    assert_eq!(sim.item_ids, mag.item_ids);

    println!("layer  selfsim  top1   top5");
    for (l, (s, m)) in sim.per_layer.iter().zip(&mag.per_layer_per_k).enumerate() {
        println!("{l:>5}  {s:.4}   {:.3}  {:.3}", m[0], m[1]);
    }
    Ok(())
}

fn main() -> geoprobe::Result<()> {
    run_example()
}
