// Sentence similarity: Spearman between pair cosines and gold scores at
// every layer, plus how anisotropic the sentence embeddings themselves are.
//
//     cargo run --example sts_eval

use geoprobe::eval::{sentence_self_similarity, sweep_layers, Evaluator, SentencePairTask, Split};
use geoprobe::{EmbeddingDump, ItemKind, ItemRecord, Matrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const DIM: usize = 24;
const LAYERS: usize = 13;

pub fn run_example() -> geoprobe::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(2017);
    let mut pairs = Vec::new();
    let mut sentences: Vec<String> = Vec::new();
    let mut rows: Vec<Vec<Vec<f32>>> = vec![Vec::new(); LAYERS];
    for i in 0..200 {
        let gold: f64 = rng.random_range(0.0..5.0);
        let (a, b) = (format!("A dog runs across field {i}."), format!("An animal crosses meadow {i}."));
        let topic: Vec<f32> = (0..DIM).map(|_| rng.random_range(-1.0f32..1.0)).collect();
        let drift: Vec<f32> = (0..DIM).map(|_| rng.random_range(-1.0f32..1.0)).collect();
        let spread = (5.0 - gold as f32) / 5.0;
        for (l, layer) in rows.iter_mut().enumerate() {
            // Later layers add a shared offset, so sentences crowd into a cone.
            let offset = 0.4 * l as f32;
            let emit = |v: &Vec<f32>, rng: &mut ChaCha8Rng| -> Vec<f32> {
                v.iter().enumerate().map(|(j, x)| x + rng.random_range(-0.3f32..0.3) + if j == 0 { offset } else { 0.0 }).collect()
            };
            layer.push(emit(&topic, &mut rng));
            let partner: Vec<f32> = topic.iter().zip(&drift).map(|(t, d)| t + spread * d).collect();
            layer.push(emit(&partner, &mut rng));
        }
        sentences.extend([a.clone(), b.clone()]);
        pairs.push((a, b, gold));
    }
    // Files read through `load_sts` must hold the full split; a hand-built
    // task can be any size.
    let task = SentencePairTask::from_pairs(Split::Test, &pairs)?;

    let items = sentences
        .iter()
        .enumerate()
        .map(|(i, s)| ItemRecord::new(i as u64, s.clone(), "sts-demo"))
        .collect();
    let layers = rows.iter().map(|r| Matrix::from_rows(r)).collect::<geoprobe::Result<Vec<_>>>()?;
    let dump = EmbeddingDump::new("synthetic-encoder", ItemKind::Sentence, items, layers)?;

    let sts = sweep_layers(&dump, &Evaluator::Sts { task })?;
    let selfsim = sentence_self_similarity(&dump)?;
    println!("layer  spearman  selfsim");
    for l in 0..LAYERS {
        println!("{l:>5}  {:+.4}   {:.4}", sts.per_layer[l], selfsim.per_layer[l]);
    }
    println!("sts: {}", sts.summary());
    Ok(())
}

fn main() -> geoprobe::Result<()> {
    run_example()
}
