// Word-similarity evaluation across layers: parse a benchmark file, embed
// its words in a dump, and find the layer whose cosines best track the
// human ratings.
//
//     cargo run --example word_similarity_eval

use std::fmt::Write as _;

use geoprobe::eval::{inline_origin, parse_word_task, sweep_layers, CoveragePolicy, Evaluator, WordTaskName};
use geoprobe::{EmbeddingDump, ItemKind, ItemRecord, Matrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const DIM: usize = 16;
const LAYERS: usize = 13;

pub fn run_example() -> geoprobe::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(65);

    // 65 pairs in the usual `word1<TAB>word2<TAB>rating` layout, ratings 0..4.
    let mut text = String::from("# synthetic similarity benchmark\n");
    let mut golds = Vec::new();
    for i in 0..65 {
        let g = rng.random_range(0.0..4.0);
        writeln!(text, "cue{i}\tprobe{i}\t{g:.2}").unwrap();
        golds.push(g);
    }
    let task = parse_word_task(&text, &inline_origin(), WordTaskName::Rg65)?;

    // Each pair shares a direction; its partner leans away by an angle that
    // shrinks with the rating. Noise is smallest around the middle layers.
    let mut surfaces = Vec::new();
    let mut per_layer: Vec<Vec<Vec<f32>>> = vec![Vec::new(); LAYERS];
    for (i, g) in golds.iter().enumerate() {
        let base: Vec<f32> = (0..DIM).map(|_| rng.random_range(-1.0f32..1.0)).collect();
        let away: Vec<f32> = (0..DIM).map(|_| rng.random_range(-1.0f32..1.0)).collect();
        let lean = (4.0 - *g as f32) / 4.0;
        let partner: Vec<f32> = base.iter().zip(&away).map(|(b, a)| b + lean * a).collect();
        surfaces.extend([format!("cue{i}"), format!("probe{i}")]);
        for (l, rows) in per_layer.iter_mut().enumerate() {
            let noise = 0.15 + 0.1 * (l as f32 - 6.0).abs();
            for v in [&base, &partner] {
                rows.push(v.iter().map(|x| x + noise * rng.random_range(-1.0f32..1.0)).collect());
            }
        }
    }
    let items = surfaces
        .iter()
        .enumerate()
        .map(|(i, s)| ItemRecord::new(i as u64, s.clone(), "rg65"))
        .collect();
    let layers = per_layer.iter().map(|rows| Matrix::from_rows(rows)).collect::<geoprobe::Result<Vec<_>>>()?;
    let dump = EmbeddingDump::new("synthetic-words", ItemKind::Word, items, layers)?;

    let report = sweep_layers(&dump, &Evaluator::WordTask { task, policy: CoveragePolicy::Strict })?;
    for (l, r) in report.per_layer.iter().enumerate() {
        println!("layer {l:>2}  spearman {r:+.4}");
    }
    println!("{}: {}", report.metric_name, report.summary());
    Ok(())
}

fn main() -> geoprobe::Result<()> {
    run_example()
}
