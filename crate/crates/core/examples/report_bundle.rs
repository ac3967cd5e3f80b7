// A whole reproduction run from one config file: every configured command
// writes its CSV tables, and a manifest records the outputs, the skipped
// commands and the config hash.
//
//     cargo run --example report_bundle
//
// The same run from the command line is `geoprobe report --config run.toml`.

use std::fs;

use geoprobe::ledf::write_dump_file;
use geoprobe::report::{cmd_report, Overrides, RunConfig, MANIFEST_FILE};
use geoprobe::{EmbeddingDump, ItemKind, ItemRecord, Matrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CONFIG: &str = r#"
seed = 42
sample_size = 200
ks = [1, 5]

[[corpus]]
model = "toy-lm"
protocol = "raw"
path = "toy-lm.ledf"

[[corpus]]
model = "toy-encoder"
protocol = "raw"
path = "toy-encoder.ledf"
"#;

fn corpus_dump(model: &str, drift: f32, seed: u64) -> geoprobe::Result<EmbeddingDump> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (n, dim) = (400, 16);
    let items = (0..n).map(|i| ItemRecord::new(i as u64, format!("t{i}"), "toy-corpus")).collect();
    let layers = (0..13)
        .map(|l| {
            let data = (0..n * dim)
                .map(|j| rng.random_range(-1.0f32..1.0) + if j % dim == 3 { drift * l as f32 } else { 0.0 })
                .collect();
            Matrix::new(n, dim, data)
        })
        .collect::<geoprobe::Result<Vec<_>>>()?;
    EmbeddingDump::new(model, ItemKind::CorpusToken, items, layers)
}

pub fn run_example() -> geoprobe::Result<()> {
    let dir = tempfile::tempdir()?;
    write_dump_file(&corpus_dump("toy-lm", 1.0, 1)?, dir.path().join("toy-lm.ledf"))?;
    write_dump_file(&corpus_dump("toy-encoder", 0.05, 2)?, dir.path().join("toy-encoder.ledf"))?;
    let config = dir.path().join("run.toml");
    fs::write(&config, CONFIG)?;

    let cfg = RunConfig::load(&config, &Overrides::default())?;
    let manifest = cmd_report(&cfg)?;
    for out in &manifest.outputs {
        println!("{:<10} -> {}", out.command, out.files.join(", "));
    }
    for s in &manifest.skipped {
        println!("skipped {}: {}", s.command, s.reason);
    }
    print!("\n{}", fs::read_to_string(cfg.out.join("selfsim.csv"))?);
    assert!(cfg.out.join(MANIFEST_FILE).is_file());
    Ok(())
}

fn main() -> geoprobe::Result<()> {
    run_example()
}
