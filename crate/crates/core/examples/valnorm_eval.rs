// ValNorm: score each lexicon word's association with the bundled
// pleasant and unpleasant word lists, then correlate with human valence.
//
//     cargo run --example valnorm_eval

use std::collections::HashMap;

use geoprobe::eval::{
    attribute_sets_for, eval_valnorm, inline_origin, parse_valence_csv, CoveragePolicy, ValenceLexicon,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const LEXICON: &str = "\
word,rating
sunrise,7.9
kitten,8.2
holiday,8.0
picnic,7.4
table,5.1
window,5.3
pencil,5.0
traffic,3.2
tax,2.6
disease,1.8
war,1.3
funeral,1.6
";

pub fn run_example() -> geoprobe::Result<()> {
    let lexicon = ValenceLexicon::with_default_attributes(parse_valence_csv(LEXICON, &inline_origin())?)?;

    // A toy embedding with one valence direction (axis 0) plus noise.
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut vectors: HashMap<String, Vec<f32>> = HashMap::new();
    let mut embed = |word: &str, valence: f32, rng: &mut ChaCha8Rng| {
        let mut v: Vec<f32> = (0..12).map(|_| rng.random_range(-0.5f32..0.5)).collect();
        v[0] += valence;
        vectors.insert(word.to_string(), v);
    };
    for w in &lexicon.pleasant {
        embed(w, 1.0, &mut rng);
    }
    for w in &lexicon.unpleasant {
        embed(w, -1.0, &mut rng);
    }
    for (w, rating) in &lexicon.entries {
        embed(w, (*rating as f32 - 5.0) / 3.0, &mut rng);
    }

    let attrs = attribute_sets_for(&lexicon, &vectors, CoveragePolicy::Strict)?;
    let score = eval_valnorm(&lexicon, &vectors, &attrs, CoveragePolicy::Strict)?;
    println!(
        "ValNorm r = {:.4} over {}/{} words ({} pleasant, {} unpleasant attribute words)",
        score.value,
        score.coverage.covered,
        score.coverage.total,
        attrs.pleasant().len(),
        attrs.unpleasant().len()
    );
    Ok(())
}

fn main() -> geoprobe::Result<()> {
    run_example()
}
