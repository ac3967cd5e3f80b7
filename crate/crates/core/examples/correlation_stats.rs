// The statistics underneath every evaluation: cosine, Pearson, Spearman
// with tied ranks, and the single-category WEAT effect size.
//
//     cargo run --example correlation_stats

use geoprobe::metrics::{cosine, fractional_ranks, pearson, sc_weat, spearman, AttributeSets};

pub fn run_example() -> geoprobe::Result<()> {
    println!("cosine((1,0),(1,1))   = {:.6}", cosine(&[1.0f32, 0.0], &[1.0, 1.0])?);

    let human = [1.0, 2.0, 2.0, 3.0, 5.0];
    let model = [0.10, 0.40, 0.35, 0.50, 0.90];
    println!("ranks of {human:?} = {:?}", fractional_ranks(&human));
    println!("pearson  = {:.6}", pearson(&model, &human)?);
    println!("spearman = {:.6}", spearman(&model, &human)?);

    // A word that points at the pleasant set and away from the unpleasant one.
    let pleasant = [[1.0f32, 0.1], [0.9, 0.0]];
    let unpleasant = [[0.0f32, 1.0], [-0.2, 0.9]];
    let attrs = AttributeSets::new(&pleasant, &unpleasant)?;
    let e = sc_weat(&[1.0f32, 0.05], &attrs)?;
    let swapped = sc_weat(&[1.0f32, 0.05], &attrs.swapped())?;
    println!("effect size = {:.6} (swapped sets: {:.6})", e.0, swapped.0);
    assert_eq!(swapped.0, -e.0);
    Ok(())
}

fn main() -> geoprobe::Result<()> {
    run_example()
}
