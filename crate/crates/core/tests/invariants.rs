mod common;

use std::collections::HashMap;

use common::*;
use geoprobe::eval::{
    attribute_sets_for, eval_valnorm, eval_word_task, sweep_layers, CoveragePolicy, Evaluator, LayerSweepReport,
    ValenceLexicon, WordPairTask, WordTaskName,
};
use geoprobe::geometry::{
    concentration_profile, layer_magnitude, layer_self_similarity, sample_items, self_similarity, MagnitudeMode,
    SampleSpec,
};
use geoprobe::metrics::{cosine, fractional_ranks, pearson, sc_weat, spearman, AttributeSets};
use geoprobe::{ItemKind, Matrix};
use proptest::prelude::*;
use rand::Rng;

fn vec_f64(len: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-100.0f64..100.0, len)
}

fn nonzero(v: &[f64]) -> bool {
    v.iter().any(|&x| x.abs() > 1e-6)
}

fn varied(v: &[f64]) -> bool {
    v.iter().any(|&x| x != v[0])
}

fn rows_strategy() -> impl Strategy<Value = Vec<Vec<f32>>> {
    (2usize..40, 1usize..12).prop_flat_map(|(n, d)| {
        proptest::collection::vec(
            proptest::collection::vec(-10.0f32..10.0, d).prop_filter("nonzero", |r| r.iter().any(|x| x.abs() > 1e-3)),
            n,
        )
    })
}

proptest! {
    #[test]
    fn cosine_is_scale_invariant_and_bounded(
        (u, v) in (1usize..32).prop_flat_map(|d| (vec_f64(d), vec_f64(d))),
        a in 1e-3f64..1e3,
        b in 1e-3f64..1e3,
    ) {
        prop_assume!(nonzero(&u) && nonzero(&v));
        let c = cosine(&u, &v).unwrap();
        prop_assert!((-1.0..=1.0).contains(&c));
        let su: Vec<f64> = u.iter().map(|x| x * a).collect();
        let sv: Vec<f64> = v.iter().map(|x| x * b).collect();
        prop_assert!((cosine(&su, &sv).unwrap() - c).abs() < 1e-12);
        prop_assert_eq!(cosine(&v, &u).unwrap(), c);
    }

    #[test]
    fn spearman_ignores_monotone_transforms((xs, ys) in (3usize..60).prop_flat_map(|n| (vec_f64(n), vec_f64(n)))) {
        prop_assume!(varied(&xs) && varied(&ys));
        let r = spearman(&xs, &ys).unwrap();
        let tx: Vec<f64> = xs.iter().map(|x| (x / 40.0).exp() * 3.0 + 1.0).collect();
        let ty: Vec<f64> = ys.iter().map(|y| y.powi(3)).collect();
        prop_assert_eq!(spearman(&tx, &ty).unwrap(), r);
        prop_assert!((r - brute_spearman(&xs, &ys)).abs() < 1e-10);
    }

    #[test]
    fn spearman_is_pearson_on_ranks((xs, ys) in (3usize..60).prop_flat_map(|n| {
        let tied = proptest::collection::vec((0i32..5).prop_map(f64::from), n);
        (tied.clone(), tied)
    })) {
        prop_assume!(varied(&xs) && varied(&ys));
        let by_ranks = pearson(&fractional_ranks(&xs), &fractional_ranks(&ys)).unwrap();
        prop_assert_eq!(spearman(&xs, &ys).unwrap(), by_ranks);
        let total: f64 = fractional_ranks(&xs).iter().sum();
        let n = xs.len() as f64;
        prop_assert_eq!(total, n * (n + 1.0) / 2.0);
    }

    #[test]
    fn pearson_affine_invariance((xs, ys) in (3usize..60).prop_flat_map(|n| (vec_f64(n), vec_f64(n))), a in 0.1f64..10.0, b in -50.0f64..50.0) {
        prop_assume!(varied(&xs) && varied(&ys));
        let r = pearson(&xs, &ys).unwrap();
        let t: Vec<f64> = xs.iter().map(|x| a * x + b).collect();
        prop_assert!((pearson(&t, &ys).unwrap() - r).abs() < 1e-9);
        let neg: Vec<f64> = xs.iter().map(|x| -a * x + b).collect();
        prop_assert!((pearson(&neg, &ys).unwrap() + r).abs() < 1e-9);
    }

    #[test]
    fn self_similarity_matches_naive_and_is_permutation_invariant(rows in rows_strategy(), seed in any::<u64>()) {
        let m = Matrix::from_rows(&rows).unwrap();
        let s = self_similarity(&m).unwrap();
        prop_assert!((s - naive_self_similarity(&rows)).abs() < 1e-9);
        prop_assert!((-1.0 / (rows.len() as f64 - 1.0) - 1e-9..=1.0 + 1e-9).contains(&s));

        let mut shuffled = rows.clone();
        use rand::seq::SliceRandom;
        shuffled.shuffle(&mut rng(seed));
        prop_assert!((self_similarity(&Matrix::from_rows(&shuffled).unwrap()).unwrap() - s).abs() < 1e-12);

        // Per-row positive rescaling leaves every cosine unchanged.
        let mut r = rng(seed);
        let scaled: Vec<Vec<f32>> = rows
            .iter()
            .map(|row| {
                let a = r.random_range(0.25f32..4.0);
                row.iter().map(|x| x * a).collect()
            })
            .collect();
        prop_assert!((self_similarity(&Matrix::from_rows(&scaled).unwrap()).unwrap() - s).abs() < 1e-6);
    }

    #[test]
    fn magnitude_profile_is_monotone_and_bounded(v in proptest::collection::vec(-1e3f32..1e3, 1..100)) {
        prop_assume!(v.iter().any(|&x| x != 0.0));
        let ks: Vec<usize> = (1..=v.len()).collect();
        for mode in [MagnitudeMode::L1, MagnitudeMode::L2] {
            let p = concentration_profile(&v, &ks, mode).unwrap();
            prop_assert!(p.windows(2).all(|w| w[0] <= w[1]));
            prop_assert_eq!(*p.last().unwrap(), 1.0);
            let floor = match mode {
                MagnitudeMode::L1 => 1.0 / v.len() as f64,
                MagnitudeMode::L2 => (1.0 / v.len() as f64).sqrt(),
            };
            prop_assert!(p[0] >= floor - 1e-12);
        }
    }

    #[test]
    fn sc_weat_invariants(seed in any::<u64>(), d in 2usize..16, na in 2usize..8, nb in 2usize..8) {
        let mut r = rng(seed);
        let mut draw = |k: usize| -> Vec<Vec<f64>> {
            (0..k).map(|_| (0..d).map(|_| r.random_range(-1.0..1.0)).collect()).collect()
        };
        let (a, b, w) = (draw(na), draw(nb), draw(1).remove(0));
        let attrs = AttributeSets::new(&a, &b).unwrap();
        let e = sc_weat(&w, &attrs).unwrap().0;
        prop_assert_eq!(sc_weat(&w, &attrs.swapped()).unwrap().0, -e);
        prop_assert!((e - brute_sc_weat(&w, &a, &b)).abs() < 1e-12);
        let neg: Vec<f64> = w.iter().map(|x| -x).collect();
        prop_assert!((sc_weat(&neg, &attrs).unwrap().0 + e).abs() < 1e-12);
    }

    #[test]
    fn sweep_best_dominates_every_layer(values in proptest::collection::vec(-1.0f64..1.0, 1..30)) {
        let r = LayerSweepReport::from_values("m", values.clone()).unwrap();
        prop_assert!(values.iter().all(|&v| v <= r.best_layer.1));
        prop_assert_eq!(values[r.best_layer.0], r.best_layer.1);
        prop_assert!(values[..r.best_layer.0].iter().all(|&v| v < r.best_layer.1));
        prop_assert_eq!(r.top_layer_value, *values.last().unwrap());
    }

    #[test]
    fn sampling_is_seeded_sorted_and_distinct(items in 2usize..300, size in 2usize..400, seed in any::<u64>()) {
        let mut r = rng(seed);
        let dump = random_dump(&mut r, 1, items, 2, ItemKind::CorpusToken);
        let spec = SampleSpec::new(size, seed);
        if size > items {
            prop_assert!(matches!(sample_items(&dump, &spec), Err(geoprobe::Error::OutOfRange(_))));
            return Ok(());
        }
        let ids = sample_items(&dump, &spec).unwrap();
        prop_assert_eq!(ids.len(), size);
        prop_assert!(ids.windows(2).all(|w| w[0] < w[1]));
        prop_assert_eq!(ids, sample_items(&dump, &spec).unwrap());
    }
}

#[test]
fn valnorm_matches_per_word_loop_on_100_word_lexicon() {
    let mut r = rng(100);
    let d = 24;
    let mut vecs: HashMap<String, Vec<f32>> = HashMap::new();
    let draw = |r: &mut rand_chacha::ChaCha8Rng| -> Vec<f32> { (0..d).map(|_| r.random_range(-1.0f32..1.0)).collect() };
    let pleasant: Vec<String> = (0..25).map(|i| format!("p{i}")).collect();
    let unpleasant: Vec<String> = (0..25).map(|i| format!("u{i}")).collect();
    for w in pleasant.iter().chain(&unpleasant) {
        vecs.insert(w.clone(), draw(&mut r));
    }
    let mut entries = Vec::new();
    for i in 0..100 {
        let w = format!("w{i}");
        vecs.insert(w.clone(), draw(&mut r));
        entries.push((w, r.random_range(1.0..9.0)));
    }
    let lex = ValenceLexicon::new(entries.clone(), pleasant.clone(), unpleasant.clone()).unwrap();
    let attrs = attribute_sets_for(&lex, &vecs, CoveragePolicy::Strict).unwrap();
    let got = eval_valnorm(&lex, &vecs, &attrs, CoveragePolicy::Strict).unwrap();

    let as64 = |w: &String| -> Vec<f64> { vecs[w].iter().map(|&x| x as f64).collect() };
    let a: Vec<Vec<f64>> = pleasant.iter().map(as64).collect();
    let b: Vec<Vec<f64>> = unpleasant.iter().map(as64).collect();
    let effects: Vec<f64> = entries.iter().map(|(w, _)| brute_sc_weat(&as64(w), &a, &b)).collect();
    let ratings: Vec<f64> = entries.iter().map(|(_, r)| *r).collect();
    let want = brute_pearson(&effects, &ratings);
    assert!((got.value - want).abs() < 1e-10, "{} vs {}", got.value, want);
    assert_eq!(got.coverage.covered, 100);
}

#[test]
fn permissive_coverage_reports_missing_words() {
    let mut vecs: HashMap<String, Vec<f32>> = HashMap::new();
    for (i, w) in ["a", "b", "c", "d", "e", "f"].iter().enumerate() {
        vecs.insert(w.to_string(), vec![1.0, i as f32]);
    }
    let task = WordPairTask::from_pairs(
        WordTaskName::Ws353,
        &[("a", "b", 1.0), ("c", "d", 2.0), ("e", "f", 3.0), ("a", "zzz", 4.0)],
    )
    .unwrap();
    let strict = eval_word_task(&task, &vecs, CoveragePolicy::Strict).unwrap_err();
    assert!(strict.to_string().contains("zzz"), "{strict}");
    let s = eval_word_task(&task, &vecs, CoveragePolicy::Permissive).unwrap();
    assert_eq!((s.coverage.covered, s.coverage.total), (3, 4));
    assert_eq!(s.coverage.missing, vec!["zzz".to_string()]);
}

#[test]
fn sweep_over_dump_matches_per_layer_evaluation() {
    let mut r = rng(9);
    let words: Vec<String> = (0..20).map(|i| format!("w{i}")).collect();
    let entries: Vec<(String, Vec<Vec<f32>>)> = words
        .iter()
        .map(|w| (w.clone(), (0..5).map(|_| (0..6).map(|_| r.random_range(-1.0f32..1.0)).collect()).collect()))
        .collect();
    let dump = dump_from(ItemKind::Word, &entries);
    let pairs: Vec<(String, String, f64)> = (0..10).map(|i| (words[2 * i].clone(), words[2 * i + 1].clone(), i as f64)).collect();
    let task = WordPairTask::from_pairs(WordTaskName::Sl999, &pairs).unwrap();
    let report = sweep_layers(&dump, &Evaluator::WordTask { task: task.clone(), policy: CoveragePolicy::Strict }).unwrap();
    for l in 0..5 {
        let map: HashMap<String, Vec<f32>> = entries.iter().map(|(w, v)| (w.clone(), v[l].clone())).collect();
        assert_eq!(report.per_layer[l], eval_word_task(&task, &map, CoveragePolicy::Strict).unwrap().value);
    }
    assert_eq!(report.metric_name, "sl999");
}

#[test]
fn corpus_measures_share_one_sample_and_skip_special_tokens() {
    let mut entries = Vec::new();
    for i in 0..50 {
        let s = if i % 10 == 0 { "<|endoftext|>".to_string() } else { format!("t{i}") };
        entries.push((s, vec![vec![1.0 + i as f32, 1.0, 0.5], vec![0.0, (i % 7) as f32 - 3.0, 1.0]]));
    }
    let dump = dump_from(ItemKind::CorpusToken, &entries);
    let spec = SampleSpec::new(20, 42);
    let sim = layer_self_similarity(&dump, &spec).unwrap();
    let mag = layer_magnitude(&dump, &[1, 2], &spec, MagnitudeMode::L1).unwrap();
    assert_eq!(sim.item_ids, mag.item_ids);
    assert!(sim.item_ids.iter().all(|&id| id % 10 != 0));
    let layer0 = dump.select_rows(0, &sim.item_ids).unwrap();
    assert_eq!(sim.per_layer[0], self_similarity(&layer0).unwrap());
}
