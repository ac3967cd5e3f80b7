//! Intrinsic evaluation: word similarity, valence norms and sentence
//! similarity, with per-layer sweeps.

mod evaluate;
mod tasks;

pub use evaluate::{
    attribute_sets_for, eval_sts, eval_valnorm, eval_word_task, sentence_self_similarity,
    sweep_layers, Coverage, CoveragePolicy, Evaluator, LayerSweepReport, LayerView, Score,
    SurfaceIndex, VectorLookup,
};
pub use tasks::{
    inline_origin, load_sts, load_valence_lexicon, load_word_list, load_word_task, parse_sts,
    parse_valence_csv, parse_word_list, parse_word_task, SentencePair, SentencePairTask, Split,
    ValenceLexicon, WordPair, WordPairTask, WordTaskName, DEFAULT_PLEASANT, DEFAULT_UNPLEASANT,
};
