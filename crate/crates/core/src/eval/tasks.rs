//! Loaders for the word-pair, valence and sentence-pair evaluation data.
//!
//! Word-level files are lowercased and NFC-normalized on load; sentences
//! are NFC-normalized only.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use unicode_normalization::UnicodeNormalization;

use crate::error::{Error, Result};

pub const DEFAULT_PLEASANT: &str = include_str!("../../data/pleasant.txt");
pub const DEFAULT_UNPLEASANT: &str = include_str!("../../data/unpleasant.txt");

pub(crate) fn nfc(s: &str) -> String {
    s.nfc().collect()
}

pub(crate) fn normalize_word(s: &str) -> String {
    nfc(&s.to_lowercase())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WordTaskName {
    Rg65,
    Ws353,
    Sl999,
    Sv3500,
}

impl WordTaskName {
    pub const ALL: [WordTaskName; 4] = [Self::Rg65, Self::Ws353, Self::Sl999, Self::Sv3500];

    pub fn expected_pairs(self) -> usize {
        match self {
            Self::Rg65 => 65,
            Self::Ws353 => 353,
            Self::Sl999 => 999,
            Self::Sv3500 => 3500,
        }
    }

    /// Inclusive range of gold ratings.
    pub fn rating_scale(self) -> (f64, f64) {
        match self {
            Self::Rg65 => (0.0, 4.0),
            Self::Ws353 | Self::Sl999 | Self::Sv3500 => (0.0, 10.0),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Rg65 => "rg65",
            Self::Ws353 => "ws353",
            Self::Sl999 => "sl999",
            Self::Sv3500 => "sv3500",
        }
    }
}

impl fmt::Display for WordTaskName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for WordTaskName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|t| t.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Config(format!("unknown word task {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WordPair {
    pub a: String,
    pub b: String,
    pub gold: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WordPairTask {
    pub name: WordTaskName,
    pub pairs: Vec<WordPair>,
    pub rating_scale: (f64, f64),
}

impl WordPairTask {
    /// Builds a task from in-memory pairs. Words are normalized and ratings
    /// checked against the task's scale; the published pair count is only
    /// enforced by [`load_word_task`].
    pub fn from_pairs<S: AsRef<str>>(name: WordTaskName, pairs: &[(S, S, f64)]) -> Result<Self> {
        let (lo, hi) = name.rating_scale();
        let pairs = pairs
            .iter()
            .enumerate()
            .map(|(i, (a, b, gold))| {
                if !(lo..=hi).contains(gold) {
                    return Err(Error::Degenerate(format!(
                        "pair {i}: rating {gold} outside [{lo}, {hi}]"
                    )));
                }
                Ok(WordPair {
                    a: normalize_word(a.as_ref()),
                    b: normalize_word(b.as_ref()),
                    gold: *gold,
                })
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            name,
            pairs,
            rating_scale: (lo, hi),
        })
    }

    /// Every distinct word in first-appearance order.
    pub fn vocabulary(&self) -> Vec<String> {
        let mut seen = std::collections::HashSet::new();
        self.pairs
            .iter()
            .flat_map(|p| [&p.a, &p.b])
            .filter(|w| seen.insert(w.as_str()))
            .cloned()
            .collect()
    }
}

fn parse_err(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

/// Content lines with 1-based line numbers; blank and `#` lines skipped.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'))
}

/// Parses `word_a<TAB>word_b<TAB>rating` lines.
pub fn parse_word_task(text: &str, origin: &Path, name: WordTaskName) -> Result<WordPairTask> {
    let (lo, hi) = name.rating_scale();
    let mut pairs = Vec::new();
    for (line_no, line) in content_lines(text) {
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 {
            return Err(parse_err(
                origin,
                line_no,
                format!("expected 3 tab-separated fields, found {}", fields.len()),
            ));
        }
        let (a, b) = (fields[0].trim(), fields[1].trim());
        if a.is_empty() || b.is_empty() {
            return Err(parse_err(origin, line_no, "empty word"));
        }
        let gold: f64 = fields[2]
            .trim()
            .parse()
            .map_err(|_| parse_err(origin, line_no, format!("rating {:?} is not a number", fields[2])))?;
        if !(lo..=hi).contains(&gold) {
            return Err(parse_err(
                origin,
                line_no,
                format!("rating {gold} outside [{lo}, {hi}]"),
            ));
        }
        pairs.push(WordPair {
            a: normalize_word(a),
            b: normalize_word(b),
            gold,
        });
    }
    if pairs.len() != name.expected_pairs() {
        return Err(Error::PairCount {
            task: name.to_string(),
            expected: name.expected_pairs(),
            found: pairs.len(),
        });
    }
    Ok(WordPairTask {
        name,
        pairs,
        rating_scale: (lo, hi),
    })
}

pub fn load_word_task(path: impl AsRef<Path>, name: WordTaskName) -> Result<WordPairTask> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    parse_word_task(&text, path, name)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValenceLexicon {
    pub entries: Vec<(String, f64)>,
    pub pleasant: Vec<String>,
    pub unpleasant: Vec<String>,
}

impl ValenceLexicon {
    pub fn new(entries: Vec<(String, f64)>, pleasant: Vec<String>, unpleasant: Vec<String>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Degenerate("valence lexicon is empty".into()));
        }
        if pleasant.is_empty() || unpleasant.is_empty() {
            return Err(Error::Degenerate("attribute word lists must be non-empty".into()));
        }
        let entries = entries
            .into_iter()
            .map(|(w, r)| (normalize_word(&w), r))
            .collect();
        let pleasant: Vec<String> = pleasant.iter().map(|w| normalize_word(w)).collect();
        let unpleasant: Vec<String> = unpleasant.iter().map(|w| normalize_word(w)).collect();
        if let Some(w) = pleasant.iter().find(|w| unpleasant.contains(w)) {
            return Err(Error::Degenerate(format!(
                "{w:?} appears in both attribute lists"
            )));
        }
        Ok(Self {
            entries,
            pleasant,
            unpleasant,
        })
    }

    /// Uses the bundled 25-word pleasant and unpleasant lists.
    pub fn with_default_attributes(entries: Vec<(String, f64)>) -> Result<Self> {
        Self::new(
            entries,
            parse_word_list(DEFAULT_PLEASANT),
            parse_word_list(DEFAULT_UNPLEASANT),
        )
    }

    pub fn vocabulary(&self) -> Vec<String> {
        let mut seen = std::collections::HashSet::new();
        self.entries
            .iter()
            .map(|(w, _)| w)
            .chain(&self.pleasant)
            .chain(&self.unpleasant)
            .filter(|w| seen.insert(w.as_str()))
            .cloned()
            .collect()
    }
}

/// Parses `word,rating` lines. A leading `word,rating`-style header whose
/// rating column is not numeric is skipped.
pub fn parse_valence_csv(text: &str, origin: &Path) -> Result<Vec<(String, f64)>> {
    let mut entries = Vec::new();
    for (idx, (line_no, line)) in content_lines(text).enumerate() {
        let Some((word, rating)) = line.rsplit_once(',') else {
            return Err(parse_err(origin, line_no, "expected `word,rating`"));
        };
        let word = word.trim();
        let rating = match rating.trim().parse::<f64>() {
            Ok(r) if r.is_finite() => r,
            _ if idx == 0 => continue,
            _ => {
                return Err(parse_err(
                    origin,
                    line_no,
                    format!("rating {rating:?} is not a number"),
                ))
            }
        };
        if word.is_empty() {
            return Err(parse_err(origin, line_no, "empty word"));
        }
        entries.push((word.to_string(), rating));
    }
    Ok(entries)
}

pub fn load_valence_lexicon(path: impl AsRef<Path>) -> Result<Vec<(String, f64)>> {
    let path = path.as_ref();
    parse_valence_csv(&fs::read_to_string(path)?, path)
}

/// One word per line; blank and `#` lines skipped.
pub fn parse_word_list(text: &str) -> Vec<String> {
    content_lines(text)
        .map(|(_, l)| normalize_word(l.trim()))
        .collect()
}

pub fn load_word_list(path: impl AsRef<Path>) -> Result<Vec<String>> {
    Ok(parse_word_list(&fs::read_to_string(path)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Dev,
    #[default]
    Test,
}

impl Split {
    pub fn expected_pairs(self) -> usize {
        match self {
            Split::Train => 5749,
            Split::Dev => 1500,
            Split::Test => 1379,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SentencePair {
    pub genre: String,
    pub a: String,
    pub b: String,
    pub gold: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SentencePairTask {
    pub pairs: Vec<SentencePair>,
    pub split: Split,
}

impl SentencePairTask {
    /// In-memory task; scores must lie in `[0, 5]`. Split sizes are only
    /// enforced by [`load_sts`].
    pub fn from_pairs<S: AsRef<str>>(split: Split, pairs: &[(S, S, f64)]) -> Result<Self> {
        let pairs = pairs
            .iter()
            .enumerate()
            .map(|(i, (a, b, gold))| {
                if !(0.0..=5.0).contains(gold) {
                    return Err(Error::Degenerate(format!(
                        "pair {i}: score {gold} outside [0, 5]"
                    )));
                }
                Ok(SentencePair {
                    genre: String::new(),
                    a: nfc(a.as_ref()),
                    b: nfc(b.as_ref()),
                    gold: *gold,
                })
            })
            .collect::<Result<_>>()?;
        Ok(Self { pairs, split })
    }

    /// Distinct sentences in first-appearance order.
    pub fn sentences(&self) -> Vec<String> {
        let mut seen = std::collections::HashSet::new();
        self.pairs
            .iter()
            .flat_map(|p| [&p.a, &p.b])
            .filter(|s| seen.insert(s.as_str()))
            .cloned()
            .collect()
    }
}

/// Parses a benchmark file in its published tab-separated layout:
/// `genre, filename, year, id, score, sentence1, sentence2[, extra...]`.
pub fn parse_sts(text: &str, origin: &Path, split: Split) -> Result<SentencePairTask> {
    let mut pairs = Vec::new();
    for (line_no, line) in content_lines(text) {
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() < 7 {
            return Err(parse_err(
                origin,
                line_no,
                format!("expected at least 7 tab-separated fields, found {}", fields.len()),
            ));
        }
        let gold: f64 = fields[4]
            .trim()
            .parse()
            .map_err(|_| parse_err(origin, line_no, format!("score {:?} is not a number", fields[4])))?;
        if !(0.0..=5.0).contains(&gold) {
            return Err(parse_err(origin, line_no, format!("score {gold} outside [0, 5]")));
        }
        let (a, b) = (fields[5].trim(), fields[6].trim());
        if a.is_empty() || b.is_empty() {
            return Err(parse_err(origin, line_no, "empty sentence"));
        }
        pairs.push(SentencePair {
            genre: fields[0].trim().to_string(),
            a: nfc(a),
            b: nfc(b),
            gold,
        });
    }
    if pairs.len() != split.expected_pairs() {
        return Err(Error::PairCount {
            task: format!("sts-{split:?}").to_lowercase(),
            expected: split.expected_pairs(),
            found: pairs.len(),
        });
    }
    Ok(SentencePairTask { pairs, split })
}

pub fn load_sts(path: impl AsRef<Path>, split: Split) -> Result<SentencePairTask> {
    let path = path.as_ref();
    parse_sts(&fs::read_to_string(path)?, path, split)
}

/// Path used in error messages for in-memory parses.
pub fn inline_origin() -> PathBuf {
    PathBuf::from("<inline>")
}
