use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::eval::{CoveragePolicy, Split};
use crate::geometry::{Eligibility, MagnitudeMode, SampleSpec, DEFAULT_SAMPLE_SIZE, DEFAULT_SEED};

/// Env var that overrides the configured output directory.
pub const OUT_ENV: &str = "GEOPROBE_OUT";

fn default_seed() -> u64 {
    DEFAULT_SEED
}

fn default_sample_size() -> usize {
    DEFAULT_SAMPLE_SIZE
}

fn default_ks() -> Vec<usize> {
    vec![5, 8]
}

fn default_out() -> PathBuf {
    PathBuf::from("geoprobe-out")
}

/// One dump column in a report: which model, which extraction protocol.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DumpEntry {
    pub model: String,
    #[serde(default)]
    pub protocol: String,
    pub path: PathBuf,
}

impl DumpEntry {
    pub fn label(&self) -> String {
        if self.protocol.is_empty() {
            self.model.clone()
        } else {
            format!("{} {}", self.model, self.protocol)
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskPaths {
    pub rg65: Option<PathBuf>,
    pub ws353: Option<PathBuf>,
    pub sl999: Option<PathBuf>,
    pub sv3500: Option<PathBuf>,
    /// `word,rating` valence lexicon.
    pub valnorm: Option<PathBuf>,
    /// Attribute word lists; the bundled lists are used when absent.
    pub pleasant: Option<PathBuf>,
    pub unpleasant: Option<PathBuf>,
    pub sts: Option<PathBuf>,
    #[serde(default)]
    pub sts_split: Split,
}

/// Everything a run needs, loaded from one TOML file plus flag overrides.
///
/// Relative paths are resolved against the config file's directory.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_sample_size")]
    pub sample_size: usize,
    #[serde(default = "default_ks")]
    pub ks: Vec<usize>,
    #[serde(default = "default_out")]
    pub out: PathBuf,
    #[serde(default)]
    pub coverage: CoveragePolicy,
    #[serde(default)]
    pub magnitude_mode: MagnitudeMode,
    #[serde(default)]
    pub eligibility: Eligibility,
    #[serde(default)]
    pub tasks: TaskPaths,
    /// Corpus-token dumps for self-similarity and magnitude.
    #[serde(default)]
    pub corpus: Vec<DumpEntry>,
    /// Decontextualized word dumps for the intrinsic tasks.
    #[serde(default)]
    pub words: Vec<DumpEntry>,
    /// Sentence dumps for STS and sentence self-similarity.
    #[serde(default)]
    pub sentences: Vec<DumpEntry>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: default_seed(),
            sample_size: default_sample_size(),
            ks: default_ks(),
            out: default_out(),
            coverage: CoveragePolicy::default(),
            magnitude_mode: MagnitudeMode::default(),
            eligibility: Eligibility::default(),
            tasks: TaskPaths::default(),
            corpus: Vec::new(),
            words: Vec::new(),
            sentences: Vec::new(),
        }
    }
}

/// Command-line values that take precedence over the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub sample_size: Option<usize>,
    pub out: Option<PathBuf>,
    pub allow_missing: bool,
    pub magnitude_mode: Option<MagnitudeMode>,
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// Reads `path`, resolves relative paths against its directory, applies
    /// overrides and the output env var, then validates.
    pub fn load(path: impl AsRef<Path>, overrides: &Overrides) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::from_toml_str(&text)?;
        cfg.resolve_relative(path.parent().unwrap_or(Path::new(".")));
        cfg.apply(overrides, std::env::var_os(OUT_ENV).map(PathBuf::from));
        cfg.validate()?;
        Ok(cfg)
    }

    /// Flag overrides beat the env var, which beats the file.
    pub fn apply(&mut self, overrides: &Overrides, env_out: Option<PathBuf>) {
        if let Some(seed) = overrides.seed {
            self.seed = seed;
        }
        if let Some(n) = overrides.sample_size {
            self.sample_size = n;
        }
        if let Some(mode) = overrides.magnitude_mode {
            self.magnitude_mode = mode;
        }
        if overrides.allow_missing {
            self.coverage = CoveragePolicy::Permissive;
        }
        if let Some(out) = overrides.out.clone().or(env_out) {
            self.out = out;
        }
    }

    pub fn resolve_relative(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut self.out);
        let t = &mut self.tasks;
        for p in [
            &mut t.rg65,
            &mut t.ws353,
            &mut t.sl999,
            &mut t.sv3500,
            &mut t.valnorm,
            &mut t.pleasant,
            &mut t.unpleasant,
            &mut t.sts,
        ]
        .into_iter()
        .flatten()
        {
            fix(p);
        }
        for e in self
            .corpus
            .iter_mut()
            .chain(&mut self.words)
            .chain(&mut self.sentences)
        {
            fix(&mut e.path);
        }
    }

    /// Every `(config key, path)` the run may read.
    pub fn referenced_paths(&self) -> Vec<(String, &Path)> {
        let mut out = Vec::new();
        let t = &self.tasks;
        for (key, p) in [
            ("tasks.rg65", &t.rg65),
            ("tasks.ws353", &t.ws353),
            ("tasks.sl999", &t.sl999),
            ("tasks.sv3500", &t.sv3500),
            ("tasks.valnorm", &t.valnorm),
            ("tasks.pleasant", &t.pleasant),
            ("tasks.unpleasant", &t.unpleasant),
            ("tasks.sts", &t.sts),
        ] {
            if let Some(p) = p {
                out.push((key.to_string(), p.as_path()));
            }
        }
        for (section, entries) in [
            ("corpus", &self.corpus),
            ("words", &self.words),
            ("sentences", &self.sentences),
        ] {
            for (i, e) in entries.iter().enumerate() {
                out.push((format!("{section}[{i}].path"), e.path.as_path()));
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        if self.sample_size < 2 {
            return Err(Error::Config(format!(
                "sample_size must be at least 2, got {}",
                self.sample_size
            )));
        }
        if self.ks.is_empty() || self.ks.contains(&0) {
            return Err(Error::Config("ks must be a non-empty list of positive integers".into()));
        }
        for (section, entries) in [
            ("corpus", &self.corpus),
            ("words", &self.words),
            ("sentences", &self.sentences),
        ] {
            let mut labels = std::collections::HashSet::new();
            for (i, e) in entries.iter().enumerate() {
                if e.model.trim().is_empty() {
                    return Err(Error::Config(format!("{section}[{i}].model is empty")));
                }
                if !labels.insert(e.label()) {
                    return Err(Error::Config(format!(
                        "{section}[{i}]: duplicate column {:?}",
                        e.label()
                    )));
                }
            }
        }
        for (key, path) in self.referenced_paths() {
            if !path.is_file() {
                return Err(Error::Config(format!(
                    "{key}: no such file {}",
                    path.display()
                )));
            }
        }
        Ok(())
    }

    pub fn sample_spec(&self) -> SampleSpec {
        SampleSpec {
            sample_size: self.sample_size,
            seed: self.seed,
            eligibility: self.eligibility,
        }
    }

    /// SHA-256 of the canonical JSON rendering of the effective config,
    /// output directory excluded.
    pub fn hash(&self) -> String {
        let mut canonical = self.clone();
        canonical.out = PathBuf::new();
        let bytes = serde_json::to_vec(&canonical).expect("config serializes");
        hex::encode(Sha256::digest(&bytes))
    }
}
