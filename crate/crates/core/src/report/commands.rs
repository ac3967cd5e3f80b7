use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::eval::{
    load_sts, load_valence_lexicon, load_word_list, load_word_task, parse_word_list,
    sentence_self_similarity, sweep_layers, CoveragePolicy, Evaluator, LayerSweepReport,
    ValenceLexicon, WordTaskName, DEFAULT_PLEASANT, DEFAULT_UNPLEASANT,
};
use crate::geometry::{layer_magnitude, layer_self_similarity, MagnitudeMode};
use crate::ledf::{read_dump_file, EmbeddingDump};
use crate::report::config::{DumpEntry, RunConfig};
use crate::report::table::{Provenance, ReportTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IntrinsicTask {
    Word(WordTaskName),
    ValNorm,
}

impl IntrinsicTask {
    pub const ALL: [IntrinsicTask; 5] = [
        IntrinsicTask::Word(WordTaskName::Rg65),
        IntrinsicTask::Word(WordTaskName::Ws353),
        IntrinsicTask::Word(WordTaskName::Sl999),
        IntrinsicTask::Word(WordTaskName::Sv3500),
        IntrinsicTask::ValNorm,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            IntrinsicTask::Word(t) => t.as_str(),
            IntrinsicTask::ValNorm => "valnorm",
        }
    }

    fn task_key(self) -> String {
        format!("tasks.{}", self.as_str())
    }
}

impl fmt::Display for IntrinsicTask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for IntrinsicTask {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("valnorm") {
            Ok(IntrinsicTask::ValNorm)
        } else {
            s.parse().map(IntrinsicTask::Word)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Selfsim,
    Magnitude,
    Intrinsic(IntrinsicTask),
    Sts,
    SentenceSelfsim,
}

impl Command {
    pub fn name(self) -> String {
        match self {
            Command::Selfsim => "selfsim".into(),
            Command::Magnitude => "magnitude".into(),
            Command::Intrinsic(t) => format!("intrinsic --task {t}"),
            Command::Sts => "sts".into(),
            Command::SentenceSelfsim => "sentence-selfsim".into(),
        }
    }

    /// File stem of the command's CSV output.
    pub fn stem(self) -> String {
        match self {
            Command::Selfsim => "selfsim".into(),
            Command::Magnitude => "magnitude".into(),
            Command::Intrinsic(t) => format!("intrinsic_{t}"),
            Command::Sts => "sts".into(),
            Command::SentenceSelfsim => "sentence_selfsim".into(),
        }
    }

    fn has_summary(self) -> bool {
        matches!(self, Command::Intrinsic(_) | Command::Sts)
    }

    /// Every command a full report may run, in output order.
    pub fn all() -> Vec<Command> {
        let mut v = vec![Command::Selfsim, Command::Magnitude];
        v.extend(IntrinsicTask::ALL.into_iter().map(Command::Intrinsic));
        v.extend([Command::Sts, Command::SentenceSelfsim]);
        v
    }

    /// Why the command cannot run under `cfg`, if it cannot.
    pub fn skip_reason(self, cfg: &RunConfig) -> Option<String> {
        let no_dumps = |section: &str, entries: &[DumpEntry]| {
            entries
                .is_empty()
                .then(|| format!("no [[{section}]] dumps configured"))
        };
        match self {
            Command::Selfsim | Command::Magnitude => no_dumps("corpus", &cfg.corpus),
            Command::Intrinsic(t) => {
                let path = match t {
                    IntrinsicTask::Word(WordTaskName::Rg65) => &cfg.tasks.rg65,
                    IntrinsicTask::Word(WordTaskName::Ws353) => &cfg.tasks.ws353,
                    IntrinsicTask::Word(WordTaskName::Sl999) => &cfg.tasks.sl999,
                    IntrinsicTask::Word(WordTaskName::Sv3500) => &cfg.tasks.sv3500,
                    IntrinsicTask::ValNorm => &cfg.tasks.valnorm,
                };
                no_dumps("words", &cfg.words)
                    .or_else(|| path.is_none().then(|| format!("{} not set", t.task_key())))
            }
            Command::Sts => no_dumps("sentences", &cfg.sentences)
                .or_else(|| cfg.tasks.sts.is_none().then(|| "tasks.sts not set".to_string())),
            Command::SentenceSelfsim => no_dumps("sentences", &cfg.sentences),
        }
    }
}

pub fn provenance(cfg: &RunConfig) -> Provenance {
    Provenance {
        config_hash: cfg.hash(),
        seed: cfg.seed,
    }
}

fn load_entry(section: &str, index: usize, entry: &DumpEntry) -> Result<EmbeddingDump> {
    read_dump_file(&entry.path).map_err(|e| {
        e.context(format!(
            "{section}[{index}].path ({})",
            entry.path.display()
        ))
    })
}

fn require_dumps<'a>(cfg: &RunConfig, command: Command, entries: &'a [DumpEntry]) -> Result<&'a [DumpEntry]> {
    match command.skip_reason(cfg) {
        Some(reason) => Err(Error::Config(reason)),
        None => Ok(entries),
    }
}

fn corpus_tables(cfg: &RunConfig, selfsim: bool, magnitude: bool) -> Result<(ReportTable, ReportTable)> {
    require_dumps(cfg, Command::Selfsim, &cfg.corpus)?;
    let prov = provenance(cfg);
    let mut sim_table = ReportTable::new("selfsim", prov.clone());
    let mut mag_table = ReportTable::new("magnitude", prov);
    let spec = cfg.sample_spec();
    let mode_tag = match cfg.magnitude_mode {
        MagnitudeMode::L1 => "l1",
        MagnitudeMode::L2 => "l2",
    };
    mag_table.notes.push(format!("magnitude_mode={mode_tag} sample_size={}", cfg.sample_size));
    sim_table.notes.push(format!("sample_size={}", cfg.sample_size));
    for (i, entry) in cfg.corpus.iter().enumerate() {
        let dump = load_entry("corpus", i, entry)?;
        let ctx = |e: Error| e.context(format!("corpus[{i}] ({})", entry.label()));
        if selfsim {
            let res = layer_self_similarity(&dump, &spec).map_err(ctx)?;
            sim_table.insert_layers(&entry.model, &entry.protocol, "selfsim", &res.per_layer)?;
        }
        if magnitude {
            let res = layer_magnitude(&dump, &cfg.ks, &spec, cfg.magnitude_mode).map_err(ctx)?;
            for (j, k) in res.ks.iter().enumerate() {
                let values: Vec<f64> = res.per_layer_per_k.iter().map(|row| row[j]).collect();
                mag_table.insert_layers(&entry.model, &entry.protocol, &format!("top{k}"), &values)?;
            }
        }
    }
    Ok((sim_table, mag_table))
}

/// Per-layer self-similarity of every corpus dump over one seeded sample.
pub fn cmd_selfsim(cfg: &RunConfig) -> Result<ReportTable> {
    Ok(corpus_tables(cfg, true, false)?.0)
}

/// Mean top-k magnitude share per layer, on the same sample as `selfsim`.
pub fn cmd_magnitude(cfg: &RunConfig) -> Result<ReportTable> {
    Ok(corpus_tables(cfg, false, true)?.1)
}

fn attribute_list(path: &Option<PathBuf>, bundled: &str) -> Result<Vec<String>> {
    match path {
        Some(p) => load_word_list(p),
        None => Ok(parse_word_list(bundled)),
    }
}

fn intrinsic_evaluator(cfg: &RunConfig, task: IntrinsicTask) -> Result<Evaluator> {
    let t = &cfg.tasks;
    let missing = || Error::Config(format!("{} not set", task.task_key()));
    Ok(match task {
        IntrinsicTask::Word(name) => {
            let path = match name {
                WordTaskName::Rg65 => &t.rg65,
                WordTaskName::Ws353 => &t.ws353,
                WordTaskName::Sl999 => &t.sl999,
                WordTaskName::Sv3500 => &t.sv3500,
            }
            .as_ref()
            .ok_or_else(missing)?;
            Evaluator::WordTask {
                task: load_word_task(path, name)?,
                policy: cfg.coverage,
            }
        }
        IntrinsicTask::ValNorm => {
            let path = t.valnorm.as_ref().ok_or_else(missing)?;
            let lexicon = ValenceLexicon::new(
                load_valence_lexicon(path)?,
                attribute_list(&t.pleasant, DEFAULT_PLEASANT)?,
                attribute_list(&t.unpleasant, DEFAULT_UNPLEASANT)?,
            )?;
            Evaluator::ValNorm {
                lexicon,
                policy: cfg.coverage,
            }
        }
    })
}

fn coverage_note(label: &str, report: &LayerSweepReport) -> Option<String> {
    let c = report.coverage.as_ref()?;
    (!c.is_complete()).then(|| {
        format!(
            "coverage {label}: {}/{} scored, {} missing",
            c.covered,
            c.total,
            c.missing.len()
        )
    })
}

fn sweep_table(
    cfg: &RunConfig,
    name: &str,
    section: &str,
    entries: &[DumpEntry],
    evaluator: &Evaluator,
) -> Result<ReportTable> {
    let mut table = ReportTable::new(name, provenance(cfg));
    if evaluator_policy(evaluator) == Some(CoveragePolicy::Permissive) {
        table.notes.push("coverage_policy=permissive".into());
    }
    for (i, entry) in entries.iter().enumerate() {
        let dump = load_entry(section, i, entry)?;
        let report = sweep_layers(&dump, evaluator)
            .map_err(|e| e.context(format!("{section}[{i}] ({})", entry.label())))?;
        table.insert_layers(&entry.model, &entry.protocol, &report.metric_name, &report.per_layer)?;
        table.notes.extend(coverage_note(&entry.label(), &report));
    }
    Ok(table)
}

fn evaluator_policy(e: &Evaluator) -> Option<CoveragePolicy> {
    match e {
        Evaluator::WordTask { policy, .. } | Evaluator::ValNorm { policy, .. } => Some(*policy),
        Evaluator::Sts { .. } => None,
    }
}

/// Layer sweep of one intrinsic task over every word dump.
pub fn cmd_intrinsic(cfg: &RunConfig, task: IntrinsicTask) -> Result<ReportTable> {
    let command = Command::Intrinsic(task);
    require_dumps(cfg, command, &cfg.words)?;
    let evaluator = intrinsic_evaluator(cfg, task)?;
    sweep_table(cfg, &command.stem(), "words", &cfg.words, &evaluator)
}

/// Layer sweep of the sentence benchmark over every sentence dump.
pub fn cmd_sts(cfg: &RunConfig) -> Result<ReportTable> {
    require_dumps(cfg, Command::Sts, &cfg.sentences)?;
    let path = cfg
        .tasks
        .sts
        .as_ref()
        .ok_or_else(|| Error::Config("tasks.sts not set".into()))?;
    let evaluator = Evaluator::Sts {
        task: load_sts(path, cfg.tasks.sts_split)?,
    };
    sweep_table(cfg, "sts", "sentences", &cfg.sentences, &evaluator)
}

/// Self-similarity of all (unique) sentences in each sentence dump.
pub fn cmd_sentence_selfsim(cfg: &RunConfig) -> Result<ReportTable> {
    require_dumps(cfg, Command::SentenceSelfsim, &cfg.sentences)?;
    let mut table = ReportTable::new("sentence_selfsim", provenance(cfg));
    for (i, entry) in cfg.sentences.iter().enumerate() {
        let dump = load_entry("sentences", i, entry)?;
        let res = sentence_self_similarity(&dump)
            .map_err(|e| e.context(format!("sentences[{i}] ({})", entry.label())))?;
        table.insert_layers(&entry.model, &entry.protocol, "sentence_selfsim", &res.per_layer)?;
    }
    Ok(table)
}

pub fn run_command(cfg: &RunConfig, command: Command) -> Result<ReportTable> {
    match command {
        Command::Selfsim => cmd_selfsim(cfg),
        Command::Magnitude => cmd_magnitude(cfg),
        Command::Intrinsic(t) => cmd_intrinsic(cfg, t),
        Command::Sts => cmd_sts(cfg),
        Command::SentenceSelfsim => cmd_sentence_selfsim(cfg),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Output {
    pub command: String,
    /// File names relative to the output directory.
    pub files: Vec<String>,
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<()> {
    fs::write(dir.join(name), contents)
        .map_err(|e| Error::from(e).context(format!("writing {}", dir.join(name).display())))
}

/// Writes `<stem>.csv` (and `<stem>_summary.csv` for layer sweeps) into the
/// configured output directory.
pub fn write_outputs(cfg: &RunConfig, command: Command, table: &ReportTable) -> Result<Output> {
    fs::create_dir_all(&cfg.out)?;
    let stem = command.stem();
    let mut files = vec![format!("{stem}.csv")];
    write_file(&cfg.out, &files[0], &table.to_csv())?;
    if command.has_summary() {
        let name = format!("{stem}_summary.csv");
        write_file(&cfg.out, &name, &table.summary_csv()?)?;
        files.push(name);
    }
    Ok(Output {
        command: command.name(),
        files,
    })
}

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Skipped {
    pub command: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub command: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub config_hash: String,
    pub seed: u64,
    pub status: Status,
    pub outputs: Vec<Output>,
    pub skipped: Vec<Skipped>,
    pub failure: Option<Failure>,
}

impl Manifest {
    fn new(cfg: &RunConfig) -> Self {
        Self {
            tool: "geoprobe".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            config_hash: cfg.hash(),
            seed: cfg.seed,
            status: Status::Ok,
            outputs: Vec::new(),
            skipped: Vec::new(),
            failure: None,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }

    /// Every file the manifest lists, resolved against `out_dir`, exists.
    pub fn verify_files(&self, out_dir: &Path) -> Result<()> {
        for f in self.outputs.iter().flat_map(|o| &o.files) {
            if !out_dir.join(f).is_file() {
                return Err(Error::Config(format!(
                    "manifest lists {f} but it was not written"
                )));
            }
        }
        Ok(())
    }
}

fn write_manifest(cfg: &RunConfig, manifest: &Manifest) -> Result<()> {
    fs::create_dir_all(&cfg.out)?;
    write_file(&cfg.out, MANIFEST_FILE, &manifest.to_json())
}

/// Runs every configured command, writing its tables and a JSON manifest.
///
/// Unconfigured commands are listed as skipped. The first failing command
/// stops the run; the manifest is still written, marked failed, and the
/// error is returned.
pub fn cmd_report(cfg: &RunConfig) -> Result<Manifest> {
    let mut manifest = Manifest::new(cfg);
    let mut planned = Vec::new();
    for command in Command::all() {
        match command.skip_reason(cfg) {
            Some(reason) => manifest.skipped.push(Skipped {
                command: command.name(),
                reason,
            }),
            None => planned.push(command),
        }
    }

    let result = (|| -> std::result::Result<(), (String, Error)> {
        let wants = |c| planned.contains(&c);
        let fail = |c: Command| move |e: Error| (c.name(), e);
        if wants(Command::Selfsim) || wants(Command::Magnitude) {
            let blame = if wants(Command::Selfsim) { Command::Selfsim } else { Command::Magnitude };
            let (sim, mag) = corpus_tables(cfg, wants(Command::Selfsim), wants(Command::Magnitude))
                .map_err(fail(blame))?;
            for (command, table) in [(Command::Selfsim, sim), (Command::Magnitude, mag)] {
                if wants(command) {
                    let out = write_outputs(cfg, command, &table).map_err(fail(command))?;
                    manifest.outputs.push(out);
                }
            }
        }
        for &command in planned
            .iter()
            .filter(|c| !matches!(c, Command::Selfsim | Command::Magnitude))
        {
            let table = run_command(cfg, command).map_err(fail(command))?;
            let out = write_outputs(cfg, command, &table).map_err(fail(command))?;
            manifest.outputs.push(out);
        }
        manifest
            .verify_files(&cfg.out)
            .map_err(|e| ("report".to_string(), e))
    })();

    match result {
        Ok(()) => {
            write_manifest(cfg, &manifest)?;
            Ok(manifest)
        }
        Err((command, err)) => {
            manifest.status = Status::Failed;
            manifest.failure = Some(Failure {
                command: command.clone(),
                message: err.to_string(),
            });
            write_manifest(cfg, &manifest)?;
            Err(err.context(format!("report aborted at {}", command)))
        }
    }
}
