use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::Result;
use crate::eval::WordTaskName;
use crate::geometry::MagnitudeMode;
use crate::report::commands::{
    cmd_report, run_command, write_outputs, Command, IntrinsicTask, Manifest, Output,
};
use crate::report::config::{Overrides, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "geoprobe", version, about = "Layerwise embedding geometry and intrinsic evaluation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CliCommand,

    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Run configuration (TOML).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[arg(long, global = true)]
    pub seed: Option<u64>,

    #[arg(long, global = true)]
    pub sample_size: Option<usize>,

    /// Output directory; overrides GEOPROBE_OUT and the config.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Skip words missing from word dumps instead of failing.
    #[arg(long, global = true)]
    pub allow_missing: bool,

    #[arg(long, global = true, value_enum)]
    pub magnitude_mode: Option<MagnitudeArg>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MagnitudeArg {
    L1,
    L2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TaskArg {
    Rg65,
    Ws353,
    Sl999,
    Sv3500,
    Valnorm,
}

impl From<TaskArg> for IntrinsicTask {
    fn from(t: TaskArg) -> Self {
        match t {
            TaskArg::Rg65 => IntrinsicTask::Word(WordTaskName::Rg65),
            TaskArg::Ws353 => IntrinsicTask::Word(WordTaskName::Ws353),
            TaskArg::Sl999 => IntrinsicTask::Word(WordTaskName::Sl999),
            TaskArg::Sv3500 => IntrinsicTask::Word(WordTaskName::Sv3500),
            TaskArg::Valnorm => IntrinsicTask::ValNorm,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum CliCommand {
    /// Corpus-token self-similarity per layer.
    Selfsim,
    /// Mean share of magnitude in the top-k components per layer.
    Magnitude,
    /// Word-level intrinsic evaluation per layer.
    Intrinsic {
        #[arg(long, value_enum)]
        task: TaskArg,
    },
    /// Sentence-similarity benchmark per layer.
    Sts,
    /// Self-similarity of unique sentence embeddings per layer.
    SentenceSelfsim,
    /// Every configured command plus a JSON manifest.
    Report,
}

#[derive(Debug)]
pub enum Outcome {
    Single(Output),
    Report(Manifest),
}

impl CommonArgs {
    pub fn overrides(&self) -> Overrides {
        Overrides {
            seed: self.seed,
            sample_size: self.sample_size,
            out: self.out.clone(),
            allow_missing: self.allow_missing,
            magnitude_mode: self.magnitude_mode.map(|m| match m {
                MagnitudeArg::L1 => MagnitudeMode::L1,
                MagnitudeArg::L2 => MagnitudeMode::L2,
            }),
        }
    }
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    let config = cli.common.config.as_ref().ok_or_else(|| {
        crate::Error::Config("--config <path> is required".into())
    })?;
    let cfg = RunConfig::load(config, &cli.common.overrides())?;
    let command = match cli.command {
        CliCommand::Selfsim => Command::Selfsim,
        CliCommand::Magnitude => Command::Magnitude,
        CliCommand::Intrinsic { task } => Command::Intrinsic(task.into()),
        CliCommand::Sts => Command::Sts,
        CliCommand::SentenceSelfsim => Command::SentenceSelfsim,
        CliCommand::Report => return cmd_report(&cfg).map(Outcome::Report),
    };
    let table = run_command(&cfg, command)?;
    write_outputs(&cfg, command, &table).map(Outcome::Single)
}
