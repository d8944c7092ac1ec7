//! Command-line experiment runner.
//!
//! Every flag lives in [`ExperimentConfig`], which is also the TOML config
//! schema. With `--config`, the file supplies the run; `--seed`, `--kappa`,
//! `--out` and a subcommand given on the command line override it, and
//! `--jobs` only changes the worker count.

mod commands;
mod svg;

use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::Error;

pub use commands::run;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 2;
pub const EXIT_INPUT: i32 = 3;
pub const EXIT_BUDGET: i32 = 4;

#[derive(Parser, Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[command(name = "cutlab", version, about = "Cut-configuration laboratory on an exact branch-and-cut solver")]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Seed for generated instances and sampled parameters.
    #[arg(long, global = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Cap on expanded branch-and-cut nodes.
    #[arg(long, global = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<usize>,
    /// Primary output file (stdout when absent).
    #[arg(long, global = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    /// Worker threads; never changes output.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub jobs: Option<usize>,
    /// TOML file holding a full configuration.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Write the resolved configuration to this path before running.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub save_config: Option<PathBuf>,
    #[command(subcommand)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,
}

#[derive(Subcommand, Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "lowercase")]
pub enum Command {
    /// Cut-sensitivity check on the odd parity instance.
    Jeroslow(JeroslowArgs),
    /// Tree size along a sweep of one cut weight or along a segment of multipliers.
    Sweep(SweepArgs),
    /// Piecewise-constancy check and region count over multiplier space.
    Regions(RegionsArgs),
    /// ERM over random candidates on a seeded sample.
    Learn(LearnArgs),
    /// Empirical Rademacher complexity of a candidate class.
    Rademacher(RademacherArgs),
}

#[derive(Args, Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JeroslowArgs {
    /// Number of variables (odd, at least 3).
    #[arg(long)]
    pub n: usize,
    /// Cut multipliers `u1,u2`.
    #[arg(long, conflicts_with = "scan")]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u: Option<String>,
    /// Straddle the threshold and run the no-cut baseline.
    #[arg(long)]
    #[serde(default)]
    pub scan: bool,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GeneratorKind {
    #[default]
    Packing,
    Jeroslow,
}

#[derive(Args, Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceArgs {
    /// Instance file in the text format; overrides the generator.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub instance: Option<PathBuf>,
    #[arg(long, value_enum)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<GeneratorKind>,
    /// Generated variable count.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gen_n: Option<usize>,
    /// Generated constraint count.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gen_m: Option<usize>,
    /// Largest generated coefficient.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coeff_max: Option<u64>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepMode {
    /// Vary one cut-score weight with root cut selection.
    #[default]
    Mu,
    /// Move a single cut's multipliers along a segment.
    U,
}

#[derive(Args, Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepArgs {
    #[command(flatten)]
    #[serde(default)]
    pub instance: InstanceArgs,
    #[arg(long, value_enum)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<SweepMode>,
    /// Swept cut weight (0 efficacy, 1 parallelism, 2 directed cutoff, 3 support).
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub index: Option<usize>,
    /// Grid start (rational).
    #[arg(long, allow_hyphen_values = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lo: Option<String>,
    /// Grid end (rational).
    #[arg(long, allow_hyphen_values = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hi: Option<String>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    /// Cut-weight template `w0,w1,w2,w3`.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<String>,
    /// Candidate multipliers `u;u;…`.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub candidates: Option<String>,
    /// Number of seeded random candidates when none are listed.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub candidate_count: Option<usize>,
    /// Segment start for `u` mode.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub from: Option<String>,
    /// Segment end for `u` mode.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub to: Option<String>,
    /// Also write a step plot here.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub svg: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RegionEvaluator {
    /// Generated cut rows.
    Cut,
    /// Branch-and-cut tree size.
    #[default]
    Tree,
}

#[derive(Args, Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionsArgs {
    #[command(flatten)]
    #[serde(default)]
    pub instance: InstanceArgs,
    /// `single`, `seq:W` or `waves:WxK`.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub layout: Option<String>,
    /// Random parameter samples.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    /// Grid points per axis for the region count (single layout).
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolution: Option<usize>,
    #[arg(long, value_enum)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub evaluator: Option<RegionEvaluator>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CandidateFamily {
    /// Cut-score weight vectors selecting among a shared cut pool.
    #[default]
    Mu,
    /// Single-cut multiplier vectors.
    U,
}

#[derive(Args, Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleArgs {
    #[command(flatten)]
    #[serde(default)]
    pub instance: InstanceArgs,
    /// Instances drawn.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    /// Candidate configurations drawn.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub candidate_count: Option<usize>,
    #[arg(long, value_enum)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<CandidateFamily>,
    /// Size of the shared cut pool for the `mu` family.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pool: Option<usize>,
}

#[derive(Args, Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LearnArgs {
    #[command(flatten)]
    #[serde(default)]
    pub sample: SampleArgs,
    /// Training instances (default half).
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub train: Option<usize>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    /// Constant multiplying the bounds.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constant: Option<f64>,
}

#[derive(Args, Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RademacherArgs {
    #[command(flatten)]
    #[serde(default)]
    pub sample: SampleArgs,
    /// Monte Carlo sign draws.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub draws: Option<usize>,
    /// Enumerate every sign vector instead of sampling.
    #[arg(long)]
    #[serde(default)]
    pub exhaustive: bool,
}

/// Failure carrying a process exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }

    pub fn violation(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_VIOLATION,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::OracleTooLarge { .. } | Error::GridTooLarge { .. } => EXIT_BUDGET,
            Error::NonFiniteScore { .. } => EXIT_VIOLATION,
            _ => EXIT_INPUT,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::input(format!("config: {e}")))
    }

    pub fn to_toml(&self) -> Result<String, CliError> {
        toml::to_string(self).map_err(|e| CliError::input(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// Layers the command-line values over a loaded file.
    pub fn resolve(self) -> Result<Self, CliError> {
        let Some(path) = self.config.clone() else {
            return Ok(self);
        };
        let file = Self::load(&path)?;
        Ok(Self {
            seed: self.seed.or(file.seed),
            kappa: self.kappa.or(file.kappa),
            out: self.out.or(file.out),
            command: self.command.or(file.command),
            ..self
        })
    }
}

/// Parses `std::env::args`, runs, and returns the exit code.
pub fn main() -> i32 {
    let cfg = ExperimentConfig::parse();
    match run(cfg) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.code
        }
    }
}
