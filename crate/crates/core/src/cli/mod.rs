//! The `curvseg` command line: dataset generation, segmentation, lambda
//! sweeps, evaluation and manifest replay.
//!
//! Each command resolves its flags and config files into a plan, executes it,
//! and records the plan in a JSON run manifest. `replay` executes the plan
//! stored in a manifest again.

mod evaluate;
mod generate;
mod segment;

pub use evaluate::{EvaluatePlan, EvaluateSummary};
pub use generate::{GeneratePlan, PairManifest, TreeSource};
pub use segment::{lambda_grid, ReconnectorSpec, SegmentPlan, SegmentSummary, SweepPlan, SweepReport, SweepRow};

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io;

#[derive(Debug, Parser)]
#[command(name = "curvseg", version, about = "Connectivity-preserving segmentation of curvilinear structures")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate connected/disconnected mask pairs.
    Generate(GenerateArgs),
    /// Segment one image with the primal-dual solver.
    Segment(SegmentArgs),
    /// Segment over a grid of lambda values and report the MCC-best one.
    SweepLambda(SweepArgs),
    /// Score predictions against annotations.
    Evaluate(EvaluateArgs),
    /// Re-run the plan recorded in a run manifest.
    Replay {
        manifest: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Directory of clean binary masks (.png or .nii).
    #[arg(long, conflicts_with = "random_trees", required_unless_present = "random_trees")]
    pub input_dir: Option<PathBuf>,
    /// Number of procedural trees to use as clean masks.
    #[arg(long)]
    pub random_trees: Option<usize>,
    /// Grid size of procedural trees, e.g. 128x128 or 64x64x64.
    #[arg(long, default_value = "128x128")]
    pub dims: String,
    #[arg(long, default_value_t = 8)]
    pub branches: usize,
    /// Tube radius range of procedural trees, `min,max`.
    #[arg(long, default_value = "1,4")]
    pub radius: String,
    /// Generator parameters (TOML or JSON).
    #[arg(long)]
    pub params: Option<PathBuf>,
    /// Overrides the seed from the parameter file.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Solver configuration (TOML or JSON).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// `identity`, `morph`, `morph:RADIUS:MIN_COMPONENT` or `model:PATH`.
    #[arg(long, default_value = "identity")]
    pub reconnector: String,
    /// Subtract a median filter of this radius first (0 = off).
    #[arg(long, default_value_t = 0)]
    pub median_radius: usize,
    /// Model tile size per axis (neural reconnector).
    #[arg(long, default_value_t = 96)]
    pub tile: usize,
    /// Model tile overlap per axis (neural reconnector).
    #[arg(long, default_value_t = 16)]
    pub overlap: usize,
    /// `average` or `max` (neural reconnector).
    #[arg(long, default_value = "average")]
    pub blend: String,
}

#[derive(Debug, Args)]
pub struct SegmentArgs {
    #[arg(long)]
    pub image: PathBuf,
    /// Output mask path.
    #[arg(long)]
    pub out: PathBuf,
    /// Optional annotation; adds metrics to the summary.
    #[arg(long)]
    pub gt: Option<PathBuf>,
    #[command(flatten)]
    pub solve: SolveArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub image: PathBuf,
    #[arg(long)]
    pub gt: PathBuf,
    #[arg(long)]
    pub roi: Option<PathBuf>,
    /// `lo,hi`; defaults to 0.001,0.080 in 2D and 0.001,0.050 in 3D.
    #[arg(long)]
    pub range: Option<String>,
    #[arg(long, default_value_t = 1e-3)]
    pub step: f64,
    /// Report path (JSON); the table also goes to standard output.
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub solve: SolveArgs,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long, required_unless_present = "pred_dir")]
    pub pred: Option<PathBuf>,
    #[arg(long, required_unless_present = "gt_dir")]
    pub gt: Option<PathBuf>,
    /// Batch mode: predictions matched to annotations by file name.
    #[arg(long, requires = "gt_dir", conflicts_with = "pred")]
    pub pred_dir: Option<PathBuf>,
    #[arg(long, conflicts_with = "gt")]
    pub gt_dir: Option<PathBuf>,
    #[arg(long)]
    pub roi: Option<PathBuf>,
    /// Clean small components and holes before topological metrics.
    #[arg(long)]
    pub postprocess: bool,
    /// CSV output path.
    #[arg(long)]
    pub out: PathBuf,
}

/// Record of one command execution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    /// The resolved plan; `replay` executes it again.
    pub config: serde_json::Value,
    pub inputs: Vec<PathBuf>,
    pub outputs: Vec<PathBuf>,
    pub seed: Option<u64>,
    pub wall_clock_seconds: f64,
}

/// What a plan reports back to the manifest writer.
pub(crate) struct Outcome {
    pub inputs: Vec<PathBuf>,
    pub outputs: Vec<PathBuf>,
    pub seed: Option<u64>,
}

pub(crate) trait Plan: Serialize {
    const COMMAND: &'static str;

    fn execute(&self) -> Result<Outcome>;

    /// Where the run manifest goes.
    fn manifest_path(&self) -> PathBuf;
}

fn run_plan<P: Plan>(plan: &P) -> Result<RunManifest> {
    let start = Instant::now();
    let outcome = plan.execute()?;
    let manifest = RunManifest {
        command: P::COMMAND.to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: serde_json::to_value(plan)?,
        inputs: outcome.inputs,
        outputs: outcome.outputs,
        seed: outcome.seed,
        wall_clock_seconds: start.elapsed().as_secs_f64(),
    };
    io::write_json(plan.manifest_path(), &manifest)?;
    Ok(manifest)
}

/// `<path without extension>.<suffix>` next to `path`.
pub(crate) fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
    let stem = stem.strip_suffix(".nii").unwrap_or(stem);
    path.with_file_name(format!("{stem}.{suffix}"))
}

pub(crate) fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir.display().to_string(), e))
}

/// Executes a parsed command line and returns its run manifest.
pub fn run(cli: Cli) -> Result<RunManifest> {
    match cli.command {
        Command::Generate(args) => run_plan(&GeneratePlan::from_args(args)?),
        Command::Segment(args) => run_plan(&SegmentPlan::from_args(args)?),
        Command::SweepLambda(args) => run_plan(&SweepPlan::from_args(args)?),
        Command::Evaluate(args) => run_plan(&EvaluatePlan::from_args(args)?),
        Command::Replay { manifest } => replay(&manifest),
    }
}

/// Executes the plan stored in a run manifest.
pub fn replay(path: &Path) -> Result<RunManifest> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let manifest: RunManifest = serde_json::from_str(&text)?;
    let config = manifest.config.clone();
    match manifest.command.as_str() {
        GeneratePlan::COMMAND => run_plan(&serde_json::from_value::<GeneratePlan>(config)?),
        SegmentPlan::COMMAND => run_plan(&serde_json::from_value::<SegmentPlan>(config)?),
        SweepPlan::COMMAND => run_plan(&serde_json::from_value::<SweepPlan>(config)?),
        EvaluatePlan::COMMAND => run_plan(&serde_json::from_value::<EvaluatePlan>(config)?),
        other => Err(Error::invalid(format!("unknown command {other:?} in manifest"))),
    }
}

/// Parses `a,b` (or `a x b`-style with `sep`) into numbers.
pub(crate) fn parse_list<T: std::str::FromStr>(text: &str, sep: char, what: &str) -> Result<Vec<T>> {
    text.split(sep)
        .map(|p| {
            p.trim()
                .parse()
                .map_err(|_| Error::invalid(format!("cannot parse {what} from {text:?}")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sibling_paths() {
        assert_eq!(sibling(Path::new("/a/b/mask.png"), "run.json"), PathBuf::from("/a/b/mask.run.json"));
        assert_eq!(sibling(Path::new("v.nii"), "summary.json"), PathBuf::from("v.summary.json"));
    }

    #[test]
    fn list_parsing() {
        assert_eq!(parse_list::<usize>("64x32x16", 'x', "dims").unwrap(), vec![64, 32, 16]);
        assert_eq!(parse_list::<f64>("0.001, 0.08", ',', "range").unwrap(), vec![0.001, 0.08]);
        assert!(parse_list::<usize>("64xa", 'x', "dims").is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
