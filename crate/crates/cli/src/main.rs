//! `augdoe` binds the augmentation and analysis crates into a two-step
//! workflow: augment image corpora with seeded pipelines, plan two-level
//! full factorial experiments, analyze their results with main-effect and
//! interaction regressions, evaluate segmentation outputs, and select
//! checkpoints from training logs.

mod commands;

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

/// Fixed default master seed; every command is reproducible without flags.
pub const DEFAULT_SEED: u64 = 0x0D0E_5EED;

#[derive(Parser)]
#[command(
    name = "augdoe",
    version,
    about = "Deterministic image augmentation and factorial experiment toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Apply a pipeline spec to every image in a directory.
    Augment {
        /// Directory of input images (png, ppm, pgm).
        in_dir: PathBuf,
        /// Output directory (created if missing).
        out_dir: PathBuf,
        /// Pipeline spec JSON.
        #[arg(long)]
        pipeline: PathBuf,
        /// Override the pipeline's master seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Manifest path (default: <out_dir>/manifest.json).
        #[arg(long)]
        manifest: Option<PathBuf>,
    },
    /// Generate a full factorial run manifest.
    Plan {
        /// Comma-separated factor names.
        #[arg(long, value_delimiter = ',', required = true)]
        factors: Vec<String>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Manifest CSV path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit a regression model to factorial results.
    Analyze {
        /// Results CSV (manifest columns plus response columns).
        results: PathBuf,
        /// Response column to fit.
        #[arg(long)]
        response: String,
        #[arg(long, default_value = "quadratic")]
        model: String,
        /// Factor coding: zero_one, plus_minus, or auto (fits both and
        /// keeps the one closer to --reference).
        #[arg(long, default_value = "zero_one")]
        coding: String,
        /// Published coefficient table JSON for auto coding resolution.
        #[arg(long)]
        reference: Option<PathBuf>,
        /// Output prefix; writes <out>.json and <out>.txt
        /// (plus <out>.discrepancy.json under auto coding).
        #[arg(long)]
        out: PathBuf,
    },
    /// Compute per-class IoU and mIoU over prediction/truth label maps.
    Eval {
        pred_dir: PathBuf,
        truth_dir: PathBuf,
        /// Comma-separated class subset (default: all classes).
        #[arg(long, value_delimiter = ',')]
        classes: Option<Vec<usize>>,
        /// Number of classes (default: highest label + 1).
        #[arg(long)]
        num_classes: Option<usize>,
        /// Report JSON path (default: stdout only).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Report checkpoint selections from a per-epoch metric log.
    Select {
        /// CSV log: epoch,source_val_miou,<target>...
        log: PathBuf,
        /// Selection mode to highlight: i (target best) or ii (source best).
        #[arg(long)]
        mode: Option<String>,
        /// Target series for mode I (default: the only target column).
        #[arg(long)]
        target: Option<String>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Augment { in_dir, out_dir, pipeline, seed, manifest } => {
            commands::augment::run(&in_dir, &out_dir, &pipeline, seed, manifest.as_deref())
        }
        Command::Plan { factors, seed, out } => commands::plan::run(&factors, seed, &out),
        Command::Analyze { results, response, model, coding, reference, out } => {
            commands::analyze::run(&results, &response, &model, &coding, reference.as_deref(), &out)
        }
        Command::Eval { pred_dir, truth_dir, classes, num_classes, out } => {
            commands::evaluate::run(
                &pred_dir,
                &truth_dir,
                classes.as_deref(),
                num_classes,
                out.as_deref(),
            )
        }
        Command::Select { log, mode, target } => {
            commands::select::run(&log, mode.as_deref(), target.as_deref())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
