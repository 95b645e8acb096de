//! `roomeval`: synthesize, augment and describe RIRs, render reverberant test sets, and
//! score challenge submissions.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

/// Seed used when `--seed` is not given, so default runs are reproducible.
pub const DEFAULT_SEED: u64 = 0x5EED_2025;

#[derive(Debug, Parser)]
#[command(name = "roomeval", version, about = "Room impulse response generation and evaluation toolkit")]
struct Cli {
    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Worker threads; defaults to the number of logical cores. Results do not depend on it.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Where output files are written.
    #[arg(long, global = true, default_value = ".")]
    output_dir: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// T20, EDFs and DRR of each RIR, as JSON.
    Describe {
        #[arg(long = "rir", required = true, num_args = 1..)]
        rirs: Vec<PathBuf>,
    },
    /// Image-source RIRs for every source/receiver pair of a scene.
    Synth {
        #[arg(long)]
        scene: PathBuf,
        /// Generator settings (JSON); defaults apply to missing fields.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Place receivers on a grid instead of the scene's receiver list.
        #[arg(long)]
        grid: bool,
        #[arg(long, requires = "grid")]
        spacing: Option<f64>,
        #[arg(long, requires = "grid")]
        clearance: Option<f64>,
        #[arg(long, requires = "grid", value_delimiter = ',')]
        elevations: Option<Vec<f64>>,
    },
    /// Transplant the direct sound of enrollment RIRs to new source/receiver positions.
    Augment {
        /// Directory of enrollment WAVs, each with a JSON sidecar giving its positions.
        #[arg(long)]
        enrollment: PathBuf,
        /// JSON list of {"id", "source", "receiver"}.
        #[arg(long)]
        targets: PathBuf,
    },
    /// Task-1 metrics for a directory of generated RIRs against references.
    ScoreTask1 {
        #[arg(long)]
        generated: PathBuf,
        #[arg(long)]
        reference: PathBuf,
    },
    /// Task-2 distance errors for a predictions CSV against truth.
    ScoreTask2 {
        #[arg(long)]
        predictions: PathBuf,
        #[arg(long)]
        truth: PathBuf,
    },
    /// Render the reverberant test set of a manifest and its truth CSV.
    Reverb {
        #[arg(long)]
        manifest: PathBuf,
        /// Directory of dry speech WAVs.
        #[arg(long)]
        speech: PathBuf,
        /// Directory of `<room>_<position>.wav` RIRs, for utterances without an RIR path.
        #[arg(long)]
        rirs: Option<PathBuf>,
    },
    /// Check a submission bundle against one or more scenario manifests.
    Validate {
        #[arg(long, value_enum)]
        task: TaskArg,
        #[arg(long)]
        bundle: PathBuf,
        #[arg(long = "manifest", required = true, num_args = 1..)]
        manifests: Vec<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TaskArg {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match commands::run(&cli) {
        Ok(0) => ExitCode::SUCCESS,
        Ok(failures) => {
            eprintln!("{failures} item(s) failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
