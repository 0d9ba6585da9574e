//! `trapeze`: command-line front end for the inscription laboratory.
//!
//! Exit status: 0 on success, 1 on usage or domain errors, 2 when a
//! `verify` check fails.

mod commands;
mod output;
mod svg;

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "trapeze", version, about = "Inscribed isosceles trapezoids in planar Jordan curves")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub global: Global,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Worker threads (TRAPEZE_THREADS takes precedence).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Read angle arguments in degrees. Output angles stay in radians.
    #[arg(long, global = true)]
    pub degrees: bool,
    /// Format written to standard output.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Also write the JSON document to this file.
    #[arg(long, global = true)]
    pub json: Option<PathBuf>,
    /// Write an SVG figure to this file.
    #[arg(long, global = true)]
    pub svg: Option<PathBuf>,
    /// Random seed recorded with the run.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug, Clone)]
pub struct ClassArgs {
    /// Curve file (JSON).
    #[arg(long)]
    pub curve: Option<PathBuf>,
    /// Diagonal split ratio in (0, 1/2].
    #[arg(long)]
    pub r: f64,
    /// Angle between the diagonals.
    #[arg(long)]
    pub theta: f64,
    /// Seed grid size per parameter.
    #[arg(long, default_value_t = 256)]
    pub grid: usize,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Check {
    Variation,
    Triangle,
    Shrinkout,
    Duality,
    Vertex,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelName {
    Bump,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Solve for all inscriptions of a trapezoid class.
    Inscribe {
        #[command(flatten)]
        class: ClassArgs,
        /// Relative solver tolerance.
        #[arg(long, default_value_t = trapeze::inscriber::DEFAULT_TOL)]
        tol: f64,
    },
    /// Actions of the inscriptions of a class.
    Action {
        #[command(flatten)]
        class: ClassArgs,
        /// Include inscriptions without a closed-form action.
        #[arg(long)]
        all: bool,
    },
    /// Sorted action values at a class.
    Spectrum {
        #[command(flatten)]
        class: ClassArgs,
    },
    /// Continue inscription families in theta.
    Branch {
        #[command(flatten)]
        class: ClassArgs,
        /// Final angle (defaults to pi).
        #[arg(long)]
        theta_end: Option<f64>,
        /// Follow only the seed with this index.
        #[arg(long)]
        index: Option<usize>,
    },
    /// Degree-2 spectral proxy on a theta grid.
    L2 {
        #[arg(long)]
        curve: Option<PathBuf>,
        #[arg(long)]
        r: f64,
        /// Grid as `start:end:count`.
        #[arg(long, default_value = "0.1:3.0:30")]
        range: String,
        /// Explicit comma-separated grid; overrides --range.
        #[arg(long)]
        thetas: Option<String>,
    },
    /// Run a consistency check; exits 2 when it fails.
    Verify {
        #[arg(long, value_enum)]
        check: Check,
        #[arg(long)]
        curve: Option<PathBuf>,
        #[arg(long)]
        r: f64,
        /// Starting angle for branch-based checks.
        #[arg(long)]
        theta: Option<f64>,
        /// Final angle for the variation check.
        #[arg(long)]
        theta_end: Option<f64>,
        /// Grid for the triangle check, as `start:end:count`.
        #[arg(long, default_value = "0.1:3.0:30")]
        range: String,
        #[arg(long, default_value_t = 128)]
        grid: usize,
    },
    /// Mollify a curve and write the smooth approximant.
    Mollify {
        #[arg(long)]
        curve: Option<PathBuf>,
        #[arg(long)]
        eps: f64,
        #[arg(long, value_enum, default_value_t = KernelName::Bump)]
        kernel: KernelName,
        /// Output curve file.
        #[arg(long)]
        out: PathBuf,
    },
    /// Local monotonicity and Lipschitz-graphical constants.
    Constants {
        #[arg(long)]
        curve: Option<PathBuf>,
        /// Lipschitz constant.
        #[arg(long = "K")]
        k: f64,
    },
    /// Inscription witnesses along a mollification ladder.
    #[command(name = "theoremA")]
    TheoremA {
        #[arg(long)]
        curve: Option<PathBuf>,
        #[arg(long)]
        r: f64,
        /// Comma-separated angles.
        #[arg(long)]
        thetas: String,
        /// Comma-separated mollification widths.
        #[arg(long, default_value = "0.02,0.01,0.005")]
        ladder: String,
        #[arg(long, default_value_t = 128)]
        grid: usize,
    },
    /// Draw a curve, and the inscriptions of a class when given.
    Render {
        #[arg(long)]
        curve: Option<PathBuf>,
        #[arg(long)]
        r: Option<f64>,
        #[arg(long)]
        theta: Option<f64>,
        #[arg(long, default_value_t = 128)]
        grid: usize,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let threads = std::env::var("TRAPEZE_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .or(cli.global.threads);
    if let Some(n) = threads {
        // Fails only if a pool already exists, which cannot happen here.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    match commands::run(&cli) {
        Ok(outcome) => {
            if let Err(e) = commands::emit(&cli.global, &outcome) {
                eprintln!("{}", output::to_json_string(&output::error_document(e.code(), &e.to_string())));
                return ExitCode::from(1);
            }
            if outcome.verdict == Some(false) {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("{}", output::to_json_string(&output::error_document(e.code(), &e.to_string())));
            ExitCode::from(1)
        }
    }
}
