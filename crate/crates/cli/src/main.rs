mod commands;
mod config;
mod heatmap;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{Base, Count, KList};

#[derive(Parser, Debug)]
#[command(name = "hcf", version, about = "Hurwitz complex continued fractions and their invariant density")]
pub struct Cli {
    /// `key = value` config file; flags take precedence over it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Worker threads for estimation (HCF_WORKERS if unset).
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Expand z in K into digits and convergents, checking the error bounds.
    Expand {
        #[arg(allow_hyphen_values = true)]
        z: String,
        #[arg(default_value_t = 20)]
        steps: usize,
        #[arg(long)]
        json: bool,
    },
    /// Region K_{k,l} containing z, or "boundary".
    Classify {
        #[arg(allow_hyphen_values = true)]
        z: String,
    },
    /// Check a digit word such as "2, 2+i', -3-2i".
    Admissible {
        #[arg(allow_hyphen_values = true)]
        word: String,
    },
    /// Build, inspect or export dual-region rasters.
    Grid {
        #[command(subcommand)]
        action: GridAction,
    },
    /// Estimate h_{m,n} at a base point for a range of resolutions.
    Table(TableArgs),
    /// Fit a + b c^k to every coefficient series of a table CSV.
    Fit(FitArgs),
    /// Render the density over K as a PGM or PPM heatmap.
    Plot(PlotArgs),
    /// Run the invariant suites and print a JSON report.
    Validate(ValidateArgs),
    /// Visit frequencies of the regions along a natural-extension orbit.
    Freq(FreqArgs),
}

#[derive(Args, Debug, Clone, Default)]
pub struct BuildArgs {
    /// orbit, orbit-rotated or boundary.
    #[arg(long)]
    method: Option<String>,
    /// none, symmetry, neighbors, flood or flood+symmetry.
    #[arg(long)]
    fill: Option<String>,
    /// Orbit length; defaults depend on the method.
    #[arg(long)]
    iters: Option<Count>,
    /// Orbit seed z (w starts at 0).
    #[arg(long, allow_hyphen_values = true)]
    seed: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum GridAction {
    /// Build one region (or all twelve with --all) and save it.
    Build {
        #[arg(long)]
        region: Option<String>,
        #[arg(long)]
        k: Option<u32>,
        /// Build all twelve regions into the directory given by --out.
        #[arg(long)]
        all: bool,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        build: BuildArgs,
    },
    /// Print resolution, region and occupancy of a grid file.
    Info { file: PathBuf },
    /// Write a grid file as a binary PBM image.
    ExportPbm { file: PathBuf, out: PathBuf },
}

#[derive(Args, Debug)]
pub struct TableArgs {
    #[arg(long)]
    region: Option<String>,
    /// Base point `x,y`.
    #[arg(long, allow_hyphen_values = true)]
    base: Option<Base>,
    /// Resolutions: `7`, `7..10` or `7,9`.
    #[arg(long)]
    k: Option<KList>,
    /// Highest total order m + n.
    #[arg(long = "L")]
    l: Option<usize>,
    /// neighborhood or none.
    #[arg(long)]
    smoothing: Option<String>,
    #[command(flatten)]
    build: BuildArgs,
    /// Coefficient table CSV (stdout if omitted).
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Fit results JSON.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Keep the filled grids in this directory.
    #[arg(long)]
    save_grids: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct FitArgs {
    csv: PathBuf,
    #[arg(long)]
    region: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    base: Option<Base>,
    /// Restrict to one coefficient.
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
}

#[derive(Args, Debug)]
pub struct PlotArgs {
    #[arg(long)]
    out: PathBuf,
    /// Image side in pixels.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<u32>,
    /// pgm or ppm; taken from the file extension if omitted.
    #[arg(long)]
    format: Option<String>,
    /// Load V<k><l>.grid files from this directory instead of building.
    #[arg(long)]
    grids: Option<PathBuf>,
    #[command(flatten)]
    build: BuildArgs,
}

#[derive(Args, Debug)]
pub struct ValidateArgs {
    /// Suites to run (all by default).
    #[arg(long = "suite")]
    suites: Vec<String>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    depth: Option<usize>,
    /// Orbit length of the admissibility suite.
    #[arg(long)]
    steps: Option<Count>,
    /// Fault injection: flip the sign of the q_{n-2} term.
    #[arg(long, hide = true)]
    flip_q_sign: bool,
}

#[derive(Args, Debug)]
pub struct FreqArgs {
    #[arg(long)]
    steps: Option<Count>,
    #[arg(long)]
    region: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    seed: Option<String>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("invalid arguments");
            eprintln!("error: {}", first.trim_start_matches("error: ").trim());
            return ExitCode::from(1);
        }
    };
    match commands::run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.to_string().replace('\n', " "));
            ExitCode::from(commands::exit_code(&e))
        }
    }
}
