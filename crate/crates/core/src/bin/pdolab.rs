use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use pdolab::experiment::{parse_spec_with, run_stage, ExperimentSpec, Mode, Stage};
use pdolab::sim::Axis;
use pdolab::tomography::disturbance_with;
use pdolab::{Error, Execution, Result};

/// Simulate, reconstruct and Bell-test pseudo-density operators of an open timelike curve.
#[derive(Parser)]
#[command(name = "pdolab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Subcommand)]
enum Command {
    /// Full pipeline: quorum, reconstruction, CHSH, monogamy, disturbance witness.
    Run { spec: PathBuf },
    /// Reconstruction only.
    Tomo { spec: PathBuf },
    /// CHSH values and monogamy sums only.
    Chsh { spec: PathBuf },
    /// Correlator with and without an intervening measurement at t1.
    DemoDisturbance,
}

#[derive(Args)]
struct Overrides {
    /// Seed (falls back to the spec file, then PDOLAB_SEED, then 0).
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    shots: Option<u64>,
    #[arg(long, global = true)]
    visibility: Option<f64>,
    /// Infinite-shot evaluation instead of sampling.
    #[arg(long, global = true)]
    exact: bool,
    /// Output directory; without it the report is printed to stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

impl Overrides {
    fn apply(&self, spec: &mut ExperimentSpec) -> Result<()> {
        if let Some(seed) = self.seed {
            spec.seed = seed;
        }
        if let Some(shots) = self.shots {
            spec.shots_per_setting = shots;
        }
        if let Some(v) = self.visibility {
            spec.source.visibility = v;
        }
        if self.exact {
            spec.mode = Mode::Exact;
        }
        spec.validate()
    }
}

fn env_seed() -> Result<u64> {
    match std::env::var("PDOLAB_SEED") {
        Ok(s) => s.trim().parse().map_err(|_| Error::Spec {
            path: "PDOLAB_SEED".into(),
            message: format!("not an unsigned 64-bit integer: {s:?}"),
        }),
        Err(_) => Ok(0),
    }
}

fn load_spec(path: &PathBuf, overrides: &Overrides) -> Result<ExperimentSpec> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Spec {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    let mut spec = parse_spec_with(&text, env_seed()?)?;
    overrides.apply(&mut spec)?;
    Ok(spec)
}

fn execute(cli: &Cli) -> Result<()> {
    let (path, stage) = match &cli.command {
        Command::Run { spec } => (spec, Stage::Full),
        Command::Tomo { spec } => (spec, Stage::Tomography),
        Command::Chsh { spec } => (spec, Stage::Bell),
        Command::DemoDisturbance => {
            let v = cli.overrides.visibility.unwrap_or(1.0);
            let report = disturbance_with(v, Axis::x())?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            return Ok(());
        }
    };
    let spec = load_spec(path, &cli.overrides)?;
    let artifacts = run_stage(&spec, stage, Execution::default())?;
    match &cli.overrides.out {
        Some(dir) => {
            for p in artifacts.write(dir)? {
                eprintln!("wrote {}", p.display());
            }
        }
        None => println!("{}", artifacts.report.to_json()),
    }
    Ok(())
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::SpecSyntax { .. } | Error::Spec { .. } => 2,
        Error::IncompleteQuorum { .. } => 3,
        Error::NotDensityOperator { .. } | Error::NoConvergence { .. } | Error::InvalidArgument(_) => 4,
        Error::Io(_) | Error::Csv(_) | Error::Json(_) => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("pdolab: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
