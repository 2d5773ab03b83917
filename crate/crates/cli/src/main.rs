use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use ghostdiff_cli::{exit_code, run, ConfigFile, Overrides, Scenario, ScenarioKind, Settings};
use ghostdiff_core::{Error, Result};

#[derive(Parser)]
#[command(
    name = "ghostdiff",
    version,
    about = "Two-photon single-slit ghost diffraction"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a named scenario and write its CSV output.
    Run {
        scenario: ScenarioKind,
        #[command(flatten)]
        common: Common,
        /// Detector scan as start,stop,count (e.g. -10mm,10mm,401).
        #[arg(long, allow_hyphen_values = true)]
        scan: Option<String>,
        /// D1 offset for the shifted scenario.
        #[arg(long, allow_hyphen_values = true)]
        z0: Option<String>,
        /// Rescale written profiles so their maximum equals this value.
        #[arg(long)]
        peak_scale: Option<f64>,
    },
    /// Compare the closed forms against an oracle.
    Validate {
        oracle: Oracle,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(clap::Args)]
struct Common {
    /// JSON config; missing fields take reference values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Oracle {
    Quadrature,
    Grid,
}

fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var("GHOSTDIFF_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::validation("GHOSTDIFF_THREADS", "must be a positive integer"))?;
    // fails only if a pool already exists, which cannot happen this early
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global();
    Ok(())
}

fn load(config: Option<&Path>) -> Result<ConfigFile> {
    config.map_or(Ok(ConfigFile::default()), ConfigFile::load)
}

fn execute(cli: Cli) -> Result<()> {
    configure_threads()?;
    let (kind, common, overrides) = match cli.command {
        Command::Run {
            scenario,
            common,
            scan,
            z0,
            peak_scale,
        } => (
            scenario,
            common,
            Overrides {
                scan,
                z0,
                peak_scale,
            },
        ),
        Command::Validate { oracle, common } => {
            let kind = match oracle {
                Oracle::Quadrature => ScenarioKind::ValidateQuadrature,
                Oracle::Grid => ScenarioKind::ValidateGrid,
            };
            (kind, common, Overrides::default())
        }
    };
    let file = load(common.config.as_deref())?;
    let settings = Settings::resolve(&file, &overrides)?;
    let scenario = Scenario::new(kind, settings)?;
    log::info!("running {}", kind.name());
    let summary = run(&scenario, &common.out)?;
    eprint!("{}", summary.table());
    println!("{}", summary.to_json());
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
