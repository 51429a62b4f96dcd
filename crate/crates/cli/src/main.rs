//! kicked-top: spectral toolbox for quantum kicked tops under rank-1 kicks.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use kicked_top_cli::commands;
use kicked_top_cli::config::{RawOptions, RunConfig};
use kicked_top_cli::parse::parse_config_file;
use kicked_top_cli::CliError;

#[derive(Parser)]
#[command(
    name = "kicked-top",
    about = "Quasienergy anholonomy and exceptional points of quantum kicked tops",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct CommonArgs {
    /// Spin as the integer 2J (so 1 = spin-1/2, 2 = spin-1, ...).
    #[arg(long = "two-j")]
    two_j: Option<i32>,

    /// Precession angle: radians ("1.047") or a pi multiple ("2pi/3", "pi/6").
    #[arg(long)]
    omega: Option<String>,

    /// "uniform" or a comma-separated complex coefficient list ("0.5,0.5+0.1i,...").
    #[arg(long, allow_hyphen_values = true)]
    kick: Option<String>,

    /// Tracking steps (sweep grid points / cycle discretization).
    #[arg(long)]
    steps: Option<usize>,

    /// Λ-plane rectangle "re_min,re_max,im_min,im_max".
    #[arg(long, allow_hyphen_values = true)]
    region: Option<String>,

    /// Grid resolution "N" or "NX,NY".
    #[arg(long)]
    res: Option<String>,

    /// Output file path (contour writes one file per sheet from this stem).
    #[arg(long)]
    out: Option<PathBuf>,

    /// ω scan "start:end:count" (ω tokens allowed).
    #[arg(long = "omega-scan")]
    omega_scan: Option<String>,

    /// Seed recorded in outputs and used by any randomized cross-checks.
    #[arg(long)]
    seed: Option<u64>,

    /// key=value config file; explicit flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Adiabatic sweep along the unit circle: branches, permutation, itinerary.
    Sweep(CommonArgs),
    /// Exceptional-point atlas at one ω or across an ω scan.
    Ep(CommonArgs),
    /// Riemann-sheet contour grids of Re E_M (one file per sheet).
    Contour {
        #[command(flatten)]
        common: CommonArgs,
        /// Guard radius around Λ = 0 (cells inside are unresolved).
        #[arg(long)]
        guard: Option<f64>,
        /// Number of radial continuation rays.
        #[arg(long)]
        rays: Option<usize>,
    },
    /// Monodromy of a named template (C, C', C1, C2) or a custom waypoint loop.
    Cycle {
        #[command(flatten)]
        common: CommonArgs,
        /// Named cycle template: C | C' | C1 | C2.
        #[arg(long)]
        template: Option<String>,
        /// Custom closed path "re,im;re,im;..." (base is the first point).
        #[arg(long, allow_hyphen_values = true)]
        waypoints: Option<String>,
    },
    /// Sylvester-determinant vs closed-form resultant over a μ grid.
    ResultantCheck {
        #[command(flatten)]
        common: CommonArgs,
        /// μ grid "min,max,count" (default -0.99,0.33,101).
        #[arg(long = "mu-grid", allow_hyphen_values = true)]
        mu_grid: Option<String>,
    },
}

fn raw_from(common: &CommonArgs) -> Result<RawOptions, CliError> {
    let mut raw = RawOptions {
        two_j: common.two_j,
        omega: common.omega.clone(),
        kick: common.kick.clone(),
        steps: common.steps,
        region: common.region.clone(),
        res: common.res.clone(),
        out: common.out.clone(),
        omega_scan: common.omega_scan.clone(),
        seed: common.seed,
        ..Default::default()
    };
    if let Some(path) = &common.config {
        let text = std::fs::read_to_string(path)?;
        let map = parse_config_file(&text)?;
        raw.merge_file(&map)?;
    }
    Ok(raw)
}

fn run() -> Result<(), CliError> {
    let cli = Cli::parse();
    match &cli.command {
        Command::Sweep(common) => {
            let cfg = RunConfig::resolve(&raw_from(common)?, true)?;
            commands::cmd_sweep(&cfg)
        }
        Command::Ep(common) => {
            let cfg = RunConfig::resolve(&raw_from(common)?, true)?;
            commands::cmd_ep(&cfg)
        }
        Command::Contour {
            common,
            guard,
            rays,
        } => {
            let mut raw = raw_from(common)?;
            if raw.guard.is_none() {
                raw.guard = *guard;
            }
            if raw.rays.is_none() {
                raw.rays = *rays;
            }
            let cfg = RunConfig::resolve(&raw, true)?;
            commands::cmd_contour(&cfg)
        }
        Command::Cycle {
            common,
            template,
            waypoints,
        } => {
            let mut raw = raw_from(common)?;
            if raw.template.is_none() {
                raw.template = template.clone();
            }
            if raw.waypoints.is_none() {
                raw.waypoints = waypoints.clone();
            }
            let cfg = RunConfig::resolve(&raw, true)?;
            commands::cmd_cycle(&cfg)
        }
        Command::ResultantCheck { common, mu_grid } => {
            let mut raw = raw_from(common)?;
            if raw.mu_grid.is_none() {
                raw.mu_grid = mu_grid.clone();
            }
            let cfg = RunConfig::resolve(&raw, false)?;
            commands::cmd_resultant_check(&cfg)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
