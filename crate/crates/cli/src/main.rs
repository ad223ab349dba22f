use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use crowdflux_core::harness::{self, parse_config_over, Mode, Report, SimConfig};
use crowdflux_core::Error;

/// Simulate the two-species cross-transport system and its particle approximation.
#[derive(Parser)]
#[command(name = "crowdflux", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Finite-volume solve in one dimension.
    Pde1d(RunArgs),
    /// Finite-volume solve on a rectangle.
    Pde2d(RunArgs),
    /// Stochastic particle system with density estimates.
    Particles(RunArgs),
    /// PDE and particle runs from the same initial data.
    Compare(RunArgs),
    /// Parameter sweep with residuals between consecutive runs.
    Sweep(RunArgs),
    /// Closed-form quadratic profile solution.
    Analytic(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Configuration file in `key = value` format.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override the base seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Start from a built-in configuration (`paper2d`).
    #[arg(long)]
    preset: Option<String>,
}

fn load(mode: Mode, args: &RunArgs) -> Result<SimConfig, Error> {
    let base = match &args.preset {
        Some(name) => SimConfig::preset(name)?,
        None => SimConfig::default(),
    };
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
                path: path.clone(),
                source,
            })?;
            parse_config_over(base, &text)?
        }
        None if args.preset.is_some() => base,
        None => {
            return Err(Error::Validation {
                key: "config".into(),
                message: "pass --config FILE or --preset NAME".into(),
            })
        }
    };
    if cfg.mode != mode {
        log::info!("running as {} (config says {})", mode.name(), cfg.mode.name());
    }
    cfg.mode = mode;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &args.out {
        cfg.output_dir = out.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn summarize(report: &Report) {
    for row in &report.comparison {
        println!("t = {:.4}  l2(w) = {:.6e}  l2(u) = {:.6e}  l2(v) = {:.6e}", row.t, row.l2_w, row.l2_u, row.l2_v);
    }
    if let Some(sweep) = &report.sweep {
        for r in &sweep.residuals {
            println!("r_{} = {:.6e}  (param {})", r.i, r.r, r.param_value);
        }
        if let Some((i, p, j)) = sweep.max_jump {
            println!("largest residual jump {j:.6e} at i = {i} (param {p})");
        }
    }
    for note in &report.notes {
        println!("note: {note}");
    }
}

fn exit_code(err: &Error) -> u8 {
    match err {
        e if e.is_config_error() => 2,
        e if e.is_numerical() => 3,
        Error::Io { .. } => 1,
        Error::InvalidArgument(_) | Error::GridMismatch(_) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let (mode, args) = match &cli.command {
        Command::Pde1d(a) => (Mode::Pde1d, a),
        Command::Pde2d(a) => (Mode::Pde2d, a),
        Command::Particles(a) => (Mode::Particles, a),
        Command::Compare(a) => (Mode::Compare, a),
        Command::Sweep(a) => (Mode::Sweep, a),
        Command::Analytic(a) => (Mode::Analytic, a),
    };
    let result = load(mode, args).and_then(|cfg| harness::execute(&cfg));
    match result {
        Ok((report, dir)) => {
            println!("wrote {}", dir.display());
            summarize(&report);
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
