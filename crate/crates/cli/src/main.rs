//! `ferrosim` binary.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ferrosim_cli::{parse_config, run_study, CliError, RunOptions, StudyKind};

#[derive(Parser)]
#[command(name = "ferrosim", version, about = "Grain-resolved ferroelectric capacitor and FeFET simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Polarization-voltage loop of a metal-ferroelectric-metal capacitor.
    MfmLoop(Common),
    /// Drain current versus gate voltage of one FeFET.
    FefetSweep(Common),
    /// Memory metrics over a grid of channel designs.
    DesignStudy(Common),
    /// Coercive field, remanent polarization and time constant of a Landau model.
    LandauExtract {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        alpha: Option<f64>,
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long)]
        gamma: Option<f64>,
    },
}

#[derive(Args)]
struct Common {
    /// TOML configuration; presets are used when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (overrides FERROSIM_OUT and the config).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads.
    #[arg(long)]
    jobs: Option<usize>,
}

fn run(cli: Cli) -> Result<Vec<String>, CliError> {
    let (kind, common, overrides) = match cli.command {
        Command::MfmLoop(c) => (StudyKind::MfmLoop, c, None),
        Command::FefetSweep(c) => (StudyKind::FefetSweep, c, None),
        Command::DesignStudy(c) => (StudyKind::DesignStudy, c, None),
        Command::LandauExtract {
            common,
            alpha,
            beta,
            gamma,
        } => (StudyKind::LandauExtract, common, Some((alpha, beta, gamma))),
    };
    let text = match &common.config {
        Some(path) => std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?,
        None => String::new(),
    };
    let mut cfg = parse_config(&text, Some(kind))?;
    if let Some((a, b, g)) = overrides {
        cfg.landau.alpha = a.unwrap_or(cfg.landau.alpha);
        cfg.landau.beta = b.unwrap_or(cfg.landau.beta);
        cfg.landau.gamma = g.unwrap_or(cfg.landau.gamma);
    }
    let jobs = ferrosim_cli::run::resolve_jobs(&cfg, common.jobs);
    // The global pool drives per-slice parallelism inside a sweep.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global();
    let summary = run_study(
        cfg,
        &RunOptions {
            out: common.out,
            seed: common.seed,
            jobs: common.jobs,
        },
    )?;
    let mut lines = summary.report;
    lines.extend(summary.files.iter().map(|f| format!("wrote {}", f.display())));
    Ok(lines)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(lines) => {
            for l in lines {
                println!("{l}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("ferrosim: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
