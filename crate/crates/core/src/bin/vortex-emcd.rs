use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use vortex_emcd::commands::{self, Report};
use vortex_emcd::config::RunConfig;
use vortex_emcd::{Error, Result};

/// Vortex-beam EMCD simulations.
#[derive(Debug, Parser)]
#[command(name = "vortex-emcd", version)]
struct Cli {
    /// Run configuration (sectioned `key = value` with units).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output directory; overrides `[output] dir`.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Worker threads.
    #[arg(long, global = true, value_name = "N", env = "VORTEX_EMCD_THREADS")]
    threads: Option<usize>,

    /// Write PNG renderings.
    #[arg(long, global = true, overrides_with = "no_render")]
    render: bool,

    /// Skip PNG renderings.
    #[arg(long, global = true, overrides_with = "render")]
    no_render: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Probe radial profile and ring radius.
    Probe,
    /// Energy-filtered diffraction patterns.
    Diffraction,
    /// EMCD over displacement and scattering angle.
    EmcdMap,
    /// EMCD integrated over particle area and detector.
    EmcdIntegrated,
    /// Brute-force Cartesian reference patterns and their agreement.
    OracleDump,
}

fn run(cli: &Cli) -> Result<Report> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(out) = &cli.out {
        cfg.output.dir = out.clone();
    }
    if cli.render {
        cfg.output.render = true;
    }
    if cli.no_render {
        cfg.output.render = false;
    }
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Error::Config {
                key: "--threads".into(),
                message: "must be at least 1".into(),
            });
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config {
                key: "--threads".into(),
                message: e.to_string(),
            })?;
    }
    match cli.command {
        Command::Probe => commands::cmd_probe(&cfg),
        Command::Diffraction => commands::cmd_diffraction(&cfg),
        Command::EmcdMap => commands::cmd_emcd_map(&cfg),
        Command::EmcdIntegrated => commands::cmd_emcd_integrated(&cfg),
        Command::OracleDump => commands::cmd_oracle_dump(&cfg),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            for line in &report.lines {
                println!("{line}");
            }
            for file in &report.files {
                println!("wrote {}", file.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
