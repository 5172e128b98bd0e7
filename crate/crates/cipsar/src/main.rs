use std::path::PathBuf;
use std::process::ExitCode;

use cipsar::commands::{self, ImageFormat};
use cipsar::{CliError, PipelineConfig};
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "cipsar", version, about = "Slant-range imaging by 1D coefficient inversion")]
struct Cli {
    /// TOML configuration file; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides paths.output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads; overrides `jobs` from the config.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Pgm,
    Both,
}

#[derive(Subcommand)]
enum Cmd {
    /// Synthesize traces for the configured phantom.
    Simulate,
    /// Turn raw sweeps or simulated traces into per-source traces.
    Preprocess,
    /// Reconstruct per-source profiles and the slant-range image.
    Invert {
        #[arg(long, value_enum, default_value = "both")]
        format: Format,
    },
    /// simulate, preprocess and invert into one output directory.
    Pipeline {
        #[arg(long, value_enum, default_value = "both")]
        format: Format,
    },
    /// Run a self-check: gradcheck, convexity, lemma1 or oracle.
    Verify { suite: String },
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut cfg = match &cli.config {
        Some(p) => PipelineConfig::load(p)?,
        None => PipelineConfig::default(),
    };
    if let Some(out) = cli.out {
        cfg.paths.output = out;
    }
    let jobs = cli.jobs.unwrap_or(cfg.jobs);
    if jobs == 0 {
        return Err(CliError::Config("--jobs must be at least 1".into()));
    }
    let out = cfg.paths.output.clone();
    let format = |f: Format| match f {
        Format::Csv => ImageFormat::Csv,
        Format::Pgm => ImageFormat::Pgm,
        Format::Both => ImageFormat::Both,
    };
    if let Cmd::Verify { suite } = &cli.cmd {
        if !cipsar::verify::SUITES.contains(&suite.as_str()) {
            return Err(CliError::Config(format!(
                "unknown suite {suite:?}; expected one of {}",
                cipsar::verify::SUITES.join(", ")
            )));
        }
    }
    let input = match &cli.cmd {
        Cmd::Preprocess | Cmd::Invert { .. } => Some(commands::input_dir(&cfg)?),
        _ => None,
    };
    std::fs::create_dir_all(&out).map_err(CliError::io(&out))?;
    match cli.cmd {
        Cmd::Simulate => commands::cmd_simulate(&cfg, &out, jobs),
        Cmd::Preprocess => commands::cmd_preprocess(&cfg, input.as_deref().unwrap(), &out, jobs),
        Cmd::Invert { format: f } => commands::cmd_invert(&cfg, input.as_deref().unwrap(), &out, jobs, format(f)),
        Cmd::Pipeline { format: f } => commands::cmd_pipeline(&cfg, &out, jobs, format(f)),
        Cmd::Verify { suite } => {
            let r = commands::cmd_verify(&cfg, &suite, &out)?;
            println!("{}: {}", r.suite, r.summary);
            if r.passed {
                Ok(())
            } else {
                Err(CliError::Verification(format!("{}: {}", r.suite, r.summary)))
            }
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
