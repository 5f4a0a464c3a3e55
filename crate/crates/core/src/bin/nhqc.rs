use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nhqc::config::{preset, ExperimentConfig, PRESETS};
use nhqc::runner::{exit_code, run, Command, RunOptions};

#[derive(Parser)]
#[command(name = "nhqc", version, about = "Binomial-code holonomic gates in an ultrastrongly coupled cavity")]
struct Cli {
    #[command(subcommand)]
    command: Sub,

    /// Experiment config (TOML)
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Shipped preset instead of --config
    #[arg(long, global = true, conflicts_with = "config")]
    preset: Option<String>,

    /// Output directory
    #[arg(long, global = true, value_name = "DIR", default_value = "out")]
    out: PathBuf,

    /// Worker threads for sweeps and Monte-Carlo samples
    #[arg(long, global = true, value_name = "N")]
    workers: Option<usize>,

    /// Run even if the rotating-wave check fails
    #[arg(long, global = true)]
    override_rwa: bool,

    /// Replace the config seed
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
}

#[derive(Subcommand, Clone, Copy)]
enum Sub {
    /// Dressed spectrum and coefficient curves
    Spectrum,
    /// Gate synthesis and fidelities
    Gate,
    /// Cavity state preparation
    Prep,
    /// Parameter sweep of a gate metric
    Sweep,
    /// Check a config and its rotating-wave validity
    Validate,
    /// List shipped presets
    Presets,
}

fn load(cli: &Cli) -> nhqc::Result<ExperimentConfig> {
    match (&cli.config, &cli.preset) {
        (Some(path), _) => ExperimentConfig::from_toml(&std::fs::read_to_string(path)?),
        (None, Some(name)) => preset(name),
        (None, None) => Err(nhqc::Error::Configuration("pass --config PATH or --preset NAME".into())),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command = match cli.command {
        Sub::Spectrum => Command::Spectrum,
        Sub::Gate => Command::Gate,
        Sub::Prep => Command::Prep,
        Sub::Sweep => Command::Sweep,
        Sub::Validate => Command::Validate,
        Sub::Presets => {
            for (name, _) in PRESETS {
                println!("{name}");
            }
            return ExitCode::SUCCESS;
        }
    };
    if let Some(n) = cli.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let result = load(&cli).and_then(|cfg| {
        let opts = RunOptions { out: cli.out.clone(), override_rwa: cli.override_rwa, seed: cli.seed };
        run(command, &cfg, &opts)
    });
    match result {
        Ok(summary) => {
            if let Some(r) = summary.rwa.as_ref().filter(|r| !r.pass) {
                eprintln!("warning: RWA check overridden (worst ratio {:.4})", r.worst_ratio);
            }
            for f in &summary.files {
                println!("{}", cli.out.join(f).display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
