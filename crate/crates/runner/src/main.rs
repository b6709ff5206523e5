use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use burgers3d_runner::reanalysis::reanalyze;
use burgers3d_runner::{run_experiment, validate_config, ExperimentRegistry, RunOptions};
use clap::{Parser, Subcommand};

/// Verification harness for the 3D viscous Burgers equations.
#[derive(Parser)]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Worker threads for sweeps and transforms (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a spec file.
    Run {
        spec: PathBuf,
        /// Master seed, overriding the spec.
        #[arg(long)]
        seed: Option<u64>,
        /// Artifact directory, overriding the spec (default: out/<experiment>).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Fail ratio-mode checks whose ratio exceeds `strict_threshold`.
        #[arg(long)]
        strict: bool,
    },
    /// Resolve a spec file and print it with every default filled in.
    Validate { spec: PathBuf },
    /// Recheck the stored trajectories of an artifact directory.
    Report { dir: PathBuf },
    /// List the available experiments.
    List,
}

fn main() -> Result<ExitCode> {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("configuring the thread pool")?;
    }
    match cli.command {
        Command::Run { spec, seed, out, strict } => run(&spec, seed, out, strict),
        Command::Validate { spec } => {
            let resolved = validate_config(&spec)?;
            print!("{}", resolved.to_toml());
            Ok(ExitCode::SUCCESS)
        }
        Command::Report { dir } => {
            let reports = reanalyze(&dir)?;
            let mut failed = false;
            for r in &reports {
                println!("{:<24} {:<28} {:?} (max ratio {:.4e})", r.member, r.report.name, r.report.verdict, r.report.max_ratio);
                failed |= r.report.is_failure();
            }
            Ok(if failed { ExitCode::FAILURE } else { ExitCode::SUCCESS })
        }
        Command::List => {
            for e in ExperimentRegistry::builtin().iter() {
                println!("{:<22} {}", e.name(), e.description());
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn run(spec_path: &Path, seed: Option<u64>, out: Option<PathBuf>, strict: bool) -> Result<ExitCode> {
    let mut spec = validate_config(spec_path)?;
    if let Some(s) = seed {
        spec.seed = s;
    }
    let root = out.or_else(|| spec.out.clone()).unwrap_or_else(|| Path::new("out").join(&spec.experiment));
    spec.out = Some(root.clone());
    let outcome = run_experiment(&spec, &root, &ExperimentRegistry::builtin(), RunOptions { strict })
        .with_context(|| format!("running {}", spec.experiment))?;
    print!("{}", std::fs::read_to_string(root.join("summary.txt"))?);
    Ok(if outcome.exit_code() == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}
