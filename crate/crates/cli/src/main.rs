use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use frontier_bench::pipeline::{check_references, load_catalog, load_data};
use frontier_bench::{demo, execute, load_config, write_outputs, CliError, EXIT_OK};

/// Two-stage efficiency analysis: DEA scoring followed by OLS, Tobit and
/// truncated regressions with diagnostics and model selection.
#[derive(Parser)]
#[command(name = "frontier-bench", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute every analysis of a config and write the report.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; overrides the config's `output_dir`.
        #[arg(long, env = "FRONTIER_BENCH_OUT")]
        out: Option<PathBuf>,
        /// Seed for the truncated estimator's perturbed starts.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Check a config, its input files and variable references.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Write the synthetic 38-unit dataset, catalog and demo config.
    Demo {
        #[arg(long, default_value = "demo")]
        out: PathBuf,
    },
}

fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Run { config, out, seed } => {
            let cfg = load_config(&config)?;
            let outcome = execute(&cfg, seed)?;
            let dir = out.unwrap_or_else(|| cfg.output_dir());
            let written = write_outputs(&outcome, &dir)?;
            for f in &outcome.report.failures {
                eprintln!("failed: {} [{}]: {}", f.step, f.item, f.message);
            }
            eprintln!(
                "{} units, {} regressions, {} files written to {}",
                outcome.report.metadata.n,
                outcome.report.regressions.len(),
                written.len(),
                dir.display()
            );
            Ok(outcome.exit_code())
        }
        Command::Validate { config } => {
            let cfg = load_config(&config)?;
            let catalog = load_catalog(&cfg)?;
            let (ds, _) = load_data(&cfg, &catalog)?;
            check_references(&cfg, &ds)?;
            eprintln!("{}: ok ({} units)", config.display(), ds.n());
            Ok(EXIT_OK)
        }
        Command::Demo { out } => {
            let path = demo::write_demo(&out)?;
            eprintln!("demo config written to {}", path.display());
            Ok(EXIT_OK)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = run(cli).unwrap_or_else(|e| {
        eprintln!("error: {e}");
        e.exit_code()
    });
    ExitCode::from(code as u8)
}
