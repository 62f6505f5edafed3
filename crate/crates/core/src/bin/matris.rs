use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use matris::experiments::{run_scenario, write_outputs, write_trace, ExperimentConfig, Scenario};
use matris::Error;

#[derive(Parser)]
#[command(name = "matris", version, about = "MA + transmissive RIS experiment harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write `<scenario>.csv` and `<scenario>.meta.json`.
    Run {
        /// snr_vs_bits | snr_vs_power | nf_ff_sweep | single_run
        scenario: String,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Parse and validate a config file.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run one optimization from the config and dump its trace as JSON.
    Trace {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Config { .. } | Error::InvalidArgument(_) => 2,
        Error::SingularGeometry { .. } => 3,
        Error::Io(_) | Error::Serialization(_) => 1,
    }
}

fn run(cli: Cli) -> matris::Result<()> {
    match cli.command {
        Command::Run {
            scenario,
            config,
            out,
            seed,
            workers,
        } => {
            let mut cfg = ExperimentConfig::from_path(&config)?;
            cfg.scenario = scenario.parse::<Scenario>()?;
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            if let Some(workers) = workers {
                cfg.workers = workers;
            }
            if let Some(out) = out {
                cfg.output = out;
            }
            cfg.validate()?;
            let clock = Instant::now();
            let output = run_scenario(&cfg, cfg.scenario)?;
            let wall_ms = clock.elapsed().as_secs_f64() * 1e3;
            let files = write_outputs(&cfg.output, &cfg, &output, wall_ms)?;
            println!("{} rows -> {}", output.rows.len(), files.csv.display());
            Ok(())
        }
        Command::Validate { config } => {
            let cfg = ExperimentConfig::from_path(&config)?;
            println!("ok: scenario {}", cfg.scenario);
            Ok(())
        }
        Command::Trace { config, out } => {
            let cfg = ExperimentConfig::from_path(&config)?;
            let output = run_scenario(&cfg, Scenario::SingleRun)?;
            let trace = output
                .traces
                .first()
                .ok_or_else(|| Error::InvalidArgument("single run produced no trace".into()))?;
            write_trace(&out, trace)?;
            println!("{} iterations -> {}", trace.iterations.len(), out.display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
