//! Command-line front end for declarative adequacy experiments.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};

use adequacy_mlmc::experiment::{
    compare_runs, run_experiment, ExperimentConfig, ResultsRecord, RunOptions, DATA_DIR_ENV,
};

#[derive(Parser)]
#[command(name = "adequacy", version, about = "Monte Carlo and multilevel Monte Carlo adequacy experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write results.json, levels.csv and report.txt.
    Run {
        #[arg(short, long)]
        config: PathBuf,
        /// Overrides `controller.seed`.
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides `controller.workers`.
        #[arg(short, long)]
        workers: Option<usize>,
        #[arg(short, long, default_value = "results")]
        out: PathBuf,
        /// Directory that relative `data` paths resolve against.
        #[arg(long, env = DATA_DIR_ENV)]
        data_dir: Option<PathBuf>,
    },
    /// Tabulate results.json files against the first one.
    Compare {
        #[arg(required = true)]
        results: Vec<PathBuf>,
    },
    /// Check a configuration and the data it references without sampling.
    Validate {
        #[arg(short, long)]
        config: PathBuf,
        #[arg(long, env = DATA_DIR_ENV)]
        data_dir: Option<PathBuf>,
    },
}

fn options(data_dir: Option<PathBuf>, out: Option<PathBuf>) -> RunOptions {
    let mut o = RunOptions::default();
    if let Some(d) = data_dir {
        o.data_dir = d;
    }
    o.out_dir = out;
    o
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match dispatch(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(command: Command) -> anyhow::Result<()> {
    match command {
        Command::Run { config, seed, workers, out, data_dir } => {
            let mut cfg = ExperimentConfig::load(&config).with_context(|| format!("loading {}", config.display()))?;
            if let Some(s) = seed {
                cfg.controller.seed = s;
            }
            if let Some(w) = workers {
                cfg.controller.workers = w;
            }
            cfg.validate()?;
            let record = run_experiment(&cfg, &options(data_dir, Some(out.clone())))?;
            print!("{}", record.report());
            println!("\noutputs written to {}", out.display());
        }
        Command::Compare { results } => {
            let records = results
                .iter()
                .map(|p| ResultsRecord::load(p).with_context(|| format!("loading {}", p.display())))
                .collect::<anyhow::Result<Vec<_>>>()?;
            print!("{}", compare_runs(&records)?.render());
        }
        Command::Validate { config, data_dir } => {
            let cfg = ExperimentConfig::load(&config).with_context(|| format!("loading {}", config.display()))?;
            let opts = options(data_dir, None);
            let stack = adequacy_mlmc::experiment::build_stack(&cfg, &opts.data_dir)?;
            println!(
                "{}: ok ({} levels, measures {:?}, data {})",
                cfg.name,
                stack.num_levels(),
                cfg.measures(),
                cfg.data_path(&opts.data_dir).display()
            );
        }
    }
    Ok(())
}
