use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use maxaffine::experiments::{self, fit_dataset, params_table};
use maxaffine::{Dataset, Result};

/// Max-affine regression: fit user data or run the simulation studies.
#[derive(Parser)]
#[command(name = "maxaffine", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write `<out>/<name>.csv`.
    Run {
        experiment: String,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Fit a max-affine model to a CSV with header `x1..xd,y`.
    Fit {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long = "T", default_value_t = 50)]
        iterations: usize,
        #[arg(long = "M", default_value_t = 100)]
        candidates: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// List the experiments.
    List,
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { experiment, config, out, seed, threads } => {
            if let Some(n) = threads {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global()
                    .map_err(|e| maxaffine::Error::Config(format!("thread pool: {e}")))?;
            }
            let exp = experiments::find(&experiment)?;
            let mut cfg = exp.defaults();
            if let Some(path) = config {
                cfg.apply_file(path)?;
            }
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let path = exp.run(&cfg)?.write_to_dir(&out)?;
            println!("{}", path.display());
        }
        Command::Fit { data, k, iterations, candidates, seed, out } => {
            let data = Dataset::load_csv(&data)?;
            let ps = fit_dataset(&data, k, iterations, candidates, seed)?;
            std::fs::write(&out, params_table("fit", &ps)?.to_csv())?;
        }
        Command::List => {
            for e in experiments::registry() {
                println!("{:<18} {}", e.name, e.summary);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("maxaffine: {e}");
            ExitCode::FAILURE
        }
    }
}
