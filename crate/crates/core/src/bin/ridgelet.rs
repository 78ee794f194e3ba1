use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ridgelet::experiments::{
    cmd_check, cmd_is_reconstruct, cmd_lattice_reconstruct, cmd_sample_fit, cmd_train_compare,
    AggregateRecord, ExperimentConfig, InitMethod, Task,
};
use ridgelet::{Error, Result};

#[derive(Parser)]
#[command(
    name = "ridgelet",
    version,
    about = "Ridgelet-based parameter sampling experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// TOML config; missing keys take the reference defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory (default: out/<command>).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Sampling algorithm or `random` (1, 2, 3, random).
    #[arg(long, global = true)]
    algorithm: Option<InitMethod>,
    /// Use the full (a, b) lattice instead of the coarse one.
    #[arg(long, global = true)]
    paper_grids: bool,
    /// Directory with the MNIST IDX files (default: $RIDGELET_DATA_DIR/mnist).
    #[arg(long, global = true)]
    mnist_dir: Option<PathBuf>,
    /// Leading MNIST training examples to use; 0 means all.
    #[arg(long, global = true)]
    subset: Option<usize>,
    /// Also write gnuplot scripts.
    #[arg(long, global = true)]
    plot: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Reconstruct the target from its lattice ridgelet transform.
    LatticeReconstruct,
    /// Sample hidden units and fit the readout by ridge regression.
    SampleFit,
    /// Regression-free reconstruction by importance sampling.
    IsReconstruct,
    /// Train networks from each initialisation and aggregate their histories.
    TrainCompare {
        #[arg(long, default_value = "tsc")]
        task: Task,
    },
    /// Numeric self-tests.
    Check,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::LatticeReconstruct => "lattice-reconstruct",
            Command::SampleFit => "sample-fit",
            Command::IsReconstruct => "is-reconstruct",
            Command::TrainCompare { .. } => "train-compare",
            Command::Check => "check",
        }
    }
}

fn run(cli: &Cli) -> Result<()> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(a) = cli.algorithm {
        cfg.algorithm = a;
    }
    cfg.lattice.paper_grids |= cli.paper_grids;
    cfg.plot_script |= cli.plot;
    if let Some(dir) = &cli.mnist_dir {
        cfg.mnist.dir = Some(dir.clone());
    }
    if let Some(n) = cli.subset {
        cfg.mnist.train_subset = n;
    }
    cfg.validate()?;
    let out = cli
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from("out").join(cli.command.name()));
    match &cli.command {
        Command::LatticeReconstruct => {
            let c = cmd_lattice_reconstruct(&cfg, &out)?;
            println!("rmse {:.6}", c.rmse());
        }
        Command::SampleFit => {
            let f = cmd_sample_fit(&cfg, &out)?;
            println!("rmse {:.6}", f.curve.rmse());
        }
        Command::IsReconstruct => {
            let f = cmd_is_reconstruct(&cfg, &out)?;
            println!("pearson {:.6}", f.curve.pearson());
        }
        Command::TrainCompare { task } => {
            cfg.train.task = *task;
            let inits = if cli.algorithm.is_some() {
                vec![cfg.algorithm]
            } else {
                vec![]
            };
            for c in cmd_train_compare(&cfg, &inits, &out)? {
                let (first, last) = (c.aggregate[0], c.aggregate[c.aggregate.len() - 1]);
                let pick = |r: AggregateRecord| r.test_mean.unwrap_or(r.train_mean);
                println!(
                    "{:>6}  step 0 {:.4}  step {} {:.4}",
                    c.init.label(),
                    pick(first),
                    last.step,
                    pick(last)
                );
            }
        }
        Command::Check => {
            let results = cmd_check(&cfg, &out)?;
            for r in &results {
                println!(
                    "{} {}: {}",
                    if r.passed { "PASS" } else { "FAIL" },
                    r.name,
                    r.detail
                );
            }
            if let Some(bad) = results.iter().find(|r| !r.passed) {
                return Err(Error::NumericalOverflow(format!(
                    "self-test {} failed",
                    bad.name
                )));
            }
        }
    }
    println!("wrote {}", out.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.category());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
