//! Codebook classification on a small MNIST slice. Reads the IDX files from
//! `$RIDGELET_DATA_DIR/mnist` (default `data/mnist` under the workspace root).

use std::path::PathBuf;

use ridgelet::experiments::{
    compare_run, ExperimentConfig, InitMethod, MnistData, Task, DATA_DIR_ENV,
};

pub fn run_example() -> ridgelet::Result<()> {
    let mut cfg = ExperimentConfig::default();
    cfg.train.task = Task::Mnist;
    if std::env::var_os(DATA_DIR_ENV).is_none() {
        cfg.mnist.dir = Some(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/mnist"));
    }
    cfg.mnist.train_subset = 2000;
    cfg.mnist.test_subset = 500;
    cfg.mnist.steps = 100;
    cfg.mnist.eval_every = 50;
    cfg.mnist.runs = 1;
    let data = MnistData::load(&cfg)?;
    for init in InitMethod::ALL {
        let cmp = compare_run(&cfg, init, Some(&data))?;
        let row: Vec<String> = cmp
            .aggregate
            .iter()
            .map(|r| format!("{}:{:.3}", r.step, r.test_mean.unwrap_or(f64::NAN)))
            .collect();
        println!("{:>6}  test error  {}", init.label(), row.join("  "));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("error[{}]: {e}", e.category());
        std::process::exit(e.exit_code());
    }
}
