//! Adam training on the topologist's sine curve from sampled and random initialisations.

use ridgelet::experiments::{compare_run, ExperimentConfig, InitMethod};

pub fn run_example() -> ridgelet::Result<()> {
    let mut cfg = ExperimentConfig::default();
    cfg.train.runs = 3;
    cfg.train.steps = 300;
    cfg.train.eval_every = 100;
    for init in InitMethod::ALL {
        let cmp = compare_run(&cfg, init, None)?;
        let row: Vec<String> = cmp
            .aggregate
            .iter()
            .map(|r| format!("{}:{:.3}", r.step, r.train_mean))
            .collect();
        println!("{:>6}  {}", init.label(), row.join("  "));
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
