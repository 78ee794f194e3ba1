//! Output weights from importance sampling alone: no regression.

use ridgelet::experiments::{is_run, ExperimentConfig, Target};

pub fn run_example() -> ridgelet::Result<()> {
    let mut cfg = ExperimentConfig::default();
    for target in [Target::Sin, Target::Tsc] {
        cfg.target = target;
        let fit = is_run(&cfg, 3)?;
        println!(
            "{target:?}: pearson {:.3}, largest |c_j| {:.3e}",
            fit.curve.pearson(),
            fit.weights.iter().fold(0.0f64, |m, c| m.max(c.abs()))
        );
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
