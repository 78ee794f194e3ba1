//! Samples 300 hidden units with each algorithm and fits the readout by ridge regression.

use ridgelet::experiments::{sample_fit_run, ExperimentConfig};
use ridgelet::sampling::Algorithm;

pub fn run_example() -> ridgelet::Result<()> {
    let cfg = ExperimentConfig::default();
    for algorithm in [
        Algorithm::Basic,
        Algorithm::MagnitudeA,
        Algorithm::InterceptB,
    ] {
        let fit = sample_fit_run(&cfg, algorithm, 7, cfg.lambda)?;
        let c = &fit.curve;
        println!(
            "algorithm {algorithm}: rmse {:.4}, |x| >= 0.2 {:.4}, |x| <= 0.2 {:.4}",
            c.rmse(),
            c.rmse_where(|x| x.abs() >= 0.2),
            c.rmse_where(|x| x.abs() <= 0.2)
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
