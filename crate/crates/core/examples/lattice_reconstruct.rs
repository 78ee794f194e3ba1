//! Reconstructs sin(pi x) and the topologist's sine curve from their ridgelet transforms
//! on the coarse (a, b) lattice. Pass `--paper-grids` for the full lattice (a few minutes).

use ridgelet::experiments::{lattice_run, ExperimentConfig, Target};

pub fn run_example() -> ridgelet::Result<()> {
    let mut cfg = ExperimentConfig::default();
    cfg.lattice.paper_grids = std::env::args().any(|a| a == "--paper-grids");
    for target in [Target::SinPi, Target::Tsc] {
        cfg.target = target;
        let curve = lattice_run(&cfg)?;
        let outer = |x: f64| x.abs() >= 0.2;
        println!(
            "{target:?}: rmse {:.4}, rmse on |x| >= 0.2 {:.4} (zero predictor {:.4})",
            curve.rmse(),
            curve.rmse_where(outer),
            curve.zero_rmse_where(outer)
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
