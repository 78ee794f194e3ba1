//! Numeric admissibility constant of the Gaussian activation and its dual profile.

use ridgelet::admissibility::{admissibility_integral, ActivationPair, QuadratureSettings};

pub fn run_example() -> ridgelet::Result<f64> {
    let pair = ActivationPair::gaussian();
    let quad = QuadratureSettings::default();
    let est = admissibility_integral(&pair, 1, &quad)?;
    println!("K = {:.8} (imaginary part {:.2e})", est.re, est.im);
    println!(
        "|psi_hat(xi_min)| / peak = {:.2e}",
        est.psi_hat_zero / est.psi_hat_peak
    );
    Ok(est.re)
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("error[{}]: {e}", e.category());
        std::process::exit(e.exit_code());
    }
}
