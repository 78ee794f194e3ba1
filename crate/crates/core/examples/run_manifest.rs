//! Recorded runs: CSV outputs plus a manifest with config, seeds and SHA-256 digests.

use ridgelet::experiments::{cmd_sample_fit, ExperimentConfig, RunManifest};

pub fn run_example() -> ridgelet::Result<()> {
    let out = std::env::temp_dir().join("ridgelet-example-manifest");
    let cfg = ExperimentConfig::from_toml("seed = 5\nalgorithm = \"3\"\nhidden = 100\n")?;
    cmd_sample_fit(&cfg, &out)?;
    let manifest = RunManifest::read(&out)?;
    for o in &manifest.outputs {
        println!("{:<20} {} ({} bytes)", o.file, &o.sha256[..16], o.bytes);
    }
    println!("changed since written: {:?}", manifest.verify(&out));
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("error[{}]: {e}", e.category());
        std::process::exit(e.exit_code());
    }
}
