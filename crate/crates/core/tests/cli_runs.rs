use std::path::Path;
use std::process::Command;

use ridgelet::experiments::{
    cmd_is_reconstruct, cmd_lattice_reconstruct, cmd_sample_fit, cmd_train_compare,
    ExperimentConfig, InitMethod, RunManifest, Target, Task, DATA_DIR_ENV,
};
use ridgelet::mnist::{write_idx_images, write_idx_labels};
use ridgelet::sampling::Algorithm;
use tempfile::tempdir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ridgelet"))
}

fn read(path: &Path) -> Vec<u8> {
    std::fs::read(path).unwrap()
}

#[test]
fn sample_fit_is_byte_reproducible_and_manifested() {
    let dir = tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let cfg = ExperimentConfig {
        algorithm: InitMethod::Sampled(Algorithm::InterceptB),
        ..ExperimentConfig::default()
    };
    cmd_sample_fit(&cfg, &a).unwrap();
    cmd_sample_fit(&cfg, &b).unwrap();
    for f in [
        "sample_fit.csv",
        "params.csv",
        "output_weights.csv",
        "params.json",
    ] {
        assert_eq!(read(&a.join(f)), read(&b.join(f)), "{f}");
    }
    let m = RunManifest::read(&a).unwrap();
    assert_eq!(m.status, "ok");
    assert_eq!(m.command, "sample-fit");
    assert_eq!(m.config, cfg);
    assert!(m.outputs.len() >= 4);
    assert!(m.verify(&a).is_empty());
    std::fs::write(a.join("params.csv"), "tampered").unwrap();
    assert_eq!(m.verify(&a), vec!["params.csv".to_string()]);
}

#[test]
fn importance_run_is_reproducible() {
    let dir = tempdir().unwrap();
    let cfg = ExperimentConfig {
        target: Target::Sin,
        ..ExperimentConfig::default()
    };
    let f1 = cmd_is_reconstruct(&cfg, &dir.path().join("a")).unwrap();
    cmd_is_reconstruct(&cfg, &dir.path().join("b")).unwrap();
    assert_eq!(
        read(&dir.path().join("a/is_reconstruct.csv")),
        read(&dir.path().join("b/is_reconstruct.csv"))
    );
    assert!(f1.curve.pearson() > 0.9);
}

#[test]
fn zero_target_gives_zero_curves() {
    let dir = tempdir().unwrap();
    let cfg = ExperimentConfig {
        target: Target::Zero,
        ..ExperimentConfig::default()
    };
    let c = cmd_lattice_reconstruct(&cfg, dir.path()).unwrap();
    assert!(c.approx.iter().all(|&v| v == 0.0));
    let text = std::fs::read_to_string(dir.path().join("lattice_reconstruct.csv")).unwrap();
    assert!(
        text.lines().skip(1).all(|l| l.ends_with(",0")),
        "{}",
        &text[..200]
    );
    let f = cmd_is_reconstruct(&cfg, &dir.path().join("is")).unwrap();
    assert!(f.curve.approx.iter().all(|&v| v == 0.0));
}

#[test]
fn single_unit_fit_runs() {
    let dir = tempdir().unwrap();
    let cfg = ExperimentConfig {
        hidden: 1,
        ..ExperimentConfig::default()
    };
    let fit = cmd_sample_fit(&cfg, dir.path()).unwrap();
    assert_eq!(fit.hidden.len(), 1);
    assert!(fit.curve.rmse().is_finite());
}

#[test]
fn single_run_comparison_has_zero_spread() {
    let dir = tempdir().unwrap();
    let mut cfg = ExperimentConfig::default();
    cfg.train.runs = 1;
    cfg.train.steps = 20;
    let out = cmd_train_compare(&cfg, &[InitMethod::Random], dir.path()).unwrap();
    assert!(out[0].aggregate.iter().all(|r| r.train_std == 0.0));
    assert!(dir.path().join("history_random.csv").exists());
}

#[test]
fn comparison_csv_is_reproducible() {
    let dir = tempdir().unwrap();
    let mut cfg = ExperimentConfig::default();
    cfg.train.runs = 3;
    cfg.train.steps = 30;
    let inits = [
        InitMethod::Sampled(Algorithm::MagnitudeA),
        InitMethod::Random,
    ];
    cmd_train_compare(&cfg, &inits, &dir.path().join("a")).unwrap();
    cmd_train_compare(&cfg, &inits, &dir.path().join("b")).unwrap();
    for f in ["history_alg2.csv", "history_random.csv"] {
        assert_eq!(
            read(&dir.path().join("a").join(f)),
            read(&dir.path().join("b").join(f))
        );
    }
}

#[test]
fn failures_exit_nonzero_and_still_write_a_manifest() {
    let dir = tempdir().unwrap();
    let out = dir.path().join("fit");
    let status = bin()
        .args(["sample-fit", "--algorithm", "random", "--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&status.stderr).contains("error[invalid-argument]"));
    let m = RunManifest::read(&out).unwrap();
    assert_eq!(m.status, "error");
    assert_eq!(m.error.unwrap().category, "invalid-argument");
}

#[test]
fn bad_config_is_exit_two() {
    let dir = tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    std::fs::write(&cfg, "hidden = 0\n").unwrap();
    let out = bin()
        .args(["sample-fit", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error[config]"));
}

#[test]
fn missing_mnist_is_io_error_via_data_dir_env() {
    let dir = tempdir().unwrap();
    let out = bin()
        .args(["train-compare", "--task", "mnist", "--out"])
        .arg(dir.path().join("o"))
        .env(DATA_DIR_ENV, dir.path().join("nowhere"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("nowhere"), "{err}");
}

fn tiny_mnist(dir: &Path) {
    std::fs::create_dir_all(dir).unwrap();
    let n = 40;
    let labels: Vec<u8> = (0..n).map(|i| (i % 10) as u8).collect();
    let mut pixels = vec![0u8; n * 16];
    for (i, &l) in labels.iter().enumerate() {
        pixels[i * 16 + l as usize] = 255;
        pixels[i * 16 + 15] = (i * 6) as u8;
    }
    for (img, lab) in [
        ("train-images-idx3-ubyte.gz", "train-labels-idx1-ubyte.gz"),
        ("t10k-images-idx3-ubyte.gz", "t10k-labels-idx1-ubyte.gz"),
    ] {
        write_idx_images(&dir.join(img), 4, 4, &pixels).unwrap();
        write_idx_labels(&dir.join(lab), &labels).unwrap();
    }
}

#[test]
fn mnist_comparison_runs_from_data_dir_env() {
    let dir = tempdir().unwrap();
    tiny_mnist(&dir.path().join("mnist"));
    let cfg = dir.path().join("c.toml");
    std::fs::write(
        &cfg,
        "hidden = 20\n[mnist]\nsteps = 10\nruns = 2\nbatch = 8\neval_every = 5\n",
    )
    .unwrap();
    let out = bin()
        .args([
            "train-compare",
            "--task",
            "mnist",
            "--algorithm",
            "3",
            "--config",
        ])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path().join("o"))
        .env(DATA_DIR_ENV, dir.path())
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let m = RunManifest::read(&dir.path().join("o")).unwrap();
    assert_eq!(m.config.train.task, Task::Mnist);
    assert_eq!(m.seeds, vec![0, 1]);
    assert!(m.verify(&dir.path().join("o")).is_empty());
    let text = std::fs::read_to_string(dir.path().join("o/history_alg3.csv")).unwrap();
    assert_eq!(text.lines().count(), 1 + 3);
}

#[test]
fn check_subcommand_passes() {
    let dir = tempdir().unwrap();
    let out = bin()
        .args(["check", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(
        text.lines().filter(|l| l.starts_with("PASS")).count(),
        4,
        "{text}"
    );
}
