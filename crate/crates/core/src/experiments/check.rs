//! Quick numeric self-tests: admissibility constant, special-function identities and a
//! finite-difference gradient check.

use std::path::Path;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::manifest::run_recorded;
use crate::admissibility::{admissibility_constant, ActivationPair, QuadratureSettings};
use crate::error::{Error, Result};
use crate::network::{loss_and_grads, random_init, Loss, ShallowNet};
use crate::special::{dawson, psi};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn result(name: &str, passed: bool, detail: String) -> CheckResult {
    CheckResult {
        name: name.into(),
        passed,
        detail,
    }
}

fn check_k() -> Result<CheckResult> {
    let k = admissibility_constant(
        &ActivationPair::gaussian(),
        1,
        &QuadratureSettings::default(),
    )?;
    Ok(result(
        "admissibility-constant",
        (k - 1.0).abs() < 0.02,
        format!("K = {k:.8}"),
    ))
}

fn check_dawson() -> Result<CheckResult> {
    let mut worst: f64 = 0.0;
    for x in [0.1, 0.5, 0.92414, 2.0, 5.9, 6.1, 20.0] {
        worst = worst.max((dawson(-x)? + dawson(x)?).abs());
    }
    // F(x) ~ 1/(2x) for large x
    let tail = (2.0 * 1e4 * dawson(1e4)? - 1.0).abs();
    Ok(result(
        "dawson-odd-asymptote",
        worst == 0.0 && tail < 1e-8,
        format!("max |F(x)+F(-x)| = {worst:e}, |2xF(x)-1| at 1e4 = {tail:e}"),
    ))
}

fn check_psi() -> Result<CheckResult> {
    let mut worst: f64 = 0.0;
    for x in [0.3, 1.0, 2.5, 7.0, 12.0] {
        worst = worst.max((psi(x)? - psi(-x)?).abs());
    }
    let step = 1e-3;
    let n = (120.0 / step) as usize;
    let mean: f64 = (0..n)
        .map(|i| psi(-60.0 + i as f64 * step).unwrap_or(f64::NAN))
        .sum::<f64>()
        * step;
    Ok(result(
        "psi-even-zero-mean",
        worst == 0.0 && mean.abs() < 1e-3,
        format!("max |psi(x)-psi(-x)| = {worst:e}, integral over [-60, 60] = {mean:e}"),
    ))
}

fn perturbed(net: &ShallowNet, block: usize, i: usize, h: f64) -> ShallowNet {
    let mut n = net.clone();
    match block {
        0 => n.a.as_mut_slice()[i] += h,
        1 => n.b.as_mut_slice()[i] += h,
        2 => n.c.as_mut_slice()[i] += h,
        _ => n.c0.as_mut_slice()[i] += h,
    }
    n
}

/// Largest relative gap between analytic and central-difference gradients.
fn gradient_gap(loss: Loss) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let net = random_init(3, 2, 2, &mut rng)?;
    let xs = DMatrix::from_fn(4, 2, |_, _| rng.random_range(-1.0..1.0));
    let ys = match loss {
        Loss::Mse => DMatrix::from_fn(4, 2, |_, _| rng.random_range(-1.0..1.0)),
        Loss::CrossEntropy => DMatrix::from_fn(4, 2, |_, _| f64::from(rng.random::<bool>())),
    };
    let (_, g) = loss_and_grads(&net, &xs, &ys, loss)?;
    let blocks = [
        g.a.as_slice(),
        g.b.as_slice(),
        g.c.as_slice(),
        g.c0.as_slice(),
    ];
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    for (block, grad) in blocks.iter().enumerate() {
        for (i, &analytic) in grad.iter().enumerate() {
            let up = loss_and_grads(&perturbed(&net, block, i, h), &xs, &ys, loss)?.0;
            let down = loss_and_grads(&perturbed(&net, block, i, -h), &xs, &ys, loss)?.0;
            let fd = (up - down) / (2.0 * h);
            let scale = analytic.abs().max(fd.abs()).max(1e-6);
            worst = worst.max((analytic - fd).abs() / scale);
        }
    }
    Ok(worst)
}

fn check_gradients() -> Result<CheckResult> {
    let mse = gradient_gap(Loss::Mse)?;
    let ce = gradient_gap(Loss::CrossEntropy)?;
    Ok(result(
        "gradient-finite-difference",
        mse < 1e-5 && ce < 1e-5,
        format!("max relative gap: mse {mse:e}, cross-entropy {ce:e}"),
    ))
}

/// Runs every self-test; an error inside one test is reported as a failure of that test.
pub fn self_check() -> Vec<CheckResult> {
    type Check = fn() -> Result<CheckResult>;
    let checks: [(&str, Check); 4] = [
        ("admissibility-constant", check_k),
        ("dawson-odd-asymptote", check_dawson),
        ("psi-even-zero-mean", check_psi),
        ("gradient-finite-difference", check_gradients),
    ];
    checks
        .iter()
        .map(|(name, f)| f().unwrap_or_else(|e| result(name, false, e.to_string())))
        .collect()
}

/// Writes `check.csv` with one row per self-test.
pub fn cmd_check(cfg: &ExperimentConfig, out: &Path) -> Result<Vec<CheckResult>> {
    run_recorded("check", cfg, vec![], out, |out| {
        let results = self_check();
        let path = out.join("check.csv");
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(["name", "passed", "detail"])?;
        for r in &results {
            w.write_record([
                r.name.as_str(),
                if r.passed { "true" } else { "false" },
                r.detail.as_str(),
            ])?;
        }
        w.flush().map_err(|e| Error::io(&path, e))?;
        Ok((results, vec![path]))
    })
}
