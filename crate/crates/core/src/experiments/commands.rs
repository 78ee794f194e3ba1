//! The experiment drivers. Each `*_run` function is pure (returns its results); each `cmd_*`
//! wraps one in a recorded run that writes CSV files and a manifest into an output directory.

use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, InitMethod, Task};
use super::manifest::run_recorded;
use crate::datasets::{codebook_targets, equidistant_dataset, LabeledDataset};
use crate::error::{Error, Result};
use crate::importance::{
    is_output_weights, is_reconstruct, sample_proposal, GaussianProposal, InputDensity,
};
use crate::lattice::reconstruct_lattice;
use crate::mnist::{load_mnist_dir, MnistSet};
use crate::network::{
    random_init, train_monitored, History, LabelCodebook, Loss, Metric, ShallowNet, TrainConfig,
};
use crate::regression::{design_matrix, ridge_fit, RidgeSolution};
use crate::sampling::{sample_hidden, write_params_csv, write_sidecar, Algorithm, HiddenParam};

/// A one-dimensional approximation evaluated at the dataset inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub xs: Vec<f64>,
    pub truth: Vec<f64>,
    pub approx: Vec<f64>,
}

impl Curve {
    fn rms(values: impl Iterator<Item = f64>) -> f64 {
        let (mut sum, mut n) = (0.0, 0usize);
        for v in values {
            sum += v * v;
            n += 1;
        }
        if n == 0 {
            f64::NAN
        } else {
            (sum / n as f64).sqrt()
        }
    }

    pub fn rmse(&self) -> f64 {
        self.rmse_where(|_| true)
    }

    /// RMSE over the points whose input satisfies `keep`.
    pub fn rmse_where(&self, keep: impl Fn(f64) -> bool) -> f64 {
        Self::rms(
            self.xs
                .iter()
                .zip(self.truth.iter().zip(&self.approx))
                .filter(|(x, _)| keep(**x))
                .map(|(_, (t, a))| t - a),
        )
    }

    /// RMSE of the all-zero predictor over the same points.
    pub fn zero_rmse_where(&self, keep: impl Fn(f64) -> bool) -> f64 {
        Self::rms(
            self.xs
                .iter()
                .zip(&self.truth)
                .filter(|(x, _)| keep(**x))
                .map(|(_, t)| *t),
        )
    }

    /// Pearson correlation between truth and approximation.
    pub fn pearson(&self) -> f64 {
        let n = self.xs.len() as f64;
        let mt = self.truth.iter().sum::<f64>() / n;
        let ma = self.approx.iter().sum::<f64>() / n;
        let (mut sta, mut stt, mut saa) = (0.0, 0.0, 0.0);
        for (t, a) in self.truth.iter().zip(&self.approx) {
            sta += (t - mt) * (a - ma);
            stt += (t - mt) * (t - mt);
            saa += (a - ma) * (a - ma);
        }
        sta / (stt * saa).sqrt()
    }

    pub fn write_csv(&self, path: &Path, approx_name: &str) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["x", "f_true", approx_name])?;
        for i in 0..self.xs.len() {
            w.write_record([
                self.xs[i].to_string(),
                self.truth[i].to_string(),
                self.approx[i].to_string(),
            ])?;
        }
        w.flush().map_err(|e| Error::io(path, e))?;
        Ok(())
    }
}

fn target_dataset(cfg: &ExperimentConfig) -> Result<LabeledDataset> {
    let [lo, hi] = cfg.interval;
    let target = cfg.target;
    equidistant_dataset(move |x| target.eval(x), cfg.points, lo, hi)
}

fn write_plot(path: &Path, csv: &str, title: &str) -> Result<PathBuf> {
    let script = format!(
        "set datafile separator ','\nset key autotitle columnhead\nset title '{title}'\n\
         plot '{csv}' using 1:2 with lines, '' using 1:3 with points pt 7 ps 0.5\n"
    );
    std::fs::write(path, script).map_err(|e| Error::io(path, e))?;
    Ok(path.to_path_buf())
}

fn curve_outputs(
    cfg: &ExperimentConfig,
    out: &Path,
    curve: &Curve,
    stem: &str,
    column: &str,
) -> Result<Vec<PathBuf>> {
    let csv = out.join(format!("{stem}.csv"));
    curve.write_csv(&csv, column)?;
    let mut files = vec![csv];
    if cfg.plot_script {
        files.push(write_plot(
            &out.join(format!("{stem}.gp")),
            &format!("{stem}.csv"),
            stem,
        )?);
    }
    Ok(files)
}

/// Lattice reconstruction of the target at the dataset inputs.
pub fn lattice_run(cfg: &ExperimentConfig) -> Result<Curve> {
    let ds = target_dataset(cfg)?;
    let grid = cfg.lattice.grid();
    let f_values = grid.tabulate(|x| cfg.target.eval(x));
    let xs: Vec<f64> = ds.inputs().iter().copied().collect();
    let queries: Vec<Vec<f64>> = xs.iter().map(|&x| vec![x]).collect();
    let approx = reconstruct_lattice(&f_values, &grid, &queries, cfg.lattice.k)?;
    Ok(Curve {
        truth: ds.targets().iter().copied().collect(),
        xs,
        approx,
    })
}

pub fn cmd_lattice_reconstruct(cfg: &ExperimentConfig, out: &Path) -> Result<Curve> {
    run_recorded("lattice-reconstruct", cfg, vec![], out, |out| {
        let curve = lattice_run(cfg)?;
        let files = curve_outputs(cfg, out, &curve, "lattice_reconstruct", "f_reconstructed")?;
        Ok((curve, files))
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleFit {
    pub curve: Curve,
    pub hidden: Vec<HiddenParam>,
    pub solution: RidgeSolution,
}

/// Samples `cfg.hidden` units with `algorithm`, fits the readout by ridge regression with
/// `lambda`, and evaluates the fit at the training inputs.
pub fn sample_fit_run(
    cfg: &ExperimentConfig,
    algorithm: Algorithm,
    seed: u64,
    lambda: f64,
) -> Result<SampleFit> {
    let ds = target_dataset(cfg)?;
    let hidden = sample_hidden(&ds, &cfg.sampler(algorithm, seed))?;
    let d = design_matrix(&hidden, ds.inputs())?;
    let solution = ridge_fit(&d, ds.targets(), lambda)?;
    let fitted = solution.predict(&d);
    Ok(SampleFit {
        curve: Curve {
            xs: ds.inputs().iter().copied().collect(),
            truth: ds.targets().iter().copied().collect(),
            approx: fitted.iter().copied().collect(),
        },
        hidden,
        solution,
    })
}

fn sampled_algorithm(cfg: &ExperimentConfig) -> Result<Algorithm> {
    match cfg.algorithm {
        InitMethod::Sampled(a) => Ok(a),
        InitMethod::Random => Err(Error::InvalidArgument(
            "this command needs a sampling algorithm (1, 2 or 3)".into(),
        )),
    }
}

pub fn cmd_sample_fit(cfg: &ExperimentConfig, out: &Path) -> Result<SampleFit> {
    run_recorded("sample-fit", cfg, vec![cfg.seed], out, |out| {
        let algorithm = sampled_algorithm(cfg)?;
        let fit = sample_fit_run(cfg, algorithm, cfg.seed, cfg.lambda)?;
        let mut files = curve_outputs(cfg, out, &fit.curve, "sample_fit", "f_fit")?;
        let params = out.join("params.csv");
        write_params_csv(&params, &fit.hidden)?;
        let sidecar = out.join("params.json");
        write_sidecar(&sidecar, &cfg.sampler(algorithm, cfg.seed), 1)?;
        let coef = out.join("output_weights.csv");
        write_output_weights(&coef, &fit.solution)?;
        files.extend([params, sidecar, coef]);
        Ok((fit, files))
    })
}

fn write_output_weights(path: &Path, sol: &RidgeSolution) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let k = sol.c.ncols();
    let mut header = vec!["index".to_string()];
    header.extend((1..=k).map(|i| format!("c_{i}")));
    w.write_record(&header)?;
    for j in 0..sol.c.nrows() {
        let mut row = vec![j.to_string()];
        row.extend(sol.c.row(j).iter().map(|v| v.to_string()));
        w.write_record(&row)?;
    }
    let mut row = vec!["intercept".to_string()];
    row.extend(sol.c0.iter().map(|v| v.to_string()));
    w.write_record(&row)?;
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImportanceFit {
    pub curve: Curve,
    pub hidden: Vec<HiddenParam>,
    pub weights: Vec<f64>,
}

/// Draws units from the Gaussian proposal and sets the output weights by importance
/// sampling, with no regression. The input density is uniform on the interval.
pub fn is_run(cfg: &ExperimentConfig, seed: u64) -> Result<ImportanceFit> {
    let ds = target_dataset(cfg)?;
    let [lo, hi] = cfg.interval;
    let rho1 = InputDensity::uniform(lo, hi, 1);
    let proposal = GaussianProposal::isotropic_variance(1, cfg.importance.proposal_variance)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let hidden = sample_proposal(&proposal, cfg.hidden, &mut rng);
    let weights = is_output_weights(&hidden, &ds, &rho1, &proposal, cfg.importance.k)?;
    let xs: Vec<f64> = ds.inputs().iter().copied().collect();
    let queries: Vec<Vec<f64>> = xs.iter().map(|&x| vec![x]).collect();
    let approx = is_reconstruct(&hidden, &weights, &queries)?;
    Ok(ImportanceFit {
        curve: Curve {
            truth: ds.targets().iter().copied().collect(),
            xs,
            approx,
        },
        hidden,
        weights,
    })
}

pub fn cmd_is_reconstruct(cfg: &ExperimentConfig, out: &Path) -> Result<ImportanceFit> {
    run_recorded("is-reconstruct", cfg, vec![cfg.seed], out, |out| {
        let fit = is_run(cfg, cfg.seed)?;
        let mut files = curve_outputs(cfg, out, &fit.curve, "is_reconstruct", "f_is")?;
        let params = out.join("params.csv");
        write_params_csv(&params, &fit.hidden)?;
        files.push(params);
        Ok((fit, files))
    })
}

/// MNIST training data with codebook targets.
#[derive(Debug, Clone)]
pub struct MnistData {
    pub train: LabeledDataset,
    pub test: LabeledDataset,
    /// Leading training examples scored for the train-error column.
    pub monitor: LabeledDataset,
    pub codebook: LabelCodebook,
}

fn subset(n: usize) -> Option<usize> {
    (n > 0).then_some(n)
}

fn to_dataset(set: &MnistSet, codebook: &LabelCodebook) -> Result<LabeledDataset> {
    LabeledDataset::new(set.images.clone(), codebook_targets(&set.labels, codebook)?)
}

impl MnistData {
    pub fn load(cfg: &ExperimentConfig) -> Result<Self> {
        let (train, test) = load_mnist_dir(&cfg.mnist.resolved_dir())?;
        Self::from_sets(cfg, train, test)
    }

    pub fn from_sets(cfg: &ExperimentConfig, train: MnistSet, test: MnistSet) -> Result<Self> {
        let m = &cfg.mnist;
        let train = train.truncate(subset(m.train_subset));
        let test = test.truncate(subset(m.test_subset));
        let codebook = LabelCodebook::generate(m.codebook_seed)?;
        let train = to_dataset(&train, &codebook)?;
        let monitor = match subset(m.eval_train_subset) {
            Some(n) if n < train.len() => train.select(&(0..n).collect::<Vec<_>>()),
            _ => train.clone(),
        };
        Ok(Self {
            test: to_dataset(&test, &codebook)?,
            train,
            monitor,
            codebook,
        })
    }
}

fn sampled_net(
    ds: &LabeledDataset,
    cfg: &ExperimentConfig,
    algorithm: Algorithm,
    seed: u64,
    lambda: f64,
) -> Result<ShallowNet> {
    let hidden = sample_hidden(ds, &cfg.sampler(algorithm, seed))?;
    let d = design_matrix(&hidden, ds.inputs())?;
    let sol = ridge_fit(&d, ds.targets(), lambda)?;
    ShallowNet::from_solution(&hidden, &sol)
}

/// Initial network for one training run.
pub fn initial_net(
    cfg: &ExperimentConfig,
    task: Task,
    init: InitMethod,
    ds: &LabeledDataset,
    seed: u64,
) -> Result<ShallowNet> {
    match init {
        InitMethod::Random => random_init(
            cfg.hidden,
            ds.input_dim(),
            ds.output_dim(),
            &mut ChaCha8Rng::seed_from_u64(seed),
        ),
        InitMethod::Sampled(a) => {
            let lambda = match (task, a) {
                (Task::Mnist, Algorithm::Basic) => cfg.mnist.lambda_alg1,
                _ => cfg.lambda,
            };
            sampled_net(ds, cfg, a, seed, lambda)
        }
    }
}

/// One TSC (or other 1-D target) training run: full-batch MSE.
pub fn train_tsc_run(cfg: &ExperimentConfig, init: InitMethod, seed: u64) -> Result<History> {
    let ds = target_dataset(cfg)?;
    let mut net = initial_net(cfg, Task::Tsc, init, &ds, seed)?;
    let tc = TrainConfig {
        loss: Loss::Mse,
        lr: cfg.train.lr,
        steps: cfg.train.steps,
        batch: None,
        seed,
        eval_every: cfg.train.eval_every,
    };
    train_monitored(&mut net, &ds, &ds, None, &tc, &Metric::Rmse)
}

/// One MNIST training run: mini-batch cross-entropy against the codebook targets.
pub fn train_mnist_run(
    cfg: &ExperimentConfig,
    init: InitMethod,
    seed: u64,
    data: &MnistData,
) -> Result<History> {
    let mut net = initial_net(cfg, Task::Mnist, init, &data.train, seed)?;
    let tc = TrainConfig {
        loss: Loss::CrossEntropy,
        lr: cfg.train.lr,
        steps: cfg.mnist.steps,
        batch: Some(cfg.mnist.batch),
        seed,
        eval_every: cfg.mnist.eval_every,
    };
    let metric = Metric::CodebookErrorRate(data.codebook.clone());
    train_monitored(
        &mut net,
        &data.train,
        &data.monitor,
        Some(&data.test),
        &tc,
        &metric,
    )
}

/// Mean and population standard deviation across runs at one recorded step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AggregateRecord {
    pub step: usize,
    pub train_mean: f64,
    pub train_std: f64,
    pub test_mean: Option<f64>,
    pub test_std: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub init: InitMethod,
    pub seeds: Vec<u64>,
    pub runs: Vec<History>,
    pub aggregate: Vec<AggregateRecord>,
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

pub fn aggregate(runs: &[History]) -> Result<Vec<AggregateRecord>> {
    let first = runs
        .first()
        .ok_or_else(|| Error::InvalidArgument("no runs to aggregate".into()))?;
    if runs.iter().any(|h| h.records.len() != first.records.len()) {
        return Err(Error::Dimension(
            "runs recorded different numbers of steps".into(),
        ));
    }
    Ok((0..first.records.len())
        .map(|i| {
            let train: Vec<f64> = runs.iter().map(|h| h.records[i].train).collect();
            let test: Option<Vec<f64>> = runs.iter().map(|h| h.records[i].test).collect();
            let (train_mean, train_std) = mean_std(&train);
            let test = test.map(|t| mean_std(&t));
            AggregateRecord {
                step: first.records[i].step,
                train_mean,
                train_std,
                test_mean: test.map(|t| t.0),
                test_std: test.map(|t| t.1),
            }
        })
        .collect())
}

pub fn write_aggregate_csv(path: &Path, records: &[AggregateRecord]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["step", "train_mean", "train_std", "test_mean", "test_std"])?;
    let opt = |v: Option<f64>| v.map(|v| v.to_string()).unwrap_or_default();
    for r in records {
        w.write_record([
            r.step.to_string(),
            r.train_mean.to_string(),
            r.train_std.to_string(),
            opt(r.test_mean),
            opt(r.test_std),
        ])?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

/// `runs` independent trainings from `init`, run `r` seeded with `cfg.seed + r`.
pub fn compare_run(
    cfg: &ExperimentConfig,
    init: InitMethod,
    data: Option<&MnistData>,
) -> Result<Comparison> {
    let runs = match cfg.train.task {
        Task::Tsc => cfg.train.runs,
        Task::Mnist => cfg.mnist.runs,
    };
    let seeds: Vec<u64> = (0..runs as u64).map(|r| cfg.seed + r).collect();
    let histories = seeds
        .par_iter()
        .map(|&seed| match (cfg.train.task, data) {
            (Task::Tsc, _) => train_tsc_run(cfg, init, seed),
            (Task::Mnist, Some(d)) => train_mnist_run(cfg, init, seed, d),
            (Task::Mnist, None) => Err(Error::InvalidArgument(
                "MNIST comparison needs loaded data".into(),
            )),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Comparison {
        init,
        aggregate: aggregate(&histories)?,
        seeds,
        runs: histories,
    })
}

/// Compares the given initialisations (all four when `inits` is empty), writing one
/// `history_<init>.csv` per initialisation.
pub fn cmd_train_compare(
    cfg: &ExperimentConfig,
    inits: &[InitMethod],
    out: &Path,
) -> Result<Vec<Comparison>> {
    let inits = if inits.is_empty() {
        &InitMethod::ALL[..]
    } else {
        inits
    };
    let runs = match cfg.train.task {
        Task::Tsc => cfg.train.runs,
        Task::Mnist => cfg.mnist.runs,
    };
    let seeds = (0..runs as u64).map(|r| cfg.seed + r).collect();
    run_recorded("train-compare", cfg, seeds, out, |out| {
        let data = match cfg.train.task {
            Task::Mnist => Some(MnistData::load(cfg)?),
            Task::Tsc => None,
        };
        let mut files = Vec::new();
        let mut results = Vec::new();
        for &init in inits {
            let cmp = compare_run(cfg, init, data.as_ref())?;
            let path = out.join(format!("history_{}.csv", init.label()));
            write_aggregate_csv(&path, &cmp.aggregate)?;
            files.push(path);
            results.push(cmp);
        }
        if cfg.plot_script {
            let path = out.join("history.gp");
            let mut script =
                String::from("set datafile separator ','\nset key autotitle columnhead\nplot ");
            let lines: Vec<String> = inits
                .iter()
                .map(|i| {
                    format!(
                        "'history_{}.csv' using 1:2 with lines title '{}'",
                        i.label(),
                        i.label()
                    )
                })
                .collect();
            script.push_str(&lines.join(", "));
            script.push('\n');
            std::fs::write(&path, script).map_err(|e| Error::io(&path, e))?;
            files.push(path);
        }
        Ok((results, files))
    })
}
