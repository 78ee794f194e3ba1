//! The shallow network `C eta(A x - b) + c0`, its losses and gradients, Adam training, and
//! the MNIST label codebook.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::datasets::LabeledDataset;
use crate::error::{Error, Result};
use crate::regression::{weight_matrix, RidgeSolution};
use crate::sampling::HiddenParam;
use crate::special::eta;

/// Hidden weights `a` (`J x m`), intercepts `b` (`J`), output weights `c` (`k x J`) and
/// output intercepts `c0` (`k`).
#[derive(Debug, Clone, PartialEq)]
pub struct ShallowNet {
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
    pub c: DMatrix<f64>,
    pub c0: DVector<f64>,
}

impl ShallowNet {
    pub fn new(
        a: DMatrix<f64>,
        b: DVector<f64>,
        c: DMatrix<f64>,
        c0: DVector<f64>,
    ) -> Result<Self> {
        if a.nrows() != b.len() || c.ncols() != a.nrows() || c.nrows() != c0.len() {
            return Err(Error::Dimension(format!(
                "A is {}x{}, b has {}, C is {}x{}, c0 has {}",
                a.nrows(),
                a.ncols(),
                b.len(),
                c.nrows(),
                c.ncols(),
                c0.len()
            )));
        }
        if a.ncols() == 0 || c0.is_empty() {
            return Err(Error::Dimension(
                "network needs at least one input and one output".into(),
            ));
        }
        let net = Self { a, b, c, c0 };
        if !net.is_finite() {
            return Err(Error::Data("network has non-finite parameters".into()));
        }
        Ok(net)
    }

    /// Network whose hidden layer is `hidden` and whose readout is a fitted ridge solution.
    pub fn from_solution(hidden: &[HiddenParam], sol: &RidgeSolution) -> Result<Self> {
        let m = hidden.first().map_or(0, |h| h.a.len());
        if sol.c.nrows() != hidden.len() {
            return Err(Error::Dimension(format!(
                "{} hidden units but {} coefficient rows",
                hidden.len(),
                sol.c.nrows()
            )));
        }
        let a = weight_matrix(hidden, m)?;
        let b = DVector::from_iterator(hidden.len(), hidden.iter().map(|h| h.b));
        Self::new(a, b, sol.c.transpose(), sol.c0.clone())
    }

    pub fn hidden(&self) -> usize {
        self.a.nrows()
    }

    pub fn input_dim(&self) -> usize {
        self.a.ncols()
    }

    pub fn output_dim(&self) -> usize {
        self.c.nrows()
    }

    pub fn hidden_params(&self) -> Vec<HiddenParam> {
        (0..self.hidden())
            .map(|j| HiddenParam {
                a: self.a.row(j).iter().copied().collect(),
                b: self.b[j],
            })
            .collect()
    }

    /// Reorders hidden units: new unit `i` is old unit `perm[i]`.
    pub fn permute_hidden(&self, perm: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.hidden()];
        for &p in perm {
            if p >= seen.len() || std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidArgument(
                    "not a permutation of the hidden units".into(),
                ));
            }
        }
        if perm.len() != seen.len() {
            return Err(Error::InvalidArgument(
                "not a permutation of the hidden units".into(),
            ));
        }
        Ok(Self {
            a: self.a.select_rows(perm),
            b: DVector::from_iterator(perm.len(), perm.iter().map(|&p| self.b[p])),
            c: self.c.select_columns(perm),
            c0: self.c0.clone(),
        })
    }

    fn is_finite(&self) -> bool {
        self.blocks()
            .iter()
            .all(|s| s.iter().all(|v| v.is_finite()))
    }

    fn blocks(&self) -> [&[f64]; 4] {
        [
            self.a.as_slice(),
            self.b.as_slice(),
            self.c.as_slice(),
            self.c0.as_slice(),
        ]
    }

    fn blocks_mut(&mut self) -> [&mut [f64]; 4] {
        [
            self.a.as_mut_slice(),
            self.b.as_mut_slice(),
            self.c.as_mut_slice(),
            self.c0.as_mut_slice(),
        ]
    }

    /// Output for a single input.
    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        let xs = DMatrix::from_row_slice(1, x.len(), x);
        Ok(self.forward_batch(&xs)?.row(0).iter().copied().collect())
    }

    /// Outputs (`N x k`) for inputs given as rows of `xs`.
    pub fn forward_batch(&self, xs: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        Ok(self.activations(xs)?.outputs)
    }

    fn activations(&self, xs: &DMatrix<f64>) -> Result<Activations> {
        if xs.ncols() != self.input_dim() {
            return Err(Error::Dimension(format!(
                "inputs have {} components, network expects {}",
                xs.ncols(),
                self.input_dim()
            )));
        }
        let mut u = xs * self.a.transpose();
        for (mut col, &bj) in u.column_iter_mut().zip(self.b.iter()) {
            col.add_scalar_mut(-bj);
        }
        let h = u.map(eta);
        let mut outputs = &h * self.c.transpose();
        for (mut col, &c0) in outputs.column_iter_mut().zip(self.c0.iter()) {
            col.add_scalar_mut(c0);
        }
        if outputs.iter().any(|v| !v.is_finite()) {
            return Err(Error::NumericalOverflow("non-finite network output".into()));
        }
        Ok(Activations { u, h, outputs })
    }
}

struct Activations {
    u: DMatrix<f64>,
    h: DMatrix<f64>,
    outputs: DMatrix<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Loss {
    /// Mean over all `N * k` squared residuals.
    Mse,
    /// Softmax cross-entropy against (possibly soft) target rows, averaged over the batch.
    CrossEntropy,
}

impl fmt::Display for Loss {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Loss::Mse => "mse",
            Loss::CrossEntropy => "cross-entropy",
        })
    }
}

impl FromStr for Loss {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mse" => Ok(Loss::Mse),
            "cross-entropy" | "ce" => Ok(Loss::CrossEntropy),
            _ => Err(Error::InvalidArgument(format!("unknown loss {s:?}"))),
        }
    }
}

/// Gradient blocks, shaped like the corresponding [`ShallowNet`] fields.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
    pub c: DMatrix<f64>,
    pub c0: DVector<f64>,
}

impl Gradients {
    pub fn zeros_like(net: &ShallowNet) -> Self {
        Self {
            a: DMatrix::zeros(net.a.nrows(), net.a.ncols()),
            b: DVector::zeros(net.b.len()),
            c: DMatrix::zeros(net.c.nrows(), net.c.ncols()),
            c0: DVector::zeros(net.c0.len()),
        }
    }

    fn blocks(&self) -> [&[f64]; 4] {
        [
            self.a.as_slice(),
            self.b.as_slice(),
            self.c.as_slice(),
            self.c0.as_slice(),
        ]
    }

    fn blocks_mut(&mut self) -> [&mut [f64]; 4] {
        [
            self.a.as_mut_slice(),
            self.b.as_mut_slice(),
            self.c.as_mut_slice(),
            self.c0.as_mut_slice(),
        ]
    }

    pub fn max_abs(&self) -> f64 {
        self.blocks()
            .iter()
            .flat_map(|s| s.iter())
            .fold(0.0, |m, v| m.max(v.abs()))
    }
}

fn log_softmax_row(z: &[f64], out: &mut [f64]) {
    let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lse = max + z.iter().map(|v| (v - max).exp()).sum::<f64>().ln();
    for (o, v) in out.iter_mut().zip(z) {
        *o = v - lse;
    }
}

/// Mean loss over the batch and its gradient with respect to every parameter.
pub fn loss_and_grads(
    net: &ShallowNet,
    xs: &DMatrix<f64>,
    ys: &DMatrix<f64>,
    loss: Loss,
) -> Result<(f64, Gradients)> {
    let n = xs.nrows();
    if n == 0 {
        return Err(Error::InvalidArgument("empty batch".into()));
    }
    if ys.nrows() != n || ys.ncols() != net.output_dim() {
        return Err(Error::Dimension(format!(
            "targets are {}x{}, expected {n}x{}",
            ys.nrows(),
            ys.ncols(),
            net.output_dim()
        )));
    }
    let act = net.activations(xs)?;
    let k = net.output_dim();
    // g = dL/d(outputs)
    let (value, g) = match loss {
        Loss::Mse => {
            let r = &act.outputs - ys;
            let scale = (n * k) as f64;
            (r.norm_squared() / scale, r * (2.0 / scale))
        }
        Loss::CrossEntropy => {
            let mut g = DMatrix::zeros(n, k);
            let mut total = 0.0;
            let mut z = vec![0.0; k];
            let mut logp = vec![0.0; k];
            for row in 0..n {
                for (i, zi) in z.iter_mut().enumerate() {
                    *zi = act.outputs[(row, i)];
                }
                log_softmax_row(&z, &mut logp);
                let mass: f64 = ys.row(row).sum();
                for i in 0..k {
                    let t = ys[(row, i)];
                    total -= t * logp[i];
                    g[(row, i)] = (logp[i].exp() * mass - t) / n as f64;
                }
            }
            (total / n as f64, g)
        }
    };
    if !value.is_finite() {
        return Err(Error::NumericalOverflow(format!("{loss} loss is {value}")));
    }
    let grad_c = g.transpose() * &act.h;
    let grad_c0 = DVector::from_iterator(k, g.column_iter().map(|col| col.sum()));
    let mut du = &g * &net.c;
    // eta'(u) = -u eta(u)
    du.zip_zip_apply(&act.u, &act.h, |d, u, h| *d *= -u * h);
    let grad_a = du.transpose() * xs;
    let grad_b = DVector::from_iterator(net.hidden(), du.column_iter().map(|col| -col.sum()));
    Ok((
        value,
        Gradients {
            a: grad_a,
            b: grad_b,
            c: grad_c,
            c0: grad_c0,
        },
    ))
}

/// Adam moments and step counter.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub step: u64,
    m: Gradients,
    v: Gradients,
}

impl AdamState {
    /// Zero moments with the usual `(0.9, 0.999, 1e-8)`.
    pub fn new(net: &ShallowNet) -> Self {
        Self {
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            step: 0,
            m: Gradients::zeros_like(net),
            v: Gradients::zeros_like(net),
        }
    }
}

/// One bias-corrected Adam update of `net` in place.
pub fn adam_step(
    state: &mut AdamState,
    net: &mut ShallowNet,
    grads: &Gradients,
    lr: f64,
) -> Result<()> {
    if grads
        .blocks()
        .iter()
        .any(|s| s.iter().any(|v| !v.is_finite()))
    {
        return Err(Error::NumericalOverflow("non-finite gradient".into()));
    }
    if grads.a.shape() != net.a.shape() || grads.c.shape() != net.c.shape() {
        return Err(Error::Dimension(
            "gradient shapes do not match the network".into(),
        ));
    }
    state.step += 1;
    let t = state.step as i32;
    let (b1, b2, eps) = (state.beta1, state.beta2, state.eps);
    let corr1 = 1.0 - b1.powi(t);
    let corr2 = 1.0 - b2.powi(t);
    let params = net.blocks_mut();
    let ms = state.m.blocks_mut();
    let vs = state.v.blocks_mut();
    for (((p, g), m), v) in params.into_iter().zip(grads.blocks()).zip(ms).zip(vs) {
        for i in 0..p.len() {
            m[i] = b1 * m[i] + (1.0 - b1) * g[i];
            v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
            let m_hat = m[i] / corr1;
            let v_hat = v[i] / corr2;
            p[i] -= lr * m_hat / (v_hat.sqrt() + eps);
        }
    }
    Ok(())
}

/// Every parameter drawn independently from `N(0, 1)`.
pub fn random_init<R: Rng + ?Sized>(
    hidden: usize,
    input_dim: usize,
    output_dim: usize,
    rng: &mut R,
) -> Result<ShallowNet> {
    if hidden == 0 || input_dim == 0 || output_dim == 0 {
        return Err(Error::InvalidArgument(
            "network sizes must be positive".into(),
        ));
    }
    let mut draw = |r, c| DMatrix::from_fn(r, c, |_, _| rng.sample::<f64, _>(StandardNormal));
    let a = draw(hidden, input_dim);
    let b = draw(hidden, 1).column(0).into_owned();
    let c = draw(output_dim, hidden);
    let c0 = draw(output_dim, 1).column(0).into_owned();
    ShallowNet::new(a, b, c, c0)
}

/// Ten distinct binary vectors of length ten, one per digit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelCodebook {
    vectors: Vec<Vec<f64>>,
}

impl LabelCodebook {
    pub const DIGITS: usize = 10;
    pub const WIDTH: usize = 10;

    /// Fair i.i.d. bits, redrawing any vector that is all zero or repeats an earlier digit.
    pub fn generate(seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(Self::DIGITS);
        while vectors.len() < Self::DIGITS {
            let v: Vec<f64> = (0..Self::WIDTH)
                .map(|_| if rng.random::<bool>() { 1.0 } else { 0.0 })
                .collect();
            if v.contains(&1.0) && !vectors.contains(&v) {
                vectors.push(v);
            }
        }
        Self::from_vectors(vectors)
    }

    pub fn from_vectors(vectors: Vec<Vec<f64>>) -> Result<Self> {
        if vectors.is_empty() {
            return Err(Error::InvalidArgument("empty codebook".into()));
        }
        let width = vectors[0].len();
        if width == 0 || vectors.iter().any(|v| v.len() != width) {
            return Err(Error::Dimension(
                "codebook vectors must share a positive length".into(),
            ));
        }
        if vectors.iter().flatten().any(|&x| x != 0.0 && x != 1.0) {
            return Err(Error::InvalidArgument(
                "codebook entries must be 0 or 1".into(),
            ));
        }
        for i in 0..vectors.len() {
            if vectors[..i].contains(&vectors[i]) {
                return Err(Error::InvalidArgument(format!(
                    "codebook vector {i} repeats an earlier one"
                )));
            }
        }
        Ok(Self { vectors })
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn width(&self) -> usize {
        self.vectors[0].len()
    }

    pub fn vector(&self, digit: usize) -> Option<&[f64]> {
        self.vectors.get(digit).map(Vec::as_slice)
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    /// Digit whose vector is closest to `v`; ties go to the smaller digit.
    pub fn nearest(&self, v: &[f64]) -> usize {
        let mut best = (0, f64::INFINITY);
        for (d, code) in self.vectors.iter().enumerate() {
            let dist: f64 = code.iter().zip(v).map(|(c, x)| (c - x) * (c - x)).sum();
            if dist < best.1 {
                best = (d, dist);
            }
        }
        best.0
    }

    /// Digit whose vector equals `v` exactly.
    pub fn lookup(&self, v: &[f64]) -> Option<usize> {
        self.vectors.iter().position(|c| c.as_slice() == v)
    }
}

/// Standardises each output component across the batch (a zero standard deviation is
/// replaced by 1), applies the logistic sigmoid, and decodes the nearest codebook digit.
pub fn mnist_finalize(raw: &DMatrix<f64>, codebook: &LabelCodebook) -> Result<Vec<usize>> {
    let (n, k) = raw.shape();
    if n == 0 {
        return Err(Error::InvalidArgument("empty output batch".into()));
    }
    if k != codebook.width() {
        return Err(Error::Dimension(format!(
            "{k} output components, codebook width {}",
            codebook.width()
        )));
    }
    let mut z = raw.clone();
    for mut col in z.column_iter_mut() {
        let mean = col.mean();
        let var = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
        let std = if var > 0.0 { var.sqrt() } else { 1.0 };
        col.apply(|v| *v = 1.0 / (1.0 + (-(*v - mean) / std).exp()));
    }
    let mut row = vec![0.0; k];
    Ok((0..n)
        .map(|i| {
            for (j, r) in row.iter_mut().enumerate() {
                *r = z[(i, j)];
            }
            codebook.nearest(&row)
        })
        .collect())
}

/// Fraction of positions where `predicted` and `truth` differ.
pub fn error_rate(predicted: &[usize], truth: &[usize]) -> Result<f64> {
    if predicted.len() != truth.len() || predicted.is_empty() {
        return Err(Error::Dimension(format!(
            "{} predictions for {} labels",
            predicted.len(),
            truth.len()
        )));
    }
    let wrong = predicted.iter().zip(truth).filter(|(p, t)| p != t).count();
    Ok(wrong as f64 / predicted.len() as f64)
}

/// How training progress is measured.
#[derive(Debug, Clone, PartialEq)]
pub enum Metric {
    /// Root mean squared error over all output components.
    Rmse,
    /// Classification error after [`mnist_finalize`]; target rows must be codebook vectors.
    CodebookErrorRate(LabelCodebook),
}

impl Metric {
    pub fn evaluate(&self, net: &ShallowNet, ds: &LabeledDataset) -> Result<f64> {
        let out = net.forward_batch(ds.inputs())?;
        match self {
            Metric::Rmse => {
                let r = out - ds.targets();
                Ok((r.norm_squared() / r.len() as f64).sqrt())
            }
            Metric::CodebookErrorRate(codebook) => {
                let truth = codebook_labels(ds.targets(), codebook)?;
                error_rate(&mnist_finalize(&out, codebook)?, &truth)
            }
        }
    }
}

/// Recovers digits from target rows that are exact codebook vectors.
pub fn codebook_labels(targets: &DMatrix<f64>, codebook: &LabelCodebook) -> Result<Vec<usize>> {
    let mut row = vec![0.0; targets.ncols()];
    (0..targets.nrows())
        .map(|i| {
            for (j, r) in row.iter_mut().enumerate() {
                *r = targets[(i, j)];
            }
            codebook
                .lookup(&row)
                .ok_or_else(|| Error::Range(format!("target row {i} is not a codebook vector")))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub loss: Loss,
    pub lr: f64,
    pub steps: usize,
    /// Mini-batch size; `None` trains on the full dataset every step.
    pub batch: Option<usize>,
    /// Seeds mini-batch shuffling.
    pub seed: u64,
    /// Metric cadence in steps; the final step is always recorded.
    pub eval_every: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            loss: Loss::Mse,
            lr: 0.001,
            steps: 2000,
            batch: None,
            seed: 0,
            eval_every: 10,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lr.is_finite() && self.lr > 0.0) {
            return Err(Error::InvalidArgument(format!("learning rate {}", self.lr)));
        }
        if self.batch == Some(0) {
            return Err(Error::InvalidArgument("batch size must be positive".into()));
        }
        if self.eval_every == 0 {
            return Err(Error::InvalidArgument("eval_every must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistoryRecord {
    pub step: usize,
    pub train: f64,
    pub test: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct History {
    pub records: Vec<HistoryRecord>,
}

impl History {
    pub fn initial(&self) -> Option<&HistoryRecord> {
        self.records.first()
    }

    pub fn last(&self) -> Option<&HistoryRecord> {
        self.records.last()
    }

    /// Writes `step,metric_train,metric_test` rows (empty test column when absent).
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["step", "metric_train", "metric_test"])?;
        for r in &self.records {
            w.write_record([
                r.step.to_string(),
                r.train.to_string(),
                r.test.map(|v| v.to_string()).unwrap_or_default(),
            ])?;
        }
        w.flush().map_err(|e| Error::io(path, e))?;
        Ok(())
    }
}

struct Batcher {
    order: Vec<usize>,
    cursor: usize,
    size: usize,
    rng: ChaCha8Rng,
}

impl Batcher {
    fn new(n: usize, size: usize, seed: u64) -> Self {
        let mut b = Self {
            order: (0..n).collect(),
            cursor: n,
            size: size.min(n),
            rng: ChaCha8Rng::seed_from_u64(seed),
        };
        b.refill();
        b
    }

    fn refill(&mut self) {
        self.order.shuffle(&mut self.rng);
        self.cursor = 0;
    }

    fn next(&mut self) -> &[usize] {
        if self.cursor + self.size > self.order.len() {
            self.refill();
        }
        let start = self.cursor;
        self.cursor += self.size;
        &self.order[start..self.cursor]
    }
}

/// Runs `cfg.steps` Adam updates on `net`, recording the metric at step 0, every
/// `cfg.eval_every` steps, and at the last step.
pub fn train(
    net: &mut ShallowNet,
    train_set: &LabeledDataset,
    test_set: Option<&LabeledDataset>,
    cfg: &TrainConfig,
    metric: &Metric,
) -> Result<History> {
    train_monitored(net, train_set, train_set, test_set, cfg, metric)
}

/// [`train`], with the train-metric column scored on `monitor` instead of the whole
/// training set.
pub fn train_monitored(
    net: &mut ShallowNet,
    train_set: &LabeledDataset,
    monitor: &LabeledDataset,
    test_set: Option<&LabeledDataset>,
    cfg: &TrainConfig,
    metric: &Metric,
) -> Result<History> {
    cfg.validate()?;
    if train_set.input_dim() != net.input_dim() || train_set.output_dim() != net.output_dim() {
        return Err(Error::Dimension(format!(
            "dataset is {}->{}, network is {}->{}",
            train_set.input_dim(),
            train_set.output_dim(),
            net.input_dim(),
            net.output_dim()
        )));
    }
    let record = |net: &ShallowNet, step: usize| -> Result<HistoryRecord> {
        let diverged = |e: Error| match e {
            Error::NumericalOverflow(_) => Error::TrainingDiverged { step },
            other => other,
        };
        let train = metric.evaluate(net, monitor).map_err(diverged)?;
        let test = test_set
            .map(|t| metric.evaluate(net, t))
            .transpose()
            .map_err(diverged)?;
        Ok(HistoryRecord { step, train, test })
    };
    let mut history = History::default();
    history.records.push(record(net, 0)?);
    let mut adam = AdamState::new(net);
    let mut batcher = cfg
        .batch
        .map(|b| Batcher::new(train_set.len(), b, cfg.seed));
    for step in 1..=cfg.steps {
        let sub;
        let data = match batcher.as_mut() {
            Some(b) => {
                sub = train_set.select(b.next());
                &sub
            }
            None => train_set,
        };
        let (value, grads) =
            loss_and_grads(net, data.inputs(), data.targets(), cfg.loss).map_err(|e| match e {
                Error::NumericalOverflow(_) => Error::TrainingDiverged { step },
                other => other,
            })?;
        if !value.is_finite() {
            return Err(Error::TrainingDiverged { step });
        }
        adam_step(&mut adam, net, &grads, cfg.lr).map_err(|_| Error::TrainingDiverged { step })?;
        if step % cfg.eval_every == 0 || step == cfg.steps {
            history.records.push(record(net, step)?);
        }
    }
    Ok(history)
}
