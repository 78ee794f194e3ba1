//! Hidden-parameter samplers driven by the mixture of per-example profiles.
//!
//! Every sampler picks an example `n` with probability proportional to `|y_n|`, draws a signed
//! Beta variate `z`, and then builds `(a, b)` under the restriction `a . x_n - b = z` with `a`
//! parallel to `x_n`. They differ only in how the scale of `a` (or `b`) is chosen:
//!
//! * [`Algorithm::Basic`]: `|a| = 1 / |x_n - x_m|` for a second example `m`.
//! * [`Algorithm::MagnitudeA`]: signed magnitude `kappa ~ Normal(0, delta)`.
//! * [`Algorithm::InterceptB`]: `b ~ Normal(0, delta)`, then `a = (b + z) x_n / (x_n . x_n)`.
//!
//! Draw `j` uses its own ChaCha stream (`seed`, stream `j`), so units can be sampled in any
//! order or in parallel and still reproduce the serial result.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Bernoulli, Beta, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::datasets::LabeledDataset;
use crate::error::{Error, Result};

/// Retry budget for resampling degenerate indices.
pub const MAX_RETRIES: usize = 100;

/// One hidden unit: weight vector `a` and intercept `b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HiddenParam {
    pub a: Vec<f64>,
    pub b: f64,
}

impl HiddenParam {
    pub fn new(a: Vec<f64>, b: f64) -> Result<Self> {
        if a.iter().any(|v| !v.is_finite()) || !b.is_finite() {
            return Err(Error::Data(
                "hidden parameter has non-finite components".into(),
            ));
        }
        Ok(Self { a, b })
    }

    /// `a . x - b`.
    pub fn preactivation(&self, x: &[f64]) -> f64 {
        dot(&self.a, x) - self.b
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Algorithm {
    /// Inverse pairwise distance sets `|a|`.
    Basic,
    /// Normal draw sets the signed magnitude of `a`.
    MagnitudeA,
    /// Normal draw sets `b`; `a` follows from the restriction.
    InterceptB,
}

impl Algorithm {
    pub fn number(self) -> u8 {
        match self {
            Algorithm::Basic => 1,
            Algorithm::MagnitudeA => 2,
            Algorithm::InterceptB => 3,
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "1" | "basic" => Ok(Algorithm::Basic),
            "2" | "magnitude-a" => Ok(Algorithm::MagnitudeA),
            "3" | "intercept-b" => Ok(Algorithm::InterceptB),
            other => Err(Error::Config(format!(
                "unknown sampling algorithm {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub algorithm: Algorithm,
    pub alpha: f64,
    pub beta: f64,
    /// Standard deviation of the normal draw used by algorithms 2 and 3.
    pub delta: f64,
    /// Number of hidden units `J`.
    pub hidden: usize,
    pub seed: u64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self {
            algorithm: Algorithm::Basic,
            alpha: 50.0,
            beta: 3.0,
            delta: 15.0,
            hidden: 300,
            seed: 0,
        }
    }
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("delta", self.delta),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if self.hidden == 0 {
            return Err(Error::Config(
                "number of hidden units must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Mixing probabilities `w_n` proportional to the target magnitudes `|y_n|`.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureWeights {
    w: Vec<f64>,
}

impl MixtureWeights {
    pub fn as_slice(&self) -> &[f64] {
        &self.w
    }

    fn index(&self) -> Result<WeightedIndex<f64>> {
        WeightedIndex::new(&self.w).map_err(|_| Error::DegenerateWeights)
    }
}

/// Mixture weights of a dataset; vector targets use their Euclidean norm.
pub fn mixture_weights(ds: &LabeledDataset) -> Result<MixtureWeights> {
    let mags: Vec<f64> = ds
        .targets()
        .row_iter()
        .map(|r| r.iter().map(|v| v * v).sum::<f64>().sqrt())
        .collect();
    let total: f64 = mags.iter().sum();
    if total <= 0.0 {
        return Err(Error::DegenerateWeights);
    }
    Ok(MixtureWeights {
        w: mags.into_iter().map(|m| m / total).collect(),
    })
}

/// `(-1)^gamma * zeta` with `zeta ~ Beta(alpha, beta)` and a fair sign `gamma`.
pub fn sample_z<R: Rng + ?Sized>(alpha: f64, beta: f64, rng: &mut R) -> Result<f64> {
    let zeta = Beta::new(alpha, beta)
        .map_err(|e| Error::InvalidArgument(format!("Beta({alpha}, {beta}): {e}")))?
        .sample(rng);
    let flip = Bernoulli::new(0.5).expect("p = 0.5 is valid").sample(rng);
    Ok(if flip { -zeta } else { zeta })
}

/// A sampled unit together with the internal draws that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct Draw {
    pub hidden: HiddenParam,
    /// Index of the example the unit is aligned with.
    pub n: usize,
    /// Partner example for [`Algorithm::Basic`].
    pub m: Option<usize>,
    pub z: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `|a| = 1 / |x_n - x_m|`, `a` along `x_n`, `b = a . x_n - z`.
pub fn basic_unit(x_n: &[f64], x_m: &[f64], z: f64) -> HiddenParam {
    let dist: f64 = x_n
        .iter()
        .zip(x_m)
        .map(|(p, q)| (p - q) * (p - q))
        .sum::<f64>()
        .sqrt();
    let scale = 1.0 / (dist * norm(x_n));
    let a: Vec<f64> = x_n.iter().map(|v| v * scale).collect();
    let b = dot(&a, x_n) - z;
    HiddenParam { a, b }
}

/// `a = kappa x_n / |x_n|`, `b = a . x_n - z`.
pub fn magnitude_unit(x_n: &[f64], kappa: f64, z: f64) -> HiddenParam {
    let scale = kappa / norm(x_n);
    let a: Vec<f64> = x_n.iter().map(|v| v * scale).collect();
    let b = dot(&a, x_n) - z;
    HiddenParam { a, b }
}

/// `a = (b + z) x_n / (x_n . x_n)`.
pub fn intercept_unit(x_n: &[f64], b: f64, z: f64) -> HiddenParam {
    let r = (b + z) / dot(x_n, x_n);
    HiddenParam {
        a: x_n.iter().map(|v| v * r).collect(),
        b,
    }
}

fn pick_nonzero<R: Rng + ?Sized>(
    ds: &LabeledDataset,
    index: &WeightedIndex<f64>,
    rng: &mut R,
) -> Result<(usize, Vec<f64>)> {
    for _ in 0..MAX_RETRIES {
        let n = index.sample(rng);
        let x = ds.input(n);
        if x.iter().any(|&v| v != 0.0) {
            return Ok((n, x));
        }
    }
    Err(Error::DegenerateData(format!(
        "no nonzero input drawn in {MAX_RETRIES} attempts"
    )))
}

fn normal(delta: f64) -> Result<Normal<f64>> {
    Normal::new(0.0, delta).map_err(|e| Error::InvalidArgument(format!("Normal(0, {delta}): {e}")))
}

/// One draw of the basic algorithm.
pub fn algorithm1_sample<R: Rng + ?Sized>(
    ds: &LabeledDataset,
    weights: &MixtureWeights,
    cfg: &SamplerConfig,
    rng: &mut R,
) -> Result<Draw> {
    if ds.len() < 2 {
        return Err(Error::DegenerateData(
            "the basic sampler needs two examples".into(),
        ));
    }
    let index = weights.index()?;
    let (n, x_n) = pick_nonzero(ds, &index, rng)?;
    let mut partner = None;
    for _ in 0..MAX_RETRIES {
        let m = index.sample(rng);
        if m == n {
            continue;
        }
        let x_m = ds.input(m);
        if x_m != x_n {
            partner = Some((m, x_m));
            break;
        }
    }
    let (m, x_m) = partner.ok_or_else(|| {
        Error::DegenerateData(format!(
            "no partner distinct from example {n} in {MAX_RETRIES} attempts"
        ))
    })?;
    let z = sample_z(cfg.alpha, cfg.beta, rng)?;
    Ok(Draw {
        hidden: basic_unit(&x_n, &x_m, z),
        n,
        m: Some(m),
        z,
    })
}

/// One draw of the magnitude-of-`a` algorithm.
pub fn algorithm2_sample<R: Rng + ?Sized>(
    ds: &LabeledDataset,
    weights: &MixtureWeights,
    cfg: &SamplerConfig,
    rng: &mut R,
) -> Result<Draw> {
    let index = weights.index()?;
    let (n, x_n) = pick_nonzero(ds, &index, rng)?;
    let z = sample_z(cfg.alpha, cfg.beta, rng)?;
    let kappa = normal(cfg.delta)?.sample(rng);
    Ok(Draw {
        hidden: magnitude_unit(&x_n, kappa, z),
        n,
        m: None,
        z,
    })
}

/// One draw of the intercept-first algorithm.
pub fn algorithm3_sample<R: Rng + ?Sized>(
    ds: &LabeledDataset,
    weights: &MixtureWeights,
    cfg: &SamplerConfig,
    rng: &mut R,
) -> Result<Draw> {
    let index = weights.index()?;
    let (n, x_n) = pick_nonzero(ds, &index, rng)?;
    let z = sample_z(cfg.alpha, cfg.beta, rng)?;
    let b = normal(cfg.delta)?.sample(rng);
    Ok(Draw {
        hidden: intercept_unit(&x_n, b, z),
        n,
        m: None,
        z,
    })
}

/// Generator for draw `j` of a run seeded with `seed`.
pub fn draw_rng(seed: u64, j: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(j as u64);
    rng
}

/// Draw `j` of the run described by `cfg`.
pub fn sample_one(
    ds: &LabeledDataset,
    weights: &MixtureWeights,
    cfg: &SamplerConfig,
    j: usize,
) -> Result<Draw> {
    let mut rng = draw_rng(cfg.seed, j);
    let out = match cfg.algorithm {
        Algorithm::Basic => algorithm1_sample(ds, weights, cfg, &mut rng),
        Algorithm::MagnitudeA => algorithm2_sample(ds, weights, cfg, &mut rng),
        Algorithm::InterceptB => algorithm3_sample(ds, weights, cfg, &mut rng),
    };
    out.map_err(|e| Error::Draw {
        index: j,
        source: Box::new(e),
    })
}

/// `cfg.hidden` draws with their debug records, in index order.
pub fn sample_draws(ds: &LabeledDataset, cfg: &SamplerConfig) -> Result<Vec<Draw>> {
    cfg.validate()?;
    let weights = mixture_weights(ds)?;
    (0..cfg.hidden)
        .into_par_iter()
        .map(|j| sample_one(ds, &weights, cfg, j))
        .collect()
}

/// `cfg.hidden` hidden units, reproducible from `cfg.seed`.
pub fn sample_hidden(ds: &LabeledDataset, cfg: &SamplerConfig) -> Result<Vec<HiddenParam>> {
    Ok(sample_draws(ds, cfg)?
        .into_iter()
        .map(|d| d.hidden)
        .collect())
}

/// Writes `index, b, a_1..a_m` rows.
pub fn write_params_csv(path: &Path, hidden: &[HiddenParam]) -> Result<()> {
    let m = hidden.first().map_or(0, |h| h.a.len());
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["index".to_string(), "b".to_string()];
    header.extend((1..=m).map(|i| format!("a_{i}")));
    w.write_record(&header)?;
    for (j, h) in hidden.iter().enumerate() {
        let mut row = vec![j.to_string(), h.b.to_string()];
        row.extend(h.a.iter().map(|v| v.to_string()));
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

/// Reads a file written by [`write_params_csv`].
pub fn read_params_csv(path: &Path) -> Result<Vec<HiddenParam>> {
    let mut r = csv::Reader::from_path(path)?;
    let mut out = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec?;
        let parse = |s: &str| {
            s.parse::<f64>()
                .map_err(|e| Error::Data(format!("row {line}: {e}")))
        };
        let b = parse(rec.get(1).unwrap_or(""))?;
        let a = rec.iter().skip(2).map(parse).collect::<Result<Vec<_>>>()?;
        out.push(HiddenParam::new(a, b)?);
    }
    Ok(out)
}

/// JSON sidecar stored next to a parameter CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplerSidecar {
    pub config: SamplerConfig,
    pub seed: u64,
    pub input_dim: usize,
}

pub fn write_sidecar(path: &Path, cfg: &SamplerConfig, input_dim: usize) -> Result<()> {
    let sidecar = SamplerSidecar {
        config: *cfg,
        seed: cfg.seed,
        input_dim,
    };
    let text = serde_json::to_string_pretty(&sidecar)?;
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}
