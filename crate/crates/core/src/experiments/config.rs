//! Run configuration: one TOML document, every key optional, reference settings by default.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::LatticeConfig;
use crate::sampling::{Algorithm, SamplerConfig};

/// Environment variable naming the default data directory (MNIST lives in its `mnist/`).
pub const DATA_DIR_ENV: &str = "RIDGELET_DATA_DIR";

/// Function sampled on `[lo, hi]` to build the one-dimensional datasets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Target {
    /// Topologist's sine curve.
    Tsc,
    /// `sin(x)`.
    Sin,
    /// `sin(pi x)`.
    SinPi,
    Zero,
}

impl Target {
    pub fn eval(self, x: f64) -> f64 {
        match self {
            Target::Tsc => crate::datasets::tsc(x),
            Target::Sin => x.sin(),
            Target::SinPi => (std::f64::consts::PI * x).sin(),
            Target::Zero => 0.0,
        }
    }
}

/// Hidden-layer initialisation for training runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum InitMethod {
    Sampled(Algorithm),
    /// Every parameter from `N(0, 1)`.
    Random,
}

impl InitMethod {
    pub const ALL: [InitMethod; 4] = [
        InitMethod::Sampled(Algorithm::Basic),
        InitMethod::Sampled(Algorithm::MagnitudeA),
        InitMethod::Sampled(Algorithm::InterceptB),
        InitMethod::Random,
    ];

    /// Short name used in file names: `alg1`, `alg2`, `alg3` or `random`.
    pub fn label(self) -> String {
        match self {
            InitMethod::Sampled(a) => format!("alg{}", a.number()),
            InitMethod::Random => "random".into(),
        }
    }
}

impl fmt::Display for InitMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InitMethod::Sampled(a) => write!(f, "{}", a.number()),
            InitMethod::Random => f.write_str("random"),
        }
    }
}

impl FromStr for InitMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random" => Ok(InitMethod::Random),
            other => other.parse().map(InitMethod::Sampled),
        }
    }
}

impl TryFrom<String> for InitMethod {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<InitMethod> for String {
    fn from(m: InitMethod) -> String {
        m.to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    Tsc,
    Mnist,
}

impl FromStr for Task {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tsc" => Ok(Task::Tsc),
            "mnist" => Ok(Task::Mnist),
            _ => Err(Error::InvalidArgument(format!(
                "unknown task {s:?} (tsc or mnist)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LatticeSection {
    /// Use the full-resolution grids instead of the coarse default.
    pub paper_grids: bool,
    /// Admissibility constant dividing the reconstruction.
    pub k: f64,
}

impl Default for LatticeSection {
    fn default() -> Self {
        Self {
            paper_grids: false,
            k: 1.0,
        }
    }
}

impl LatticeSection {
    pub fn grid(&self) -> LatticeConfig {
        if self.paper_grids {
            LatticeConfig::paper()
        } else {
            LatticeConfig::coarse()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ImportanceSection {
    /// Variance of each axis of the Gaussian proposal over `(a, b)`.
    pub proposal_variance: f64,
    pub k: f64,
}

impl Default for ImportanceSection {
    fn default() -> Self {
        Self {
            proposal_variance: 100.0,
            k: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainSection {
    pub task: Task,
    pub lr: f64,
    pub steps: usize,
    /// Independent networks per initialisation; run `r` uses seed `seed + r`.
    pub runs: usize,
    pub eval_every: usize,
}

impl Default for TrainSection {
    fn default() -> Self {
        Self {
            task: Task::Tsc,
            lr: 0.001,
            steps: 2000,
            runs: 20,
            eval_every: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MnistSection {
    /// Directory holding the IDX files; defaults to `$RIDGELET_DATA_DIR/mnist` or `./data/mnist`.
    pub dir: Option<PathBuf>,
    /// Leading training examples to use (0 = all).
    pub train_subset: usize,
    pub test_subset: usize,
    pub steps: usize,
    pub runs: usize,
    pub batch: usize,
    pub eval_every: usize,
    /// Training examples scored for the train-error column (0 = all).
    pub eval_train_subset: usize,
    pub codebook_seed: u64,
    /// Ridge parameter for algorithm 1; 0 means plain least squares.
    pub lambda_alg1: f64,
}

impl Default for MnistSection {
    fn default() -> Self {
        Self {
            dir: None,
            train_subset: 10_000,
            test_subset: 1000,
            steps: 1000,
            runs: 3,
            batch: 128,
            eval_every: 50,
            eval_train_subset: 1000,
            codebook_seed: 0,
            lambda_alg1: 0.0,
        }
    }
}

impl MnistSection {
    pub fn resolved_dir(&self) -> PathBuf {
        self.dir
            .clone()
            .unwrap_or_else(|| default_data_dir().join("mnist"))
    }
}

/// `$RIDGELET_DATA_DIR`, or `./data` when unset.
pub fn default_data_dir() -> PathBuf {
    std::env::var_os(DATA_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("data"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub target: Target,
    pub points: usize,
    pub interval: [f64; 2],
    pub algorithm: InitMethod,
    pub hidden: usize,
    pub alpha: f64,
    pub beta: f64,
    pub delta: f64,
    pub lambda: f64,
    /// Also write a gnuplot script next to the CSV outputs.
    pub plot_script: bool,
    pub lattice: LatticeSection,
    pub importance: ImportanceSection,
    pub train: TrainSection,
    pub mnist: MnistSection,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            target: Target::Tsc,
            points: 200,
            interval: [-1.0, 1.0],
            algorithm: InitMethod::Sampled(Algorithm::Basic),
            hidden: 300,
            alpha: 50.0,
            beta: 3.0,
            delta: 15.0,
            lambda: 0.01,
            plot_script: false,
            lattice: LatticeSection::default(),
            importance: ImportanceSection::default(),
            train: TrainSection::default(),
            mnist: MnistSection::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    pub fn validate(&self) -> Result<()> {
        let [lo, hi] = self.interval;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::Config(format!("interval [{lo}, {hi}] is empty")));
        }
        if self.points < 2 {
            return Err(Error::Config("points must be at least 2".into()));
        }
        if !(self.lambda.is_finite() && self.lambda >= 0.0) {
            return Err(Error::Config(format!(
                "lambda {} must be >= 0",
                self.lambda
            )));
        }
        if self.train.runs == 0 || self.mnist.runs == 0 {
            return Err(Error::Config("runs must be positive".into()));
        }
        if !(self.importance.proposal_variance.is_finite()
            && self.importance.proposal_variance > 0.0)
        {
            return Err(Error::Config("proposal_variance must be positive".into()));
        }
        if let InitMethod::Sampled(a) = self.algorithm {
            self.sampler(a, self.seed).validate()?;
        }
        Ok(())
    }

    pub fn sampler(&self, algorithm: Algorithm, seed: u64) -> SamplerConfig {
        SamplerConfig {
            algorithm,
            alpha: self.alpha,
            beta: self.beta,
            delta: self.delta,
            hidden: self.hidden,
            seed,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_gives_defaults() {
        let cfg = ExperimentConfig::from_toml("").unwrap();
        assert_eq!(cfg, ExperimentConfig::default());
        assert_eq!(cfg.hidden, 300);
        assert_eq!(cfg.lambda, 0.01);
        assert_eq!(cfg.train.lr, 0.001);
    }

    #[test]
    fn round_trips_through_toml() {
        let mut cfg = ExperimentConfig {
            algorithm: InitMethod::Random,
            ..ExperimentConfig::default()
        };
        cfg.lattice.paper_grids = true;
        cfg.mnist.dir = Some("x/y".into());
        assert_eq!(ExperimentConfig::from_toml(&cfg.to_toml()).unwrap(), cfg);
    }

    #[test]
    fn unknown_key_is_config_error() {
        let err = ExperimentConfig::from_toml("hiden = 3").unwrap_err();
        assert_eq!(err.category(), "config");
    }

    #[test]
    fn init_method_names() {
        for m in InitMethod::ALL {
            assert_eq!(m.to_string().parse::<InitMethod>().unwrap(), m);
        }
        assert!("4".parse::<InitMethod>().is_err());
    }
}
