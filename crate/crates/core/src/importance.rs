//! Regression-free output weights from importance-sampled ridgelet coefficients.
//!
//! The transform is estimated from the data as a Monte Carlo average under the input density
//! `rho1`, and hidden units drawn from a proposal `rho2` are weighted by
//! `c_j = R(a_j, b_j) / (K J rho2(a_j, b_j))`. The output intercept is not fitted.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::datasets::LabeledDataset;
use crate::error::{Error, Result};
use crate::sampling::HiddenParam;
use crate::special::{eta, psi_unchecked};

type DensityFn = Box<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Density the inputs are assumed to be drawn from.
pub struct InputDensity {
    density: DensityFn,
}

impl InputDensity {
    pub fn new(density: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            density: Box::new(density),
        }
    }

    /// Uniform density on the box `[lo, hi]^m`.
    pub fn uniform(lo: f64, hi: f64, m: usize) -> Self {
        let value = (hi - lo).powi(m as i32).recip();
        Self::new(move |x: &[f64]| {
            if x.iter().all(|&v| (lo..=hi).contains(&v)) {
                value
            } else {
                0.0
            }
        })
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        (self.density)(x)
    }
}

/// A proposal over hidden units: a sampler and the density it samples from.
pub trait ProposalDensity {
    fn density(&self, hidden: &HiddenParam) -> f64;
    fn sample(&self, rng: &mut dyn rand::RngCore) -> HiddenParam;
}

/// Independent centred normals on every component of `a` and on `b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianProposal {
    pub input_dim: usize,
    pub std_a: f64,
    pub std_b: f64,
}

impl GaussianProposal {
    pub fn new(input_dim: usize, std_a: f64, std_b: f64) -> Result<Self> {
        if !(std_a > 0.0 && std_b > 0.0 && std_a.is_finite() && std_b.is_finite()) {
            return Err(Error::Config(
                "proposal standard deviations must be positive".into(),
            ));
        }
        Ok(Self {
            input_dim,
            std_a,
            std_b,
        })
    }

    /// Covariance `diag(100, ..., 100)`, i.e. standard deviation 10 per axis.
    pub fn isotropic_variance(input_dim: usize, variance: f64) -> Result<Self> {
        Self::new(input_dim, variance.sqrt(), variance.sqrt())
    }
}

fn normal_pdf(x: f64, std: f64) -> f64 {
    (-(x * x) / (2.0 * std * std)).exp() / (std * (2.0 * PI).sqrt())
}

impl ProposalDensity for GaussianProposal {
    fn density(&self, hidden: &HiddenParam) -> f64 {
        hidden
            .a
            .iter()
            .map(|&a| normal_pdf(a, self.std_a))
            .product::<f64>()
            * normal_pdf(hidden.b, self.std_b)
    }

    fn sample(&self, rng: &mut dyn rand::RngCore) -> HiddenParam {
        let na = Normal::new(0.0, self.std_a).expect("validated");
        let nb = Normal::new(0.0, self.std_b).expect("validated");
        let a = (0..self.input_dim).map(|_| na.sample(rng)).collect();
        HiddenParam {
            a,
            b: nb.sample(rng),
        }
    }
}

/// Finitely many atoms, each spread uniformly over a lattice cell of area `cell_volume`;
/// the reported density of an atom is `mass / cell_volume`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteProposal {
    atoms: Vec<(HiddenParam, f64)>,
    cell_volume: f64,
}

impl DiscreteProposal {
    pub fn new(atoms: Vec<(HiddenParam, f64)>, cell_volume: f64) -> Result<Self> {
        let total: f64 = atoms.iter().map(|(_, p)| p).sum();
        if atoms.iter().any(|(_, p)| p.is_nan() || *p <= 0.0) || (total - 1.0).abs() > 1e-12 {
            return Err(Error::Config(
                "atom masses must be positive and sum to 1".into(),
            ));
        }
        if cell_volume.is_nan() || cell_volume <= 0.0 {
            return Err(Error::Config("cell volume must be positive".into()));
        }
        Ok(Self { atoms, cell_volume })
    }

    pub fn atoms(&self) -> &[(HiddenParam, f64)] {
        &self.atoms
    }
}

impl ProposalDensity for DiscreteProposal {
    fn density(&self, hidden: &HiddenParam) -> f64 {
        self.atoms
            .iter()
            .find(|(h, _)| h == hidden)
            .map_or(0.0, |(_, p)| p / self.cell_volume)
    }

    fn sample(&self, rng: &mut dyn rand::RngCore) -> HiddenParam {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for (h, p) in &self.atoms {
            acc += p;
            if u < acc {
                return h.clone();
            }
        }
        self.atoms.last().expect("non-empty").0.clone()
    }
}

/// Draws `count` units from a proposal.
pub fn sample_proposal<R: Rng>(
    proposal: &dyn ProposalDensity,
    count: usize,
    rng: &mut R,
) -> Vec<HiddenParam> {
    (0..count).map(|_| proposal.sample(rng)).collect()
}

fn input_densities(ds: &LabeledDataset, rho1: &InputDensity) -> Result<Vec<f64>> {
    (0..ds.len())
        .map(|n| {
            let d = rho1.eval(&ds.input(n));
            if d > 0.0 && d.is_finite() {
                Ok(d)
            } else {
                Err(Error::Precondition {
                    index: n,
                    reason: format!("input density {d} at this example"),
                })
            }
        })
        .collect()
}

fn check_scalar(ds: &LabeledDataset) -> Result<()> {
    if ds.output_dim() != 1 {
        return Err(Error::Dimension(format!(
            "importance weights need scalar targets, got {}",
            ds.output_dim()
        )));
    }
    Ok(())
}

fn mc_sum(ds: &LabeledDataset, inv_density: &[f64], hidden: &HiddenParam) -> f64 {
    let xs = ds.inputs();
    let mut acc = 0.0;
    for (n, inv) in inv_density.iter().enumerate() {
        let pre = xs
            .row(n)
            .iter()
            .zip(&hidden.a)
            .map(|(x, a)| x * a)
            .sum::<f64>()
            - hidden.b;
        acc += ds.scalar_target(n) * psi_unchecked(pre) * inv;
    }
    acc / ds.len() as f64
}

/// `(1/N) sum_n y_n psi(a . x_n - b) / rho1(x_n)`.
pub fn mc_ridgelet(ds: &LabeledDataset, rho1: &InputDensity, hidden: &HiddenParam) -> Result<f64> {
    check_scalar(ds)?;
    if hidden.a.len() != ds.input_dim() {
        return Err(Error::Dimension(format!(
            "weight has {} components, inputs have {}",
            hidden.a.len(),
            ds.input_dim()
        )));
    }
    let inv: Vec<f64> = input_densities(ds, rho1)?
        .iter()
        .map(|d| d.recip())
        .collect();
    Ok(mc_sum(ds, &inv, hidden))
}

/// `c_j = mc_ridgelet(a_j, b_j) / (K J rho2(a_j, b_j))`.
pub fn is_output_weights(
    hidden: &[HiddenParam],
    ds: &LabeledDataset,
    rho1: &InputDensity,
    rho2: &dyn ProposalDensity,
    k: f64,
) -> Result<Vec<f64>> {
    check_scalar(ds)?;
    if !(k.is_finite() && k != 0.0) {
        return Err(Error::Inadmissible(format!("admissibility constant {k}")));
    }
    if let Some(j) = hidden.iter().position(|h| h.a.len() != ds.input_dim()) {
        return Err(Error::Dimension(format!(
            "unit {j} has the wrong input dimension"
        )));
    }
    let inv: Vec<f64> = input_densities(ds, rho1)?
        .iter()
        .map(|d| d.recip())
        .collect();
    let count = hidden.len() as f64;
    hidden
        .iter()
        .enumerate()
        .map(|(j, h)| {
            let q = rho2.density(h);
            if !(q > 0.0 && q.is_finite()) {
                return Err(Error::Precondition {
                    index: j,
                    reason: format!("proposal density {q} at this unit"),
                });
            }
            Ok(mc_sum(ds, &inv, h) / (k * count * q))
        })
        .collect()
}

/// `sum_j c_j eta(a_j . x - b_j)` at each query point (no output intercept).
pub fn is_reconstruct(
    hidden: &[HiddenParam],
    c: &[f64],
    query_xs: &[Vec<f64>],
) -> Result<Vec<f64>> {
    if hidden.len() != c.len() {
        return Err(Error::Dimension(format!(
            "{} units but {} output weights",
            hidden.len(),
            c.len()
        )));
    }
    query_xs
        .iter()
        .map(|x| {
            if let Some(h) = hidden.iter().find(|h| h.a.len() != x.len()) {
                return Err(Error::Dimension(format!(
                    "query of dimension {} for units of dimension {}",
                    x.len(),
                    h.a.len()
                )));
            }
            Ok(hidden
                .iter()
                .zip(c)
                .map(|(h, &cj)| cj * eta(h.preactivation(x)))
                .sum())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::psi;
    use std::f64::consts::PI;

    fn unit(a: f64, b: f64) -> HiddenParam {
        HiddenParam { a: vec![a], b }
    }

    #[test]
    fn zero_targets_give_zero() {
        let ds = LabeledDataset::from_scalar(&[-0.5, 0.0, 0.5], &[0.0; 3]).unwrap();
        let rho1 = InputDensity::uniform(-1.0, 1.0, 1);
        assert_eq!(mc_ridgelet(&ds, &rho1, &unit(2.0, 0.3)).unwrap(), 0.0);
        let prop = GaussianProposal::isotropic_variance(1, 100.0).unwrap();
        let hidden = vec![unit(1.0, 0.0), unit(-3.0, 2.0)];
        let c = is_output_weights(&hidden, &ds, &rho1, &prop, 1.0).unwrap();
        assert!(c.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn single_point_value() {
        let ds = LabeledDataset::from_scalar(&[0.0], &[1.0]).unwrap();
        let rho1 = InputDensity::new(|_| 0.5);
        let got = mc_ridgelet(&ds, &rho1, &unit(0.0, 0.0)).unwrap();
        assert!((got - psi(0.0).unwrap() / 0.5).abs() < 1e-15);
        assert!((got - 4.0 * 2f64.sqrt() / (PI * PI)).abs() < 1e-15);
    }

    #[test]
    fn zero_input_density_names_index() {
        let ds = LabeledDataset::from_scalar(&[0.0, 2.0], &[1.0, 1.0]).unwrap();
        let rho1 = InputDensity::uniform(-1.0, 1.0, 1);
        let err = mc_ridgelet(&ds, &rho1, &unit(1.0, 0.0)).unwrap_err();
        assert!(matches!(err, Error::Precondition { index: 1, .. }));
    }

    #[test]
    fn constant_proposal_single_unit() {
        let ds = LabeledDataset::from_scalar(&[-0.5, 0.25, 0.5], &[1.0, -2.0, 0.5]).unwrap();
        let rho1 = InputDensity::uniform(-1.0, 1.0, 1);
        let h = unit(1.5, -0.2);
        let prop = DiscreteProposal::new(vec![(h.clone(), 1.0)], 0.25).unwrap();
        let c = is_output_weights(std::slice::from_ref(&h), &ds, &rho1, &prop, 1.0).unwrap();
        let r = mc_ridgelet(&ds, &rho1, &h).unwrap();
        assert!((c[0] - r / 4.0).abs() < 1e-15);
    }

    #[test]
    fn duplicating_units_halves_weights() {
        let ds = LabeledDataset::from_scalar(&[-0.5, 0.25, 0.5], &[1.0, -2.0, 0.5]).unwrap();
        let rho1 = InputDensity::uniform(-1.0, 1.0, 1);
        let prop = GaussianProposal::isotropic_variance(1, 100.0).unwrap();
        let hidden = vec![unit(1.0, 0.3), unit(-4.0, 2.0)];
        let doubled: Vec<_> = hidden.iter().chain(hidden.iter()).cloned().collect();
        let c1 = is_output_weights(&hidden, &ds, &rho1, &prop, 1.0).unwrap();
        let c2 = is_output_weights(&doubled, &ds, &rho1, &prop, 1.0).unwrap();
        for j in 0..2 {
            assert!((c2[j] * 2.0 - c1[j]).abs() < 1e-15);
            assert_eq!(c2[j], c2[j + 2]);
        }
    }

    #[test]
    fn zero_proposal_density_names_index() {
        let ds = LabeledDataset::from_scalar(&[0.5], &[1.0]).unwrap();
        let rho1 = InputDensity::uniform(-1.0, 1.0, 1);
        let prop = DiscreteProposal::new(vec![(unit(1.0, 0.0), 1.0)], 1.0).unwrap();
        let hidden = vec![unit(1.0, 0.0), unit(2.0, 0.0)];
        let err = is_output_weights(&hidden, &ds, &rho1, &prop, 1.0).unwrap_err();
        assert!(matches!(err, Error::Precondition { index: 1, .. }));
    }

    #[test]
    fn reconstruct_shapes() {
        let hidden = vec![unit(1.0, 0.0)];
        assert!(is_reconstruct(&hidden, &[1.0, 2.0], &[vec![0.0]]).is_err());
        let out = is_reconstruct(&hidden, &[0.0], &[vec![0.3], vec![-0.2]]).unwrap();
        assert_eq!(out, vec![0.0, 0.0]);
    }
}
