//! Numerical admissibility constant of an activation / profile pair.
//!
//! With the transform `g^(xi) = int g(x) exp(-i x xi) dx`,
//!
//! ```text
//! K = (2 pi)^(m-1) int conj(psi^(xi)) eta^(xi) / |xi|^m dxi
//! ```
//!
//! Both transforms are evaluated by direct discrete Fourier sums on a symmetric `x` grid;
//! the `xi` integral is a Riemann sum over `xi_min <= |xi| <= xi_max`. The window
//! `|xi| < xi_min` is dropped, which is only sound when `psi^(0) = 0`; that is checked.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{eta, psi_unchecked};

/// An activation `eta`, its transform profile `psi`, and their admissibility constant.
#[derive(Debug, Clone, Copy)]
pub struct ActivationPair {
    pub eta: fn(f64) -> f64,
    pub psi: fn(f64) -> f64,
    pub k: f64,
}

impl ActivationPair {
    pub fn new(eta: fn(f64) -> f64, psi: fn(f64) -> f64, k: f64) -> Result<Self> {
        if !k.is_finite() || k == 0.0 {
            return Err(Error::Inadmissible(format!(
                "constant {k} is not finite and nonzero"
            )));
        }
        Ok(Self { eta, psi, k })
    }

    /// Gaussian `eta` with the Dawson-based `psi`; `K = 1`.
    pub fn gaussian() -> Self {
        Self {
            eta,
            psi: psi_unchecked,
            k: 1.0,
        }
    }
}

impl Default for ActivationPair {
    fn default() -> Self {
        Self::gaussian()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSettings {
    /// The `x` grid is `[-x_max, x_max]`.
    pub x_max: f64,
    pub x_step: f64,
    pub xi_min: f64,
    pub xi_max: f64,
    pub xi_step: f64,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        Self {
            x_max: 100.0,
            x_step: 0.05,
            xi_min: 1e-3,
            xi_max: 12.0,
            xi_step: 1e-3,
        }
    }
}

impl QuadratureSettings {
    fn validate(&self) -> Result<()> {
        let ok = [
            self.x_max,
            self.x_step,
            self.xi_min,
            self.xi_max,
            self.xi_step,
        ]
        .iter()
        .all(|v| v.is_finite() && *v > 0.0)
            && self.xi_min < self.xi_max;
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!(
                "invalid quadrature settings {self:?}"
            )))
        }
    }

    fn x_nodes(&self) -> Vec<f64> {
        let half = (self.x_max / self.x_step).round() as i64;
        (-half..=half).map(|i| i as f64 * self.x_step).collect()
    }

    fn xi_nodes(&self) -> Vec<f64> {
        let n = ((self.xi_max - self.xi_min) / self.xi_step).round() as usize;
        let positive = (0..=n).map(|i| self.xi_min + i as f64 * self.xi_step);
        positive.flat_map(|xi| [-xi, xi]).collect()
    }
}

/// Raw complex estimate of the admissibility integral, before any admissibility checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdmissibilityEstimate {
    pub re: f64,
    pub im: f64,
    /// `|psi^(0)|`, the zero-frequency mass of `psi`.
    pub psi_hat_zero: f64,
    /// `max |psi^(xi)|` over the `xi` grid.
    pub psi_hat_peak: f64,
}

fn fourier(values: &[f64], xs: &[f64], dx: f64, xi: f64) -> (f64, f64) {
    let (mut re, mut im) = (0.0, 0.0);
    for (&v, &x) in values.iter().zip(xs) {
        let (s, c) = (x * xi).sin_cos();
        re += v * c;
        im -= v * s;
    }
    (re * dx, im * dx)
}

/// Evaluates the admissibility integral without judging the result.
pub fn admissibility_integral(
    pair: &ActivationPair,
    m: usize,
    quad: &QuadratureSettings,
) -> Result<AdmissibilityEstimate> {
    if m == 0 {
        return Err(Error::InvalidArgument(
            "input dimension must be at least 1".into(),
        ));
    }
    quad.validate()?;
    let xs = quad.x_nodes();
    let psi_values: Vec<f64> = xs.iter().map(|&x| (pair.psi)(x)).collect();
    let eta_values: Vec<f64> = xs.iter().map(|&x| (pair.eta)(x)).collect();
    let dx = quad.x_step;

    let terms: Vec<(f64, f64, f64)> = quad
        .xi_nodes()
        .into_par_iter()
        .map(|xi| {
            let (pr, pi) = fourier(&psi_values, &xs, dx, xi);
            let (er, ei) = fourier(&eta_values, &xs, dx, xi);
            let w = xi.abs().powi(m as i32);
            // conj(psi^) * eta^
            let re = (pr * er + pi * ei) / w;
            let im = (pr * ei - pi * er) / w;
            (re, im, pr.hypot(pi))
        })
        .collect();

    let scale = (2.0 * PI).powi(m as i32 - 1) * quad.xi_step;
    let re = terms.iter().map(|t| t.0).sum::<f64>() * scale;
    let im = terms.iter().map(|t| t.1).sum::<f64>() * scale;
    let psi_hat_peak = terms.iter().map(|t| t.2).fold(0.0, f64::max);
    let (z_re, z_im) = fourier(&psi_values, &xs, dx, 0.0);
    Ok(AdmissibilityEstimate {
        re,
        im,
        psi_hat_zero: z_re.hypot(z_im),
        psi_hat_peak,
    })
}

/// Relative size of `psi^(0)` above which the `1/|xi|^m` singularity is not integrable.
const ZERO_MEAN_TOLERANCE: f64 = 1e-4;
const IMAGINARY_TOLERANCE: f64 = 1e-6;

/// Numerical `K_{psi, eta}` for input dimension `m`.
///
/// Fails with [`Error::Inadmissible`] when `psi` has nonzero mean (the integral diverges at
/// `xi = 0`), when the estimate is zero or non-finite, or when the imaginary residue exceeds
/// `1e-6` of the magnitude.
pub fn admissibility_constant(
    pair: &ActivationPair,
    m: usize,
    quad: &QuadratureSettings,
) -> Result<f64> {
    let est = admissibility_integral(pair, m, quad)?;
    if !(est.re.is_finite() && est.im.is_finite()) {
        return Err(Error::Inadmissible(
            "integral estimate is not finite".into(),
        ));
    }
    if est.psi_hat_peak == 0.0 {
        return Err(Error::Inadmissible(
            "psi vanishes identically; constant is zero".into(),
        ));
    }
    if est.psi_hat_zero > ZERO_MEAN_TOLERANCE * est.psi_hat_peak {
        return Err(Error::Inadmissible(format!(
            "psi has nonzero mean ({:.3e}); the integrand diverges like 1/|xi|^{m} at zero",
            est.psi_hat_zero
        )));
    }
    let magnitude = est.re.hypot(est.im);
    if magnitude < 1e-12 {
        return Err(Error::Inadmissible("constant is zero".into()));
    }
    if est.im.abs() > IMAGINARY_TOLERANCE * magnitude {
        return Err(Error::Inadmissible(format!(
            "imaginary residue {:.3e} is too large",
            est.im
        )));
    }
    Ok(est.re)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zero(_: f64) -> f64 {
        0.0
    }

    fn coarse() -> QuadratureSettings {
        QuadratureSettings {
            x_max: 60.0,
            x_step: 0.1,
            xi_min: 1e-3,
            xi_max: 10.0,
            xi_step: 1e-2,
        }
    }

    #[test]
    fn zero_profile_is_inadmissible() {
        let pair = ActivationPair {
            psi: zero,
            ..ActivationPair::gaussian()
        };
        let est = admissibility_integral(&pair, 1, &coarse()).unwrap();
        assert_eq!(est.re, 0.0);
        assert!(matches!(
            admissibility_constant(&pair, 1, &coarse()),
            Err(Error::Inadmissible(_))
        ));
    }

    #[test]
    fn gaussian_self_pair_diverges() {
        let pair = ActivationPair {
            psi: eta,
            ..ActivationPair::gaussian()
        };
        assert!(matches!(
            admissibility_constant(&pair, 1, &coarse()),
            Err(Error::Inadmissible(_))
        ));
    }

    #[test]
    fn pair_constructor_rejects_zero_constant() {
        assert!(ActivationPair::new(eta, psi_unchecked, 0.0).is_err());
        assert!(ActivationPair::new(eta, psi_unchecked, f64::NAN).is_err());
    }

    #[test]
    fn dimension_zero_rejected() {
        assert!(admissibility_integral(&ActivationPair::gaussian(), 0, &coarse()).is_err());
    }

    #[test]
    fn coarse_constant_near_one() {
        let k = admissibility_constant(&ActivationPair::gaussian(), 1, &coarse()).unwrap();
        assert!((k - 1.0).abs() < 0.02, "K = {k}");
    }
}
