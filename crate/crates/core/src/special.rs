//! Activation `eta`, transform profile `psi` and the Dawson integral it is built on.
//!
//! `psi` and `eta` form an admissible pair with unit admissibility constant:
//!
//! ```text
//! eta(x) = exp(-x^2 / 2)
//! psi(x) = (2x(x^2 - 3) F(x / sqrt 2) - sqrt 2 (x^2 - 2)) / pi^2
//! F(x)   = exp(-x^2) * integral_0^x exp(t^2) dt
//! ```

use std::f64::consts::{PI, SQRT_2};

use crate::error::{ensure_finite, Result};

/// Below this magnitude the Maclaurin series of the Dawson integral is used.
const DAWSON_SERIES_LIMIT: f64 = 6.0;

/// Above this magnitude `psi` is evaluated from its asymptotic series.
const PSI_ASYMPTOTIC_LIMIT: f64 = 10.0;

const PSI_TAIL_TERMS: usize = 24;

/// `sqrt(2) / pi^2`, the prefactor of the `psi` tail series.
const PSI_TAIL_SCALE: f64 = SQRT_2 / (PI * PI);

/// Coefficients of `psi(x) ~ sqrt2/pi^2 * sum_j e_j x^(-2j-4)` with `e_j = (2j+3)!! (2j+2)`.
const PSI_TAIL: [f64; PSI_TAIL_TERMS] = psi_tail_coefficients();

const fn psi_tail_coefficients() -> [f64; PSI_TAIL_TERMS] {
    let mut out = [0.0; PSI_TAIL_TERMS];
    let mut double_factorial = 1.0;
    let mut j = 0;
    while j < PSI_TAIL_TERMS {
        double_factorial *= (2 * j + 3) as f64;
        out[j] = double_factorial * (2 * j + 2) as f64;
        j += 1;
    }
    out
}

/// Dawson integral `F(x) = exp(-x^2) * int_0^x exp(t^2) dt`.
///
/// Relative accuracy is better than `1e-13` on `|x| <= 50`. Odd symmetry is exact.
pub fn dawson(x: f64) -> Result<f64> {
    ensure_finite("dawson argument", x)?;
    Ok(dawson_unchecked(x))
}

pub(crate) fn dawson_unchecked(x: f64) -> f64 {
    let ax = x.abs();
    let value = if ax <= DAWSON_SERIES_LIMIT {
        dawson_series(ax)
    } else {
        dawson_asymptotic(ax)
    };
    if x.is_sign_negative() {
        -value
    } else {
        value
    }
}

// exp(-x^2) * sum_k x^(2k+1) / (k! (2k+1)); every term is positive so there is no cancellation.
fn dawson_series(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let x2 = x * x;
    let mut power = x;
    let mut sum = x;
    let mut k = 0.0;
    loop {
        k += 1.0;
        power *= x2 / k;
        let term = power / (2.0 * k + 1.0);
        sum += term;
        if term <= sum * 1e-17 {
            break;
        }
    }
    sum * (-x2).exp()
}

// F(x) ~ 1/(2x) * sum_k (2k-1)!! / (2x^2)^k, truncated before the terms start growing.
fn dawson_asymptotic(x: f64) -> f64 {
    let inv = 1.0 / (2.0 * x * x);
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 0.0;
    loop {
        k += 1.0;
        let next = term * (2.0 * k - 1.0) * inv;
        if next >= term || next <= sum * 1e-17 {
            if next < term {
                sum += next;
            }
            break;
        }
        term = next;
        sum += term;
    }
    sum / (2.0 * x)
}

/// Gaussian activation `exp(-x^2 / 2)`.
#[inline]
pub fn eta(x: f64) -> f64 {
    (-0.5 * x * x).exp()
}

/// Transform profile paired with [`eta`].
pub fn psi(x: f64) -> Result<f64> {
    ensure_finite("psi argument", x)?;
    Ok(psi_unchecked(x))
}

/// [`psi`] without the finiteness check; used in lattice inner loops.
#[inline]
pub fn psi_unchecked(x: f64) -> f64 {
    let ax = x.abs();
    if ax < PSI_ASYMPTOTIC_LIMIT {
        psi_direct(ax)
    } else {
        psi_asymptotic(ax)
    }
}

#[inline]
fn psi_direct(x: f64) -> f64 {
    let x2 = x * x;
    (2.0 * x * (x2 - 3.0) * dawson_unchecked(x / SQRT_2) - SQRT_2 * (x2 - 2.0)) / (PI * PI)
}

// The leading sqrt(2) x^2 terms of the direct formula cancel exactly; what is left starts at x^-4.
#[inline]
fn psi_asymptotic(x: f64) -> f64 {
    let w = 1.0 / (x * x);
    let terms = if x >= 100.0 {
        5
    } else if x >= 30.0 {
        10
    } else {
        PSI_TAIL_TERMS
    };
    let mut acc = 0.0;
    for &c in PSI_TAIL[..terms].iter().rev() {
        acc = acc * w + c;
    }
    PSI_TAIL_SCALE * acc * w * w
}
