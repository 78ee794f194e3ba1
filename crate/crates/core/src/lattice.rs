//! Discrete ridgelet / dual ridgelet transforms on a one-dimensional lattice.
//!
//! All integrals are left-endpoint Riemann sums: an axis `[lo, hi]` with step `d` has
//! `round((hi - lo) / d)` nodes `lo, lo + d, ...`, and `hi` itself is not a node.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{eta, psi_unchecked};

/// Beyond this distance `exp(-u^2 / 2)` underflows to exactly `0.0` in `f64`.
pub const ETA_ZERO_CUTOFF: f64 = 39.0;

/// Default cap on the bytes a materialised [`RidgeletField`] may occupy.
pub const DEFAULT_FIELD_BYTES: usize = 1 << 30;

/// One integration axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl Axis {
    pub const fn new(lo: f64, hi: f64, step: f64) -> Self {
        Self { lo, hi, step }
    }

    pub fn validate(&self, name: &str) -> Result<()> {
        if !(self.lo.is_finite() && self.hi.is_finite() && self.step.is_finite()) {
            return Err(Error::Config(format!("{name} axis has non-finite bounds")));
        }
        if self.step <= 0.0 {
            return Err(Error::Config(format!("{name} step must be positive")));
        }
        if self.lo >= self.hi {
            return Err(Error::Config(format!("{name} axis needs lo < hi")));
        }
        let count = ((self.hi - self.lo) / self.step).round();
        if count < 1.0 || count > u32::MAX as f64 {
            return Err(Error::Config(format!("{name} axis has {count} nodes")));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        ((self.hi - self.lo) / self.step).round() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn node(&self, i: usize) -> f64 {
        self.lo + i as f64 * self.step
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.node(i)).collect()
    }
}

/// Integration grids for the input `x` and the hidden parameters `(a, b)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeConfig {
    pub x: Axis,
    pub a: Axis,
    pub b: Axis,
}

impl LatticeConfig {
    /// `x` in `[-1, 1]` step 0.01, `a` and `b` in `[-300, 300]` step 0.1.
    pub const fn paper() -> Self {
        Self {
            x: Axis::new(-1.0, 1.0, 0.01),
            a: Axis::new(-300.0, 300.0, 0.1),
            b: Axis::new(-300.0, 300.0, 0.1),
        }
    }

    /// A cheaper grid for interactive runs: `(a, b)` in `[-150, 150]` step 0.25.
    pub const fn coarse() -> Self {
        Self {
            x: Axis::new(-1.0, 1.0, 0.01),
            a: Axis::new(-150.0, 150.0, 0.25),
            b: Axis::new(-150.0, 150.0, 0.25),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.x.validate("x")?;
        self.a.validate("a")?;
        self.b.validate("b")
    }

    /// Bytes needed to hold the full `(a, b)` field.
    pub fn field_bytes(&self) -> Result<usize> {
        self.a
            .len()
            .checked_mul(self.b.len())
            .and_then(|n| n.checked_mul(std::mem::size_of::<f64>()))
            .ok_or_else(|| Error::ResourceLimit("(a, b) grid size overflows usize".into()))
    }

    pub fn validate_field_memory(&self, max_bytes: usize) -> Result<()> {
        self.validate()?;
        let bytes = self.field_bytes()?;
        if bytes > max_bytes {
            return Err(Error::ResourceLimit(format!(
                "(a, b) field needs {bytes} bytes, limit is {max_bytes}"
            )));
        }
        Ok(())
    }

    /// Values of `f` on the `x` nodes.
    pub fn tabulate(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        self.x.nodes().into_iter().map(f).collect()
    }

    fn check_values(&self, f_values: &[f64]) -> Result<()> {
        if f_values.len() != self.x.len() {
            return Err(Error::Dimension(format!(
                "{} function values for {} x nodes",
                f_values.len(),
                self.x.len()
            )));
        }
        if let Some(i) = f_values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Data(format!(
                "function value at x node {i} is not finite"
            )));
        }
        Ok(())
    }
}

/// `R_psi f(a, b)` sampled on the `(a, b)` grid, row-major over `a`.
#[derive(Debug, Clone)]
pub struct RidgeletField {
    values: Vec<f64>,
    config: LatticeConfig,
}

impl RidgeletField {
    pub fn new(values: Vec<f64>, config: LatticeConfig) -> Result<Self> {
        config.validate()?;
        let expected = config.a.len() * config.b.len();
        if values.len() != expected {
            return Err(Error::Dimension(format!(
                "field has {} values, grid has {expected} cells",
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Data(format!("field cell {i} is not finite")));
        }
        Ok(Self { values, config })
    }

    pub fn zeros(config: LatticeConfig) -> Result<Self> {
        let n = config.a.len() * config.b.len();
        Self::new(vec![0.0; n], config)
    }

    pub fn config(&self) -> &LatticeConfig {
        &self.config
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, ia: usize, ib: usize) -> f64 {
        self.values[ia * self.config.b.len() + ib]
    }

    pub fn set(&mut self, ia: usize, ib: usize, v: f64) -> Result<()> {
        if !v.is_finite() {
            return Err(Error::Data(format!("field value {v} is not finite")));
        }
        let nb = self.config.b.len();
        self.values[ia * nb + ib] = v;
        Ok(())
    }

    fn row(&self, ia: usize) -> &[f64] {
        let nb = self.config.b.len();
        &self.values[ia * nb..(ia + 1) * nb]
    }
}

/// `sum_n f(x_n) psi(a x_n - b) dx` over the `x` nodes of `cfg`.
pub fn ridgelet_lattice(f_values: &[f64], a: f64, b: f64, cfg: &LatticeConfig) -> Result<f64> {
    cfg.x.validate("x")?;
    cfg.check_values(f_values)?;
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidArgument("(a, b) must be finite".into()));
    }
    let xs = cfg.x.nodes();
    Ok(ridgelet_sum(f_values, &xs, a, b) * cfg.x.step)
}

#[inline]
fn ridgelet_sum(f_values: &[f64], xs: &[f64], a: f64, b: f64) -> f64 {
    f_values
        .iter()
        .zip(xs)
        .map(|(&f, &x)| f * psi_unchecked(a * x - b))
        .sum()
}

fn ridgelet_row(f_values: &[f64], xs: &[f64], a: f64, cfg: &LatticeConfig, row: &mut [f64]) {
    let all = 0..row.len();
    ridgelet_band(f_values, xs, a, cfg, row, all);
}

fn ridgelet_band(
    f_values: &[f64],
    xs: &[f64],
    a: f64,
    cfg: &LatticeConfig,
    row: &mut [f64],
    band: std::ops::Range<usize>,
) {
    let dx = cfg.x.step;
    for ib in band {
        row[ib] = ridgelet_sum(f_values, xs, a, cfg.b.node(ib)) * dx;
    }
}

/// Materialises `R_psi f` on the whole `(a, b)` grid, after checking it fits in `max_bytes`.
pub fn ridgelet_field(
    f_values: &[f64],
    cfg: &LatticeConfig,
    max_bytes: usize,
) -> Result<RidgeletField> {
    cfg.validate_field_memory(max_bytes)?;
    cfg.check_values(f_values)?;
    let xs = cfg.x.nodes();
    let nb = cfg.b.len();
    let mut values = vec![0.0; cfg.a.len() * nb];
    values
        .par_chunks_mut(nb)
        .enumerate()
        .for_each(|(ia, row)| ridgelet_row(f_values, &xs, cfg.a.node(ia), cfg, row));
    RidgeletField::new(values, *cfg)
}

// Range of b indices with |a x - b| < ETA_ZERO_CUTOFF; cells outside contribute exactly zero.
#[inline]
fn active_b_range(b: &Axis, center: f64) -> std::ops::Range<usize> {
    let nb = b.len();
    let lo = ((center - ETA_ZERO_CUTOFF - b.lo) / b.step)
        .floor()
        .max(0.0);
    let hi = ((center + ETA_ZERO_CUTOFF - b.lo) / b.step).ceil() + 1.0;
    let lo = (lo as usize).min(nb);
    let hi = (hi.max(0.0) as usize).min(nb);
    lo..hi
}

#[inline]
fn dual_row(row: &[f64], a: f64, b: &Axis, x: f64) -> f64 {
    let center = a * x;
    let mut acc = 0.0;
    for ib in active_b_range(b, center) {
        acc += row[ib] * eta(center - b.node(ib));
    }
    acc
}

/// `sum_{a, b} field(a, b) eta(a x - b) da db`.
pub fn dual_ridgelet_lattice(field: &RidgeletField, x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::InvalidArgument("query point must be finite".into()));
    }
    let cfg = field.config();
    let rows: Vec<f64> = (0..cfg.a.len())
        .into_par_iter()
        .map(|ia| dual_row(field.row(ia), cfg.a.node(ia), &cfg.b, x))
        .collect();
    Ok(rows.iter().sum::<f64>() * cfg.a.step * cfg.b.step)
}

/// Reconstructs `f` at `query_xs` as `(1/K) R^dagger_eta R_psi f` on the lattice.
///
/// The `(a, b)` field is streamed one `a`-row at a time, so memory stays at
/// `O(|b grid| + |query_xs|)` per row in flight. Each row's partial sums are combined in
/// row order, so the result does not depend on the thread count.
pub fn reconstruct_lattice(
    f_values: &[f64],
    cfg: &LatticeConfig,
    query_xs: &[Vec<f64>],
    k: f64,
) -> Result<Vec<f64>> {
    cfg.validate()?;
    cfg.check_values(f_values)?;
    if !(k.is_finite() && k != 0.0) {
        return Err(Error::Inadmissible(format!("admissibility constant {k}")));
    }
    let mut queries = Vec::with_capacity(query_xs.len());
    for q in query_xs {
        if q.len() != 1 {
            return Err(Error::UnsupportedDimension {
                m: q.len(),
                reason: "the lattice path is one-dimensional",
            });
        }
        if !q[0].is_finite() {
            return Err(Error::InvalidArgument("query point must be finite".into()));
        }
        queries.push(q[0]);
    }

    let xs = cfg.x.nodes();
    let nb = cfg.b.len();
    let q_lo = queries.iter().copied().fold(f64::INFINITY, f64::min);
    let q_hi = queries.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let partials: Vec<Vec<f64>> = (0..cfg.a.len())
        .into_par_iter()
        .map_init(
            || vec![0.0; nb],
            |row, ia| {
                let a = cfg.a.node(ia);
                if queries.is_empty() {
                    return Vec::new();
                }
                // only b cells some query can see are needed
                let r1 = active_b_range(&cfg.b, a * q_lo);
                let r2 = active_b_range(&cfg.b, a * q_hi);
                let band = r1.start.min(r2.start)..r1.end.max(r2.end);
                ridgelet_band(f_values, &xs, a, cfg, row, band);
                queries
                    .iter()
                    .map(|&x| dual_row(row, a, &cfg.b, x))
                    .collect()
            },
        )
        .collect();

    let scale = cfg.a.step * cfg.b.step / k;
    let out = (0..queries.len())
        .map(|q| partials.iter().map(|p| p[q]).sum::<f64>() * scale)
        .collect();
    Ok(out)
}
