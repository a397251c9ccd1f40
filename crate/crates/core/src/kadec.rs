//! Riesz-basis admissibility criteria for perturbed integer lattices: the
//! `ln 2 / (pi d)` sup-deviation bound, the dimension-dependent trigonometric
//! criterion `D_d(L) < 1`, its critical root `x_d`, and the one-dimensional
//! limsup rule. The two sup-deviation criteria agree asymptotically; the
//! ratio in [`asymptotic_ratio`] quantifies how fast.

use std::f64::consts::PI;

use thiserror::Error;

use crate::kernels::sinc;
use crate::nodes::NodeSet;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum KadecError {
    #[error("dimension must be at least 1")]
    ZeroDimension,
    #[error("deviation {0} outside (0, 1/4]")]
    LOutOfRange(f64),
    #[error("criterion function failed its monotonicity check for d = {0}")]
    NotMonotone(usize),
}

/// `ln 2 / (pi d)`: sup deviations below this guarantee a Riesz basis in
/// dimension `d`.
pub fn ln2_bound(dim: usize) -> f64 {
    assert!(dim >= 1, "dimension must be at least 1");
    2.0f64.ln() / (PI * dim as f64)
}

/// The trigonometric criterion value
/// `D_d(L) = (1 - cos pi L + sin pi L + sinc(pi L))^d - sinc(pi L)^d`.
///
/// The formula itself extends to `L = 1/4`, where `D_1(1/4) = 1` exactly;
/// arguments beyond that are rejected.
pub fn sun_zhou_d(l_dev: f64, dim: usize) -> Result<f64, KadecError> {
    if dim == 0 {
        return Err(KadecError::ZeroDimension);
    }
    if !(l_dev > 0.0 && l_dev <= 0.25) {
        return Err(KadecError::LOutOfRange(l_dev));
    }
    let x = PI * l_dev;
    // 1 - cos x as 2 sin^2(x/2) avoids cancellation for small L.
    let one_minus_cos = 2.0 * (0.5 * x).sin().powi(2);
    let s = sinc(x);
    let a = one_minus_cos + x.sin() + s;
    Ok(a.powi(dim as i32) - s.powi(dim as i32))
}

/// The unique root `x_d` of `D_d = 1` in `(0, 1/4)`, by bisection with
/// tolerance `1e-12` on the criterion and `1e-13` on the bracket. Increasing
/// behavior of `D_d` is checked on a coarse grid first; for `d = 1` the root
/// sits at the bracket top (`x_1 = 1/4`) and the bisection collapses there.
pub fn solve_x_d(dim: usize) -> Result<f64, KadecError> {
    if dim == 0 {
        return Err(KadecError::ZeroDimension);
    }
    let mut lo = 1e-6;
    let mut hi = 0.25 - 1e-12;
    let mut prev = f64::NEG_INFINITY;
    for i in 0..=64 {
        let x = lo + (hi - lo) * i as f64 / 64.0;
        let v = sun_zhou_d(x, dim)?;
        // For large d the value saturates to infinity high in the bracket;
        // equal infinities are not a monotonicity violation.
        if v <= prev && prev.is_finite() {
            return Err(KadecError::NotMonotone(dim));
        }
        prev = v;
    }
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        let v = sun_zhou_d(mid, dim)?;
        if (v - 1.0).abs() <= 1e-12 {
            return Ok(mid);
        }
        if v < 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

///`(x_d - ln2/(pi d)) / ((ln 2)^2 / (12 pi d^2))`; tends to 1 as the
/// dimension grows.
pub fn asymptotic_ratio(dim: usize) -> Result<f64, KadecError> {
    let x = solve_x_d(dim)?;
    let ln2 = 2.0f64.ln();
    let d = dim as f64;
    Ok((x - ln2 / (PI * d)) / (ln2 * ln2 / (12.0 * PI * d * d)))
}

/// One-dimensional limsup diagnostic. The limsup of the deviations is not
/// computable from a finite window; the outermost tail shell stands in as a
/// proxy, and the verdict is flagged as such.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PakShinDiagnostic {
    /// Deviation of the outermost shell, used as the limsup proxy.
    pub limsup_proxy: f64,
    pub pass: bool,
}

/// Verdicts of every applicable admissibility criterion for one node set.
#[derive(Debug, Clone, PartialEq)]
pub struct KadecReport {
    pub dim: usize,
    pub sup_dev: f64,
    pub ln2_bound: f64,
    /// `sup_dev < ln2/(pi d)`.
    pub ln2_pass: bool,
    /// `D_d(sup_dev)` when the deviation is in the formula's domain; `None`
    /// otherwise (with `sun_zhou_pass` false unless the deviation is zero).
    pub d_value: Option<f64>,
    pub sun_zhou_pass: bool,
    /// Root of `D_d = 1`.
    pub x_d: f64,
    /// Only for one-dimensional node sets.
    pub pak_shin: Option<PakShinDiagnostic>,
}

/// Evaluates every applicable criterion from the deviation statistics of a
/// node set.
pub fn admissibility(nodes: &NodeSet) -> Result<KadecReport, KadecError> {
    let dim = nodes.dim();
    let stats = nodes.deviation_stats();
    let sup = stats.sup_dev;
    let bound = ln2_bound(dim);
    let (d_value, sun_zhou_pass) = if sup == 0.0 {
        (Some(0.0), true)
    } else if sup <= 0.25 {
        let v = sun_zhou_d(sup, dim)?;
        (Some(v), v < 1.0)
    } else {
        (None, false)
    };
    let pak_shin = if dim == 1 {
        let proxy = stats.tail_dev.last().map(|&(_, v)| v).unwrap_or(0.0);
        Some(PakShinDiagnostic {
            limsup_proxy: proxy,
            pass: proxy < 0.25,
        })
    } else {
        None
    };
    Ok(KadecReport {
        dim,
        sup_dev: sup,
        ln2_bound: bound,
        ln2_pass: sup < bound,
        d_value,
        sun_zhou_pass,
        x_d: solve_x_d(dim)?,
        pak_shin,
    })
}
