//! Sinc kernels and the smooth oversampling kernel.
//!
//! The oversampling kernel `g` is the function whose band profile is an even
//! `C^inf` bump equal to 1 on `[-pi, pi]` and 0 outside `[-lambda0 pi,
//! lambda0 pi]` on every axis. With the normalization used here,
//!
//! ```text
//! g1(t) = sinc(pi t) + (1/pi) * int_pi^{lambda0 pi} psi(xi) cos(t xi) dxi
//! ```
//!
//! so that on the integer lattice the oversampled reconstruction collapses to
//! the classical cardinal-series identity, and `g1 -> sinc(pi .)` as
//! `lambda0 -> 1`. The transition integral is evaluated by Gauss-Legendre
//! quadrature; one-dimensional values are cached keyed by the argument
//! rounded to 1e-9.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::RwLock;

use thiserror::Error;

use crate::nodes::NodeSet;
use crate::quad::GaussLegendre;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum KernelError {
    #[error("lambda0 must exceed 1, got {0}")]
    BadLambda0(f64),
    #[error("quadrature order must be at least 1")]
    BadQuadOrder,
    #[error("oversampling factor {lambda} is below the kernel's lambda0 = {lambda0}")]
    LambdaBelowProfile { lambda: f64, lambda0: f64 },
}

/// `sin(x)/x` with the removable singularity filled by its even Taylor
/// polynomial; relative error stays below 1e-15 across the switch.
#[inline]
pub fn sinc(x: f64) -> f64 {
    let ax = x.abs();
    if ax < 1e-3 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

/// Tensor-product sinc over the coordinates.
///
/// # Panics
/// Panics on an empty argument; a zero-dimensional kernel is meaningless.
#[inline]
pub fn sinc_nd(x: &[f64]) -> f64 {
    assert!(!x.is_empty(), "sinc_nd needs at least one coordinate");
    x.iter().map(|&c| sinc(c)).product()
}

/// Even `C^inf` band profile: 1 on `[-pi, pi]`, 0 outside
/// `[-lambda0 pi, lambda0 pi]`, glued by the `exp(-1/s)` ratio mollifier.
#[derive(Debug, Clone, PartialEq)]
pub struct BumpProfile {
    lambda0: f64,
}

impl BumpProfile {
    pub fn new(lambda0: f64) -> Result<Self, KernelError> {
        if lambda0 <= 1.0 || !lambda0.is_finite() {
            return Err(KernelError::BadLambda0(lambda0));
        }
        Ok(Self { lambda0 })
    }

    pub fn lambda0(&self) -> f64 {
        self.lambda0
    }

    /// Value of the per-axis profile at frequency `xi`.
    pub fn eval(&self, xi: f64) -> f64 {
        let s = (self.lambda0 * PI - xi.abs()) / ((self.lambda0 - 1.0) * PI);
        smooth_step(s)
    }
}

fn phi(s: f64) -> f64 {
    if s > 0.0 {
        (-1.0 / s).exp()
    } else {
        0.0
    }
}

/// `phi(s) / (phi(s) + phi(1-s))`: 0 for `s <= 0`, 1 for `s >= 1`, strictly
/// increasing in between, with `h(s) + h(1-s) = 1`.
fn smooth_step(s: f64) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    if s >= 1.0 {
        return 1.0;
    }
    let a = phi(s);
    a / (a + phi(1.0 - s))
}

/// Window sum of kernel magnitudes plus a decay-fit tail estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GTailSum {
    /// `sum_k |g(t - t_k / lambda)|` over the node window.
    pub sum: f64,
    /// Crude estimate of the mass beyond the window, from a quartic decay
    /// fit at the window edge. Reported, never added to `sum`.
    pub remainder: f64,
}

/// Tensor-product smooth oversampling kernel with cached one-dimensional
/// evaluations.
#[derive(Debug)]
pub struct SmoothKernel {
    dim: usize,
    profile: BumpProfile,
    quad_order: usize,
    rule: GaussLegendre,
    cache: RwLock<HashMap<i64, f64>>,
}

impl SmoothKernel {
    pub fn new(dim: usize, lambda0: f64, quad_order: usize) -> Result<Self, KernelError> {
        if quad_order == 0 {
            return Err(KernelError::BadQuadOrder);
        }
        let profile = BumpProfile::new(lambda0)?;
        Ok(Self {
            dim,
            profile,
            quad_order,
            rule: GaussLegendre::new(quad_order),
            cache: RwLock::new(HashMap::new()),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn lambda0(&self) -> f64 {
        self.profile.lambda0()
    }

    pub fn quad_order(&self) -> usize {
        self.quad_order
    }

    pub fn profile(&self) -> &BumpProfile {
        &self.profile
    }

    /// One-dimensional kernel value `g1(t)`.
    pub fn eval1(&self, t: f64) -> f64 {
        let t = t.abs(); // g1 is even
        let key = cache_key(t);
        if let Some(key) = key {
            if let Some(&v) = self.cache.read().expect("kernel cache poisoned").get(&key) {
                return v;
            }
        }
        let v = self.eval1_uncached(t);
        if let Some(key) = key {
            self.cache
                .write()
                .expect("kernel cache poisoned")
                .insert(key, v);
        }
        v
    }

    /// Same value with the cache bypassed; the two must agree to quadrature
    /// tolerance.
    pub fn eval1_uncached(&self, t: f64) -> f64 {
        let lambda0 = self.profile.lambda0();
        let transition = self.rule.integrate(PI, lambda0 * PI, |xi| {
            self.profile.eval(xi) * (t * xi).cos()
        });
        sinc(PI * t) + transition / PI
    }

    /// Tensor-product kernel value `prod_i g1(t_i)`.
    ///
    /// # Panics
    /// Panics if `t.len() != dim`.
    pub fn eval(&self, t: &[f64]) -> f64 {
        assert_eq!(t.len(), self.dim, "kernel argument has wrong dimension");
        t.iter().map(|&c| self.eval1(c)).product()
    }

    /// `sum_k |g(t - t_k/lambda)|` over the first `l` node entries, with a
    /// reported tail estimate. An empty window (`l = 0`) sums to zero.
    ///
    /// # Panics
    /// Panics if `l` exceeds the entry count or dimensions disagree.
    pub fn tail_sum(
        &self,
        t: &[f64],
        nodes: &NodeSet,
        l: usize,
        lambda: f64,
    ) -> Result<GTailSum, KernelError> {
        assert_eq!(t.len(), self.dim, "kernel argument has wrong dimension");
        assert!(l <= nodes.len(), "window length exceeds node count");
        if lambda < self.lambda0() {
            return Err(KernelError::LambdaBelowProfile {
                lambda,
                lambda0: self.lambda0(),
            });
        }
        let mut sum = 0.0;
        let mut edge_max = 0.0f64;
        let mut edge_dist = f64::INFINITY;
        let entries = &nodes.entries()[..l];
        let w = entries
            .iter()
            .map(|e| e.lattice.iter().map(|c| c.abs()).max().unwrap_or(0))
            .max()
            .unwrap_or(0);
        let mut arg = vec![0.0f64; self.dim];
        for e in entries {
            for (i, (&ti, &tk)) in t.iter().zip(e.node.iter()).enumerate() {
                arg[i] = ti - tk / lambda;
            }
            let v = self.eval(&arg).abs();
            sum += v;
            let shell = e.lattice.iter().map(|c| c.abs()).max().unwrap_or(0);
            if shell == w {
                let dist = arg.iter().map(|c| c.abs()).fold(0.0f64, f64::max);
                edge_max = edge_max.max(v);
                edge_dist = edge_dist.min(dist);
            }
        }
        let remainder = if l == 0 || edge_dist <= 0.0 || !edge_dist.is_finite() {
            0.0
        } else {
            // Fit |g| ~ C / r^4 at the window edge and sum shell counts of
            // the virtual lattice continuation.
            let c = edge_max * edge_dist.powi(4);
            let d = self.dim as u32;
            let mut tail = 0.0;
            for j in 1..=4000i64 {
                let r = edge_dist + j as f64 / lambda;
                let side_out = (2 * (w + j) + 1) as f64;
                let side_in = (2 * (w + j) - 1) as f64;
                let count = side_out.powi(d as i32) - side_in.powi(d as i32);
                let term = count * c / r.powi(4);
                tail += term;
                if term < 1e-18 * (1.0 + tail) {
                    break;
                }
            }
            tail
        };
        Ok(GTailSum { sum, remainder })
    }
}

fn cache_key(t: f64) -> Option<i64> {
    let scaled = t / 1e-9;
    if scaled.abs() < 9.0e18 {
        Some(scaled.round() as i64)
    } else {
        None
    }
}
