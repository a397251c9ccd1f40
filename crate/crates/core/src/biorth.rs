//! Biorthogonal functions of perturbed sinc systems through the canonical
//! product
//!
//! ```text
//! H(t) = (t - t_0) prod_{k>=1} (1 - t/t_k)(1 - t/t_{-k}),
//! G_n(t) = H(t) / ((t - t_n) H'(t_n)),
//! ```
//!
//! truncated at level `l`: nodes with `|n| <= l` enter as explicit factors
//! and the integer tail `prod_{k>l} (1 - t^2/k^2)` is evaluated in closed
//! form through log-gamma, so no partial product is ever cut off. Products
//! with many factors run in log space with sign tracking.

use thiserror::Error;

use crate::nodes::NodeSet;
use crate::special::{ln_gamma, ln_gamma_signed};

/// Factor counts above this switch the product to log-space accumulation.
const LOG_SPACE_THRESHOLD: usize = 50;

/// Arguments closer to a node than this take the limit value of the
/// removable singularity.
const REMOVABLE_WINDOW: f64 = 1e-8;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum BiorthError {
    #[error("node list must have odd length 2l+1, got {0}")]
    EvenLength(usize),
    #[error("node t_{0} is zero; only the center node may vanish")]
    ZeroNode(i64),
    #[error("nodes t_{0} and t_{1} coincide")]
    DuplicateNodes(i64, i64),
    #[error("non-finite node t_{0}")]
    NonFinite(i64),
    #[error("node set must be one-dimensional, got dimension {0}")]
    WrongDim(usize),
    #[error("truncation level {level} exceeds the node window radius {window}")]
    LevelTooLarge { level: usize, window: i64 },
    #[error("index {index} outside the truncation level {level}")]
    IndexOutOfRange { index: i64, level: usize },
}

/// Symmetric one-dimensional node sequence `t_{-l}, ..., t_l` with the
/// integers implied beyond the truncation level.
#[derive(Debug, Clone, PartialEq)]
pub struct BiorthSystem {
    level: usize,
    /// `nodes[i]` holds `t_{i - level}`.
    nodes: Vec<f64>,
}

impl BiorthSystem {
    pub fn new(nodes: Vec<f64>) -> Result<Self, BiorthError> {
        if nodes.len().is_multiple_of(2) || nodes.is_empty() {
            return Err(BiorthError::EvenLength(nodes.len()));
        }
        let level = (nodes.len() - 1) / 2;
        for (i, &t) in nodes.iter().enumerate() {
            let n = i as i64 - level as i64;
            if !t.is_finite() {
                return Err(BiorthError::NonFinite(n));
            }
            if n != 0 && t == 0.0 {
                return Err(BiorthError::ZeroNode(n));
            }
        }
        for i in 0..nodes.len() {
            for j in (i + 1)..nodes.len() {
                if nodes[i] == nodes[j] {
                    return Err(BiorthError::DuplicateNodes(
                        i as i64 - level as i64,
                        j as i64 - level as i64,
                    ));
                }
            }
        }
        Ok(Self { level, nodes })
    }

    /// Builds the `level`-truncated system from a one-dimensional node set:
    /// perturbed nodes up to `|n| <= level`, integers beyond (implied).
    pub fn from_node_set(set: &NodeSet, level: usize) -> Result<Self, BiorthError> {
        if set.dim() != 1 {
            return Err(BiorthError::WrongDim(set.dim()));
        }
        if (level as i64) > set.window_radius() {
            return Err(BiorthError::LevelTooLarge {
                level,
                window: set.window_radius(),
            });
        }
        let mut nodes = vec![f64::NAN; 2 * level + 1];
        for e in set.entries() {
            let n = e.lattice[0];
            if n.unsigned_abs() as usize <= level {
                nodes[(n + level as i64) as usize] = e.node[0];
            }
        }
        Self::new(nodes)
    }

    pub fn level(&self) -> usize {
        self.level
    }

    /// Node `t_n` for `|n| <= level`.
    pub fn node(&self, n: i64) -> f64 {
        assert!(
            n.unsigned_abs() as usize <= self.level,
            "node index outside the truncation level"
        );
        self.nodes[(n + self.level as i64) as usize]
    }

    /// The truncated canonical product `H_l(t)`.
    pub fn h_eval(&self, t: f64) -> f64 {
        self.product(t, None)
    }

    /// `H'(t_m)`, computed as the deflated product at `t_m`: the factor that
    /// vanishes there is removed and replaced by its derivative.
    pub fn h_prime_at(&self, m: i64) -> Result<f64, BiorthError> {
        if m.unsigned_abs() as usize > self.level {
            return Err(BiorthError::IndexOutOfRange {
                index: m,
                level: self.level,
            });
        }
        let tm = self.node(m);
        let deflated = self.product(tm, Some(m));
        if m == 0 {
            // d/dt (t - t_0) = 1
            Ok(deflated)
        } else {
            // d/dt (1 - t/t_m) = -1/t_m
            Ok(-deflated / tm)
        }
    }

    /// Biorthogonal function value `G_n(t)`; the removable singularity at
    /// `t = t_n` takes its limit value 1.
    pub fn g_eval(&self, n: i64, t: f64) -> Result<f64, BiorthError> {
        if n.unsigned_abs() as usize > self.level {
            return Err(BiorthError::IndexOutOfRange {
                index: n,
                level: self.level,
            });
        }
        let tn = self.node(n);
        if (t - tn).abs() < REMOVABLE_WINDOW {
            return Ok(1.0);
        }
        Ok(self.h_eval(t) / ((t - tn) * self.h_prime_at(n)?))
    }

    /// Matrix of `G_m(t_n) - delta_{nm}` for `|m|, |n| <= m_max`, indexed
    /// `[m + m_max][n + m_max]`.
    pub fn residual_matrix(&self, m_max: usize) -> Result<Vec<Vec<f64>>, BiorthError> {
        if m_max > self.level {
            return Err(BiorthError::IndexOutOfRange {
                index: m_max as i64,
                level: self.level,
            });
        }
        let side = 2 * m_max + 1;
        let mut out = vec![vec![0.0; side]; side];
        for (mi, row) in out.iter_mut().enumerate() {
            let m = mi as i64 - m_max as i64;
            for (ni, entry) in row.iter_mut().enumerate() {
                let n = ni as i64 - m_max as i64;
                let delta = if m == n { 1.0 } else { 0.0 };
                *entry = self.g_eval(m, self.node(n))? - delta;
            }
        }
        Ok(out)
    }

    /// Product of all node factors and the integer tail at `t`, optionally
    /// skipping the factor attached to one node index.
    fn product(&self, t: f64, skip: Option<i64>) -> f64 {
        let tail = match self.tail_log(t) {
            Some(pair) => pair,
            None => return 0.0,
        };
        let count = 2 * self.level + 1;
        let mut factors = Vec::with_capacity(count);
        if skip != Some(0) {
            factors.push(t - self.node(0));
        }
        for k in 1..=self.level as i64 {
            if skip != Some(k) {
                factors.push(1.0 - t / self.node(k));
            }
            if skip != Some(-k) {
                factors.push(1.0 - t / self.node(-k));
            }
        }
        if factors.contains(&0.0) {
            return 0.0;
        }
        let (tail_ln, tail_sign) = tail;
        if count > LOG_SPACE_THRESHOLD {
            let mut ln_acc = tail_ln;
            let mut sign = tail_sign;
            for f in factors {
                ln_acc += f.abs().ln();
                sign *= f.signum();
            }
            sign * ln_acc.exp()
        } else {
            let prod: f64 = factors.iter().product();
            prod * tail_sign * tail_ln.exp()
        }
    }

    /// `(ln |T|, sign)` of the integer tail `T(t) = prod_{k>l} (1 -
    /// t^2/k^2)`, or `None` when the tail vanishes exactly (integer `t`
    /// beyond the level).
    ///
    /// In gamma form `T = Gamma(L)^2 / (Gamma(L-t) Gamma(L+t))` with
    /// `L = l+1`. For `|t| < L` the big Stirling logs are cancelled
    /// symbolically before any floating-point subtraction:
    ///
    /// ```text
    /// ln T = -(L-a-1/2) ln(1-a/L) - (L+a-1/2) ln(1+a/L)
    ///        + 2 S(L) - S(L-a) - S(L+a),      a = |t|,
    /// ```
    ///
    /// where `S` is the Stirling correction.
    fn tail_log(&self, t: f64) -> Option<(f64, f64)> {
        let a = t.abs();
        let big_l = (self.level + 1) as f64;
        if a < big_l {
            let u = a / big_l;
            let ln = -(big_l - a - 0.5) * (-u).ln_1p() - (big_l + a - 0.5) * u.ln_1p()
                + 2.0 * stirling_s(big_l)
                - stirling_s(big_l - a)
                - stirling_s(big_l + a);
            return Some((ln, 1.0));
        }
        if a == a.round() {
            // the factor at k = |t| vanishes
            return None;
        }
        let lg_l = ln_gamma(big_l);
        let (lg_minus, sign) = ln_gamma_signed(big_l - a)?;
        let lg_plus = ln_gamma(big_l + a);
        Some((2.0 * lg_l - lg_minus - lg_plus, sign))
    }
}

/// Stirling correction `S(x) = ln Gamma(x) - [(x-1/2) ln x - x +
/// ln(2 pi)/2]`, by its asymptotic series for large `x` and by direct
/// subtraction below that.
fn stirling_s(x: f64) -> f64 {
    if x < 10.0 {
        let main = (x - 0.5) * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI).ln();
        return ln_gamma(x) - main;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    inv * (1.0 / 12.0
        + inv2 * (-1.0 / 360.0 + inv2 * (1.0 / 1260.0 + inv2 * (-1.0 / 1680.0 + inv2 / 1188.0))))
}

/// Closed-form entries of the coefficient operator for the single-displaced
/// system (origin node at `displacement`, integers elsewhere).
///
/// # Panics
/// Panics if `displacement` is a nonzero integer.
pub fn closed_form_b(m: i64, n: i64, displacement: f64) -> f64 {
    let d = displacement;
    assert!(
        d == 0.0 || d != d.round(),
        "displacement must not be a nonzero integer"
    );
    let sinc_d = crate::kernels::sinc(std::f64::consts::PI * d);
    let sign = |k: i64| if k.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    match (m, n) {
        (0, 0) => 1.0 / (sinc_d * sinc_d),
        (m, 0) => d * sign(m) / (sinc_d * (m as f64 - d)),
        (0, n) => d * sign(n) / (sinc_d * (n as f64 - d)),
        (m, n) => {
            let delta = if m == n { 1.0 } else { 0.0 };
            delta + d * d * sign(m + n) / ((n as f64 - d) * (m as f64 - d))
        }
    }
}
