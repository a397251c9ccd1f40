//! Ground-truth bandlimited functions: finite combinations of shifted
//! tensor-sinc kernels, so sampling and error measurement are exact sums
//! with no quadrature anywhere.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::kernels::sinc_nd;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum TestFnError {
    #[error("dimension must be at least 1")]
    ZeroDimension,
    #[error("center {0} has wrong dimension")]
    BadCenter(usize),
    #[error("coefficient count {coeffs} does not match center count {centers}")]
    CountMismatch { coeffs: usize, centers: usize },
    #[error("non-finite value in centers or coefficients")]
    NonFinite,
    #[error("dimension mismatch: function is {expected}-dimensional, argument is {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("csv parse error at line {line}: {msg}")]
    Csv { line: usize, msg: String },
    #[error("io error: {0}")]
    Io(String),
}

/// Result of a Paley-Wiener inner product: the computed value plus the
/// estimated truncation remainder of the lattice sum (zero on the exact
/// lattice-center path).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InnerProduct {
    pub value: f64,
    pub remainder: f64,
    /// True when the value came from the exact integer-center path.
    pub exact: bool,
}

/// `f(t) = sum_j c_j SINC(pi (t - s_j))`, a member of the Paley-Wiener space
/// over `[-pi, pi]^d` by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct BandlimitedFn {
    dim: usize,
    centers: Vec<Vec<f64>>,
    coeffs: Vec<f64>,
}

impl BandlimitedFn {
    pub fn new(dim: usize, centers: Vec<Vec<f64>>, coeffs: Vec<f64>) -> Result<Self, TestFnError> {
        if dim == 0 {
            return Err(TestFnError::ZeroDimension);
        }
        if centers.len() != coeffs.len() {
            return Err(TestFnError::CountMismatch {
                coeffs: coeffs.len(),
                centers: centers.len(),
            });
        }
        for (i, c) in centers.iter().enumerate() {
            if c.len() != dim {
                return Err(TestFnError::BadCenter(i));
            }
            if c.iter().any(|v| !v.is_finite()) {
                return Err(TestFnError::NonFinite);
            }
        }
        if coeffs.iter().any(|v| !v.is_finite()) {
            return Err(TestFnError::NonFinite);
        }
        Ok(Self {
            dim,
            centers,
            coeffs,
        })
    }

    /// The tensor-sinc kernel centered at the origin.
    pub fn sinc_kernel(dim: usize) -> Self {
        Self {
            dim,
            centers: vec![vec![0.0; dim]],
            coeffs: vec![1.0],
        }
    }

    /// Seeded random function: centers uniform in `[-spread, spread]^d`,
    /// coefficients uniform in `[-1, 1]`.
    pub fn random(seed: u64, count: usize, dim: usize, spread: f64) -> Self {
        assert!(count >= 1, "need at least one center");
        assert!(dim >= 1, "dimension must be at least 1");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut centers = Vec::with_capacity(count);
        let mut coeffs = Vec::with_capacity(count);
        for _ in 0..count {
            let c: Vec<f64> = (0..dim)
                .map(|_| {
                    let u: f64 = rng.gen();
                    spread * (2.0 * u - 1.0)
                })
                .collect();
            centers.push(c);
            let u: f64 = rng.gen();
            coeffs.push(2.0 * u - 1.0);
        }
        Self {
            dim,
            centers,
            coeffs,
        }
    }

    /// Seeded random function with integer centers in `{-max_center ..
    /// max_center}^d`; sampling such a function on the lattice is exact.
    pub fn random_lattice(seed: u64, count: usize, dim: usize, max_center: i64) -> Self {
        assert!(count >= 1, "need at least one center");
        assert!(dim >= 1, "dimension must be at least 1");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let side = 2 * max_center + 1;
        let mut centers = Vec::with_capacity(count);
        let mut coeffs = Vec::with_capacity(count);
        for _ in 0..count {
            let c: Vec<f64> = (0..dim)
                .map(|_| {
                    let u: f64 = rng.gen();
                    let k = (u * side as f64).floor() as i64 - max_center;
                    k.clamp(-max_center, max_center) as f64
                })
                .collect();
            centers.push(c);
            let u: f64 = rng.gen();
            coeffs.push(2.0 * u - 1.0);
        }
        Self {
            dim,
            centers,
            coeffs,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn centers(&self) -> &[Vec<f64>] {
        &self.centers
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Largest max-norm of any center.
    pub fn max_center_norm(&self) -> f64 {
        self.centers
            .iter()
            .flat_map(|c| c.iter().map(|v| v.abs()))
            .fold(0.0, f64::max)
    }

    /// Exact evaluation of the finite sinc combination.
    pub fn eval(&self, t: &[f64]) -> f64 {
        assert_eq!(
            t.len(),
            self.dim,
            "argument dimension must match the function"
        );
        let mut acc = 0.0;
        let mut arg = vec![0.0; self.dim];
        for (center, &coeff) in self.centers.iter().zip(self.coeffs.iter()) {
            for (i, (&ti, &si)) in t.iter().zip(center.iter()).enumerate() {
                arg[i] = PI * (ti - si);
            }
            acc += coeff * sinc_nd(&arg);
        }
        acc
    }

    /// True when every center coordinate is an integer.
    pub fn has_lattice_centers(&self) -> bool {
        self.centers
            .iter()
            .all(|c| c.iter().all(|&v| v == v.round()))
    }

    /// Paley-Wiener inner product. Integer-center inputs go through the
    /// exact orthonormal-basis path; otherwise the product is the lattice
    /// sum `sum_k f(k) g(k)` truncated at `k_max` with the remainder
    /// estimated from the quadratic sinc tail.
    pub fn pw_inner(&self, other: &Self) -> Result<InnerProduct, TestFnError> {
        let k_max =
            (10.0 * (self.max_center_norm().max(other.max_center_norm()) + 10.0)).ceil() as i64;
        self.pw_inner_truncated(other, k_max)
    }

    /// Inner product with an explicit lattice truncation radius.
    pub fn pw_inner_truncated(
        &self,
        other: &Self,
        k_max: i64,
    ) -> Result<InnerProduct, TestFnError> {
        if self.dim != other.dim {
            return Err(TestFnError::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        if self.has_lattice_centers() && other.has_lattice_centers() {
            let mut value = 0.0;
            for (ci, si) in self.coeffs.iter().zip(self.centers.iter()) {
                for (cj, sj) in other.coeffs.iter().zip(other.centers.iter()) {
                    if si == sj {
                        value += ci * cj;
                    }
                }
            }
            return Ok(InnerProduct {
                value,
                remainder: 0.0,
                exact: true,
            });
        }
        let k_max = k_max.max(1);
        let mut value = 0.0;
        let mut point = vec![0.0f64; self.dim];
        let mut counter = vec![-k_max; self.dim];
        'outer: loop {
            for (i, &c) in counter.iter().enumerate() {
                point[i] = c as f64;
            }
            value += self.eval(&point) * other.eval(&point);
            let mut axis = 0;
            loop {
                if axis == self.dim {
                    break 'outer;
                }
                counter[axis] += 1;
                if counter[axis] <= k_max {
                    break;
                }
                counter[axis] = -k_max;
                axis += 1;
            }
        }
        // Tail of a product of shifted sincs falls off like 1/k^2 per axis,
        // so the remaining mass is of order (sum |c|)^2 * d / k_max.
        let mass_self: f64 = self.coeffs.iter().map(|c| c.abs()).sum();
        let mass_other: f64 = other.coeffs.iter().map(|c| c.abs()).sum();
        let remainder = mass_self * mass_other * (2.0 * self.dim as f64) / (PI * PI * k_max as f64);
        Ok(InnerProduct {
            value,
            remainder,
            exact: false,
        })
    }

    /// Serializes as `c,s_1..s_d` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("c");
        for i in 1..=self.dim {
            let _ = write!(out, ",s_{i}");
        }
        out.push('\n');
        for (c, s) in self.coeffs.iter().zip(self.centers.iter()) {
            let _ = write!(out, "{c}");
            for v in s {
                let _ = write!(out, ",{v}");
            }
            out.push('\n');
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<(), TestFnError> {
        std::fs::write(path, self.to_csv()).map_err(|e| TestFnError::Io(e.to_string()))
    }

    pub fn from_csv(text: &str) -> Result<Self, TestFnError> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or(TestFnError::Csv {
            line: 1,
            msg: "empty file".into(),
        })?;
        let cols: Vec<&str> = header.split(',').collect();
        if cols.len() < 2 || cols[0] != "c" {
            return Err(TestFnError::Csv {
                line: 1,
                msg: format!("bad header {header:?}"),
            });
        }
        let dim = cols.len() - 1;
        let mut centers = Vec::new();
        let mut coeffs = Vec::new();
        for (lineno, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != dim + 1 {
                return Err(TestFnError::Csv {
                    line: lineno + 1,
                    msg: format!("expected {} fields, got {}", dim + 1, fields.len()),
                });
            }
            let c: f64 = fields[0].trim().parse().map_err(|_| TestFnError::Csv {
                line: lineno + 1,
                msg: format!("bad coefficient {:?}", fields[0]),
            })?;
            let mut s = Vec::with_capacity(dim);
            for f in &fields[1..] {
                s.push(f.trim().parse::<f64>().map_err(|_| TestFnError::Csv {
                    line: lineno + 1,
                    msg: format!("bad center coordinate {f:?}"),
                })?);
            }
            coeffs.push(c);
            centers.push(s);
        }
        Self::new(dim, centers, coeffs)
    }

    pub fn read_csv(path: &Path) -> Result<Self, TestFnError> {
        let text = std::fs::read_to_string(path).map_err(|e| TestFnError::Io(e.to_string()))?;
        Self::from_csv(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_is_deterministic() {
        let a = BandlimitedFn::random(11, 5, 2, 4.0);
        let b = BandlimitedFn::random(11, 5, 2, 4.0);
        assert_eq!(a, b);
        assert_ne!(a, BandlimitedFn::random(12, 5, 2, 4.0));
    }

    #[test]
    fn sinc_kernel_at_origin() {
        let f = BandlimitedFn::sinc_kernel(1);
        assert_eq!(f.eval(&[0.0]), 1.0);
        assert!((f.eval(&[0.5]) - 2.0 / PI).abs() < 1e-15);
    }

    #[test]
    fn integer_centers_pick_out_coefficients() {
        let f = BandlimitedFn::new(
            1,
            vec![vec![-2.0], vec![0.0], vec![3.0]],
            vec![0.5, -1.0, 2.0],
        )
        .unwrap();
        assert!((f.eval(&[-2.0]) - 0.5).abs() < 1e-15);
        assert!((f.eval(&[0.0]) + 1.0).abs() < 1e-15);
        assert!((f.eval(&[3.0]) - 2.0).abs() < 1e-15);
        assert!(f.eval(&[1.0]).abs() < 1e-15);
    }

    #[test]
    fn zero_coefficients_give_zero_function() {
        let f = BandlimitedFn::new(1, vec![vec![1.0], vec![2.0]], vec![0.0, 0.0]).unwrap();
        for t in [-3.0, 0.0, 0.7] {
            assert_eq!(f.eval(&[t]), 0.0);
        }
    }

    #[test]
    fn eval_is_linear() {
        let f = BandlimitedFn::new(1, vec![vec![0.0]], vec![0.7]).unwrap();
        let g = BandlimitedFn::new(1, vec![vec![1.0]], vec![-0.3]).unwrap();
        let sum = BandlimitedFn::new(1, vec![vec![0.0], vec![1.0]], vec![0.7, -0.3]).unwrap();
        for t in [-1.3, 0.2, 2.9] {
            assert!((f.eval(&[t]) + g.eval(&[t]) - sum.eval(&[t])).abs() < 1e-15);
        }
    }

    #[test]
    fn inner_product_orthonormality() {
        for (j, k) in [(0i64, 0i64), (0, 1), (2, -3), (4, 4)] {
            let f = BandlimitedFn::new(1, vec![vec![j as f64]], vec![1.0]).unwrap();
            let g = BandlimitedFn::new(1, vec![vec![k as f64]], vec![1.0]).unwrap();
            let ip = f.pw_inner(&g).unwrap();
            let want = if j == k { 1.0 } else { 0.0 };
            assert!(ip.exact);
            assert_eq!(ip.value, want);
        }
    }

    #[test]
    fn inner_product_positivity_on_lattice() {
        let f = BandlimitedFn::new(1, vec![vec![0.0], vec![1.0]], vec![0.3, -0.4]).unwrap();
        let ip = f.pw_inner(&f).unwrap();
        assert!((ip.value - (0.09 + 0.16)).abs() < 1e-15);
        let zero = BandlimitedFn::new(1, vec![vec![0.0]], vec![0.0]).unwrap();
        assert_eq!(zero.pw_inner(&zero).unwrap().value, 0.0);
    }

    #[test]
    fn displaced_norm_matches_closed_form() {
        // <G_0, G_0> = 1 / sinc^2(pi D) for G_0 = sinc(pi .) / sinc(pi D)
        let d = 0.3;
        let scale = 1.0 / crate::kernels::sinc(PI * d);
        let g0 = BandlimitedFn::new(1, vec![vec![0.0]], vec![scale]).unwrap();
        let ip = g0.pw_inner(&g0).unwrap();
        assert!((ip.value - scale * scale).abs() < 1e-14);
    }

    #[test]
    fn general_centers_inner_product_converges() {
        let f = BandlimitedFn::new(1, vec![vec![0.4]], vec![1.0]).unwrap();
        // ||sinc(pi (. - 0.4))||^2 = 1
        let coarse = f.pw_inner_truncated(&f, 100).unwrap();
        let fine = f.pw_inner_truncated(&f, 400).unwrap();
        assert!(!fine.exact);
        assert!((fine.value - 1.0).abs() < (coarse.value - 1.0).abs() + 1e-12);
        assert!((fine.value - 1.0).abs() < 5e-3);
        assert!(fine.remainder < coarse.remainder);
    }

    #[test]
    fn sup_norm_bounded_by_pw_norm() {
        let f = BandlimitedFn::random_lattice(5, 6, 1, 4);
        let norm = f.pw_inner(&f).unwrap().value.sqrt();
        let mut sup = 0.0f64;
        for i in -80..=80 {
            let t = i as f64 * 0.1;
            sup = sup.max(f.eval(&[t]).abs());
        }
        assert!(sup <= norm + 1e-12, "sup {sup} vs norm {norm}");
    }

    #[test]
    fn lattice_reproducing_truncations_converge() {
        let f = BandlimitedFn::new(1, vec![vec![0.3], vec![-1.6]], vec![0.8, -0.5]).unwrap();
        let partial = |k_max: i64, t: f64| {
            let mut acc = 0.0;
            for k in -k_max..=k_max {
                acc += f.eval(&[k as f64]) * crate::kernels::sinc(PI * (t - k as f64));
            }
            acc
        };
        for &t in &[0.0, 0.45, -1.1] {
            let err_small = (partial(50, t) - f.eval(&[t])).abs();
            let err_big = (partial(200, t) - f.eval(&[t])).abs();
            assert!(err_big <= err_small + 1e-12);
            assert!(err_big < 5e-3, "t = {t}: {err_big}");
        }
    }

    #[test]
    fn csv_round_trip() {
        let f = BandlimitedFn::random(3, 4, 2, 5.0);
        let back = BandlimitedFn::from_csv(&f.to_csv()).unwrap();
        assert_eq!(f, back);
    }
}
