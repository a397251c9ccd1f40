//! Dense symmetric linear algebra: Cholesky factorization, explicit inverse,
//! Jacobi eigenvalues, and a two-norm condition estimate.
//!
//! Sections in this crate are small (a few hundred rows), dense, and must be
//! solved deterministically, so everything here is straightforward
//! single-threaded code with no blocking or pivoting.

use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix is not positive definite (pivot {pivot} is {value:.3e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// Dense symmetric matrix in full row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    /// Builds from an entry function, evaluating only the lower triangle and
    /// mirroring it, so the result is symmetric by construction.
    pub fn from_fn<F: FnMut(usize, usize) -> f64>(n: usize, mut entry: F) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                let v = entry(i, j);
                m.data[i * n + j] = v;
                m.data[j * n + i] = v;
            }
        }
        m
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
        self.data[j * self.n + i] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n, "vector length must match matrix size");
        (0..self.n)
            .map(|i| self.row(i).iter().zip(x.iter()).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Largest absolute deviation of `self * other` from the identity.
    pub fn residual_vs_inverse(&self, other: &SymMatrix) -> f64 {
        assert_eq!(self.n, other.n);
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for j in 0..self.n {
                let mut acc = 0.0;
                for k in 0..self.n {
                    acc += self.get(i, k) * other.get(k, j);
                }
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((acc - target).abs());
            }
        }
        worst
    }
}

/// Lower-triangular Cholesky factor of a symmetric positive definite matrix.
#[derive(Debug, Clone)]
pub struct Cholesky {
    n: usize,
    // Lower triangle of L, row-major full storage (upper part unused).
    factor: Vec<f64>,
}

impl Cholesky {
    pub fn factor(m: &SymMatrix) -> Result<Self, LinalgError> {
        let n = m.n;
        let mut a = m.data.clone();
        for j in 0..n {
            let mut diag = a[j * n + j];
            for k in 0..j {
                diag -= a[j * n + k] * a[j * n + k];
            }
            if diag <= 0.0 || !diag.is_finite() {
                return Err(LinalgError::NotPositiveDefinite {
                    pivot: j,
                    value: diag,
                });
            }
            let ljj = diag.sqrt();
            a[j * n + j] = ljj;
            for i in (j + 1)..n {
                let mut v = a[i * n + j];
                for k in 0..j {
                    v -= a[i * n + k] * a[j * n + k];
                }
                a[i * n + j] = v / ljj;
            }
        }
        Ok(Self { n, factor: a })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Solves `A x = rhs` by forward/backward substitution.
    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        assert_eq!(rhs.len(), self.n, "rhs length must match matrix size");
        let n = self.n;
        let l = &self.factor;
        let mut x = rhs.to_vec();
        // L y = rhs
        for i in 0..n {
            let mut v = x[i];
            for k in 0..i {
                v -= l[i * n + k] * x[k];
            }
            x[i] = v / l[i * n + i];
        }
        // L^T x = y
        for i in (0..n).rev() {
            let mut v = x[i];
            for k in (i + 1)..n {
                v -= l[k * n + i] * x[k];
            }
            x[i] = v / l[i * n + i];
        }
        x
    }

    /// Explicit inverse, column by column.
    pub fn inverse(&self) -> SymMatrix {
        let n = self.n;
        let mut inv = SymMatrix::zeros(n);
        let mut e = vec![0.0; n];
        for j in 0..n {
            e[j] = 1.0;
            let col = self.solve(&e);
            e[j] = 0.0;
            for (i, v) in col.into_iter().enumerate() {
                inv.data[i * n + j] = v;
            }
        }
        // Symmetrize to remove rounding skew between the two triangles.
        for i in 0..n {
            for j in 0..i {
                let v = 0.5 * (inv.data[i * n + j] + inv.data[j * n + i]);
                inv.data[i * n + j] = v;
                inv.data[j * n + i] = v;
            }
        }
        inv
    }
}

/// All eigenvalues of a symmetric matrix by cyclic Jacobi rotations,
/// returned in ascending order.
pub fn jacobi_eigenvalues(m: &SymMatrix) -> Vec<f64> {
    let n = m.n;
    if n == 0 {
        return Vec::new();
    }
    if n == 1 {
        return vec![m.get(0, 0)];
    }
    let mut a = m.data.clone();
    let max_sweeps = 64;
    for _ in 0..max_sweeps {
        let mut off = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                off += a[i * n + j] * a[i * n + j];
            }
        }
        if off.sqrt() < 1e-14 * (n as f64) {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                // Stable tangent of the rotation angle.
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    1.0 / (theta - (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    eig.sort_by(|x, y| x.partial_cmp(y).unwrap());
    eig
}

/// Two-norm condition estimate from power iteration on `A` and inverse
/// iteration through the Cholesky factorization. An estimate is all the
/// callers need: it gates an ill-conditioning error, not an accuracy claim.
pub fn condition_estimate(m: &SymMatrix, chol: &Cholesky) -> f64 {
    let n = m.n;
    if n == 0 {
        return 1.0;
    }
    if n == 1 {
        return 1.0;
    }
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.5 * ((i % 7) as f64) / 7.0).collect();
    normalize(&mut v);
    let mut lambda_max = 0.0f64;
    for _ in 0..30 {
        let mut w = m.mul_vec(&v);
        lambda_max = norm2(&w);
        if lambda_max == 0.0 {
            break;
        }
        normalize(&mut w);
        v = w;
    }
    let mut u: Vec<f64> = (0..n).map(|i| 1.0 - 0.5 * ((i % 5) as f64) / 5.0).collect();
    normalize(&mut u);
    let mut inv_norm = 0.0f64;
    for _ in 0..30 {
        let mut w = chol.solve(&u);
        inv_norm = norm2(&w);
        if !inv_norm.is_finite() || inv_norm == 0.0 {
            break;
        }
        normalize(&mut w);
        u = w;
    }
    if inv_norm == 0.0 || !inv_norm.is_finite() {
        return f64::INFINITY;
    }
    lambda_max * inv_norm
}

fn norm2(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn normalize(x: &mut [f64]) {
    let n = norm2(x);
    if n > 0.0 {
        for v in x.iter_mut() {
            *v /= n;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spd_3x3() -> SymMatrix {
        // Tridiagonal (2, -1) matrix, eigenvalues 2 - 2cos(k pi / 4).
        SymMatrix::from_fn(3, |i, j| {
            if i == j {
                2.0
            } else if i.abs_diff(j) == 1 {
                -1.0
            } else {
                0.0
            }
        })
    }

    #[test]
    fn cholesky_solves_spd_system() {
        let m = spd_3x3();
        let chol = Cholesky::factor(&m).unwrap();
        let rhs = vec![1.0, 2.0, 3.0];
        let x = chol.solve(&rhs);
        let back = m.mul_vec(&x);
        for (a, b) in back.iter().zip(rhs.iter()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let m = SymMatrix::from_fn(2, |i, j| if i == j { 1.0 } else { 2.0 });
        let err = Cholesky::factor(&m).unwrap_err();
        assert!(matches!(err, LinalgError::NotPositiveDefinite { .. }));
    }

    #[test]
    fn inverse_times_matrix_is_identity() {
        let m = spd_3x3();
        let inv = Cholesky::factor(&m).unwrap().inverse();
        assert!(m.residual_vs_inverse(&inv) < 1e-12);
    }

    #[test]
    fn jacobi_matches_known_eigenvalues() {
        let m = spd_3x3();
        let eig = jacobi_eigenvalues(&m);
        let expected = [2.0 - 2.0_f64.sqrt(), 2.0, 2.0 + 2.0_f64.sqrt()];
        for (got, want) in eig.iter().zip(expected.iter()) {
            assert!((got - want).abs() < 1e-12, "got {got}, want {want}");
        }
    }

    #[test]
    fn condition_estimate_tracks_true_ratio() {
        let m = spd_3x3();
        let chol = Cholesky::factor(&m).unwrap();
        let cond = condition_estimate(&m, &chol);
        let true_cond = (2.0 + 2.0_f64.sqrt()) / (2.0 - 2.0_f64.sqrt());
        assert!((cond - true_cond).abs() / true_cond < 0.05);
    }
}
