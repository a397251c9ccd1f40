//! Finite sections of the Gram matrix of sampling exponentials.
//!
//! For nodes `t_1, ..., t_l` the section has entries
//! `prod_i sinc(pi (t_{n,i} - t_{m,i}))`; it is symmetric with unit diagonal
//! and positive definite whenever the nodes are distinct. Reconstruction
//! coefficients solve this matrix against the sample vector, and its
//! explicit inverse approximates the doubly infinite coefficient operator
//! entrywise as the section grows. Ill-conditioning is an error, never
//! silently regularized: under the Riesz-basis hypotheses the sections stay
//! uniformly conditioned, so a failure is a diagnostic about the nodes.

use std::f64::consts::PI;

use thiserror::Error;

use crate::kernels::sinc;
use crate::linalg::{condition_estimate, jacobi_eigenvalues, Cholesky, LinalgError, SymMatrix};
use crate::nodes::NodeSet;

/// Condition estimates beyond this are treated as failure.
pub const CONDITION_LIMIT: f64 = 1e12;

/// Node pairs closer than this are named as the likely cause when a section
/// fails.
pub const NEAR_DUPLICATE_GAP: f64 = 1e-6;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum GramError {
    #[error("section size must be between 1 and the entry count {count}, got {l}")]
    BadSectionSize { l: usize, count: usize },
    #[error("duplicate nodes at entries {i} and {j}")]
    DuplicateNodes { i: usize, j: usize },
    #[error("gram section is ill-conditioned (estimate {cond:.3e}){}", near_duplicate_note(.pair))]
    IllConditioned {
        cond: f64,
        pair: Option<(usize, usize, f64)>,
    },
}

fn near_duplicate_note(pair: &Option<(usize, usize, f64)>) -> String {
    match pair {
        Some((i, j, gap)) => format!("; entries {i} and {j} are {gap:.3e} apart"),
        None => String::new(),
    }
}

impl From<LinalgError> for GramError {
    fn from(_: LinalgError) -> Self {
        GramError::IllConditioned {
            cond: f64::INFINITY,
            pair: None,
        }
    }
}

/// Tensor-sinc inner product of the exponentials attached to two nodes.
pub fn gram_entry(t_n: &[f64], t_m: &[f64]) -> f64 {
    assert_eq!(t_n.len(), t_m.len(), "nodes must have equal dimension");
    t_n.iter()
        .zip(t_m.iter())
        .map(|(&a, &b)| sinc(PI * (a - b)))
        .product()
}

/// Factorized `l x l` leading section of the Gram matrix for a node set.
#[derive(Debug, Clone)]
pub struct GramSection {
    l: usize,
    dim: usize,
    nodes: Vec<Vec<f64>>,
    matrix: SymMatrix,
    chol: Cholesky,
    cond_estimate: f64,
}

impl GramSection {
    /// Builds and factorizes the leading `l x l` section.
    pub fn build(nodes: &NodeSet, l: usize) -> Result<Self, GramError> {
        if l == 0 || l > nodes.len() {
            return Err(GramError::BadSectionSize {
                l,
                count: nodes.len(),
            });
        }
        let pts: Vec<Vec<f64>> = nodes.entries()[..l]
            .iter()
            .map(|e| e.node.clone())
            .collect();
        for i in 0..l {
            for j in (i + 1)..l {
                if pts[i] == pts[j] {
                    return Err(GramError::DuplicateNodes { i: i + 1, j: j + 1 });
                }
            }
        }
        let matrix = SymMatrix::from_fn(l, |i, j| {
            if i == j {
                1.0
            } else {
                gram_entry(&pts[i], &pts[j])
            }
        });
        let chol = match Cholesky::factor(&matrix) {
            Ok(c) => c,
            Err(LinalgError::NotPositiveDefinite { .. }) => {
                return Err(GramError::IllConditioned {
                    cond: f64::INFINITY,
                    pair: nearest_pair(&pts),
                });
            }
            Err(e) => return Err(e.into()),
        };
        let cond_estimate = condition_estimate(&matrix, &chol);
        if cond_estimate.is_nan() || cond_estimate > CONDITION_LIMIT {
            return Err(GramError::IllConditioned {
                cond: cond_estimate,
                pair: nearest_pair(&pts),
            });
        }
        Ok(Self {
            l,
            dim: nodes.dim(),
            nodes: pts,
            matrix,
            chol,
            cond_estimate,
        })
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nodes(&self) -> &[Vec<f64>] {
        &self.nodes
    }

    pub fn matrix(&self) -> &SymMatrix {
        &self.matrix
    }

    pub fn condition_estimate(&self) -> f64 {
        self.cond_estimate
    }

    /// Solves the section against a right-hand side.
    ///
    /// # Panics
    /// Panics if `rhs.len() != l`.
    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        assert_eq!(rhs.len(), self.l, "rhs length must equal the section size");
        self.chol.solve(rhs)
    }

    /// Explicit inverse of the section, read as the finite-rank coefficient
    /// operator.
    pub fn inverse(&self) -> BApprox {
        BApprox {
            l: self.l,
            matrix: self.chol.inverse(),
        }
    }

    /// All eigenvalues of the section, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        jacobi_eigenvalues(&self.matrix)
    }

    /// Extreme eigenvalues `(min, max)`; finite-section estimates of the
    /// frame bounds.
    pub fn frame_bound_estimates(&self) -> (f64, f64) {
        let eig = self.eigenvalues();
        (eig[0], *eig.last().unwrap())
    }
}

fn nearest_pair(pts: &[Vec<f64>]) -> Option<(usize, usize, f64)> {
    let mut best: Option<(usize, usize, f64)> = None;
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            let gap = pts[i]
                .iter()
                .zip(pts[j].iter())
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            if best.is_none_or(|(_, _, g)| gap < g) {
                best = Some((i + 1, j + 1, gap));
            }
        }
    }
    best.filter(|&(_, _, gap)| gap < NEAR_DUPLICATE_GAP)
}

/// Dense inverse of a Gram section: the finite-rank approximation of the
/// coefficient operator, with rows and entries exposed for convergence
/// studies.
#[derive(Debug, Clone)]
pub struct BApprox {
    l: usize,
    matrix: SymMatrix,
}

impl BApprox {
    pub fn l(&self) -> usize {
        self.l
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.matrix.get(i, j)
    }

    pub fn row(&self, i: usize) -> &[f64] {
        self.matrix.row(i)
    }

    pub fn matrix(&self) -> &SymMatrix {
        &self.matrix
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.matrix.mul_vec(x)
    }
}

/// Exact norm of `sum_k a_k (e_k - f_k)`, the difference between the lattice
/// exponentials and the perturbed ones, over the leading `a.len()` entries.
/// Expanding the square gives a four-term Gram identity in tensor-sinc
/// values, so no integral is ever discretized.
pub fn diff_norm(a: &[f64], nodes: &NodeSet) -> f64 {
    assert!(
        a.len() <= nodes.len(),
        "coefficient vector longer than the node window"
    );
    let entries = &nodes.entries()[..a.len()];
    let mut acc = 0.0;
    for (k, ek) in entries.iter().enumerate() {
        let nk: Vec<f64> = ek.lattice.iter().map(|&c| c as f64).collect();
        for (j, ej) in entries.iter().enumerate() {
            let nj: Vec<f64> = ej.lattice.iter().map(|&c| c as f64).collect();
            let delta = if k == j { 1.0 } else { 0.0 };
            let q = delta - gram_entry(&nk, &ej.node) - gram_entry(&ek.node, &nj)
                + gram_entry(&ek.node, &ej.node);
            acc += a[k] * a[j] * q;
        }
    }
    acc.max(0.0).sqrt()
}

/// `e^{pi L d} - 1`: the operator-norm bound on the lattice-to-perturbed
/// difference map at sup deviation `L` in dimension `d`.
pub fn perturbation_bound(sup_dev: f64, dim: usize) -> f64 {
    assert!(sup_dev >= 0.0, "sup deviation must be nonnegative");
    assert!(dim >= 1, "dimension must be at least 1");
    (PI * sup_dev * dim as f64).exp_m1()
}
