//! Sampling of bandlimited functions at scaled nodes and reconstruction by
//! finite Gram sections: the critical-rate path sums shifted sinc kernels,
//! the oversampled path sums the smooth kernel at scaled nodes. The Gram
//! section is always built from the unscaled nodes; scaling enters only
//! through the sample points `t_k / lambda` and the kernel arguments.
//!
//! Sample noise has no guaranteed reconstruction bound here (the coefficient
//! operator does not act boundedly on sup-norm perturbations of the raw
//! samples); bounds are offered only for perturbations of the solved
//! coefficient vector, which is what [`stability_bound`] certifies.

use thiserror::Error;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::gram::{GramError, GramSection};
use crate::kernels::{sinc_nd, KernelError, SmoothKernel};
use crate::nodes::NodeSet;
use crate::testfn::BandlimitedFn;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum ReconstructError {
    #[error("oversampling factor must be at least 1, got {0}")]
    LambdaTooSmall(f64),
    #[error("critical-rate reconstruction requires lambda = 1, got {0}")]
    LambdaNotOne(f64),
    #[error(transparent)]
    Gram(#[from] GramError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error("sample vector has {samples} values but the section size is {l}")]
    SampleCountMismatch { samples: usize, l: usize },
    #[error("window length {l} exceeds the node count {count}")]
    WindowTooLong { l: usize, count: usize },
    #[error("dimension mismatch: nodes are {nodes}-dimensional, function is {f}-dimensional")]
    DimensionMismatch { nodes: usize, f: usize },
    #[error("empty evaluation grid")]
    EmptyGrid,
    #[error("invalid grid: {0}")]
    BadGrid(String),
}

/// Where a sample vector came from.
#[derive(Debug, Clone, PartialEq)]
pub enum Provenance {
    Clean,
    Perturbed { epsilon: f64, mode: String },
}

/// Values `f(t_k / lambda)` over the leading section window.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleVector {
    pub values: Vec<f64>,
    pub lambda: f64,
    pub provenance: Provenance,
}

impl SampleVector {
    /// Copy with seeded uniform noise of sup-norm at most `epsilon` added,
    /// recorded in the provenance.
    pub fn perturbed(&self, epsilon: f64, seed: u64) -> SampleVector {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values = self
            .values
            .iter()
            .map(|v| {
                let u: f64 = rng.gen();
                v + epsilon * (2.0 * u - 1.0)
            })
            .collect();
        SampleVector {
            values,
            lambda: self.lambda,
            provenance: Provenance::Perturbed {
                epsilon,
                mode: format!("uniform(seed={seed})"),
            },
        }
    }
}

/// Uniform evaluation grid, the same range and step on every axis.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    dim: usize,
    start: f64,
    stop: f64,
    step: f64,
}

impl Grid {
    pub fn new(dim: usize, start: f64, stop: f64, step: f64) -> Result<Self, ReconstructError> {
        if dim == 0 {
            return Err(ReconstructError::BadGrid("dimension must be >= 1".into()));
        }
        if step <= 0.0 || !step.is_finite() {
            return Err(ReconstructError::BadGrid(format!("step {step}")));
        }
        if stop < start || !start.is_finite() || !stop.is_finite() {
            return Err(ReconstructError::BadGrid(format!("range {start}..{stop}")));
        }
        Ok(Self {
            dim,
            start,
            stop,
            step,
        })
    }

    /// Default reporting grid for a window radius `w`: `[-w/2, w/2]` with
    /// step 0.1, keeping window-truncation error away from the report
    /// region.
    pub fn default_for_window(dim: usize, window_radius: i64) -> Self {
        let half = window_radius as f64 / 2.0;
        Self {
            dim,
            start: -half,
            stop: half,
            step: 0.1,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn axis_points(&self) -> Vec<f64> {
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        (0..=count)
            .map(|i| self.start + i as f64 * self.step)
            .collect()
    }

    /// All grid points in row-major order.
    pub fn points(&self) -> Vec<Vec<f64>> {
        let axis = self.axis_points();
        let mut out = Vec::with_capacity(axis.len().pow(self.dim as u32));
        let mut counter = vec![0usize; self.dim];
        'outer: loop {
            out.push(counter.iter().map(|&i| axis[i]).collect());
            let mut ax = 0;
            loop {
                if ax == self.dim {
                    break 'outer;
                }
                counter[ax] += 1;
                if counter[ax] < axis.len() {
                    break;
                }
                counter[ax] = 0;
                ax += 1;
            }
        }
        out
    }
}

/// Sup and root-mean-square error over a grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorMetrics {
    pub sup: f64,
    pub rms: f64,
}

impl ErrorMetrics {
    pub fn between(a: &[f64], b: &[f64]) -> ErrorMetrics {
        assert_eq!(a.len(), b.len(), "grids must match");
        let mut sup = 0.0f64;
        let mut sq = 0.0f64;
        for (x, y) in a.iter().zip(b.iter()) {
            let e = (x - y).abs();
            sup = sup.max(e);
            sq += e * e;
        }
        let rms = if a.is_empty() {
            0.0
        } else {
            (sq / a.len() as f64).sqrt()
        };
        ErrorMetrics { sup, rms }
    }
}

/// Solved coefficients, the evaluation grid, and reconstructed values;
/// truth values and error metrics appear once [`error_report`] has run.
#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructionResult {
    pub coefficients: Vec<f64>,
    pub grid_points: Vec<Vec<f64>>,
    pub values: Vec<f64>,
    pub truth: Option<Vec<f64>>,
    pub metrics: Option<ErrorMetrics>,
}

/// Samples `f` at `t_k / lambda` over the leading `l` node entries.
pub fn sample(
    f: &BandlimitedFn,
    nodes: &NodeSet,
    l: usize,
    lambda: f64,
) -> Result<SampleVector, ReconstructError> {
    if lambda < 1.0 || !lambda.is_finite() {
        return Err(ReconstructError::LambdaTooSmall(lambda));
    }
    if l > nodes.len() {
        return Err(ReconstructError::WindowTooLong {
            l,
            count: nodes.len(),
        });
    }
    if f.dim() != nodes.dim() {
        return Err(ReconstructError::DimensionMismatch {
            nodes: nodes.dim(),
            f: f.dim(),
        });
    }
    let mut point = vec![0.0f64; nodes.dim()];
    let values = nodes.entries()[..l]
        .iter()
        .map(|e| {
            for (i, &c) in e.node.iter().enumerate() {
                point[i] = c / lambda;
            }
            f.eval(&point)
        })
        .collect();
    Ok(SampleVector {
        values,
        lambda,
        provenance: Provenance::Clean,
    })
}

/// Critical-rate reconstruction: solve the Gram section against the samples
/// and sum shifted sinc kernels on the grid. Requires `lambda = 1`.
pub fn reconstruct_sinc(
    nodes: &NodeSet,
    l: usize,
    samples: &SampleVector,
    grid: &Grid,
) -> Result<ReconstructionResult, ReconstructError> {
    if samples.lambda != 1.0 {
        return Err(ReconstructError::LambdaNotOne(samples.lambda));
    }
    if samples.values.len() != l {
        return Err(ReconstructError::SampleCountMismatch {
            samples: samples.values.len(),
            l,
        });
    }
    let section = GramSection::build(nodes, l)?;
    let coefficients = section.solve(&samples.values);
    let grid_points = grid.points();
    if grid_points.is_empty() {
        return Err(ReconstructError::EmptyGrid);
    }
    let dim = nodes.dim();
    let mut arg = vec![0.0f64; dim];
    let values = grid_points
        .iter()
        .map(|t| {
            let mut acc = 0.0;
            for (c, node) in coefficients.iter().zip(section.nodes()) {
                for i in 0..dim {
                    arg[i] = std::f64::consts::PI * (t[i] - node[i]);
                }
                acc += c * sinc_nd(&arg);
            }
            acc
        })
        .collect();
    Ok(ReconstructionResult {
        coefficients,
        grid_points,
        values,
        truth: None,
        metrics: None,
    })
}

/// Oversampled reconstruction: the Gram section comes from the unscaled
/// nodes, the kernel is evaluated at `t - t_k / lambda`, and the sum carries
/// the `1 / lambda^d` normalization. Requires `lambda >= lambda0` of the
/// kernel.
pub fn reconstruct_oversampled(
    nodes: &NodeSet,
    l: usize,
    samples: &SampleVector,
    kernel: &SmoothKernel,
    grid: &Grid,
) -> Result<ReconstructionResult, ReconstructError> {
    let lambda = samples.lambda;
    if lambda < kernel.lambda0() {
        return Err(ReconstructError::Kernel(KernelError::LambdaBelowProfile {
            lambda,
            lambda0: kernel.lambda0(),
        }));
    }
    if samples.values.len() != l {
        return Err(ReconstructError::SampleCountMismatch {
            samples: samples.values.len(),
            l,
        });
    }
    let section = GramSection::build(nodes, l)?;
    let coefficients = section.solve(&samples.values);
    let grid_points = grid.points();
    if grid_points.is_empty() {
        return Err(ReconstructError::EmptyGrid);
    }
    let dim = nodes.dim();
    let scale = lambda.powi(dim as i32).recip();
    let mut arg = vec![0.0f64; dim];
    let values = grid_points
        .iter()
        .map(|t| {
            let mut acc = 0.0;
            for (c, node) in coefficients.iter().zip(section.nodes()) {
                for i in 0..dim {
                    arg[i] = t[i] - node[i] / lambda;
                }
                acc += c * kernel.eval(&arg);
            }
            scale * acc
        })
        .collect();
    Ok(ReconstructionResult {
        coefficients,
        grid_points,
        values,
        truth: None,
        metrics: None,
    })
}

/// Pointwise stability bound `epsilon * sum_k |g(t - t_k/lambda)|` over the
/// grid: what a sup-norm perturbation of the solved coefficient vector can
/// do to the reconstruction.
pub fn stability_bound(
    epsilon: f64,
    grid: &Grid,
    nodes: &NodeSet,
    lambda: f64,
    kernel: &SmoothKernel,
) -> Result<Vec<f64>, ReconstructError> {
    assert!(epsilon >= 0.0, "noise level must be nonnegative");
    let points = grid.points();
    let mut out = Vec::with_capacity(points.len());
    for t in &points {
        let tail = kernel.tail_sum(t, nodes, nodes.len(), lambda)?;
        out.push(epsilon * tail.sum);
    }
    Ok(out)
}

/// Fills in truth values and error metrics against an exactly evaluable
/// ground truth.
pub fn error_report(truth: &BandlimitedFn, result: &mut ReconstructionResult) -> ErrorMetrics {
    let truth_values: Vec<f64> = result.grid_points.iter().map(|t| truth.eval(t)).collect();
    let metrics = ErrorMetrics::between(&truth_values, &result.values);
    result.truth = Some(truth_values);
    result.metrics = Some(metrics);
    metrics
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nodes::PerturbMode;

    #[test]
    fn grid_points_cover_range() {
        let grid = Grid::new(1, -1.0, 1.0, 0.5).unwrap();
        let pts = grid.points();
        let flat: Vec<f64> = pts.iter().map(|p| p[0]).collect();
        assert_eq!(flat, vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        let grid2 = Grid::new(2, 0.0, 1.0, 1.0).unwrap();
        assert_eq!(grid2.points().len(), 4);
    }

    #[test]
    fn sampling_sinc_kernel_on_lattice() {
        let f = BandlimitedFn::sinc_kernel(1);
        let nodes = NodeSet::lattice(1, 3).unwrap();
        let sv = sample(&f, &nodes, 7, 1.0).unwrap();
        assert_eq!(sv.values[0], 1.0);
        for v in &sv.values[1..] {
            assert!(v.abs() < 1e-15);
        }
        let sv2 = sample(&f, &nodes, 7, 2.0).unwrap();
        assert_eq!(sv2.values[0], 1.0);
        assert_eq!(sv2.provenance, Provenance::Clean);
    }

    #[test]
    fn perturbed_samples_record_noise() {
        let f = BandlimitedFn::sinc_kernel(1);
        let nodes = NodeSet::lattice(1, 3).unwrap();
        let sv = sample(&f, &nodes, 7, 1.0).unwrap();
        let noisy = sv.perturbed(1e-3, 9);
        match &noisy.provenance {
            Provenance::Perturbed { epsilon, .. } => assert_eq!(*epsilon, 1e-3),
            other => panic!("expected perturbed provenance, got {other:?}"),
        }
        for (a, b) in sv.values.iter().zip(noisy.values.iter()) {
            assert!((a - b).abs() <= 1e-3);
        }
        assert_eq!(noisy.values, sv.perturbed(1e-3, 9).values);
    }

    #[test]
    fn lattice_reconstruction_is_exact() {
        let f = BandlimitedFn::random_lattice(21, 5, 1, 3);
        let nodes = NodeSet::lattice(1, 10).unwrap();
        let l = nodes.len();
        let sv = sample(&f, &nodes, l, 1.0).unwrap();
        let grid = Grid::new(1, -3.0, 3.0, 0.1).unwrap();
        let mut result = reconstruct_sinc(&nodes, l, &sv, &grid).unwrap();
        let metrics = error_report(&f, &mut result);
        assert!(metrics.sup <= 1e-12, "sup error {}", metrics.sup);
    }

    #[test]
    fn zero_samples_give_zero_reconstruction() {
        let nodes = NodeSet::lattice(1, 5).unwrap();
        let sv = SampleVector {
            values: vec![0.0; nodes.len()],
            lambda: 1.0,
            provenance: Provenance::Clean,
        };
        let grid = Grid::new(1, -2.0, 2.0, 0.25).unwrap();
        let result = reconstruct_sinc(&nodes, nodes.len(), &sv, &grid).unwrap();
        assert!(result.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn sinc_path_requires_unit_lambda() {
        let nodes = NodeSet::lattice(1, 3).unwrap();
        let sv = SampleVector {
            values: vec![0.0; nodes.len()],
            lambda: 2.0,
            provenance: Provenance::Clean,
        };
        let grid = Grid::new(1, -1.0, 1.0, 0.5).unwrap();
        let err = reconstruct_sinc(&nodes, nodes.len(), &sv, &grid).unwrap_err();
        assert!(matches!(err, ReconstructError::LambdaNotOne(_)));
    }

    #[test]
    fn oversampled_lattice_reconstruction_is_accurate() {
        // the slow 1/n sample decay means the window must comfortably cover
        // the report region after the 1/lambda rescaling of the nodes
        let f = BandlimitedFn::random_lattice(22, 4, 1, 2);
        let nodes = NodeSet::lattice(1, 60).unwrap();
        let l = nodes.len();
        let sv = sample(&f, &nodes, l, 2.0).unwrap();
        let kernel = SmoothKernel::new(1, 1.5, 64).unwrap();
        let grid = Grid::new(1, -2.0, 2.0, 0.1).unwrap();
        let mut result = reconstruct_oversampled(&nodes, l, &sv, &kernel, &grid).unwrap();
        let metrics = error_report(&f, &mut result);
        assert!(metrics.sup <= 1e-6, "sup error {}", metrics.sup);
    }

    #[test]
    fn oversampled_rejects_lambda_below_profile() {
        let nodes = NodeSet::lattice(1, 3).unwrap();
        let kernel = SmoothKernel::new(1, 1.5, 32).unwrap();
        let sv = SampleVector {
            values: vec![0.0; nodes.len()],
            lambda: 1.2,
            provenance: Provenance::Clean,
        };
        let grid = Grid::new(1, -1.0, 1.0, 0.5).unwrap();
        let err = reconstruct_oversampled(&nodes, nodes.len(), &sv, &kernel, &grid).unwrap_err();
        assert!(matches!(
            err,
            ReconstructError::Kernel(KernelError::LambdaBelowProfile { .. })
        ));
    }

    #[test]
    fn oversampled_at_lambda0_matches_direct_cardinal_sum() {
        // identity Gram on the lattice: coefficients are the samples, so the
        // reconstruction is exactly the scaled kernel series
        let f = BandlimitedFn::random_lattice(7, 3, 1, 2);
        let nodes = NodeSet::lattice(1, 15).unwrap();
        let l = nodes.len();
        let lambda = 1.5;
        let sv = sample(&f, &nodes, l, lambda).unwrap();
        let kernel = SmoothKernel::new(1, 1.5, 64).unwrap();
        let grid = Grid::new(1, -1.0, 1.0, 0.25).unwrap();
        let result = reconstruct_oversampled(&nodes, l, &sv, &kernel, &grid).unwrap();
        for (t, got) in grid.points().iter().zip(result.values.iter()) {
            let mut want = 0.0;
            for (e, v) in nodes.entries().iter().zip(sv.values.iter()) {
                want += v * kernel.eval1(t[0] - e.node[0] / lambda);
            }
            want /= lambda;
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn displaced_error_shrinks_with_section_size() {
        let f = BandlimitedFn::random_lattice(23, 4, 1, 3);
        let nodes =
            NodeSet::perturbed(1, 40, &PerturbMode::SingleDisplaced { displacement: 0.3 }).unwrap();
        let grid = Grid::new(1, -3.0, 3.0, 0.1).unwrap();
        let mut sups = Vec::new();
        for l in [41usize, 81] {
            let sv = sample(&f, &nodes, l, 1.0).unwrap();
            let mut result = reconstruct_sinc(&nodes, l, &sv, &grid).unwrap();
            let metrics = error_report(&f, &mut result);
            sups.push(metrics.sup);
        }
        assert!(sups[1] <= sups[0], "sup errors {sups:?}");
    }

    #[test]
    fn stability_bound_scales_linearly() {
        let nodes = NodeSet::lattice(1, 10).unwrap();
        let kernel = SmoothKernel::new(1, 1.5, 32).unwrap();
        let grid = Grid::new(1, -2.0, 2.0, 0.5).unwrap();
        let zero = stability_bound(0.0, &grid, &nodes, 1.5, &kernel).unwrap();
        assert!(zero.iter().all(|&v| v == 0.0));
        let one = stability_bound(1e-3, &grid, &nodes, 1.5, &kernel).unwrap();
        let two = stability_bound(2e-3, &grid, &nodes, 1.5, &kernel).unwrap();
        for (a, b) in one.iter().zip(two.iter()) {
            assert!((2.0 * a - b).abs() < 1e-15);
            assert!(*a > 0.0);
        }
    }

    #[test]
    fn coefficient_noise_obeys_stability_bound() {
        let f = BandlimitedFn::random_lattice(31, 4, 1, 2);
        let nodes = NodeSet::perturbed(
            1,
            15,
            &PerturbMode::RandomUniform {
                delta: 0.1,
                seed: 3,
            },
        )
        .unwrap();
        let l = nodes.len();
        let lambda = 2.0;
        let kernel = SmoothKernel::new(1, 1.5, 64).unwrap();
        let grid = Grid::new(1, -2.0, 2.0, 0.25).unwrap();
        let sv = sample(&f, &nodes, l, lambda).unwrap();
        let clean = reconstruct_oversampled(&nodes, l, &sv, &kernel, &grid).unwrap();
        let eps = 1e-3;
        let bound = stability_bound(eps, &grid, &nodes, lambda, &kernel).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..2 {
            let noisy: Vec<f64> = clean
                .coefficients
                .iter()
                .map(|c| c + eps * (2.0 * rng.gen::<f64>() - 1.0))
                .collect();
            let scale = 1.0 / lambda;
            for (idx, t) in grid.points().iter().enumerate() {
                let mut v = 0.0;
                for (c, e) in noisy.iter().zip(nodes.entries()) {
                    v += c * kernel.eval1(t[0] - e.node[0] / lambda);
                }
                v *= scale;
                let dev = (v - clean.values[idx]).abs();
                assert!(dev <= bound[idx] + 1e-15, "{dev} > {}", bound[idx]);
            }
        }
    }

    #[test]
    fn error_report_examples() {
        let truth = vec![1.0, 2.0, 3.0];
        let same = ErrorMetrics::between(&truth, &truth);
        assert_eq!((same.sup, same.rms), (0.0, 0.0));
        let shifted: Vec<f64> = truth.iter().map(|v| v + 1e-3).collect();
        let m = ErrorMetrics::between(&truth, &shifted);
        assert!((m.sup - 1e-3).abs() < 1e-12);
        assert!((m.rms - 1e-3).abs() < 1e-12);
    }
}
