//! Nonuniform sampling and reconstruction of bandlimited functions.
//!
//! The crate evaluates truncated reconstruction formulas for functions in the
//! Paley-Wiener space over the cube `[-pi, pi]^d`: samples taken at a
//! perturbed integer lattice are turned back into function values by solving
//! a finite section of the Gram matrix of the sampling exponentials, then
//! summing either shifted sinc kernels (critical sampling) or a smooth,
//! rapidly decaying oversampling kernel. Alongside the solver there are
//! Riesz-basis admissibility criteria for perturbed lattices, perturbation
//! norm bounds, and Levinson-style biorthogonal function evaluation through
//! infinite products.

pub mod biorth;
pub mod gram;
pub mod kadec;
pub mod kernels;
pub mod linalg;
pub mod nodes;
pub mod quad;
pub mod reconstruct;
pub mod special;
pub mod testfn;

pub use biorth::{closed_form_b, BiorthError, BiorthSystem};
pub use gram::{diff_norm, gram_entry, perturbation_bound, BApprox, GramError, GramSection};
pub use kadec::{
    admissibility, asymptotic_ratio, ln2_bound, solve_x_d, sun_zhou_d, KadecError, KadecReport,
};
pub use kernels::{sinc, sinc_nd, BumpProfile, GTailSum, KernelError, SmoothKernel};
pub use nodes::{DeviationStats, NodeEntry, NodeError, NodeSet, PerturbMode, SeparationGap};
pub use reconstruct::{
    error_report, reconstruct_oversampled, reconstruct_sinc, sample, stability_bound, ErrorMetrics,
    Grid, Provenance, ReconstructError, ReconstructionResult, SampleVector,
};
pub use testfn::{BandlimitedFn, InnerProduct, TestFnError};
