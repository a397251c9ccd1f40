//! Shared fixtures for the criterion benchmarks.

use pwrec::nodes::{NodeSet, PerturbMode};
use pwrec::testfn::BandlimitedFn;

pub fn kadec_nodes(w: i64) -> NodeSet {
    NodeSet::perturbed(
        1,
        w,
        &PerturbMode::RandomUniform {
            delta: 0.2,
            seed: 1,
        },
    )
    .expect("fixture node set")
}

pub fn ground_truth() -> BandlimitedFn {
    BandlimitedFn::random_lattice(99, 6, 1, 4)
}
