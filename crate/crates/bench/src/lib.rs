//! Fixtures shared by the benchmarks.

use snirkit::netcore::GeneratorSpec;
use snirkit::simlab::{draw_dataset, Dataset, TruthPlan};
use snirkit::FitConfig;

/// SBM network of `n` nodes with ten influential nodes and model responses.
pub fn sbm_dataset(n: usize) -> Dataset {
    draw_dataset(&GeneratorSpec::sbm(n, 0), &TruthPlan::standard(10), &FitConfig::default(), 1)
        .expect("fixture dataset")
}
