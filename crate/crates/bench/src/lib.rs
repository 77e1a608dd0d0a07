//! Fixtures shared by the benchmarks.

use twogroup::batch::Marker;
use twogroup::sim::draw_replication;
use twogroup::{MarkerDataset, SimScenario, TwoGroupSample};

/// A sample from the default simulation scenario.
pub fn fixture_sample(n0: usize, n1: usize, seed: u64) -> TwoGroupSample {
    let sc = SimScenario {
        n0,
        n1,
        seed,
        ..SimScenario::default()
    };
    draw_replication(&sc, 0).1
}

/// `markers` rows with `n0 = 50`, `n1 = 52` drawn under no effect.
pub fn fixture_dataset(markers: usize) -> MarkerDataset {
    let sc = SimScenario {
        n0: 50,
        n1: 52,
        ..SimScenario::default()
    };
    MarkerDataset {
        markers: (0..markers as u64)
            .map(|r| Marker {
                id: format!("m{r}"),
                sample: draw_replication(&sc, r).1,
            })
            .collect(),
        n0: 50,
        n1: 52,
    }
}
