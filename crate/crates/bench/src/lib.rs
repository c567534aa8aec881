//! Shared inputs for the benchmarks.

use ammdrpg::instance::{generate_grid_instance, GridParams};
use ammdrpg::{Instance, VisitMode};

/// Generated grid instance used across benchmarks.
pub fn grid(n_graphs: usize, n_drones: usize, seed: u64) -> Instance {
    generate_grid_instance(&GridParams::new(seed, n_graphs, n_drones, 40.0, VisitMode::PerEdge)).expect("valid parameters")
}
