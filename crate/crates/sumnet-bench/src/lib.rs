//! Helpers shared by the benchmark targets.

use sumnet_core::generate::{generate_instance, GenSpec};
use sumnet_core::instance::Instance;
use sumnet_core::solve::SolverKind;

/// A reproducible feasible instance of the requested shape.
pub fn bench_instance(kind: SolverKind, sources: usize, terminals: usize, extra: usize) -> Instance {
    generate_instance(&GenSpec {
        kind,
        sources,
        terminals,
        extra_nodes: extra,
        seed: 0xbe4c * (sources as u64 + 1) + terminals as u64,
        infeasible: false,
    })
    .expect("benchmark shapes are valid")
}
