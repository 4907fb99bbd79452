//! Construction and verification of linear network codes that deliver the
//! field sum (bitwise XOR of GF(2^m) symbols) of all sources to every
//! terminal of a unit-capacity directed acyclic network.
//!
//! The toolkit covers the two solved shapes of the problem:
//!
//! * **two sources, any number of terminals** — multicast both sources to
//!   the per-terminal merge points of a rewired path union, then overwrite
//!   the downstream vectors with the sum vector `[1 1]`;
//! * **any number of sources, up to two terminals** — carve out a minimal
//!   subgraph with exactly one path from each source to each terminal, where
//!   plain unit-gain forwarding delivers the sum.
//!
//! Around the solvers sit a feasibility gate (per-pair max-flow), an
//! independent verification layer (span validity, sum recovery, transmission
//! simulation, and brute-force search on tiny instances), seeded instance
//! generation, and TOML/DOT I/O.
//!
//! Everything is deterministic: ties break by ascending id, randomized
//! coding is driven by explicit seeds, and reports render byte-stably.

#![forbid(unsafe_code)]

pub mod dot;
pub mod field;
pub mod fixtures;
pub mod flow;
pub mod format;
pub mod generate;
pub mod graph;
pub mod instance;
pub mod n_by_two;
pub mod rewire;
pub mod solve;
pub mod two_by_n;
pub mod verify;

pub use field::{CodingVector, FieldElement, FieldSpec};
pub use flow::{check_feasibility, max_flow_unit, super_source_max_flow, FeasibilityReport};
pub use graph::{Dag, Edge, EdgeId, GraphRef, NodeId, Path};
pub use dot::{export_dot, export_dot_instance};
pub use format::{
    parse_assignment, parse_instance, serialize_assignment, serialize_instance,
    AssignmentDocument, InstanceDocument,
};
pub use generate::{generate_instance, GenSpec};
pub use instance::Instance;
pub use n_by_two::{solve_n_by_two, NByTwoSolution, OnePathSubgraph};
pub use solve::{choose_solver, default_field, solve, SolveOutcome, SolveReport, SolverKind};
pub use rewire::{augment, rewire_shared_prefix, rewire_shared_suffix, AugmentedInstance};
pub use two_by_n::{solve_two_by_n, MergePointTable, TwoByNSolution};
pub use verify::{
    brute_force_assignment_search, check_local_validity, check_sum_recovery,
    simulate_transmission, CodingAssignment, LocalCode, TransferReport, ValidityReport,
};
