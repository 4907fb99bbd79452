//! Solver for two sources and any number of terminals.
//!
//! Pipeline: augment the instance, pick a path from each virtual source to
//! every virtual terminal, rewire each pair to share an exact suffix, and
//! take the union of all rewired paths as the reduced graph. The first
//! meeting point of a terminal's pair is its *merge node*; by construction
//! each merge node receives unit flow from either virtual source and flow 2
//! from the pair, so a seeded random linear code can deliver two
//! independent combinations of the sources there (rank 2). A final
//! demand-driven pass forces the vector `[1 1]` — the sum of both unit
//! vectors — onto the path from each merge node to its terminals, so every
//! terminal reads the sum off its virtual edge.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::field::{rank, CodingVector, FieldError, FieldSpec};
use crate::flow::{max_flow_unit, super_source_max_flow, FeasibilityReport};
use crate::graph::{Dag, EdgeId, GraphError, NodeId, Path};
use crate::instance::Instance;
use crate::rewire::{augment, rewire_shared_suffix, AugmentedInstance, RewireError};
use crate::verify::{
    check_local_validity, check_sum_recovery, propagate, CodingAssignment, LocalCode, LocalInput,
    TransferReport, ValidityReport, VerifyError,
};

/// How many incremented seeds the multicast step tries before giving up.
pub const MULTICAST_RETRY_CAP: u64 = 64;

#[derive(Debug, Error)]
pub enum TwoByNError {
    #[error("this solver handles exactly two sources, got {0}")]
    WrongSourceCount(usize),
    #[error("instance is infeasible: {0}")]
    Infeasible(FeasibilityReport),
    #[error("no path from {from} to {to} after augmentation")]
    MissingPath { from: String, to: String },
    #[error(
        "random coding failed to reach rank 2 at every merge node after {attempts} attempts \
         over {field}; retry with a larger field"
    )]
    RetryCapExceeded { attempts: u64, field: FieldSpec },
    #[error(transparent)]
    Rewire(RewireError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Verify(#[from] VerifyError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

impl From<RewireError> for TwoByNError {
    fn from(e: RewireError) -> Self {
        match e {
            RewireError::Infeasible(report) => TwoByNError::Infeasible(report),
            other => TwoByNError::Rewire(other),
        }
    }
}

/// A terminal's rewired path pair: `p1` from the first virtual source, `p2`
/// from the second, sharing the exact suffix from `merge` (their first
/// meeting point) to the virtual terminal.
#[derive(Clone, Debug)]
pub struct PathPair {
    pub p1: Path,
    pub p2: Path,
    pub merge: NodeId,
}

impl PathPair {
    /// The common tail of both paths, from the merge node to the virtual
    /// terminal. Never empty: both paths traverse the terminal's virtual
    /// edge, so they meet no later than the real terminal.
    pub fn shared_suffix(&self, g: &Dag) -> Path {
        self.p1
            .suffix_from(g, self.merge)
            .expect("merge node lies on p1")
    }
}

/// One entry of the sorted merge-node list: a merge node, its topological
/// number in the reduced graph, and the terminals (by index, declaration
/// order) whose path pairs meet there.
#[derive(Clone, Debug)]
pub struct MergeSlot {
    pub merge: NodeId,
    pub gamma: usize,
    pub terminals: Vec<usize>,
}

/// Per-terminal path pairs plus the merge nodes sorted by topological
/// position in the reduced graph. Terminals sharing a merge node are
/// grouped into one slot.
#[derive(Clone, Debug)]
pub struct MergePointTable {
    per_terminal: Vec<PathPair>,
    slots: Vec<MergeSlot>,
}

impl MergePointTable {
    pub fn pairs(&self) -> &[PathPair] {
        &self.per_terminal
    }

    pub fn pair(&self, terminal: usize) -> &PathPair {
        &self.per_terminal[terminal]
    }

    pub fn merge_of(&self, terminal: usize) -> NodeId {
        self.per_terminal[terminal].merge
    }

    /// Slots in ascending topological order of their merge nodes.
    pub fn slots(&self) -> &[MergeSlot] {
        &self.slots
    }

    pub fn merge_nodes(&self) -> BTreeSet<NodeId> {
        self.slots.iter().map(|s| s.merge).collect()
    }

    /// Virtual terminal node of a terminal index (end of its paths).
    pub fn virtual_terminal(&self, g: &Dag, terminal: usize) -> NodeId {
        self.per_terminal[terminal].p1.end(g)
    }
}

/// Builds the reduced graph: for every terminal, a deterministic path from
/// each virtual source to the virtual terminal, rewired to share an exact
/// suffix; the union of all pairs is the reduced graph, and merge nodes are
/// numbered by its topological order.
pub fn build_reduced_graph(
    aug: &AugmentedInstance,
) -> Result<(Dag, MergePointTable), TwoByNError> {
    assert_eq!(aug.n_sources(), 2, "reduced graph needs exactly two sources");
    let g = aug.graph();
    let no_forbidden = BTreeSet::new();
    let mut per_terminal = Vec::new();
    let mut all_paths = Vec::new();
    for j in 0..aug.n_terminals() {
        let target = aug.virtual_terminal(j);
        let mut pair = Vec::new();
        for i in 0..2 {
            let from = aug.virtual_source(i);
            let p = g
                .find_path(from, target, &no_forbidden)
                .ok_or_else(|| TwoByNError::MissingPath {
                    from: g.label(from).to_string(),
                    to: g.label(target).to_string(),
                })?;
            pair.push(p);
        }
        let (p1, p2, merge) = rewire_shared_suffix(g, &pair[0], &pair[1])?;
        all_paths.push(p1.clone());
        all_paths.push(p2.clone());
        per_terminal.push(PathPair { p1, p2, merge });
    }
    let reduced = g.union_subgraph(&all_paths)?;
    let positions = reduced.topo_positions();
    let mut by_merge: BTreeMap<usize, (NodeId, Vec<usize>)> = BTreeMap::new();
    for (j, pair) in per_terminal.iter().enumerate() {
        let gamma = positions[&pair.merge];
        by_merge.entry(gamma).or_insert((pair.merge, Vec::new())).1.push(j);
    }
    let slots = by_merge
        .into_iter()
        .map(|(gamma, (merge, terminals))| MergeSlot {
            merge,
            gamma,
            terminals,
        })
        .collect();
    Ok((reduced, MergePointTable { per_terminal, slots }))
}

/// A successful multicast: vectors on every reduced-graph edge with rank 2
/// arriving at each merge node, plus the local coefficients that produced
/// them and the seed that worked.
#[derive(Clone, Debug)]
pub struct Multicast {
    pub assignment: CodingAssignment,
    pub locals: LocalCode,
    pub seed_used: u64,
    pub attempts: u64,
}

/// Delivers two independent combinations of the sources to every merge
/// node: local coefficients are drawn from a seeded generator (single-input
/// edges forward unchanged), vectors are propagated, and the rank-2
/// condition is checked at every merge node; failures retry with the next
/// seed up to `MULTICAST_RETRY_CAP`.
///
/// The flow preconditions — unit flow from each virtual source and flow 2
/// from the pair to every merge node — are asserted up front.
pub fn multicast_to_merge_nodes(
    reduced: &Dag,
    merges: &BTreeSet<NodeId>,
    virtual_sources: &[NodeId],
    field: FieldSpec,
    seed: u64,
) -> Result<Multicast, TwoByNError> {
    assert_eq!(virtual_sources.len(), 2);
    let sources_set: BTreeSet<NodeId> = virtual_sources.iter().copied().collect();
    for &v in merges {
        for &s in virtual_sources {
            assert_eq!(
                max_flow_unit(reduced, s, v),
                1,
                "merge node must receive unit flow from each virtual source"
            );
        }
        assert_eq!(
            super_source_max_flow(reduced, &sources_set, v),
            2,
            "merge node must receive flow 2 from the source pair"
        );
    }
    let mut last_err = None;
    for attempt in 0..MULTICAST_RETRY_CAP {
        let seed_used = seed.wrapping_add(attempt);
        let mut rng = ChaCha8Rng::seed_from_u64(seed_used);
        let mut locals = LocalCode::new();
        for edge_id in reduced.edge_topo_order() {
            let edge = reduced.edge(edge_id);
            if let Some(i) = virtual_sources.iter().position(|&s| s == edge.tail) {
                locals.set(edge_id, vec![(LocalInput::Source(i), field.one())]);
                continue;
            }
            let in_edges = reduced.in_edges(edge.tail);
            let inputs = if in_edges.len() == 1 {
                // Relay edges forward their single input unchanged.
                vec![(LocalInput::Edge(in_edges[0]), field.one())]
            } else {
                in_edges
                    .iter()
                    .map(|&d| (LocalInput::Edge(d), field.random(&mut rng)))
                    .collect()
            };
            locals.set(edge_id, inputs);
        }
        let assignment = propagate(reduced, &locals, 2, field)?;
        let mut ok = true;
        for &v in merges {
            let incoming = assignment.incoming(reduced, v)?;
            if rank(field, &incoming)? != 2 {
                ok = false;
                break;
            }
        }
        if ok {
            let validity = check_local_validity(reduced, &assignment, virtual_sources)?;
            assert!(validity.valid(), "propagated code must be valid: {validity}");
            return Ok(Multicast {
                assignment,
                locals,
                seed_used,
                attempts: attempt + 1,
            });
        }
        last_err = Some(TwoByNError::RetryCapExceeded {
            attempts: attempt + 1,
            field,
        });
    }
    Err(last_err.unwrap_or(TwoByNError::RetryCapExceeded {
        attempts: MULTICAST_RETRY_CAP,
        field,
    }))
}

/// The demand-driven overwrite pass. Walking merge slots in topological
/// order: a slot with unserved terminals becomes *active* — the shared
/// suffix of each unserved terminal in its group is forced to `[1 1]`, and
/// every later unserved terminal whose virtual terminal is reachable from
/// the active node gets `[1 1]` forced along a deterministic path as well.
///
/// Forcing is implemented as pin-and-recompute: the touched edges are
/// pinned to `[1 1]`, and every other edge re-derives its vector from the
/// multicast local coefficients in topological order. An active node's
/// upstream cone is always pin-free (any earlier pin above it would have
/// already served its whole terminal group), so its inputs still span the
/// plane and `[1 1]` stays inside every pinned edge's tail span; the final
/// assignment is asserted locally valid.
///
/// Returns the overwritten assignment and the pinned edge set.
pub fn algorithm1_overwrite(
    reduced: &Dag,
    table: &MergePointTable,
    base: &Multicast,
) -> Result<(CodingAssignment, BTreeSet<EdgeId>), TwoByNError> {
    let field = base.assignment.field();
    let n_terminals = table.pairs().len();
    let mut demand = vec![false; n_terminals];
    let mut pinned: BTreeSet<EdgeId> = BTreeSet::new();
    let no_forbidden = BTreeSet::new();
    let slots = table.slots();
    for (k, slot) in slots.iter().enumerate() {
        if slot.terminals.iter().all(|&t| demand[t]) {
            continue;
        }
        for &t in &slot.terminals {
            if demand[t] {
                continue;
            }
            pinned.extend(table.pair(t).shared_suffix(reduced).edges());
            demand[t] = true;
        }
        // The slot's merge node is now active: serve every later terminal
        // its downstream cone happens to reach.
        for later in &slots[k + 1..] {
            for &t in &later.terminals {
                if demand[t] {
                    continue;
                }
                let target = table.virtual_terminal(reduced, t);
                if let Some(p) = reduced.find_path(slot.merge, target, &no_forbidden) {
                    pinned.extend(p.edges());
                    demand[t] = true;
                }
            }
        }
    }
    assert!(
        demand.iter().all(|&d| d),
        "every terminal is served once its own merge slot has run"
    );

    // Recompute all vectors with the pins in force.
    let virtual_sources: Vec<NodeId> = (0..2).map(|i| table.pair(0).path(i).start()).collect();
    let all_ones = CodingVector::all_ones(field, 2);
    let mut out = CodingAssignment::new(field, 2);
    for edge_id in reduced.edge_topo_order() {
        if pinned.contains(&edge_id) {
            out.set(edge_id, all_ones.clone())?;
            continue;
        }
        let mut acc = CodingVector::zero(field, 2);
        for &(input, coeff) in base.locals.get(edge_id).expect("multicast code is complete") {
            let vec = match input {
                LocalInput::Edge(d) => out
                    .vector(d)
                    .expect("topological order computes inputs first")
                    .clone(),
                LocalInput::Source(i) => CodingVector::unit(field, 2, i),
            };
            acc = acc.checked_add(&vec.scale(coeff)?)?;
        }
        out.set(edge_id, acc)?;
    }
    let validity = check_local_validity(reduced, &out, &virtual_sources)?;
    assert!(
        validity.valid(),
        "overwritten assignment must stay locally valid: {validity}"
    );
    Ok((out, pinned))
}

/// Everything the two-source solver produces.
#[derive(Clone, Debug)]
pub struct TwoByNSolution {
    pub aug: AugmentedInstance,
    /// The union of all rewired path pairs.
    pub reduced: Dag,
    pub table: MergePointTable,
    /// Total over the augmented graph; edges outside the reduced graph
    /// carry the zero vector.
    pub assignment: CodingAssignment,
    /// Edges forced to `[1 1]` by the overwrite pass.
    pub pinned: BTreeSet<EdgeId>,
    pub field: FieldSpec,
    pub multicast_seed: u64,
    pub multicast_attempts: u64,
    pub validity: ValidityReport,
    pub recovery: TransferReport,
}

/// End-to-end solve for two sources and any number of terminals.
pub fn solve_two_by_n(
    inst: &Instance,
    field: FieldSpec,
    seed: u64,
) -> Result<TwoByNSolution, TwoByNError> {
    if inst.n_sources() != 2 {
        return Err(TwoByNError::WrongSourceCount(inst.n_sources()));
    }
    let aug = augment(inst)?;
    let (reduced, table) = build_reduced_graph(&aug)?;
    let multicast = multicast_to_merge_nodes(
        &reduced,
        &table.merge_nodes(),
        aug.virtual_sources(),
        field,
        seed,
    )?;
    let (partial, pinned) = algorithm1_overwrite(&reduced, &table, &multicast)?;
    let mut assignment = CodingAssignment::new(field, 2);
    for e in aug.graph().edge_ids() {
        match partial.vector(e) {
            Some(v) => assignment.set(e, v.clone())?,
            None => assignment.set(e, CodingVector::zero(field, 2))?,
        }
    }
    let validity = check_local_validity(aug.graph(), &assignment, aug.virtual_sources())?;
    assert!(validity.valid(), "full assignment must be valid: {validity}");
    let recovery = check_sum_recovery(&aug, &assignment)?;
    assert!(
        recovery.all_recovered(),
        "every terminal must read the sum: {recovery}"
    );
    Ok(TwoByNSolution {
        aug,
        reduced,
        table,
        assignment,
        pinned,
        field,
        multicast_seed: multicast.seed_used,
        multicast_attempts: multicast.attempts,
        validity,
        recovery,
    })
}

impl PathPair {
    /// The i-th path of the pair (0 = first source, 1 = second).
    pub fn path(&self, i: usize) -> &Path {
        match i {
            0 => &self.p1,
            1 => &self.p2,
            _ => panic!("path pairs have exactly two paths"),
        }
    }
}
