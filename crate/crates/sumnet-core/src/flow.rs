//! Unit-capacity max-flow and the per-pair feasibility gate.
//!
//! On a unit-capacity DAG the max-flow value equals the maximum number of
//! pairwise edge-disjoint paths, and it is always an integer. Augmenting
//! paths are found breadth-first with ascending-id tie-breaks, so flows —
//! and therefore feasibility reports — are deterministic.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::graph::{Dag, EdgeId, NodeId};
use crate::instance::Instance;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Step {
    Forward(EdgeId),
    Backward(EdgeId),
}

/// Maximum number of edge-disjoint `s -> t` paths.
///
/// Residual search order at each node: unused out-edges by ascending id,
/// then used in-edges (backward residual arcs) by ascending id.
pub fn max_flow_unit(g: &Dag, s: NodeId, t: NodeId) -> usize {
    assert_ne!(s, t, "max-flow endpoints must differ");
    if !g.contains_node(s) || !g.contains_node(t) {
        return 0;
    }
    let mut used: BTreeSet<EdgeId> = BTreeSet::new();
    let mut value = 0usize;
    loop {
        let mut parent: BTreeMap<NodeId, (NodeId, Step)> = BTreeMap::new();
        let mut queue = VecDeque::new();
        queue.push_back(s);
        'bfs: while let Some(v) = queue.pop_front() {
            for &e in g.out_edges(v) {
                let head = g.edge(e).head;
                if used.contains(&e) || head == s || parent.contains_key(&head) {
                    continue;
                }
                parent.insert(head, (v, Step::Forward(e)));
                if head == t {
                    break 'bfs;
                }
                queue.push_back(head);
            }
            for &e in g.in_edges(v) {
                let tail = g.edge(e).tail;
                if !used.contains(&e) || tail == s || parent.contains_key(&tail) {
                    continue;
                }
                parent.insert(tail, (v, Step::Backward(e)));
                queue.push_back(tail);
            }
        }
        if !parent.contains_key(&t) {
            return value;
        }
        let mut at = t;
        while at != s {
            let (prev, step) = parent[&at];
            match step {
                Step::Forward(e) => {
                    used.insert(e);
                }
                Step::Backward(e) => {
                    used.remove(&e);
                }
            }
            at = prev;
        }
        value += 1;
    }
}

/// Max-flow from the whole source set to `t`, as if a super-source were
/// joined to every source by edges of unlimited capacity. Implemented by
/// adding a synthetic node with enough parallel unit edges per source to
/// never be the bottleneck.
pub fn super_source_max_flow(g: &Dag, sources: &BTreeSet<NodeId>, t: NodeId) -> usize {
    assert!(!sources.contains(&t), "terminal cannot be a source");
    if sources.is_empty() {
        return 0;
    }
    if sources.len() == 1 {
        return max_flow_unit(g, *sources.iter().next().unwrap(), t);
    }
    let mut aug = g.clone();
    let mut label = String::from("@flow-super");
    while aug.node_by_label(&label).is_some() {
        label.push('+');
    }
    let super_source = aug.add_node(label).unwrap();
    for &s in sources {
        let copies = g.out_edges(s).len().max(1);
        for _ in 0..copies {
            aug.add_edge(super_source, s).unwrap();
        }
    }
    max_flow_unit(&aug, super_source, t)
}

/// One failing source/terminal pair: max-flow between them is zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairFailure {
    pub source: NodeId,
    pub terminal: NodeId,
    pub source_label: String,
    pub terminal_label: String,
}

impl std::fmt::Display for PairFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "max-flow({} - {}) = 0",
            self.source_label, self.terminal_label
        )
    }
}

/// Every (source, terminal) pair with zero max-flow, in declared source-then-
/// terminal order. Solvers refuse instances whose report is not feasible.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FeasibilityReport {
    pub failures: Vec<PairFailure>,
}

impl FeasibilityReport {
    pub fn feasible(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn failure_pairs(&self) -> Vec<(NodeId, NodeId)> {
        self.failures
            .iter()
            .map(|f| (f.source, f.terminal))
            .collect()
    }
}

impl std::fmt::Display for FeasibilityReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.feasible() {
            write!(f, "feasible: every source reaches every terminal")
        } else {
            writeln!(f, "infeasible: {} pair(s) with zero max-flow", self.failures.len())?;
            for (i, fail) in self.failures.iter().enumerate() {
                if i > 0 {
                    writeln!(f)?;
                }
                write!(f, "  {fail}")?;
            }
            Ok(())
        }
    }
}

/// Checks max-flow(source, terminal) >= 1 for every pair of the instance.
pub fn check_feasibility(inst: &Instance) -> FeasibilityReport {
    let g = inst.graph();
    let mut failures = Vec::new();
    for &s in inst.sources() {
        for &t in inst.terminals() {
            if max_flow_unit(g, s, t) == 0 {
                failures.push(PairFailure {
                    source: s,
                    terminal: t,
                    source_label: g.label(s).to_string(),
                    terminal_label: g.label(t).to_string(),
                });
            }
        }
    }
    FeasibilityReport { failures }
}
