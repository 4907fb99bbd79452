//! Graph surgery performed before any coding: virtual source/terminal
//! augmentation and the two path-rewiring operations.
//!
//! * `rewire_shared_suffix` makes two paths with a common endpoint share an
//!   exact suffix: the second path is rerouted onto the first at the first
//!   node of path 1 that path 2 touches. The prefixes before that meet node
//!   are then provably edge-disjoint.
//! * `rewire_shared_prefix` is the mirror image for paths with a common
//!   start, with an optional restriction on which nodes may serve as the
//!   meet. Unrestricted, the suffixes after the meet are provably
//!   edge-disjoint; restricted meets forfeit that guarantee (the meet may
//!   sit before later common nodes), which downstream users account for.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::flow::{check_feasibility, max_flow_unit, FeasibilityReport};
use crate::graph::{Dag, EdgeId, GraphError, NodeId, Path};
use crate::instance::Instance;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RewireError {
    #[error("instance is infeasible: {0}")]
    Infeasible(FeasibilityReport),
    #[error("paths end at different nodes ({0} vs {1})")]
    EndMismatch(NodeId, NodeId),
    #[error("paths start at different nodes ({0} vs {1})")]
    StartMismatch(NodeId, NodeId),
    #[error("no common node of the two paths is an allowed meet node")]
    NoAllowedMeet,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// The instance graph extended with one virtual source per source (edge
/// `S_i' -> S_i`) and one virtual terminal per terminal (edge `T_j -> T_j'`).
/// All coding freedom then sits at interior nodes: virtual sources emit
/// fixed unit vectors and each terminal's answer is read off its single
/// virtual edge.
#[derive(Clone, Debug)]
pub struct AugmentedInstance {
    graph: Dag,
    original: Instance,
    virtual_sources: Vec<NodeId>,
    virtual_terminals: Vec<NodeId>,
    virtual_source_edges: Vec<EdgeId>,
    virtual_terminal_edges: Vec<EdgeId>,
}

/// Suffix appended to a node label to name its virtual counterpart. Instance
/// files cannot declare labels containing it, so the names never collide.
pub const VIRTUAL_SUFFIX: char = '\'';

/// Adds the virtual sources and terminals. Refuses infeasible instances;
/// on success every virtual pair flow is exactly 1 (each virtual source has
/// out-degree one), which is asserted.
pub fn augment(inst: &Instance) -> Result<AugmentedInstance, RewireError> {
    let report = check_feasibility(inst);
    if !report.feasible() {
        return Err(RewireError::Infeasible(report));
    }
    let mut graph = inst.graph().clone();
    let mut virtual_sources = Vec::new();
    let mut virtual_source_edges = Vec::new();
    for &s in inst.sources() {
        let label = format!("{}{}", graph.label(s), VIRTUAL_SUFFIX);
        let v = graph.add_node(label)?;
        virtual_sources.push(v);
        virtual_source_edges.push(graph.add_edge(v, s)?);
    }
    let mut virtual_terminals = Vec::new();
    let mut virtual_terminal_edges = Vec::new();
    for &t in inst.terminals() {
        let label = format!("{}{}", graph.label(t), VIRTUAL_SUFFIX);
        let v = graph.add_node(label)?;
        virtual_terminals.push(v);
        virtual_terminal_edges.push(graph.add_edge(t, v)?);
    }
    for &vs in &virtual_sources {
        for &vt in &virtual_terminals {
            assert_eq!(
                max_flow_unit(&graph, vs, vt),
                1,
                "feasible instance must give unit virtual-pair flow"
            );
        }
    }
    Ok(AugmentedInstance {
        graph,
        original: inst.clone(),
        virtual_sources,
        virtual_terminals,
        virtual_source_edges,
        virtual_terminal_edges,
    })
}

impl AugmentedInstance {
    pub fn graph(&self) -> &Dag {
        &self.graph
    }

    pub fn original(&self) -> &Instance {
        &self.original
    }

    pub fn n_sources(&self) -> usize {
        self.virtual_sources.len()
    }

    pub fn n_terminals(&self) -> usize {
        self.virtual_terminals.len()
    }

    /// `S_i'` for the i-th declared source.
    pub fn virtual_source(&self, i: usize) -> NodeId {
        self.virtual_sources[i]
    }

    /// `T_j'` for the j-th declared terminal.
    pub fn virtual_terminal(&self, j: usize) -> NodeId {
        self.virtual_terminals[j]
    }

    pub fn virtual_sources(&self) -> &[NodeId] {
        &self.virtual_sources
    }

    pub fn virtual_terminals(&self) -> &[NodeId] {
        &self.virtual_terminals
    }

    pub fn virtual_source_edge(&self, i: usize) -> EdgeId {
        self.virtual_source_edges[i]
    }

    pub fn virtual_terminal_edge(&self, j: usize) -> EdgeId {
        self.virtual_terminal_edges[j]
    }

    /// The original node a virtual node stands in for, if `v` is virtual.
    pub fn origin(&self, v: NodeId) -> Option<NodeId> {
        if let Some(i) = self.virtual_sources.iter().position(|&x| x == v) {
            return Some(self.original.sources()[i]);
        }
        if let Some(j) = self.virtual_terminals.iter().position(|&x| x == v) {
            return Some(self.original.terminals()[j]);
        }
        None
    }

    /// Index of the source whose virtual node is `v`.
    pub fn virtual_source_index(&self, v: NodeId) -> Option<usize> {
        self.virtual_sources.iter().position(|&x| x == v)
    }

    pub fn virtual_terminal_index(&self, v: NodeId) -> Option<usize> {
        self.virtual_terminals.iter().position(|&x| x == v)
    }
}

/// Reroutes `p2` onto `p1` so both share the exact suffix from the meet node
/// to their common endpoint. The meet is the first node of `p1` that lies on
/// `p2`; the prefixes before it are edge-disjoint (a shared prefix edge
/// would put an earlier `p1` node on `p2`). Returns `(p1, rerouted p2,
/// meet)`. The rerouted path never uses edges outside `p1` and `p2`.
pub fn rewire_shared_suffix(
    g: &Dag,
    p1: &Path,
    p2: &Path,
) -> Result<(Path, Path, NodeId), RewireError> {
    p1.validate(g)?;
    p2.validate(g)?;
    if p1.end(g) != p2.end(g) {
        return Err(RewireError::EndMismatch(p1.end(g), p2.end(g)));
    }
    let on_p2: BTreeSet<NodeId> = p2.nodes(g).into_iter().collect();
    let meet = p1
        .nodes(g)
        .into_iter()
        .find(|v| on_p2.contains(v))
        .expect("paths with a common endpoint always intersect");
    let rerouted = p2.prefix_to(g, meet)?.concat(g, &p1.suffix_from(g, meet)?)?;
    let prefix1: BTreeSet<EdgeId> = p1.prefix_to(g, meet)?.edges().iter().copied().collect();
    debug_assert!(
        p2.prefix_to(g, meet)?
            .edges()
            .iter()
            .all(|e| !prefix1.contains(e)),
        "prefixes before the meet must be edge-disjoint"
    );
    Ok((p1.clone(), rerouted, meet))
}

/// Mirror of `rewire_shared_suffix` for paths with a common start: reroutes
/// `p2` so both share the exact prefix from the start to the meet node. The
/// meet is the **last** node of `p1` lying on `p2` that is also in
/// `allowed` (`None` = every node allowed; the common start always
/// qualifies then). With no restriction the suffixes after the meet are
/// edge-disjoint; a restricted meet can sit before later common nodes, so
/// no such guarantee exists. Returns `(p1, rerouted p2, meet)`.
pub fn rewire_shared_prefix(
    g: &Dag,
    p1: &Path,
    p2: &Path,
    allowed: Option<&BTreeSet<NodeId>>,
) -> Result<(Path, Path, NodeId), RewireError> {
    p1.validate(g)?;
    p2.validate(g)?;
    if p1.start() != p2.start() {
        return Err(RewireError::StartMismatch(p1.start(), p2.start()));
    }
    let on_p2: BTreeSet<NodeId> = p2.nodes(g).into_iter().collect();
    let meet = p1
        .nodes(g)
        .into_iter()
        .rev()
        .find(|v| on_p2.contains(v) && allowed.is_none_or(|a| a.contains(v)))
        .ok_or(RewireError::NoAllowedMeet)?;
    let rerouted = p1.prefix_to(g, meet)?.concat(g, &p2.suffix_from(g, meet)?)?;
    if allowed.is_none() {
        let suffix1: BTreeSet<EdgeId> =
            p1.suffix_from(g, meet)?.edges().iter().copied().collect();
        debug_assert!(
            p2.suffix_from(g, meet)?
                .edges()
                .iter()
                .all(|e| !suffix1.contains(e)),
            "suffixes after an unrestricted meet must be edge-disjoint"
        );
    }
    Ok((p1.clone(), rerouted, meet))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn label_path(g: &Dag, p: &Path) -> Vec<String> {
        p.nodes(g).iter().map(|&v| g.label(v).to_string()).collect()
    }

    fn path_by_labels(g: &Dag, labels: &[&str]) -> Path {
        let mut edges = Vec::new();
        for pair in labels.windows(2) {
            let tail = g.node_by_label(pair[0]).unwrap();
            let head = g.node_by_label(pair[1]).unwrap();
            let e = g
                .edges()
                .filter(|e| e.tail == tail && e.head == head)
                .map(|e| e.id)
                .min()
                .unwrap_or_else(|| panic!("no edge {} -> {}", pair[0], pair[1]));
            edges.push(e);
        }
        Path::from_edges(g, edges).unwrap()
    }

    #[test]
    fn augment_line1() {
        let aug = augment(&fixtures::line1()).unwrap();
        assert_eq!(aug.graph().node_count(), 5);
        assert_eq!(aug.graph().edge_count(), 4);
        let s1p = aug.virtual_source(0);
        assert_eq!(aug.graph().label(s1p), "s1'");
        assert_eq!(aug.graph().out_edges(s1p).len(), 1);
        assert_eq!(aug.graph().in_edges(s1p).len(), 0);
        let t1p = aug.virtual_terminal(0);
        assert_eq!(aug.graph().in_edges(t1p).len(), 1);
        assert_eq!(aug.graph().out_edges(t1p).len(), 0);
        assert_eq!(
            aug.origin(s1p),
            aug.graph().node_by_label("s1")
        );
    }

    #[test]
    fn augment_butterfly_counts() {
        let aug = augment(&fixtures::butterfly()).unwrap();
        assert_eq!(aug.graph().node_count(), 10);
        assert_eq!(aug.graph().edge_count(), 11);
    }

    #[test]
    fn augment_refuses_infeasible() {
        match augment(&fixtures::cut()) {
            Err(RewireError::Infeasible(report)) => {
                assert!(report.to_string().contains("max-flow(s1 - t2) = 0"));
            }
            other => panic!("expected infeasibility refusal, got {other:?}"),
        }
    }

    #[test]
    fn augment_source_with_incoming_edge() {
        let mut g = Dag::new();
        let s1 = g.add_node("s1").unwrap();
        let s2 = g.add_node("s2").unwrap();
        let t = g.add_node("t").unwrap();
        g.add_edge(s1, s2).unwrap();
        g.add_edge(s2, t).unwrap();
        g.add_edge(s1, t).unwrap();
        let inst = Instance::new(g, vec![s1, s2], vec![t]).unwrap();
        let aug = augment(&inst).unwrap();
        assert_eq!(aug.graph().in_edges(s2).len(), 2);
    }

    #[test]
    fn shared_suffix_identity() {
        let inst = fixtures::butterfly();
        let g = inst.graph();
        let p = path_by_labels(g, &["s1", "m1", "m2", "t2"]);
        let (q1, q2, meet) = rewire_shared_suffix(g, &p, &p).unwrap();
        assert_eq!(q1, p);
        assert_eq!(q2, p);
        assert_eq!(meet, p.start());
    }

    #[test]
    fn shared_suffix_butterfly_terminal() {
        let aug = augment(&fixtures::butterfly()).unwrap();
        let g = aug.graph();
        let p1 = path_by_labels(g, &["s1'", "s1", "t1", "t1'"]);
        let p2 = path_by_labels(g, &["s2'", "s2", "m1", "m2", "t1", "t1'"]);
        let (q1, q2, meet) = rewire_shared_suffix(g, &p1, &p2).unwrap();
        assert_eq!(g.label(meet), "t1");
        assert_eq!(q1, p1);
        assert_eq!(
            label_path(g, &q2),
            ["s2'", "s2", "m1", "m2", "t1", "t1'"]
        );
        // Suffixes from the meet coincide exactly.
        assert_eq!(
            q1.suffix_from(g, meet).unwrap(),
            q2.suffix_from(g, meet).unwrap()
        );
    }

    #[test]
    fn shared_suffix_reroutes_at_first_intersection() {
        let aug = augment(&fixtures::dd()).unwrap();
        let g = aug.graph();
        // Hand-picked paths meeting twice: at a, then again at d.
        let p1 = path_by_labels(g, &["s1'", "s1", "a", "b", "d", "t1", "t1'"]);
        let p2 = path_by_labels(g, &["s2'", "s2", "a", "c", "d", "t1", "t1'"]);
        let (q1, q2, meet) = rewire_shared_suffix(g, &p1, &p2).unwrap();
        assert_eq!(g.label(meet), "a");
        assert_eq!(label_path(g, &q2), ["s2'", "s2", "a", "b", "d", "t1", "t1'"]);
        let pre1: BTreeSet<EdgeId> = q1
            .prefix_to(g, meet)
            .unwrap()
            .edges()
            .iter()
            .copied()
            .collect();
        assert!(q2
            .prefix_to(g, meet)
            .unwrap()
            .edges()
            .iter()
            .all(|e| !pre1.contains(e)));
        // Rewiring introduced no edge outside the two inputs.
        let allowed: BTreeSet<EdgeId> = p1
            .edges()
            .iter()
            .chain(p2.edges())
            .copied()
            .collect();
        assert!(q2.edges().iter().all(|e| allowed.contains(e)));
    }

    #[test]
    fn shared_suffix_rejects_mismatched_ends() {
        let inst = fixtures::butterfly();
        let g = inst.graph();
        let p1 = path_by_labels(g, &["s1", "t1"]);
        let p2 = path_by_labels(g, &["s2", "t2"]);
        assert!(matches!(
            rewire_shared_suffix(g, &p1, &p2),
            Err(RewireError::EndMismatch(_, _))
        ));
    }

    #[test]
    fn shared_prefix_star() {
        let aug = augment(&fixtures::star1()).unwrap();
        let g = aug.graph();
        let p1 = path_by_labels(g, &["s1'", "s1", "m", "t1", "t1'"]);
        let p2 = path_by_labels(g, &["s1'", "s1", "m", "t2", "t2'"]);
        let (q1, q2, meet) = rewire_shared_prefix(g, &p1, &p2, None).unwrap();
        assert_eq!(g.label(meet), "m");
        assert_eq!(q1.prefix_to(g, meet).unwrap(), q2.prefix_to(g, meet).unwrap());
        // Restricting the meet to the start forces zero sharing.
        let only_start: BTreeSet<NodeId> = [p1.start()].into();
        let (_, q2b, meet_b) =
            rewire_shared_prefix(g, &p1, &p2, Some(&only_start)).unwrap();
        assert_eq!(meet_b, p1.start());
        assert_eq!(q2b, p2);
        // No common node allowed at all -> error.
        let none: BTreeSet<NodeId> = BTreeSet::new();
        assert!(matches!(
            rewire_shared_prefix(g, &p1, &p2, Some(&none)),
            Err(RewireError::NoAllowedMeet)
        ));
    }

    #[test]
    fn shared_prefix_identity_meets_at_last_node() {
        let inst = fixtures::star1();
        let g = inst.graph();
        let p = path_by_labels(g, &["s1", "m", "t1"]);
        let (_, q2, meet) = rewire_shared_prefix(g, &p, &p, None).unwrap();
        assert_eq!(q2, p);
        assert_eq!(meet, p.end(g));
    }

    #[test]
    fn shared_prefix_rejects_mismatched_starts() {
        let inst = fixtures::butterfly();
        let g = inst.graph();
        let p1 = path_by_labels(g, &["s1", "t1"]);
        let p2 = path_by_labels(g, &["s2", "t2"]);
        assert!(matches!(
            rewire_shared_prefix(g, &p1, &p2, None),
            Err(RewireError::StartMismatch(_, _))
        ));
    }
}
