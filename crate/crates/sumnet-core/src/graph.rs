//! Directed acyclic graph with unit-capacity parallel edges, plus the path
//! machinery shared by the solvers: deterministic topological numbering,
//! breadth-first path search, exact path counting, reachability, and
//! path-union subgraphs.
//!
//! Determinism rules: every tie is broken by ascending id — the topological
//! order prefers the smallest ready node, and path search expands out-edges
//! in ascending edge-id order. Subgraph extraction preserves ids, so paths
//! remain valid across derived graphs.

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigUint;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("duplicate node label {0:?}")]
    DuplicateLabel(String),
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("unknown edge {0}")]
    UnknownEdge(EdgeId),
    #[error("self-loop on node {0:?} rejected")]
    SelfLoop(String),
    #[error("edge {tail:?} -> {head:?} would close a cycle")]
    WouldCycle { tail: String, head: String },
    #[error("invalid path: {0}")]
    InvalidPath(String),
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct NodeId(pub u32);

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct EdgeId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Edge {
    pub id: EdgeId,
    pub tail: NodeId,
    pub head: NodeId,
}

/// A node or an edge, for reachability queries that accept either.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum GraphRef {
    Node(NodeId),
    Edge(EdgeId),
}

impl From<NodeId> for GraphRef {
    fn from(v: NodeId) -> Self {
        GraphRef::Node(v)
    }
}

impl From<EdgeId> for GraphRef {
    fn from(e: EdgeId) -> Self {
        GraphRef::Edge(e)
    }
}

const NO_EDGES: &[EdgeId] = &[];

#[derive(Clone, Debug, Default)]
pub struct Dag {
    labels: BTreeMap<NodeId, String>,
    by_label: BTreeMap<String, NodeId>,
    edges: BTreeMap<EdgeId, Edge>,
    out_edges: BTreeMap<NodeId, Vec<EdgeId>>,
    in_edges: BTreeMap<NodeId, Vec<EdgeId>>,
    next_node: u32,
    next_edge: u32,
}

impl Dag {
    pub fn new() -> Self {
        Dag::default()
    }

    pub fn add_node(&mut self, label: impl Into<String>) -> Result<NodeId, GraphError> {
        let label = label.into();
        if self.by_label.contains_key(&label) {
            return Err(GraphError::DuplicateLabel(label));
        }
        let id = NodeId(self.next_node);
        self.next_node += 1;
        self.by_label.insert(label.clone(), id);
        self.labels.insert(id, label);
        self.out_edges.insert(id, Vec::new());
        self.in_edges.insert(id, Vec::new());
        Ok(id)
    }

    /// Adds a unit-capacity edge. Self-loops and edges that would close a
    /// cycle are rejected, keeping the graph acyclic by construction.
    pub fn add_edge(&mut self, tail: NodeId, head: NodeId) -> Result<EdgeId, GraphError> {
        if !self.labels.contains_key(&tail) {
            return Err(GraphError::UnknownNode(tail));
        }
        if !self.labels.contains_key(&head) {
            return Err(GraphError::UnknownNode(head));
        }
        if tail == head {
            return Err(GraphError::SelfLoop(self.labels[&tail].clone()));
        }
        if self.reaches(head.into(), tail.into()) {
            return Err(GraphError::WouldCycle {
                tail: self.labels[&tail].clone(),
                head: self.labels[&head].clone(),
            });
        }
        let id = EdgeId(self.next_edge);
        self.next_edge += 1;
        self.edges.insert(id, Edge { id, tail, head });
        self.out_edges.get_mut(&tail).unwrap().push(id);
        self.in_edges.get_mut(&head).unwrap().push(id);
        Ok(id)
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn contains_node(&self, v: NodeId) -> bool {
        self.labels.contains_key(&v)
    }

    pub fn contains_edge(&self, e: EdgeId) -> bool {
        self.edges.contains_key(&e)
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.labels.keys().copied()
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.edges.keys().copied()
    }

    pub fn edges(&self) -> impl Iterator<Item = &Edge> + '_ {
        self.edges.values()
    }

    pub fn edge(&self, e: EdgeId) -> &Edge {
        &self.edges[&e]
    }

    pub fn try_edge(&self, e: EdgeId) -> Option<&Edge> {
        self.edges.get(&e)
    }

    pub fn label(&self, v: NodeId) -> &str {
        &self.labels[&v]
    }

    pub fn node_by_label(&self, label: &str) -> Option<NodeId> {
        self.by_label.get(label).copied()
    }

    /// Out-edges in ascending id order; empty for unknown nodes.
    pub fn out_edges(&self, v: NodeId) -> &[EdgeId] {
        self.out_edges.get(&v).map_or(NO_EDGES, Vec::as_slice)
    }

    /// In-edges in ascending id order; empty for unknown nodes.
    pub fn in_edges(&self, v: NodeId) -> &[EdgeId] {
        self.in_edges.get(&v).map_or(NO_EDGES, Vec::as_slice)
    }

    /// Kahn's algorithm, always taking the smallest ready node id. The graph
    /// is acyclic by construction, so every node appears exactly once.
    pub fn topo_order(&self) -> Vec<NodeId> {
        let mut indegree: BTreeMap<NodeId, usize> = self
            .labels
            .keys()
            .map(|&v| (v, self.in_edges(v).len()))
            .collect();
        let mut ready: BTreeSet<NodeId> = indegree
            .iter()
            .filter(|(_, &d)| d == 0)
            .map(|(&v, _)| v)
            .collect();
        let mut order = Vec::with_capacity(self.node_count());
        while let Some(&v) = ready.iter().next() {
            ready.remove(&v);
            order.push(v);
            for &e in self.out_edges(v) {
                let head = self.edges[&e].head;
                let d = indegree.get_mut(&head).unwrap();
                *d -= 1;
                if *d == 0 {
                    ready.insert(head);
                }
            }
        }
        assert_eq!(order.len(), self.node_count(), "graph invariant: acyclic");
        order
    }

    /// Topological position of every node under `topo_order`.
    pub fn topo_positions(&self) -> BTreeMap<NodeId, usize> {
        self.topo_order()
            .into_iter()
            .enumerate()
            .map(|(i, v)| (v, i))
            .collect()
    }

    /// Edges ordered by (topological position of tail, edge id) — processing
    /// in this order sees every edge after all in-edges of its tail.
    pub fn edge_topo_order(&self) -> Vec<EdgeId> {
        let pos = self.topo_positions();
        let mut ids: Vec<EdgeId> = self.edge_ids().collect();
        ids.sort_by_key(|e| (pos[&self.edges[e].tail], *e));
        ids
    }

    /// Deterministic breadth-first path search: returns a simple path from
    /// `from` to `to` avoiding `forbidden` nodes entirely, or None. Ties are
    /// broken by expanding out-edges in ascending id order, so among parallel
    /// edges the smallest id is always chosen. `from == to` yields the empty
    /// path (matching the path-count convention).
    pub fn find_path(
        &self,
        from: NodeId,
        to: NodeId,
        forbidden: &BTreeSet<NodeId>,
    ) -> Option<Path> {
        self.find_path_where(from, to, |v| !forbidden.contains(&v), |_| true)
    }

    /// Path search restricted to nodes passing `node_ok` and edges passing
    /// `edge_ok`; both endpoints must pass `node_ok`.
    pub fn find_path_where(
        &self,
        from: NodeId,
        to: NodeId,
        node_ok: impl Fn(NodeId) -> bool,
        edge_ok: impl Fn(&Edge) -> bool,
    ) -> Option<Path> {
        if !self.contains_node(from) || !self.contains_node(to) {
            return None;
        }
        if !node_ok(from) || !node_ok(to) {
            return None;
        }
        if from == to {
            return Some(Path::empty(from));
        }
        let mut parent: BTreeMap<NodeId, EdgeId> = BTreeMap::new();
        let mut queue = std::collections::VecDeque::new();
        queue.push_back(from);
        'search: while let Some(v) = queue.pop_front() {
            for &eid in self.out_edges(v) {
                let edge = &self.edges[&eid];
                if !edge_ok(edge) || !node_ok(edge.head) {
                    continue;
                }
                if edge.head == from || parent.contains_key(&edge.head) {
                    continue;
                }
                parent.insert(edge.head, eid);
                if edge.head == to {
                    break 'search;
                }
                queue.push_back(edge.head);
            }
        }
        parent.get(&to)?;
        let mut rev = Vec::new();
        let mut at = to;
        while at != from {
            let eid = parent[&at];
            rev.push(eid);
            at = self.edges[&eid].tail;
        }
        rev.reverse();
        Some(Path {
            start: from,
            edges: rev,
        })
    }

    /// Exact number of distinct directed paths from `from` to `to`, by
    /// dynamic programming over the topological order (every path in a DAG
    /// is simple). Parallel edges count as distinct paths.
    /// `count_paths(v, v)` is 1 by convention — the empty path.
    pub fn count_paths(&self, from: NodeId, to: NodeId) -> BigUint {
        if !self.contains_node(from) || !self.contains_node(to) {
            return BigUint::from(0u32);
        }
        let mut counts: BTreeMap<NodeId, BigUint> = BTreeMap::new();
        counts.insert(to, BigUint::from(1u32));
        let order = self.topo_order();
        for &v in order.iter().rev() {
            if v == to {
                continue;
            }
            let mut total = BigUint::from(0u32);
            for &e in self.out_edges(v) {
                let head = self.edges[&e].head;
                if let Some(c) = counts.get(&head) {
                    total += c;
                }
            }
            counts.insert(v, total);
        }
        counts.remove(&from).unwrap_or_else(|| BigUint::from(0u32))
    }

    /// True iff `b` is downstream of `a`: some directed path leads from `a`
    /// to `b`. Reflexive (the empty path). An edge is downstream of its tail
    /// and of every edge that can reach its tail; a node is downstream of an
    /// edge whose head reaches it.
    pub fn reaches(&self, a: GraphRef, b: GraphRef) -> bool {
        let start = match a {
            GraphRef::Node(v) => v,
            GraphRef::Edge(e) => match (b, self.try_edge(e)) {
                (GraphRef::Edge(e2), _) if e == e2 => return true,
                (_, Some(edge)) => edge.head,
                (_, None) => return false,
            },
        };
        let goal = match b {
            GraphRef::Node(v) => v,
            GraphRef::Edge(e) => match self.try_edge(e) {
                Some(edge) => edge.tail,
                None => return false,
            },
        };
        if !self.contains_node(start) || !self.contains_node(goal) {
            return false;
        }
        if start == goal {
            return true;
        }
        let mut seen = BTreeSet::new();
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            for &e in self.out_edges(v) {
                let head = self.edges[&e].head;
                if head == goal {
                    return true;
                }
                if seen.insert(head) {
                    stack.push(head);
                }
            }
        }
        false
    }

    /// Subgraph holding exactly the union of the given paths' edges (and
    /// their endpoints, plus the anchor nodes of empty paths). Ids, labels,
    /// and id counters are preserved, so paths valid here stay valid in the
    /// parent and vice versa.
    pub fn union_subgraph(&self, paths: &[Path]) -> Result<Dag, GraphError> {
        let mut keep_edges = BTreeSet::new();
        let mut keep_nodes = BTreeSet::new();
        for p in paths {
            p.validate(self)?;
            keep_nodes.insert(p.start);
            for &e in &p.edges {
                keep_edges.insert(e);
            }
        }
        Ok(self.restrict(&keep_nodes, &keep_edges))
    }

    /// Subgraph induced by an edge set: keeps those edges and their
    /// endpoints only.
    pub fn edge_induced(&self, keep: &BTreeSet<EdgeId>) -> Dag {
        self.restrict(&BTreeSet::new(), keep)
    }

    /// Removes the given edges; every node is kept.
    pub fn without_edges(&self, drop: &BTreeSet<EdgeId>) -> Dag {
        let keep_edges: BTreeSet<EdgeId> =
            self.edge_ids().filter(|e| !drop.contains(e)).collect();
        let keep_nodes: BTreeSet<NodeId> = self.node_ids().collect();
        self.restrict(&keep_nodes, &keep_edges)
    }

    /// Drops nodes that have no incident edge, except those in `keep`.
    pub fn prune_isolated_except(&self, keep: &BTreeSet<NodeId>) -> Dag {
        let mut keep_nodes: BTreeSet<NodeId> = keep
            .iter()
            .copied()
            .filter(|v| self.contains_node(*v))
            .collect();
        let keep_edges: BTreeSet<EdgeId> = self.edge_ids().collect();
        for e in self.edges() {
            keep_nodes.insert(e.tail);
            keep_nodes.insert(e.head);
        }
        self.restrict(&keep_nodes, &keep_edges)
    }

    fn restrict(&self, extra_nodes: &BTreeSet<NodeId>, keep_edges: &BTreeSet<EdgeId>) -> Dag {
        let mut keep_nodes = extra_nodes.clone();
        for e in keep_edges {
            let edge = &self.edges[e];
            keep_nodes.insert(edge.tail);
            keep_nodes.insert(edge.head);
        }
        let mut g = Dag {
            next_node: self.next_node,
            next_edge: self.next_edge,
            ..Dag::default()
        };
        for &v in &keep_nodes {
            let label = self.labels[&v].clone();
            g.by_label.insert(label.clone(), v);
            g.labels.insert(v, label);
            g.out_edges.insert(v, Vec::new());
            g.in_edges.insert(v, Vec::new());
        }
        for &e in keep_edges {
            let edge = self.edges[&e];
            g.edges.insert(e, edge);
            g.out_edges.get_mut(&edge.tail).unwrap().push(e);
            g.in_edges.get_mut(&edge.head).unwrap().push(e);
        }
        g
    }
}

/// A simple directed path: an anchor node plus a chained edge sequence.
/// The empty path (no edges) is a valid path from a node to itself.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Path {
    start: NodeId,
    edges: Vec<EdgeId>,
}

impl Path {
    pub fn empty(at: NodeId) -> Path {
        Path {
            start: at,
            edges: Vec::new(),
        }
    }

    /// Builds a non-empty path from an edge sequence, validating chaining
    /// and simplicity against `g`.
    pub fn from_edges(g: &Dag, edges: Vec<EdgeId>) -> Result<Path, GraphError> {
        let first = *edges
            .first()
            .ok_or_else(|| GraphError::InvalidPath("empty edge list needs an anchor".into()))?;
        let start = g
            .try_edge(first)
            .ok_or(GraphError::UnknownEdge(first))?
            .tail;
        let p = Path { start, edges };
        p.validate(g)?;
        Ok(p)
    }

    pub fn start(&self) -> NodeId {
        self.start
    }

    pub fn edges(&self) -> &[EdgeId] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn end(&self, g: &Dag) -> NodeId {
        self.edges
            .last()
            .map_or(self.start, |e| g.edge(*e).head)
    }

    /// Node sequence, length `len() + 1` (or 1 for the empty path).
    pub fn nodes(&self, g: &Dag) -> Vec<NodeId> {
        let mut out = Vec::with_capacity(self.edges.len() + 1);
        out.push(self.start);
        for &e in &self.edges {
            out.push(g.edge(e).head);
        }
        out
    }

    pub fn contains_node(&self, g: &Dag, v: NodeId) -> bool {
        self.nodes(g).contains(&v)
    }

    pub fn validate(&self, g: &Dag) -> Result<(), GraphError> {
        let mut at = self.start;
        if !g.contains_node(at) {
            return Err(GraphError::InvalidPath(format!("unknown start {at}")));
        }
        let mut seen = BTreeSet::new();
        seen.insert(at);
        for &e in &self.edges {
            let edge = g.try_edge(e).ok_or(GraphError::UnknownEdge(e))?;
            if edge.tail != at {
                return Err(GraphError::InvalidPath(format!(
                    "edge {e} starts at {} but the path is at {}",
                    edge.tail, at
                )));
            }
            at = edge.head;
            if !seen.insert(at) {
                return Err(GraphError::InvalidPath(format!(
                    "node {at} repeats — not a simple path"
                )));
            }
        }
        Ok(())
    }

    /// The sub-path from the start up to (and including) node `v`.
    pub fn prefix_to(&self, g: &Dag, v: NodeId) -> Result<Path, GraphError> {
        let nodes = self.nodes(g);
        let idx = nodes
            .iter()
            .position(|&x| x == v)
            .ok_or_else(|| GraphError::InvalidPath(format!("{v} is not on the path")))?;
        Ok(Path {
            start: self.start,
            edges: self.edges[..idx].to_vec(),
        })
    }

    /// The sub-path from node `v` (inclusive) to the end.
    pub fn suffix_from(&self, g: &Dag, v: NodeId) -> Result<Path, GraphError> {
        let nodes = self.nodes(g);
        let idx = nodes
            .iter()
            .position(|&x| x == v)
            .ok_or_else(|| GraphError::InvalidPath(format!("{v} is not on the path")))?;
        Ok(Path {
            start: v,
            edges: self.edges[idx..].to_vec(),
        })
    }

    /// Joins two paths where `self` ends at `other`'s start; the result is
    /// re-validated (concatenation must still be simple).
    pub fn concat(&self, g: &Dag, other: &Path) -> Result<Path, GraphError> {
        if self.end(g) != other.start {
            return Err(GraphError::InvalidPath(format!(
                "cannot join: first path ends at {} but second starts at {}",
                self.end(g),
                other.start
            )));
        }
        let mut edges = self.edges.clone();
        edges.extend_from_slice(&other.edges);
        let joined = Path {
            start: self.start,
            edges,
        };
        joined.validate(g)?;
        Ok(joined)
    }
}

/// Edge colors used while growing the one-path subgraph: blue marks the part
/// already constructed, red the paths of the source being added. An edge may
/// carry both.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub struct ColorSet {
    pub blue: bool,
    pub red: bool,
}

/// A DAG together with per-edge color sets. The graph is owned so that color
/// bookkeeping and structural edits stay consistent.
#[derive(Clone, Debug)]
pub struct ColoredSubgraph {
    parent: Dag,
    colors: BTreeMap<EdgeId, ColorSet>,
}

impl ColoredSubgraph {
    pub fn new(parent: Dag) -> Self {
        ColoredSubgraph {
            parent,
            colors: BTreeMap::new(),
        }
    }

    pub fn parent(&self) -> &Dag {
        &self.parent
    }

    pub fn color(&self, e: EdgeId) -> ColorSet {
        self.colors.get(&e).copied().unwrap_or_default()
    }

    pub fn color_blue(&mut self, e: EdgeId) {
        assert!(self.parent.contains_edge(e), "coloring unknown edge {e}");
        self.colors.entry(e).or_default().blue = true;
    }

    pub fn color_red(&mut self, e: EdgeId) {
        assert!(self.parent.contains_edge(e), "coloring unknown edge {e}");
        self.colors.entry(e).or_default().red = true;
    }

    pub fn uncolor_red(&mut self, e: EdgeId) {
        if let Some(c) = self.colors.get_mut(&e) {
            c.red = false;
        }
    }

    pub fn blue_edges(&self) -> BTreeSet<EdgeId> {
        self.colors
            .iter()
            .filter(|(_, c)| c.blue)
            .map(|(&e, _)| e)
            .collect()
    }

    pub fn red_edges(&self) -> BTreeSet<EdgeId> {
        self.colors
            .iter()
            .filter(|(_, c)| c.red)
            .map(|(&e, _)| e)
            .collect()
    }

    pub fn colored_edges(&self) -> BTreeSet<EdgeId> {
        self.colors
            .iter()
            .filter(|(_, c)| c.blue || c.red)
            .map(|(&e, _)| e)
            .collect()
    }

    /// Nodes touched by at least one blue edge.
    pub fn blue_nodes(&self) -> BTreeSet<NodeId> {
        let mut out = BTreeSet::new();
        for e in self.blue_edges() {
            let edge = self.parent.edge(e);
            out.insert(edge.tail);
            out.insert(edge.head);
        }
        out
    }

    pub fn is_blue_node(&self, v: NodeId) -> bool {
        self.blue_nodes().contains(&v)
    }

    /// The subgraph induced by all colored edges.
    pub fn colored_subgraph(&self) -> Dag {
        self.parent.edge_induced(&self.colored_edges())
    }

    /// The subgraph induced by blue edges only.
    pub fn blue_subgraph(&self) -> Dag {
        self.parent.edge_induced(&self.blue_edges())
    }
}
