//! Shared helpers for the integration test suites: small random DAGs and
//! independent brute-force oracles to check the library against.

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use sumnet_core::field::{CodingVector, FieldSpec};
use sumnet_core::graph::{Dag, NodeId, Path};

/// A small random DAG with designated endpoints `s` and `t`. Nodes sit on
/// ranks (s lowest, t highest) and every edge climbs, so the graph is acyclic
/// with all edges potentially useful for s -> t traffic. There is no
/// guarantee that t is reachable.
pub fn random_dag(
    rng: &mut ChaCha8Rng,
    max_middles: usize,
    max_edges: usize,
) -> (Dag, NodeId, NodeId) {
    let mut g = Dag::new();
    let s = g.add_node("s").unwrap();
    let middles: Vec<NodeId> = (0..rng.gen_range(0..=max_middles))
        .map(|i| g.add_node(format!("v{i}")).unwrap())
        .collect();
    let t = g.add_node("t").unwrap();

    let mut rank: BTreeMap<NodeId, usize> = BTreeMap::new();
    rank.insert(s, 0);
    for &v in &middles {
        rank.insert(v, rng.gen_range(1..=3));
    }
    rank.insert(t, 4);

    let nodes: Vec<NodeId> = g.node_ids().collect();
    let mut budget = max_edges;
    // A couple of passes so parallel edges show up now and then.
    for _ in 0..2 {
        for &u in &nodes {
            for &v in &nodes {
                if rank[&u] < rank[&v] && budget > 0 && rng.gen_bool(0.4) {
                    g.add_edge(u, v).unwrap();
                    budget -= 1;
                }
            }
        }
    }
    (g, s, t)
}

/// Every simple path from `s` to `t`, by DFS. Paths in a DAG are simple
/// automatically; callers keep the graphs small.
pub fn all_paths(g: &Dag, s: NodeId, t: NodeId) -> Vec<Path> {
    let mut found = Vec::new();
    let mut stack = Vec::new();
    fn walk(g: &Dag, at: NodeId, t: NodeId, stack: &mut Vec<u32>, found: &mut Vec<Path>) {
        if at == t {
            let edges = stack
                .iter()
                .map(|&e| sumnet_core::graph::EdgeId(e))
                .collect();
            found.push(if stack.is_empty() {
                Path::empty(t)
            } else {
                Path::from_edges(g, edges).unwrap()
            });
            return;
        }
        for &e in g.out_edges(at) {
            stack.push(e.0);
            walk(g, g.edge(e).head, t, stack, found);
            stack.pop();
        }
    }
    walk(g, s, t, &mut stack, &mut found);
    found
}

/// Maximum number of pairwise edge-disjoint s -> t paths, by exhaustive
/// packing over edge subsets (memoized on the remaining-edge bitmask).
/// Requires at most 16 edges.
pub fn brute_force_max_disjoint(g: &Dag, s: NodeId, t: NodeId) -> usize {
    let edges: Vec<_> = g.edge_ids().collect();
    assert!(edges.len() <= 16, "bitmask oracle caps at 16 edges");
    let index: BTreeMap<_, _> = edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    let paths: Vec<u32> = all_paths(g, s, t)
        .iter()
        .filter(|p| !p.is_empty())
        .map(|p| {
            p.edges()
                .iter()
                .fold(0u32, |mask, e| mask | 1 << index[e])
        })
        .collect();

    fn pack(paths: &[u32], available: u32, memo: &mut BTreeMap<u32, usize>) -> usize {
        if let Some(&v) = memo.get(&available) {
            return v;
        }
        let mut best = 0;
        for &p in paths {
            if p & !available == 0 {
                best = best.max(1 + pack(paths, available & !p, memo));
            }
        }
        memo.insert(available, best);
        best
    }
    let full = if edges.is_empty() {
        0
    } else {
        (1u32 << edges.len()) - 1
    };
    pack(&paths, full, &mut BTreeMap::new())
}

/// Span membership by sheer enumeration of every coefficient combination.
/// Only sensible for tiny fields and few basis vectors.
pub fn span_by_enumeration(field: FieldSpec, basis: &[CodingVector], target: &CodingVector) -> bool {
    let order = field.order() as u64;
    let combos = order.pow(basis.len() as u32);
    'outer: for combo in 0..combos {
        let mut c = combo;
        let mut acc = CodingVector::zero(field, target.len());
        for b in basis {
            let coeff = field.element((c % order) as u32).unwrap();
            c /= order;
            let term = match b.scale(coeff) {
                Ok(v) => v,
                Err(_) => continue 'outer,
            };
            acc = match acc.checked_add(&term) {
                Ok(v) => v,
                Err(_) => continue 'outer,
            };
        }
        if acc == *target {
            return true;
        }
    }
    false
}
