//! Small hand-authored instances used across the test suites and shipped as
//! TOML files under `fixtures/`. Node and edge declaration order is part of
//! each fixture's identity: ids and all deterministic tie-breaks depend on
//! it.

use crate::graph::Dag;
use crate::instance::Instance;

fn build(nodes: &[&str], edges: &[(&str, &str)], sources: &[&str], terminals: &[&str]) -> Instance {
    let mut g = Dag::new();
    for n in nodes {
        g.add_node(*n).unwrap();
    }
    for (a, b) in edges {
        let tail = g.node_by_label(a).unwrap();
        let head = g.node_by_label(b).unwrap();
        g.add_edge(tail, head).unwrap();
    }
    let sources = sources
        .iter()
        .map(|n| g.node_by_label(n).unwrap())
        .collect();
    let terminals = terminals
        .iter()
        .map(|n| g.node_by_label(n).unwrap())
        .collect();
    Instance::new(g, sources, terminals).unwrap()
}

/// Single chain: one source relays to one terminal.
pub fn line1() -> Instance {
    build(
        &["s1", "a", "t1"],
        &[("s1", "a"), ("a", "t1")],
        &["s1"],
        &["t1"],
    )
}

/// Two sources merging into one node feeding one terminal.
pub fn diamond() -> Instance {
    build(
        &["s1", "s2", "m", "t1"],
        &[("s1", "m"), ("s2", "m"), ("m", "t1")],
        &["s1", "s2"],
        &["t1"],
    )
}

/// One source branching to two terminals.
pub fn star1() -> Instance {
    build(
        &["s1", "m", "t1", "t2"],
        &[("s1", "m"), ("m", "t1"), ("m", "t2")],
        &["s1"],
        &["t1", "t2"],
    )
}

/// The classic crossed butterfly: each source has a direct edge to one
/// terminal, and the other terminal is reachable only through the shared
/// middle path m1 -> m2.
pub fn butterfly() -> Instance {
    build(
        &["s1", "s2", "m1", "m2", "t1", "t2"],
        &[
            ("s1", "t1"),
            ("s1", "m1"),
            ("s2", "m1"),
            ("s2", "t2"),
            ("m1", "m2"),
            ("m2", "t1"),
            ("m2", "t2"),
        ],
        &["s1", "s2"],
        &["t1", "t2"],
    )
}

/// Two sources into one hub that fans out to three terminals.
pub fn fan3() -> Instance {
    build(
        &["s1", "s2", "m", "t1", "t2", "t3"],
        &[
            ("s1", "m"),
            ("s2", "m"),
            ("m", "t1"),
            ("m", "t2"),
            ("m", "t3"),
        ],
        &["s1", "s2"],
        &["t1", "t2", "t3"],
    )
}

/// Three sources through one hub to two terminals.
pub fn star3x2() -> Instance {
    build(
        &["s1", "s2", "s3", "m", "t1", "t2"],
        &[
            ("s1", "m"),
            ("s2", "m"),
            ("s3", "m"),
            ("m", "t1"),
            ("m", "t2"),
        ],
        &["s1", "s2", "s3"],
        &["t1", "t2"],
    )
}

/// The butterfly with the middle edge m1 -> m2 removed: s1 can no longer
/// reach t2 and s2 can no longer reach t1.
pub fn cut() -> Instance {
    build(
        &["s1", "s2", "m1", "m2", "t1", "t2"],
        &[
            ("s1", "t1"),
            ("s1", "m1"),
            ("s2", "m1"),
            ("s2", "t2"),
            ("m2", "t1"),
            ("m2", "t2"),
        ],
        &["s1", "s2"],
        &["t1", "t2"],
    )
}

/// Two stacked diamonds: source paths to t1 can intersect, separate, and
/// intersect again — the stress case for suffix rewiring.
pub fn dd() -> Instance {
    build(
        &["s1", "s2", "a", "b", "c", "d", "t1"],
        &[
            ("s1", "a"),
            ("s2", "a"),
            ("a", "b"),
            ("a", "c"),
            ("b", "d"),
            ("c", "d"),
            ("d", "t1"),
            ("s1", "b"),
            ("s2", "c"),
        ],
        &["s1", "s2"],
        &["t1"],
    )
}

/// A fork where the second source reaches both branch nodes directly; adding
/// it to the first source's subgraph exercises the no-blue-continuation case
/// of the one-path construction.
pub fn fork2() -> Instance {
    build(
        &["s1", "s2", "w", "a", "b", "t1", "t2"],
        &[
            ("s1", "w"),
            ("w", "a"),
            ("w", "b"),
            ("a", "t1"),
            ("b", "t2"),
            ("s2", "a"),
            ("s2", "b"),
        ],
        &["s1", "s2"],
        &["t1", "t2"],
    )
}

/// All fixtures by name, in a stable order.
pub fn all() -> Vec<(&'static str, Instance)> {
    vec![
        ("line1", line1()),
        ("diamond", diamond()),
        ("star1", star1()),
        ("butterfly", butterfly()),
        ("fan3", fan3()),
        ("star3x2", star3x2()),
        ("cut", cut()),
        ("dd", dd()),
        ("fork2", fork2()),
    ]
}

pub fn by_name(name: &str) -> Option<Instance> {
    all().into_iter().find(|(n, _)| *n == name).map(|(_, i)| i)
}
