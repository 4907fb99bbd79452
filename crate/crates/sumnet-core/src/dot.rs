//! Graphviz DOT export, for eyeballing instances and solved subgraphs.

use std::collections::BTreeSet;

use crate::graph::{Dag, EdgeId, NodeId};
use crate::instance::Instance;
use crate::solve::{SolveOutcome, SolveReport};

fn quote(label: &str) -> String {
    format!("\"{}\"", label.replace('\\', "\\\\").replace('"', "\\\""))
}

fn node_line(g: &Dag, v: NodeId, attrs: &str) -> String {
    if attrs.is_empty() {
        format!("  {};\n", quote(g.label(v)))
    } else {
        format!("  {} [{}];\n", quote(g.label(v)), attrs)
    }
}

/// Plain rendering of an unsolved instance: sources boxed, terminals
/// double-circled, no edge labels.
pub fn export_dot_instance(inst: &Instance) -> String {
    let g = inst.graph();
    let mut out = String::from("digraph instance {\n  rankdir=LR;\n");
    for v in g.node_ids() {
        let attrs = if inst.source_index(v).is_some() {
            "shape=box"
        } else if inst.terminal_index(v).is_some() {
            "shape=doublecircle"
        } else {
            ""
        };
        out.push_str(&node_line(g, v, attrs));
    }
    for e in g.edge_ids() {
        let edge = g.edge(e);
        out.push_str(&format!(
            "  {} -> {};\n",
            quote(g.label(edge.tail)),
            quote(g.label(edge.head))
        ));
    }
    out.push_str("}\n");
    out
}

/// Rendering of a solved instance over its augmented graph: every edge is
/// labeled with its coding vector, edges the construction actually uses are
/// solid (unused ones dashed and grayed), virtual nodes are dotted, and the
/// two-source solver's merge points are highlighted.
pub fn export_dot(report: &SolveReport) -> String {
    let aug = report.aug();
    let g = aug.graph();
    let inst = aug.original();
    let used: BTreeSet<EdgeId> = report.used_edges().into_iter().collect();
    let merges: BTreeSet<NodeId> = match &report.outcome {
        SolveOutcome::TwoByN(s) => s.table.merge_nodes(),
        SolveOutcome::NByTwo(_) => BTreeSet::new(),
    };

    let mut out = String::from("digraph solved {\n  rankdir=LR;\n");
    for v in g.node_ids() {
        let mut attrs: Vec<&str> = Vec::new();
        if aug.origin(v).is_some() {
            attrs.push("style=dotted");
        } else if inst.source_index(v).is_some() {
            attrs.push("shape=box");
        } else if inst.terminal_index(v).is_some() {
            attrs.push("shape=doublecircle");
        }
        if merges.contains(&v) {
            attrs.push("peripheries=2");
            attrs.push("color=blue");
        }
        out.push_str(&node_line(g, v, &attrs.join(", ")));
    }
    for e in g.edge_ids() {
        let edge = g.edge(e);
        let vector = report
            .assignment()
            .vector(e)
            .map(|v| v.to_string())
            .unwrap_or_default();
        let style = if used.contains(&e) {
            String::new()
        } else {
            ", style=dashed, color=gray".to_string()
        };
        out.push_str(&format!(
            "  {} -> {} [label={}{}];\n",
            quote(g.label(edge.tail)),
            quote(g.label(edge.head)),
            quote(&vector),
            style,
        ));
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::solve::solve;

    #[test]
    fn solved_line_labels_every_edge_with_its_vector() {
        let report = solve(&fixtures::line1(), None, 0, None).unwrap();
        let dot = export_dot(&report);
        // Both real edges (and the virtual ones) carry the lone source's
        // coefficient.
        assert!(dot.matches("label=\"[1]\"").count() >= 2, "{dot}");
        assert!(dot.starts_with("digraph solved {"));
    }

    #[test]
    fn merge_nodes_are_highlighted_for_the_two_source_solver() {
        let report = solve(&fixtures::fan3(), None, 3, None).unwrap();
        let dot = export_dot(&report);
        assert!(dot.contains("\"m\" [peripheries=2, color=blue]"), "{dot}");
    }

    #[test]
    fn plain_export_has_no_vector_labels() {
        let dot = export_dot_instance(&fixtures::butterfly());
        assert!(!dot.contains("label="), "{dot}");
        assert!(dot.contains("\"s1\" [shape=box]"));
        assert!(dot.contains("\"t2\" [shape=doublecircle]"));
    }

    #[test]
    fn export_is_deterministic() {
        let a = export_dot(&solve(&fixtures::butterfly(), None, 5, None).unwrap());
        let b = export_dot(&solve(&fixtures::butterfly(), None, 5, None).unwrap());
        assert_eq!(a, b);
    }
}
