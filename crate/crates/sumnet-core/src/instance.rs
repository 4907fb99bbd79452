//! A problem instance: the network DAG plus the designated source and
//! terminal nodes, with optional field override and generator metadata.

use thiserror::Error;

use crate::field::FieldSpec;
use crate::graph::{Dag, NodeId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InstanceError {
    #[error("instance needs at least one {0}")]
    MissingRole(&'static str),
    #[error("node {0:?} is not in the graph")]
    UnknownNode(String),
    #[error("node {0:?} appears twice in the {1} list")]
    DuplicateRole(String, &'static str),
    #[error("node {0:?} is declared both source and terminal")]
    SourceAlsoTerminal(String),
}

/// Sources and terminals keep their declared order: source order defines the
/// coding-vector coordinate for each source, and the n-sources/2-terminals
/// solver processes sources in this order.
#[derive(Clone, Debug)]
pub struct Instance {
    graph: Dag,
    sources: Vec<NodeId>,
    terminals: Vec<NodeId>,
    field: Option<FieldSpec>,
    expected_failure: Option<(NodeId, NodeId)>,
}

impl Instance {
    pub fn new(
        graph: Dag,
        sources: Vec<NodeId>,
        terminals: Vec<NodeId>,
    ) -> Result<Instance, InstanceError> {
        if sources.is_empty() {
            return Err(InstanceError::MissingRole("source"));
        }
        if terminals.is_empty() {
            return Err(InstanceError::MissingRole("terminal"));
        }
        for (list, role) in [(&sources, "source"), (&terminals, "terminal")] {
            for (i, &v) in list.iter().enumerate() {
                if !graph.contains_node(v) {
                    return Err(InstanceError::UnknownNode(format!("{v}")));
                }
                if list[..i].contains(&v) {
                    return Err(InstanceError::DuplicateRole(
                        graph.label(v).to_string(),
                        role,
                    ));
                }
            }
        }
        if let Some(&v) = sources.iter().find(|v| terminals.contains(v)) {
            return Err(InstanceError::SourceAlsoTerminal(
                graph.label(v).to_string(),
            ));
        }
        Ok(Instance {
            graph,
            sources,
            terminals,
            field: None,
            expected_failure: None,
        })
    }

    pub fn with_field(mut self, field: FieldSpec) -> Instance {
        self.field = Some(field);
        self
    }

    pub fn with_expected_failure(mut self, source: NodeId, terminal: NodeId) -> Instance {
        self.expected_failure = Some((source, terminal));
        self
    }

    pub fn graph(&self) -> &Dag {
        &self.graph
    }

    pub fn sources(&self) -> &[NodeId] {
        &self.sources
    }

    pub fn terminals(&self) -> &[NodeId] {
        &self.terminals
    }

    pub fn n_sources(&self) -> usize {
        self.sources.len()
    }

    pub fn n_terminals(&self) -> usize {
        self.terminals.len()
    }

    /// Field requested by the instance file, if any; solvers fall back to
    /// their own defaults otherwise.
    pub fn field_override(&self) -> Option<FieldSpec> {
        self.field
    }

    /// For generated infeasible instances: the single pair whose max-flow
    /// the generator cut to zero.
    pub fn expected_failure(&self) -> Option<(NodeId, NodeId)> {
        self.expected_failure
    }

    pub fn source_index(&self, v: NodeId) -> Option<usize> {
        self.sources.iter().position(|&s| s == v)
    }

    pub fn terminal_index(&self, v: NodeId) -> Option<usize> {
        self.terminals.iter().position(|&t| t == v)
    }
}
