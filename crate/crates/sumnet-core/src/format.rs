//! File formats: TOML instance documents and stored assignment documents.
//!
//! Instances are hand-editable: node labels plus `"tail -> head"` edge
//! strings (with an optional `xK` multiplicity for parallel edges).
//! Assignments store one decimal coding vector per augmented edge so a
//! solution can be re-verified later without re-running the solver.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{CodingVector, FieldError, FieldSpec};
use crate::graph::{Dag, GraphError};
use crate::instance::{Instance, InstanceError};
use crate::rewire::AugmentedInstance;
use crate::solve::{SolveReport, SolverKind};
use crate::verify::{CodingAssignment, VerifyError};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("invalid document: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("cannot serialize document: {0}")]
    TomlOut(#[from] toml::ser::Error),
    #[error("bad label {label:?}: {reason}")]
    BadLabel { label: String, reason: &'static str },
    #[error("bad edge {text:?}: {reason}")]
    BadEdge { text: String, reason: &'static str },
    #[error("unknown label {label:?} in {context}")]
    UnknownLabel { label: String, context: &'static str },
    #[error("assignment does not match instance: {0}")]
    AssignmentMismatch(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Verify(#[from] VerifyError),
}

/// Labels must survive the edge syntax and stay clear of the names the
/// pipeline invents: `'` marks virtual nodes, `@` marks stand-in sources.
pub fn validate_label(label: &str) -> Result<(), FormatError> {
    let bad = |reason| {
        Err(FormatError::BadLabel {
            label: label.to_string(),
            reason,
        })
    };
    if label.is_empty() {
        return bad("empty");
    }
    if label.chars().any(char::is_whitespace) {
        return bad("contains whitespace");
    }
    if label.contains('\'') {
        return bad("apostrophes are reserved for virtual nodes");
    }
    if label.contains("->") {
        return bad("'->' is the edge separator");
    }
    if label.starts_with('@') {
        return bad("'@' prefix is reserved for generated nodes");
    }
    Ok(())
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct FieldDocument {
    pub m: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<u32>,
}

impl FieldDocument {
    pub fn to_spec(&self) -> Result<FieldSpec, FieldError> {
        match self.modulus {
            Some(p) => FieldSpec::new(self.m, p),
            None => FieldSpec::with_default_modulus(self.m),
        }
    }

    pub fn from_spec(spec: FieldSpec) -> FieldDocument {
        FieldDocument {
            m: spec.m(),
            modulus: Some(spec.modulus()),
        }
    }
}

/// The on-disk instance shape.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct InstanceDocument {
    pub nodes: Vec<String>,
    pub sources: Vec<String>,
    pub terminals: Vec<String>,
    /// `"tail -> head"`, optionally `"tail -> head xK"` for K parallel edges.
    pub edges: Vec<String>,
    /// For generated infeasible instances: the (source, terminal) pair whose
    /// connectivity was cut.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_failure: Option<[String; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<FieldDocument>,
}

fn parse_edge_text(text: &str) -> Result<(String, String, usize), FormatError> {
    let bad = |reason| {
        Err(FormatError::BadEdge {
            text: text.to_string(),
            reason,
        })
    };
    let tokens: Vec<&str> = text.split_whitespace().collect();
    let (tail, head, mult) = match tokens.as_slice() {
        [tail, "->", head] => (tail, head, 1),
        [tail, "->", head, m] => {
            let Some(k) = m.strip_prefix('x') else {
                return bad("multiplicity must look like x2");
            };
            let Ok(k) = k.parse::<usize>() else {
                return bad("multiplicity must be a number");
            };
            if k < 1 {
                return bad("multiplicity must be at least 1");
            }
            (tail, head, k)
        }
        _ => return bad("expected 'tail -> head' or 'tail -> head xK'"),
    };
    Ok((tail.to_string(), head.to_string(), mult))
}

impl InstanceDocument {
    pub fn to_instance(&self) -> Result<Instance, FormatError> {
        let mut g = Dag::new();
        for label in &self.nodes {
            validate_label(label)?;
            g.add_node(label.clone())?;
        }
        let resolve = |label: &str, context: &'static str| {
            g.node_by_label(label).ok_or(FormatError::UnknownLabel {
                label: label.to_string(),
                context,
            })
        };
        let mut edge_specs = Vec::new();
        for text in &self.edges {
            let (tail, head, mult) = parse_edge_text(text)?;
            edge_specs.push((resolve(&tail, "edge list")?, resolve(&head, "edge list")?, mult));
        }
        let sources = self
            .sources
            .iter()
            .map(|l| resolve(l, "source list"))
            .collect::<Result<Vec<_>, _>>()?;
        let terminals = self
            .terminals
            .iter()
            .map(|l| resolve(l, "terminal list"))
            .collect::<Result<Vec<_>, _>>()?;
        let expected = match &self.expected_failure {
            Some([s, t]) => Some((
                resolve(s, "expected_failure")?,
                resolve(t, "expected_failure")?,
            )),
            None => None,
        };
        for (tail, head, mult) in edge_specs {
            for _ in 0..mult {
                g.add_edge(tail, head)?;
            }
        }
        let mut inst = Instance::new(g, sources, terminals)?;
        if let Some(doc) = &self.field {
            inst = inst.with_field(doc.to_spec()?);
        }
        if let Some((s, t)) = expected {
            inst = inst.with_expected_failure(s, t);
        }
        Ok(inst)
    }

    pub fn from_instance(inst: &Instance) -> Result<InstanceDocument, FormatError> {
        let g = inst.graph();
        let mut nodes = Vec::new();
        for v in g.node_ids() {
            let label = g.label(v).to_string();
            validate_label(&label)?;
            nodes.push(label);
        }
        // Runs of identical consecutive edges collapse into one xK entry,
        // which is exactly what parsing a multiplicity expands to.
        let mut edges: Vec<String> = Vec::new();
        let mut run: Option<(String, String, usize)> = None;
        let flush = |run: &mut Option<(String, String, usize)>, out: &mut Vec<String>| {
            if let Some((tail, head, k)) = run.take() {
                if k == 1 {
                    out.push(format!("{tail} -> {head}"));
                } else {
                    out.push(format!("{tail} -> {head} x{k}"));
                }
            }
        };
        for e in g.edges() {
            let tail = g.label(e.tail).to_string();
            let head = g.label(e.head).to_string();
            match &mut run {
                Some((t, h, k)) if *t == tail && *h == head => *k += 1,
                _ => {
                    flush(&mut run, &mut edges);
                    run = Some((tail, head, 1));
                }
            }
        }
        flush(&mut run, &mut edges);
        Ok(InstanceDocument {
            nodes,
            sources: inst.sources().iter().map(|&v| g.label(v).to_string()).collect(),
            terminals: inst
                .terminals()
                .iter()
                .map(|&v| g.label(v).to_string())
                .collect(),
            edges,
            expected_failure: inst
                .expected_failure()
                .map(|(s, t)| [g.label(s).to_string(), g.label(t).to_string()]),
            field: inst.field_override().map(FieldDocument::from_spec),
        })
    }
}

/// Parses a TOML instance document.
pub fn parse_instance(text: &str) -> Result<Instance, FormatError> {
    let doc: InstanceDocument = toml::from_str(text)?;
    doc.to_instance()
}

/// Serializes an instance back to its canonical TOML form.
pub fn serialize_instance(inst: &Instance) -> Result<String, FormatError> {
    Ok(toml::to_string_pretty(&InstanceDocument::from_instance(inst)?)?)
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct AssignmentEdge {
    pub id: u32,
    pub tail: String,
    pub head: String,
    /// Field elements as plain numbers, one per source.
    pub vector: Vec<u32>,
}

/// A stored solution: enough to re-verify against its instance file without
/// re-running the solver. Edges cover the whole augmented graph, virtual
/// nodes included (their labels carry the `'` suffix).
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct AssignmentDocument {
    pub solver: String,
    pub seed: u64,
    pub sources: Vec<String>,
    pub terminals: Vec<String>,
    pub field: FieldDocument,
    pub edges: Vec<AssignmentEdge>,
}

impl AssignmentDocument {
    pub fn from_report(report: &SolveReport) -> AssignmentDocument {
        let aug = report.aug();
        let g = aug.graph();
        let inst = aug.original();
        let edges = report
            .assignment()
            .iter()
            .map(|(e, v)| {
                let edge = g.edge(e);
                AssignmentEdge {
                    id: e.0,
                    tail: g.label(edge.tail).to_string(),
                    head: g.label(edge.head).to_string(),
                    vector: v.entries().iter().map(|x| x.bits() as u32).collect(),
                }
            })
            .collect();
        AssignmentDocument {
            solver: report.kind.to_string(),
            seed: report.seed,
            sources: inst
                .sources()
                .iter()
                .map(|&v| inst.graph().label(v).to_string())
                .collect(),
            terminals: inst
                .terminals()
                .iter()
                .map(|&v| inst.graph().label(v).to_string())
                .collect(),
            field: FieldDocument::from_spec(report.field),
            edges,
        }
    }

    pub fn solver_kind(&self) -> Result<SolverKind, FormatError> {
        self.solver
            .parse()
            .map_err(|_: String| FormatError::AssignmentMismatch(format!(
                "unknown solver {:?}",
                self.solver
            )))
    }

    /// Rebinds the stored vectors onto the augmented form of `inst`,
    /// cross-checking edge ids and endpoint labels.
    pub fn to_assignment(
        &self,
        aug: &AugmentedInstance,
    ) -> Result<CodingAssignment, FormatError> {
        let g = aug.graph();
        let field = self.field.to_spec()?;
        let n = self.sources.len();
        if n != aug.n_sources() {
            return Err(FormatError::AssignmentMismatch(format!(
                "stored {} sources, instance has {}",
                n,
                aug.n_sources()
            )));
        }
        if g.edge_count() != self.edges.len() {
            return Err(FormatError::AssignmentMismatch(format!(
                "stored {} edges, augmented instance has {}",
                self.edges.len(),
                g.edge_count()
            )));
        }
        let mut assignment = CodingAssignment::new(field, n);
        for stored in &self.edges {
            let id = crate::graph::EdgeId(stored.id);
            let Some(edge) = g.try_edge(id) else {
                return Err(FormatError::AssignmentMismatch(format!(
                    "edge id {} is not in the augmented instance",
                    stored.id
                )));
            };
            if g.label(edge.tail) != stored.tail || g.label(edge.head) != stored.head {
                return Err(FormatError::AssignmentMismatch(format!(
                    "edge {} is {} -> {} in the instance but {} -> {} in the assignment",
                    stored.id,
                    g.label(edge.tail),
                    g.label(edge.head),
                    stored.tail,
                    stored.head
                )));
            }
            if stored.vector.len() != n {
                return Err(FormatError::AssignmentMismatch(format!(
                    "edge {} carries {} entries, expected {}",
                    stored.id,
                    stored.vector.len(),
                    n
                )));
            }
            let entries = stored
                .vector
                .iter()
                .map(|&x| field.element(x))
                .collect::<Result<Vec<_>, _>>()?;
            assignment.set(id, CodingVector::new(entries)?)?;
        }
        Ok(assignment)
    }
}

/// Parses a stored assignment document.
pub fn parse_assignment(text: &str) -> Result<AssignmentDocument, FormatError> {
    Ok(toml::from_str(text)?)
}

/// Serializes a solve report's assignment for later re-verification.
pub fn serialize_assignment(report: &SolveReport) -> Result<String, FormatError> {
    Ok(toml::to_string_pretty(&AssignmentDocument::from_report(
        report,
    ))?)
}
