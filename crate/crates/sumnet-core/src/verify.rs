//! Independent verification of coding assignments: propagation of global
//! vectors from local coefficients, span-validity checking, sum-recovery
//! checking, symbol-level transmission simulation, and an exhaustive GF(2)
//! search usable as an oracle on tiny instances.
//!
//! Nothing in here reuses solver internals; solvers are validated against
//! this layer, not the other way around.

use std::collections::BTreeMap;
use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::field::{in_span, solve_combination, CodingVector, FieldElement, FieldError, FieldSpec};
use crate::graph::{Dag, EdgeId, NodeId};
use crate::instance::Instance;
use crate::rewire::AugmentedInstance;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VerifyError {
    #[error("no local coefficients recorded for edge {0}")]
    MissingLocalCode(EdgeId),
    #[error("local input {input} of edge {edge} is not an in-edge of its tail")]
    ForeignLocalInput { edge: EdgeId, input: EdgeId },
    #[error("local input of edge {edge} repeats or names source index {index} out of range")]
    BadLocalInput { edge: EdgeId, index: usize },
    #[error("no vector assigned to edge {0}")]
    MissingVector(EdgeId),
    #[error("vector on edge {edge} has length {got}, expected {expected}")]
    VectorLength {
        edge: EdgeId,
        expected: usize,
        got: usize,
    },
    #[error("assignment is not locally valid (first offender: edge {0})")]
    InvalidAssignment(EdgeId),
    #[error("symbol tuple {index} has length {got}, expected {expected}")]
    TupleLength {
        index: usize,
        expected: usize,
        got: usize,
    },
    #[error("instance has {edges} edges; exhaustive search is capped at {cap}")]
    TooLargeForSearch { edges: usize, cap: usize },
    #[error("exhaustive search exceeded its state budget")]
    SearchBudgetExceeded,
    #[error("exhaustive search supports at most {cap} sources, got {got}")]
    TooManySourcesForSearch { cap: usize, got: usize },
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// One input feeding an edge's linear combination: either an in-edge of the
/// edge's tail or a source process injected at that node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum LocalInput {
    Edge(EdgeId),
    Source(usize),
}

impl fmt::Display for LocalInput {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LocalInput::Edge(e) => write!(f, "{e}"),
            LocalInput::Source(i) => write!(f, "source {i}"),
        }
    }
}

/// Local coefficients per edge: how each edge's signal is combined from the
/// signals entering its tail (and/or source processes injected there).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LocalCode {
    entries: BTreeMap<EdgeId, Vec<(LocalInput, FieldElement)>>,
}

impl LocalCode {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, edge: EdgeId, inputs: Vec<(LocalInput, FieldElement)>) {
        self.entries.insert(edge, inputs);
    }

    pub fn get(&self, edge: EdgeId) -> Option<&[(LocalInput, FieldElement)]> {
        self.entries.get(&edge).map(Vec::as_slice)
    }

    pub fn iter(&self) -> impl Iterator<Item = (EdgeId, &[(LocalInput, FieldElement)])> {
        self.entries.iter().map(|(&e, v)| (e, v.as_slice()))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Global coding vectors: one length-`n_sources` vector per edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodingAssignment {
    field: FieldSpec,
    n_sources: usize,
    vectors: BTreeMap<EdgeId, CodingVector>,
}

impl CodingAssignment {
    pub fn new(field: FieldSpec, n_sources: usize) -> Self {
        assert!(n_sources > 0, "assignments need at least one source");
        Self {
            field,
            n_sources,
            vectors: BTreeMap::new(),
        }
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn n_sources(&self) -> usize {
        self.n_sources
    }

    pub fn set(&mut self, edge: EdgeId, v: CodingVector) -> Result<(), VerifyError> {
        if v.field() != self.field {
            return Err(FieldError::MixedFields(self.field, v.field()).into());
        }
        if v.len() != self.n_sources {
            return Err(VerifyError::VectorLength {
                edge,
                expected: self.n_sources,
                got: v.len(),
            });
        }
        self.vectors.insert(edge, v);
        Ok(())
    }

    pub fn vector(&self, edge: EdgeId) -> Option<&CodingVector> {
        self.vectors.get(&edge)
    }

    pub fn iter(&self) -> impl Iterator<Item = (EdgeId, &CodingVector)> {
        self.vectors.iter().map(|(&e, v)| (e, v))
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Vectors on the in-edges of `v`, ascending edge id, erroring on gaps.
    pub fn incoming(&self, g: &Dag, v: NodeId) -> Result<Vec<CodingVector>, VerifyError> {
        g.in_edges(v)
            .iter()
            .map(|&e| {
                self.vector(e)
                    .cloned()
                    .ok_or(VerifyError::MissingVector(e))
            })
            .collect()
    }
}

/// Computes the global vector of every edge, in topological edge order, as
/// the coefficient-weighted sum of its listed inputs: in-edge inputs
/// contribute their already-computed vectors, source inputs contribute unit
/// vectors. Every edge needs an entry; edge inputs must be in-edges of the
/// tail; no input may repeat.
pub fn propagate(
    g: &Dag,
    code: &LocalCode,
    n_sources: usize,
    field: FieldSpec,
) -> Result<CodingAssignment, VerifyError> {
    let mut out = CodingAssignment::new(field, n_sources);
    for edge_id in g.edge_topo_order() {
        let edge = g.edge(edge_id);
        let inputs = code
            .get(edge_id)
            .ok_or(VerifyError::MissingLocalCode(edge_id))?;
        let mut seen = Vec::new();
        let mut acc = CodingVector::zero(field, n_sources);
        for &(input, coeff) in inputs {
            if seen.contains(&input) {
                let index = match input {
                    LocalInput::Source(i) => i,
                    LocalInput::Edge(_) => usize::MAX,
                };
                return Err(VerifyError::BadLocalInput {
                    edge: edge_id,
                    index,
                });
            }
            seen.push(input);
            let vec = match input {
                LocalInput::Edge(d) => {
                    if !g.in_edges(edge.tail).contains(&d) {
                        return Err(VerifyError::ForeignLocalInput {
                            edge: edge_id,
                            input: d,
                        });
                    }
                    out.vector(d)
                        .cloned()
                        .ok_or(VerifyError::MissingVector(d))?
                }
                LocalInput::Source(i) => {
                    if i >= n_sources {
                        return Err(VerifyError::BadLocalInput {
                            edge: edge_id,
                            index: i,
                        });
                    }
                    CodingVector::unit(field, n_sources, i)
                }
            };
            acc = acc.checked_add(&vec.scale(coeff)?)?;
        }
        out.set(edge_id, acc)?;
    }
    Ok(out)
}

/// Why an edge fails local validity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ValidityIssue {
    /// No vector assigned at all.
    MissingVector,
    /// Out-edge of the i-th source does not carry the i-th unit vector.
    NotUnitVector { source_index: usize },
    /// Vector is not a linear combination of the tail's incoming vectors.
    OutsideInputSpan,
}

impl fmt::Display for ValidityIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValidityIssue::MissingVector => write!(f, "no vector assigned"),
            ValidityIssue::NotUnitVector { source_index } => {
                write!(f, "must carry unit vector of source {source_index}")
            }
            ValidityIssue::OutsideInputSpan => {
                write!(f, "vector is outside the span of the tail's inputs")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidityWitness {
    pub edge: EdgeId,
    pub issue: ValidityIssue,
}

/// Result of `check_local_validity`: valid, or the first offending edge in
/// topological edge order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidityReport {
    witness: Option<ValidityWitness>,
}

impl ValidityReport {
    pub fn valid(&self) -> bool {
        self.witness.is_none()
    }

    pub fn witness(&self) -> Option<&ValidityWitness> {
        self.witness.as_ref()
    }
}

impl fmt::Display for ValidityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.witness {
            None => write!(f, "assignment is locally valid"),
            Some(w) => write!(f, "invalid at edge {}: {}", w.edge, w.issue),
        }
    }
}

/// Checks the span condition: every out-edge of `sources[i]` carries the
/// i-th unit vector, and every other edge's vector lies in the span of the
/// vectors entering its tail. Walks edges in topological order and reports
/// the first offender.
pub fn check_local_validity(
    g: &Dag,
    a: &CodingAssignment,
    sources: &[NodeId],
) -> Result<ValidityReport, FieldError> {
    let field = a.field();
    let n = a.n_sources();
    for edge_id in g.edge_topo_order() {
        let edge = g.edge(edge_id);
        let Some(vec) = a.vector(edge_id) else {
            return Ok(ValidityReport {
                witness: Some(ValidityWitness {
                    edge: edge_id,
                    issue: ValidityIssue::MissingVector,
                }),
            });
        };
        if let Some(i) = sources.iter().position(|&s| s == edge.tail) {
            if *vec != CodingVector::unit(field, n, i) {
                return Ok(ValidityReport {
                    witness: Some(ValidityWitness {
                        edge: edge_id,
                        issue: ValidityIssue::NotUnitVector { source_index: i },
                    }),
                });
            }
            continue;
        }
        let mut basis = Vec::new();
        for &d in g.in_edges(edge.tail) {
            match a.vector(d) {
                Some(v) => basis.push(v.clone()),
                // The missing in-edge is itself the earlier offender; it
                // will have been reported before this edge is reached.
                None => {
                    return Ok(ValidityReport {
                        witness: Some(ValidityWitness {
                            edge: d,
                            issue: ValidityIssue::MissingVector,
                        }),
                    })
                }
            }
        }
        if !in_span(field, &basis, vec)? {
            return Ok(ValidityReport {
                witness: Some(ValidityWitness {
                    edge: edge_id,
                    issue: ValidityIssue::OutsideInputSpan,
                }),
            });
        }
    }
    Ok(ValidityReport { witness: None })
}

/// Sum-recovery verdict for one terminal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TerminalRecovery {
    pub terminal: NodeId,
    pub label: String,
    /// Vector on the terminal's virtual out-edge, if assigned.
    pub delivered: Option<CodingVector>,
    /// True iff `delivered` is the all-ones vector.
    pub sum_recovered: bool,
    /// Diagnostic: could this terminal have combined its real in-edges into
    /// the all-ones vector (regardless of what the virtual edge carries)?
    pub sum_in_reach: bool,
}

/// Per-terminal sum-recovery report. The binding verdict is the vector on
/// each virtual terminal edge; span reachability is reported as a
/// diagnostic for near-miss assignments.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransferReport {
    per_terminal: Vec<TerminalRecovery>,
    witness: Option<EdgeId>,
}

impl TransferReport {
    pub fn all_recovered(&self) -> bool {
        self.witness.is_none()
    }

    pub fn per_terminal(&self) -> &[TerminalRecovery] {
        &self.per_terminal
    }

    /// Virtual edge of the first terminal that does not receive the sum.
    pub fn witness(&self) -> Option<EdgeId> {
        self.witness
    }
}

impl fmt::Display for TransferReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.per_terminal.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            match (&t.delivered, t.sum_recovered) {
                (Some(v), true) => write!(f, "{}: receives {} (sum recovered)", t.label, v)?,
                (Some(v), false) => write!(
                    f,
                    "{}: receives {} (NOT the sum; all-ones {} reach of its inputs)",
                    t.label,
                    v,
                    if t.sum_in_reach { "within" } else { "out of" }
                )?,
                (None, _) => write!(f, "{}: no vector on its virtual edge", t.label)?,
            }
        }
        Ok(())
    }
}

/// Reads each terminal's answer off its virtual out-edge and checks it is
/// the all-ones vector (i.e. the terminal decodes the sum of all sources).
pub fn check_sum_recovery(
    aug: &AugmentedInstance,
    a: &CodingAssignment,
) -> Result<TransferReport, FieldError> {
    let g = aug.graph();
    let field = a.field();
    let n = a.n_sources();
    let mut per_terminal = Vec::new();
    let mut witness = None;
    for (j, &t) in aug.original().terminals().iter().enumerate() {
        let ve = aug.virtual_terminal_edge(j);
        let delivered = a.vector(ve).cloned();
        let sum_recovered = delivered.as_ref().is_some_and(CodingVector::is_all_ones);
        let basis: Vec<CodingVector> = g
            .in_edges(t)
            .iter()
            .filter_map(|&e| a.vector(e).cloned())
            .collect();
        let sum_in_reach = in_span(field, &basis, &CodingVector::all_ones(field, n))?;
        if !sum_recovered && witness.is_none() {
            witness = Some(ve);
        }
        per_terminal.push(TerminalRecovery {
            terminal: t,
            label: g.label(t).to_string(),
            delivered,
            sum_recovered,
            sum_in_reach,
        });
    }
    Ok(TransferReport {
        per_terminal,
        witness,
    })
}

/// Reconstructs local coefficients realizing a locally valid assignment:
/// source out-edges draw their unit vector from the source process, every
/// other edge solves for a combination of its tail's incoming vectors.
pub fn induced_local_code(
    g: &Dag,
    a: &CodingAssignment,
    sources: &[NodeId],
) -> Result<LocalCode, VerifyError> {
    let field = a.field();
    let mut code = LocalCode::new();
    for edge_id in g.edge_topo_order() {
        let edge = g.edge(edge_id);
        let vec = a
            .vector(edge_id)
            .ok_or(VerifyError::MissingVector(edge_id))?;
        if let Some(i) = sources.iter().position(|&s| s == edge.tail) {
            // Locally valid assignments carry exactly the unit vector here.
            if *vec != CodingVector::unit(field, a.n_sources(), i) {
                return Err(VerifyError::InvalidAssignment(edge_id));
            }
            code.set(edge_id, vec![(LocalInput::Source(i), field.one())]);
            continue;
        }
        let in_edges = g.in_edges(edge.tail);
        let basis = a.incoming(g, edge.tail)?;
        let Some(coeffs) = solve_combination(field, &basis, vec)? else {
            return Err(VerifyError::InvalidAssignment(edge_id));
        };
        code.set(
            edge_id,
            in_edges
                .iter()
                .zip(coeffs)
                .map(|(&d, c)| (LocalInput::Edge(d), c))
                .collect(),
        );
    }
    Ok(code)
}

/// Draws `rounds` uniformly random source tuples, reproducibly from `seed`.
pub fn random_symbol_tuples(
    field: FieldSpec,
    n_sources: usize,
    rounds: usize,
    seed: u64,
) -> Vec<Vec<FieldElement>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..rounds)
        .map(|_| (0..n_sources).map(|_| field.random(&mut rng)).collect())
        .collect()
}

/// Outcome of transmitting one source tuple.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimulationRound {
    pub inputs: Vec<FieldElement>,
    /// Field sum (XOR) of the inputs.
    pub expected_sum: FieldElement,
    /// Symbol each terminal reads off its virtual edge, in terminal order.
    pub outputs: Vec<FieldElement>,
    /// True iff every output equals the expected sum.
    pub sum_recovered: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimulationReport {
    rounds: Vec<SimulationRound>,
}

impl SimulationReport {
    pub fn rounds(&self) -> &[SimulationRound] {
        &self.rounds
    }

    pub fn all_sums_recovered(&self) -> bool {
        self.rounds.iter().all(|r| r.sum_recovered)
    }

    pub fn first_failure(&self) -> Option<&SimulationRound> {
        self.rounds.iter().find(|r| !r.sum_recovered)
    }
}

impl fmt::Display for SimulationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ok = self.rounds.iter().filter(|r| r.sum_recovered).count();
        write!(
            f,
            "{}/{} rounds delivered the sum at every terminal",
            ok,
            self.rounds.len()
        )?;
        if let Some(r) = self.first_failure() {
            let inputs: Vec<String> = r.inputs.iter().map(|x| x.to_string()).collect();
            let outputs: Vec<String> = r.outputs.iter().map(|x| x.to_string()).collect();
            write!(
                f,
                "\nfirst failure: inputs ({}) expect {}, terminals read ({})",
                inputs.join(", "),
                r.expected_sum,
                outputs.join(", ")
            )?;
        }
        Ok(())
    }
}

/// Transmits each source tuple through the network: every edge emits the
/// combination of its tail's inputs prescribed by the local code induced
/// from the assignment. Along the way the symbol on every edge is checked
/// against the inner product of the edge's global vector with the tuple
/// (the linearity identity), and each terminal's output is read off its
/// virtual edge. Refuses assignments that are not locally valid.
pub fn simulate_transmission(
    aug: &AugmentedInstance,
    a: &CodingAssignment,
    tuples: &[Vec<FieldElement>],
) -> Result<SimulationReport, VerifyError> {
    let g = aug.graph();
    let field = a.field();
    let n = a.n_sources();
    let validity = check_local_validity(g, a, aug.virtual_sources())?;
    if let Some(w) = validity.witness() {
        return Err(VerifyError::InvalidAssignment(w.edge));
    }
    let code = induced_local_code(g, a, aug.virtual_sources())?;
    let order = g.edge_topo_order();
    let mut rounds = Vec::new();
    for (index, tuple) in tuples.iter().enumerate() {
        if tuple.len() != n {
            return Err(VerifyError::TupleLength {
                index,
                expected: n,
                got: tuple.len(),
            });
        }
        let mut expected_sum = field.zero();
        for &x in tuple {
            expected_sum = expected_sum.checked_add(x)?;
        }
        let mut signal: BTreeMap<EdgeId, FieldElement> = BTreeMap::new();
        for &edge_id in &order {
            let mut y = field.zero();
            for &(input, coeff) in code.get(edge_id).expect("induced code is complete") {
                let x = match input {
                    LocalInput::Edge(d) => signal[&d],
                    LocalInput::Source(i) => tuple[i],
                };
                y = y.checked_add(coeff.checked_mul(x)?)?;
            }
            // Hop-by-hop forwarding must agree with the global linear view.
            let direct = a
                .vector(edge_id)
                .expect("validity guarantees a vector")
                .dot(tuple)?;
            assert_eq!(
                y, direct,
                "local forwarding diverged from the global vector on {edge_id}"
            );
            signal.insert(edge_id, y);
        }
        let outputs: Vec<FieldElement> = (0..aug.n_terminals())
            .map(|j| signal[&aug.virtual_terminal_edge(j)])
            .collect();
        let sum_recovered = outputs.iter().all(|&y| y == expected_sum);
        rounds.push(SimulationRound {
            inputs: tuple.clone(),
            expected_sum,
            outputs,
            sum_recovered,
        });
    }
    Ok(SimulationReport { rounds })
}

/// Raw-edge cap for the exhaustive search.
pub const BRUTE_FORCE_EDGE_CAP: usize = 12;

const BRUTE_FORCE_SOURCE_CAP: usize = 16;
const BRUTE_FORCE_STATE_BUDGET: u64 = 50_000_000;

/// Decides by exhaustive enumeration over GF(2) whether *any* assignment of
/// local coefficients lets every terminal recover the XOR of all sources.
/// Vectors over GF(2) are bitmasks; each edge ranges over the distinct
/// span members of its tail's inputs (unit vector included at sources),
/// which covers every coefficient choice exactly once.
pub fn brute_force_assignment_search(inst: &Instance) -> Result<bool, VerifyError> {
    let g = inst.graph();
    if g.edge_count() > BRUTE_FORCE_EDGE_CAP {
        return Err(VerifyError::TooLargeForSearch {
            edges: g.edge_count(),
            cap: BRUTE_FORCE_EDGE_CAP,
        });
    }
    let n = inst.n_sources();
    if n > BRUTE_FORCE_SOURCE_CAP {
        return Err(VerifyError::TooManySourcesForSearch {
            cap: BRUTE_FORCE_SOURCE_CAP,
            got: n,
        });
    }
    let all_ones: u32 = if n == 32 { u32::MAX } else { (1 << n) - 1 };
    let order = g.edge_topo_order();
    let mut vectors: BTreeMap<EdgeId, u32> = BTreeMap::new();
    let mut budget = BRUTE_FORCE_STATE_BUDGET;

    fn span_members(inputs: &[u32]) -> Vec<u32> {
        let mut members = vec![0u32];
        for &b in inputs {
            if members.contains(&b) {
                continue;
            }
            let mut next = members.clone();
            for &m in &members {
                let x = m ^ b;
                if !next.contains(&x) {
                    next.push(x);
                }
            }
            members = next;
        }
        members.sort_unstable();
        members
    }

    fn search(
        g: &Dag,
        inst: &Instance,
        order: &[EdgeId],
        depth: usize,
        vectors: &mut BTreeMap<EdgeId, u32>,
        all_ones: u32,
        budget: &mut u64,
    ) -> Result<bool, VerifyError> {
        if depth == order.len() {
            let ok = inst.terminals().iter().all(|&t| {
                let inputs: Vec<u32> = g.in_edges(t).iter().map(|e| vectors[e]).collect();
                span_members(&inputs).contains(&all_ones)
            });
            return Ok(ok);
        }
        let edge = g.edge(order[depth]);
        let mut inputs: Vec<u32> = g.in_edges(edge.tail).iter().map(|e| vectors[e]).collect();
        if let Some(i) = inst.source_index(edge.tail) {
            inputs.push(1 << i);
        }
        for v in span_members(&inputs) {
            if *budget == 0 {
                return Err(VerifyError::SearchBudgetExceeded);
            }
            *budget -= 1;
            vectors.insert(edge.id, v);
            if search(g, inst, order, depth + 1, vectors, all_ones, budget)? {
                return Ok(true);
            }
        }
        vectors.remove(&edge.id);
        Ok(false)
    }

    search(g, inst, &order, 0, &mut vectors, all_ones, &mut budget)
}
