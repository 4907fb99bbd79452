//! Unified solver entry point: picks the construction matching the instance
//! shape, applies field defaults, and bundles the result into one report.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::field::{FieldError, FieldSpec};
use crate::flow::FeasibilityReport;
use crate::graph::EdgeId;
use crate::instance::Instance;
use crate::n_by_two::{solve_n_by_two, NByTwoError, NByTwoSolution};
use crate::rewire::AugmentedInstance;
use crate::two_by_n::{solve_two_by_n, TwoByNError, TwoByNSolution};
use crate::verify::{CodingAssignment, TransferReport, ValidityReport};

/// The two constructions on offer.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolverKind {
    /// Two sources, any number of terminals.
    TwoByN,
    /// Any number of sources, one or two terminals.
    NByTwo,
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolverKind::TwoByN => "2xn",
            SolverKind::NByTwo => "nx2",
        })
    }
}

impl FromStr for SolverKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "2xn" => Ok(SolverKind::TwoByN),
            "nx2" => Ok(SolverKind::NByTwo),
            other => Err(format!("unknown solver '{other}' (expected 2xn or nx2)")),
        }
    }
}

#[derive(Debug, Error)]
pub enum SolveError {
    #[error(
        "unsupported shape: {sources} sources and {terminals} terminals \
         (supported: 2 sources with any number of terminals, or any number \
         of sources with at most 2 terminals)"
    )]
    UnsupportedShape { sources: usize, terminals: usize },
    #[error("solver {kind} cannot handle {sources} sources and {terminals} terminals")]
    SolverMismatch {
        kind: SolverKind,
        sources: usize,
        terminals: usize,
    },
    #[error("instance is infeasible: {0}")]
    Infeasible(FeasibilityReport),
    #[error(transparent)]
    TwoByN(TwoByNError),
    #[error(transparent)]
    NByTwo(NByTwoError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

impl From<TwoByNError> for SolveError {
    fn from(e: TwoByNError) -> Self {
        match e {
            TwoByNError::Infeasible(report) => SolveError::Infeasible(report),
            other => SolveError::TwoByN(other),
        }
    }
}

impl From<NByTwoError> for SolveError {
    fn from(e: NByTwoError) -> Self {
        match e {
            NByTwoError::Infeasible(report) => SolveError::Infeasible(report),
            other => SolveError::NByTwo(other),
        }
    }
}

/// Picks a construction for the given shape, or `None` if neither fits.
/// The 2x2 overlap goes to the deterministic path-table construction.
pub fn choose_solver(n_sources: usize, n_terminals: usize) -> Option<SolverKind> {
    if n_sources == 2 && n_terminals == 2 {
        Some(SolverKind::NByTwo)
    } else if n_sources == 2 {
        Some(SolverKind::TwoByN)
    } else if (1..=2).contains(&n_terminals) {
        Some(SolverKind::NByTwo)
    } else {
        None
    }
}

/// Field used when the caller does not pick one. The random multicast step
/// of the two-source construction wants enough room to separate all merge
/// groups plus the two source vectors; the path-table construction works
/// over plain GF(2).
pub fn default_field(kind: SolverKind, n_terminals: usize) -> Result<FieldSpec, FieldError> {
    match kind {
        SolverKind::TwoByN => FieldSpec::smallest_with_order(n_terminals as u32 + 2),
        SolverKind::NByTwo => FieldSpec::with_default_modulus(1),
    }
}

/// Solver output in either shape.
#[derive(Clone, Debug)]
pub enum SolveOutcome {
    TwoByN(TwoByNSolution),
    NByTwo(NByTwoSolution),
}

/// A solved instance: which construction ran, over which field, and what it
/// produced.
#[derive(Clone, Debug)]
pub struct SolveReport {
    pub kind: SolverKind,
    pub field: FieldSpec,
    /// Seed handed to the solver; only the two-source construction draws
    /// randomness from it.
    pub seed: u64,
    pub outcome: SolveOutcome,
}

impl SolveReport {
    pub fn aug(&self) -> &AugmentedInstance {
        match &self.outcome {
            SolveOutcome::TwoByN(s) => &s.aug,
            SolveOutcome::NByTwo(s) => &s.aug,
        }
    }

    pub fn assignment(&self) -> &CodingAssignment {
        match &self.outcome {
            SolveOutcome::TwoByN(s) => &s.assignment,
            SolveOutcome::NByTwo(s) => &s.assignment,
        }
    }

    pub fn validity(&self) -> &ValidityReport {
        match &self.outcome {
            SolveOutcome::TwoByN(s) => &s.validity,
            SolveOutcome::NByTwo(s) => &s.validity,
        }
    }

    pub fn recovery(&self) -> &TransferReport {
        match &self.outcome {
            SolveOutcome::TwoByN(s) => &s.recovery,
            SolveOutcome::NByTwo(s) => &s.recovery,
        }
    }

    /// Edges of the augmented graph actually used by the construction.
    pub fn used_edges(&self) -> Vec<EdgeId> {
        match &self.outcome {
            SolveOutcome::TwoByN(s) => s.reduced.edge_ids().collect(),
            SolveOutcome::NByTwo(s) => s.subgraph.graph().edge_ids().collect(),
        }
    }

    /// Deterministic human-readable summary; byte-stable for a fixed seed.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let aug = self.aug();
        let inst = aug.original();
        let g = aug.graph();
        out.push_str(&format!(
            "instance: {} sources, {} terminals, {} nodes, {} edges\n",
            inst.n_sources(),
            inst.n_terminals(),
            inst.graph().node_count(),
            inst.graph().edge_count(),
        ));
        out.push_str(&format!("solver: {} (seed {})\n", self.kind, self.seed));
        out.push_str(&format!("field: {}\n", self.field));
        match &self.outcome {
            SolveOutcome::TwoByN(s) => {
                out.push_str(&format!(
                    "multicast: seed {} after {} attempt(s)\n",
                    s.multicast_seed, s.multicast_attempts
                ));
                out.push_str("merge points:\n");
                for (j, pair) in s.table.pairs().iter().enumerate() {
                    out.push_str(&format!(
                        "  terminal {}: merge {}\n",
                        inst.graph().label(inst.terminals()[j]),
                        g.label(pair.merge),
                    ));
                }
                out.push_str(&format!("pinned edges: {}\n", s.pinned.len()));
            }
            SolveOutcome::NByTwo(s) => {
                out.push_str("construction:\n");
                for frame in &s.trace {
                    out.push_str(&format!("  {frame}\n"));
                }
            }
        }
        out.push_str("assignment:\n");
        for (e, v) in self.assignment().iter() {
            let edge = g.edge(e);
            out.push_str(&format!(
                "  {}: {} -> {}  {}\n",
                e.0,
                g.label(edge.tail),
                g.label(edge.head),
                v,
            ));
        }
        let validity = self.validity();
        out.push_str(&format!(
            "local validity: {}\n",
            if validity.valid() { "ok" } else { "FAILED" }
        ));
        let recovery = self.recovery();
        for t in recovery.per_terminal() {
            out.push_str(&format!(
                "terminal {}: {}\n",
                t.label,
                if t.sum_recovered {
                    "recovers the sum"
                } else {
                    "DOES NOT recover the sum"
                }
            ));
        }
        out
    }
}

/// Solves `inst` end to end. `field` and `kind` fall back to shape-derived
/// defaults; `seed` feeds the randomized multicast step where applicable.
pub fn solve(
    inst: &Instance,
    field: Option<FieldSpec>,
    seed: u64,
    kind: Option<SolverKind>,
) -> Result<SolveReport, SolveError> {
    let (n_sources, n_terminals) = (inst.n_sources(), inst.n_terminals());
    let kind = match kind {
        Some(k) => {
            let fits = match k {
                SolverKind::TwoByN => n_sources == 2,
                SolverKind::NByTwo => (1..=2).contains(&n_terminals),
            };
            if !fits {
                return Err(SolveError::SolverMismatch {
                    kind: k,
                    sources: n_sources,
                    terminals: n_terminals,
                });
            }
            k
        }
        None => choose_solver(n_sources, n_terminals).ok_or(SolveError::UnsupportedShape {
            sources: n_sources,
            terminals: n_terminals,
        })?,
    };
    let field = match field {
        Some(f) => f,
        None => default_field(kind, n_terminals)?,
    };
    let outcome = match kind {
        SolverKind::TwoByN => SolveOutcome::TwoByN(solve_two_by_n(inst, field, seed)?),
        SolverKind::NByTwo => SolveOutcome::NByTwo(solve_n_by_two(inst, field)?),
    };
    Ok(SolveReport {
        kind,
        field,
        seed,
        outcome,
    })
}
