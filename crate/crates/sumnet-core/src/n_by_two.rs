//! Solver for any number of sources feeding one or two terminals.
//!
//! The construction peels sources off one at a time. For the first source a
//! plain path (or a prefix-sharing path pair) is enough. Each further source
//! `s` gets fresh paths to the terminals, rewired so both share their lead-in
//! up to the last point where that is possible without touching the subgraph
//! already built for the earlier sources. Where the new paths first hit that
//! subgraph decides how `s` is grafted on:
//!
//! * if the earlier subgraph can carry `s` onward from the first contact node
//!   of one of its paths, the contact node becomes a relay: everything
//!   upstream of it is cut out, replaced by a stand-in source, and the
//!   remaining instance is solved recursively before splicing the upstream
//!   stubs back in;
//! * otherwise the new paths merge into the old subgraph at two distinct
//!   contact nodes and simply adopt its continuations from there.
//!
//! The result is a subgraph with exactly one path from every source to every
//! terminal, so unit coefficients everywhere make each terminal read the sum
//! of all source symbols.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigUint;
use thiserror::Error;

use crate::field::{FieldError, FieldSpec};
use crate::flow::{max_flow_unit, FeasibilityReport};
use crate::graph::{ColoredSubgraph, Dag, EdgeId, GraphError, NodeId, Path};
use crate::instance::Instance;
use crate::rewire::{augment, rewire_shared_prefix, AugmentedInstance, RewireError};
use crate::verify::{
    check_local_validity, check_sum_recovery, propagate, CodingAssignment, LocalCode, LocalInput,
    TransferReport, ValidityReport, VerifyError,
};

#[derive(Debug, Error)]
pub enum NByTwoError {
    #[error("this solver handles one or two terminals, got {0}")]
    WrongTerminalCount(usize),
    #[error("instance is infeasible: {0}")]
    Infeasible(FeasibilityReport),
    #[error("no path from {from} to {to}")]
    MissingPath { from: String, to: String },
    #[error(transparent)]
    Rewire(RewireError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Verify(#[from] VerifyError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

impl From<RewireError> for NByTwoError {
    fn from(e: RewireError) -> Self {
        match e {
            RewireError::Infeasible(report) => NByTwoError::Infeasible(report),
            other => NByTwoError::Rewire(other),
        }
    }
}

/// How one recursion frame attached its newest source.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CaseTag {
    /// Single source: direct path(s), prefix-shared when there are two
    /// terminals.
    Base,
    /// First contact node of the path toward terminal 1 relays to both
    /// terminals through the earlier subgraph.
    Case1,
    /// Mirror of [`CaseTag::Case1`] via the path toward terminal 2.
    Case2,
    /// Neither contact node relays to the opposite terminal: keep both
    /// lead-ins and adopt the earlier subgraph's continuations.
    Case3,
    /// Single-terminal instance: the new path is clipped at first contact and
    /// continues along the earlier subgraph.
    Attach,
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CaseTag::Base => "base",
            CaseTag::Case1 => "case 1",
            CaseTag::Case2 => "case 2",
            CaseTag::Case3 => "case 3",
            CaseTag::Attach => "attach",
        };
        f.write_str(s)
    }
}

/// One step of the recursive construction, for reporting.
#[derive(Clone, Debug)]
pub struct TraceFrame {
    /// Nesting depth; stand-in recursions sit one level deeper.
    pub depth: usize,
    /// Label of the source this frame inserted (or started from).
    pub source: String,
    pub case: CaseTag,
    /// Last shared node of the new source's two path lead-ins.
    pub fork: Option<String>,
    /// First contact node of the path toward terminal 1.
    pub u1: Option<String>,
    /// First contact node of the path toward terminal 2.
    pub u2: Option<String>,
}

impl fmt::Display for TraceFrame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:indent$}{} via {}",
            "",
            self.source,
            self.case,
            indent = 2 * self.depth
        )?;
        if let Some(v) = &self.fork {
            write!(f, ", fork {v}")?;
        }
        if let Some(v) = &self.u1 {
            write!(f, ", u1 {v}")?;
        }
        if let Some(v) = &self.u2 {
            write!(f, ", u2 {v}")?;
        }
        Ok(())
    }
}

/// A subgraph carrying exactly one path from every source to every terminal,
/// together with that path table.
#[derive(Clone, Debug)]
pub struct OnePathSubgraph {
    graph: Dag,
    sources: Vec<NodeId>,
    terminals: Vec<NodeId>,
    paths: Vec<Vec<Path>>,
}

impl OnePathSubgraph {
    /// Unions the path table into a graph and checks the construction
    /// invariants: per (source, terminal) pair the table path runs between the
    /// right endpoints and is the *only* path in the union.
    fn build(
        parent: &Dag,
        sources: Vec<NodeId>,
        terminals: Vec<NodeId>,
        paths: Vec<Vec<Path>>,
    ) -> Result<OnePathSubgraph, NByTwoError> {
        let all: Vec<Path> = paths.iter().flatten().cloned().collect();
        let graph = parent.union_subgraph(&all)?;
        let one = BigUint::from(1u32);
        for (i, per_terminal) in paths.iter().enumerate() {
            assert_eq!(per_terminal.len(), terminals.len());
            for (j, p) in per_terminal.iter().enumerate() {
                p.validate(&graph)?;
                assert_eq!(p.start(), sources[i], "path starts at its source");
                assert_eq!(p.end(&graph), terminals[j], "path ends at its terminal");
                let count = graph.count_paths(sources[i], terminals[j]);
                assert_eq!(
                    count,
                    one,
                    "exactly one path from {} to {}, found {count}",
                    parent.label(sources[i]),
                    parent.label(terminals[j]),
                );
            }
        }
        let used: BTreeSet<EdgeId> = all.iter().flat_map(|p| p.edges().iter().copied()).collect();
        for e in graph.edge_ids() {
            assert!(used.contains(&e), "every edge lies on a table path");
        }
        Ok(OnePathSubgraph {
            graph,
            sources,
            terminals,
            paths,
        })
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

    /// The unique path from source `i` to terminal `j`.
    pub fn path(&self, i: usize, j: usize) -> &Path {
        &self.paths[i][j]
    }
}

/// Builds a subgraph of `g` with exactly one path from each source to each of
/// one or two terminals, returning it with the construction trace.
///
/// Every source must reach every terminal within `g`.
pub fn one_path_subgraph(
    g: &Dag,
    sources: &[NodeId],
    terminals: &[NodeId],
) -> Result<(OnePathSubgraph, Vec<TraceFrame>), NByTwoError> {
    assert!(!sources.is_empty(), "at least one source");
    assert!(
        (1..=2).contains(&terminals.len()),
        "one or two terminals, got {}",
        terminals.len()
    );
    let mut trace = Vec::new();
    let mut aux = 0u32;
    let sub = construct(g, sources, terminals, 0, &mut aux, &mut trace)?;
    Ok((sub, trace))
}

fn path_or_err(g: &Dag, from: NodeId, to: NodeId) -> Result<Path, NByTwoError> {
    g.find_path(from, to, &BTreeSet::new())
        .ok_or_else(|| NByTwoError::MissingPath {
            from: g.label(from).to_string(),
            to: g.label(to).to_string(),
        })
}

/// The unique path between two nodes of `g`, asserting uniqueness.
fn unique_path(g: &Dag, from: NodeId, to: NodeId) -> Path {
    let count = g.count_paths(from, to);
    assert_eq!(
        count,
        BigUint::from(1u32),
        "exactly one continuation from {} to {}, found {count}",
        g.label(from),
        g.label(to),
    );
    g.find_path(from, to, &BTreeSet::new())
        .expect("counted one path")
}

fn construct(
    g: &Dag,
    sources: &[NodeId],
    terminals: &[NodeId],
    depth: usize,
    aux: &mut u32,
    trace: &mut Vec<TraceFrame>,
) -> Result<OnePathSubgraph, NByTwoError> {
    let n = sources.len();
    if n == 1 {
        return base_case(g, sources[0], terminals, depth, trace);
    }
    let blue = construct(g, &sources[..n - 1], terminals, depth, aux, trace)?;
    let s_new = sources[n - 1];
    if let [t] = *terminals {
        return attach_single_terminal(g, sources, t, blue, s_new, depth, trace);
    }
    let (t1, t2) = (terminals[0], terminals[1]);

    let raw1 = path_or_err(g, s_new, t1)?;
    let raw2 = path_or_err(g, s_new, t2)?;
    // Share the lead-in of the two new paths as far as possible without
    // entering the earlier subgraph; the new source itself is always outside
    // it, so a fork node exists.
    let blue_nodes: BTreeSet<NodeId> = blue.graph().node_ids().collect();
    let outside: BTreeSet<NodeId> = g
        .node_ids()
        .filter(|v| !blue_nodes.contains(v))
        .collect();
    let (red1, red2, fork) = rewire_shared_prefix(g, &raw1, &raw2, Some(&outside))?;

    let u1 = first_contact(g, &red1, &blue_nodes);
    let u2 = first_contact(g, &red2, &blue_nodes);
    let relay1 = blue.graph().find_path(u1, t2, &BTreeSet::new()).is_some();
    let relay2 = blue.graph().find_path(u2, t1, &BTreeSet::new()).is_some();
    let case = if relay1 {
        CaseTag::Case1
    } else if relay2 {
        CaseTag::Case2
    } else {
        CaseTag::Case3
    };
    trace.push(TraceFrame {
        depth,
        source: g.label(s_new).to_string(),
        case,
        fork: Some(g.label(fork).to_string()),
        u1: Some(g.label(u1).to_string()),
        u2: Some(g.label(u2).to_string()),
    });

    match case {
        CaseTag::Case1 => insert_via_relay(g, sources, terminals, &blue, &red1, &red2, u1, depth, aux, trace),
        CaseTag::Case2 => insert_via_relay(g, sources, terminals, &blue, &red2, &red1, u2, depth, aux, trace),
        CaseTag::Case3 => {
            // Keep both lead-ins; from each contact node the earlier subgraph
            // must already run to the matching terminal, and only there.
            let lead1 = red1.prefix_to(g, u1)?;
            let lead2 = red2.prefix_to(g, u2)?;
            let p1 = lead1.concat(g, &unique_path(blue.graph(), u1, t1))?;
            let p2 = lead2.concat(g, &unique_path(blue.graph(), u2, t2))?;
            let mut paths = blue.paths;
            paths.push(vec![p1, p2]);
            OnePathSubgraph::build(g, sources.to_vec(), terminals.to_vec(), paths)
        }
        _ => unreachable!("two-terminal insertion picks a numbered case"),
    }
}

fn base_case(
    g: &Dag,
    s: NodeId,
    terminals: &[NodeId],
    depth: usize,
    trace: &mut Vec<TraceFrame>,
) -> Result<OnePathSubgraph, NByTwoError> {
    let mut frame = TraceFrame {
        depth,
        source: g.label(s).to_string(),
        case: CaseTag::Base,
        fork: None,
        u1: None,
        u2: None,
    };
    let paths = match *terminals {
        [t] => vec![path_or_err(g, s, t)?],
        [t1, t2] => {
            let p1 = path_or_err(g, s, t1)?;
            let p2 = path_or_err(g, s, t2)?;
            let (p1, p2, fork) = rewire_shared_prefix(g, &p1, &p2, None)?;
            frame.fork = Some(g.label(fork).to_string());
            vec![p1, p2]
        }
        _ => unreachable!("terminal count validated at entry"),
    };
    trace.push(frame);
    OnePathSubgraph::build(g, vec![s], terminals.to_vec(), vec![paths])
}

/// Single-terminal insertion: clip the new path at its first contact with the
/// earlier subgraph and continue along that subgraph's unique route.
fn attach_single_terminal(
    g: &Dag,
    sources: &[NodeId],
    t: NodeId,
    blue: OnePathSubgraph,
    s_new: NodeId,
    depth: usize,
    trace: &mut Vec<TraceFrame>,
) -> Result<OnePathSubgraph, NByTwoError> {
    let red = path_or_err(g, s_new, t)?;
    let blue_nodes: BTreeSet<NodeId> = blue.graph().node_ids().collect();
    let u1 = first_contact(g, &red, &blue_nodes);
    trace.push(TraceFrame {
        depth,
        source: g.label(s_new).to_string(),
        case: CaseTag::Attach,
        fork: None,
        u1: Some(g.label(u1).to_string()),
        u2: None,
    });
    let p = red
        .prefix_to(g, u1)?
        .concat(g, &unique_path(blue.graph(), u1, t))?;
    let mut paths = blue.paths;
    paths.push(vec![p]);
    OnePathSubgraph::build(g, sources.to_vec(), vec![t], paths)
}

/// First node of `p` that belongs to the earlier subgraph. The path ends at a
/// terminal of that subgraph, so a contact always exists.
fn first_contact(g: &Dag, p: &Path, blue_nodes: &BTreeSet<NodeId>) -> NodeId {
    p.nodes(g)
        .into_iter()
        .find(|v| blue_nodes.contains(v))
        .expect("path ends inside the earlier subgraph")
}

/// Sources with a colored route to the relay node `u`, with the unique such
/// path for each. Panics if any member has more than one colored path to `u`.
pub fn extract_gu1(
    g_br: &Dag,
    sources: &[NodeId],
    u: NodeId,
) -> Result<(Vec<usize>, Vec<Path>), NByTwoError> {
    let one = BigUint::from(1u32);
    let mut members = Vec::new();
    let mut paths = Vec::new();
    for (i, &s) in sources.iter().enumerate() {
        let count = g_br.count_paths(s, u);
        if count == BigUint::from(0u32) {
            continue;
        }
        assert_eq!(
            count,
            one,
            "source {} has one colored route to relay {}, found {count}",
            g_br.label(s),
            g_br.label(u),
        );
        members.push(i);
        paths.push(g_br.find_path(s, u, &BTreeSet::new()).expect("counted one path"));
    }
    Ok((members, paths))
}

/// Relay insertion: every source with a colored route to the contact node `u`
/// funnels through it, so cut their lead-ins off, solve the rest against a
/// stand-in source feeding `u`, and splice the lead-ins back onto the
/// stand-in's continuations.
#[allow(clippy::too_many_arguments)]
fn insert_via_relay(
    g: &Dag,
    sources: &[NodeId],
    terminals: &[NodeId],
    blue: &OnePathSubgraph,
    keep: &Path,
    drop: &Path,
    u: NodeId,
    depth: usize,
    aux: &mut u32,
    trace: &mut Vec<TraceFrame>,
) -> Result<OnePathSubgraph, NByTwoError> {
    let n = sources.len();
    let mut colored = ColoredSubgraph::new(g.clone());
    for e in blue.graph().edge_ids() {
        colored.color_blue(e);
    }
    for &e in keep.edges().iter().chain(drop.edges()) {
        colored.color_red(e);
    }
    // Only the kept path stays red: the other lead-in is dropped entirely for
    // this insertion.
    let keep_set: BTreeSet<EdgeId> = keep.edges().iter().copied().collect();
    for &e in drop.edges() {
        if !keep_set.contains(&e) {
            colored.uncolor_red(e);
        }
    }
    let g_br = colored.colored_subgraph();

    let (members, member_paths) = extract_gu1(&g_br, sources, u)?;
    assert!(
        members.contains(&(n - 1)),
        "the inserted source funnels through the relay"
    );
    assert!(
        members.len() >= 2,
        "at least one earlier source funnels through the relay"
    );

    // Cut the funnel out; the relay node stays even if momentarily bare.
    let funnel: BTreeSet<EdgeId> = member_paths
        .iter()
        .flat_map(|p| p.edges().iter().copied())
        .collect();
    let mut keep_nodes = BTreeSet::new();
    keep_nodes.insert(u);
    let reduced = g_br.without_edges(&funnel).prune_isolated_except(&keep_nodes);

    let remaining: Vec<usize> = (0..n).filter(|i| !members.contains(i)).collect();
    for &r in &remaining {
        for &t in terminals {
            assert_eq!(
                max_flow_unit(&reduced, sources[r], t),
                1,
                "cutting the funnel keeps {} connected to {}",
                g.label(sources[r]),
                g.label(t),
            );
        }
    }
    for &t in terminals {
        assert!(
            reduced.find_path(u, t, &BTreeSet::new()).is_some(),
            "relay {} keeps a route to {}",
            g.label(u),
            g.label(t),
        );
    }

    let mut extended = reduced;
    let stand_in = extended.add_node(format!("@a{aux}"))?;
    *aux += 1;
    extended.add_edge(stand_in, u)?;
    let next_sources: Vec<NodeId> = remaining
        .iter()
        .map(|&r| sources[r])
        .chain([stand_in])
        .collect();
    let sub = construct(&extended, &next_sources, terminals, depth + 1, aux, trace)?;

    // Splice: funnel members ride their own lead-in to the relay, then the
    // stand-in's continuation; untouched sources keep their recursive paths.
    let a_index = next_sources.len() - 1;
    let mut paths: Vec<Vec<Path>> = Vec::with_capacity(n);
    for i in 0..n {
        if let Some(pos) = remaining.iter().position(|&r| r == i) {
            paths.push((0..terminals.len()).map(|j| sub.path(pos, j).clone()).collect());
        } else {
            let m_pos = members.iter().position(|&m| m == i).expect("member");
            let lead_in = &member_paths[m_pos];
            let mut per = Vec::with_capacity(terminals.len());
            for j in 0..terminals.len() {
                let cont = sub.path(a_index, j).suffix_from(sub.graph(), u)?;
                per.push(lead_in.concat(g, &cont)?);
            }
            paths.push(per);
        }
    }
    OnePathSubgraph::build(g, sources.to_vec(), terminals.to_vec(), paths)
}

/// Puts coefficient one on every edge of the subgraph. Since each terminal
/// sees exactly one path from each source, its virtual edge carries the
/// all-ones vector, i.e. the plain sum of the source symbols.
pub fn assign_unit_gains(
    ops: &OnePathSubgraph,
    field: FieldSpec,
) -> Result<CodingAssignment, NByTwoError> {
    let g = ops.graph();
    let n = ops.sources().len();
    let mut locals = LocalCode::new();
    for e in g.edge_ids() {
        let tail = g.edge(e).tail;
        let inputs = match ops.sources().iter().position(|&s| s == tail) {
            Some(i) => vec![(LocalInput::Source(i), field.one())],
            None => g
                .in_edges(tail)
                .iter()
                .map(|&d| (LocalInput::Edge(d), field.one()))
                .collect(),
        };
        locals.set(e, inputs);
    }
    Ok(propagate(g, &locals, n, field)?)
}

/// A solved any-sources instance with at most two terminals.
#[derive(Clone, Debug)]
pub struct NByTwoSolution {
    pub aug: AugmentedInstance,
    pub subgraph: OnePathSubgraph,
    pub trace: Vec<TraceFrame>,
    /// Total assignment over the augmented graph; edges off the subgraph
    /// carry the zero vector.
    pub assignment: CodingAssignment,
    pub field: FieldSpec,
    pub validity: ValidityReport,
    pub recovery: TransferReport,
}

/// Solves an instance with one or two terminals and any number of sources.
/// Deterministic: no randomness is involved.
pub fn solve_n_by_two(inst: &Instance, field: FieldSpec) -> Result<NByTwoSolution, NByTwoError> {
    if !(1..=2).contains(&inst.n_terminals()) {
        return Err(NByTwoError::WrongTerminalCount(inst.n_terminals()));
    }
    let aug = augment(inst)?;
    let (subgraph, trace) =
        one_path_subgraph(aug.graph(), aug.virtual_sources(), aug.virtual_terminals())?;
    let partial = assign_unit_gains(&subgraph, field)?;
    let n = inst.n_sources();
    let mut assignment = CodingAssignment::new(field, n);
    for e in aug.graph().edge_ids() {
        match partial.vector(e) {
            Some(v) => assignment.set(e, v.clone())?,
            None => assignment.set(e, crate::field::CodingVector::zero(field, n))?,
        }
    }
    let validity = check_local_validity(aug.graph(), &assignment, aug.virtual_sources())?;
    assert!(validity.valid(), "unit-gain assignment must be valid: {validity}");
    let recovery = check_sum_recovery(&aug, &assignment)?;
    assert!(
        recovery.all_recovered(),
        "every terminal must read the sum: {recovery}"
    );
    Ok(NByTwoSolution {
        aug,
        subgraph,
        trace,
        assignment,
        field,
        validity,
        recovery,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::verify::simulate_transmission;

    fn label_of(g: &Dag, v: NodeId) -> String {
        g.label(v).to_string()
    }

    fn solve(inst: &Instance) -> NByTwoSolution {
        solve_n_by_two(inst, FieldSpec::with_default_modulus(1).unwrap()).unwrap()
    }

    #[test]
    fn base_case_shares_the_longest_prefix() {
        let sol = solve(&fixtures::star1());
        assert_eq!(sol.trace.len(), 1);
        assert_eq!(sol.trace[0].case, CaseTag::Base);
        assert_eq!(sol.trace[0].fork.as_deref(), Some("m"));
        // The whole augmented star is needed.
        assert_eq!(sol.subgraph.graph().edge_count(), sol.aug.graph().edge_count());
    }

    #[test]
    fn single_path_instance_solves() {
        let sol = solve(&fixtures::line1());
        assert_eq!(sol.trace.len(), 1);
        assert_eq!(sol.trace[0].case, CaseTag::Base);
        assert!(sol.recovery.all_recovered());
    }

    #[test]
    fn two_sources_one_terminal_attaches_at_first_contact() {
        let sol = solve(&fixtures::dd());
        let cases: Vec<CaseTag> = sol.trace.iter().map(|f| f.case).collect();
        assert_eq!(cases, vec![CaseTag::Base, CaseTag::Attach]);
        assert!(sol.recovery.all_recovered());
        // Exactly one path per source in the final subgraph.
        let g = sol.subgraph.graph();
        for i in 0..2 {
            assert_eq!(
                g.count_paths(sol.aug.virtual_source(i), sol.aug.virtual_terminal(0)),
                BigUint::from(1u32)
            );
        }
    }

    #[test]
    fn butterfly_goes_through_the_relay_case() {
        let sol = solve(&fixtures::butterfly());
        let cases: Vec<CaseTag> = sol.trace.iter().map(|f| f.case).collect();
        assert_eq!(cases, vec![CaseTag::Base, CaseTag::Case1, CaseTag::Base]);
        assert_eq!(sol.trace[1].u1.as_deref(), Some("m1"));
        assert_eq!(sol.trace[2].depth, 1);
        assert!(sol.trace[2].source.starts_with("@a"));

        // The crossing edges survive; each source's direct edge to its own
        // terminal is pruned away, leaving one path per pair.
        let g = sol.subgraph.graph();
        assert_eq!(g.edge_count(), 9);
        for i in 0..2 {
            for j in 0..2 {
                let p = sol.subgraph.path(i, j);
                assert_eq!(p.start(), sol.aug.virtual_source(i));
                assert_eq!(p.end(g), sol.aug.virtual_terminal(j));
            }
        }
        assert!(sol.recovery.all_recovered());
    }

    #[test]
    fn star_collapses_onto_the_hub() {
        let sol = solve(&fixtures::star3x2());
        // Every insertion relays through the hub m.
        let top: Vec<&TraceFrame> = sol.trace.iter().filter(|f| f.depth == 0).collect();
        assert_eq!(top.len(), 3);
        assert_eq!(top[1].case, CaseTag::Case1);
        assert_eq!(top[1].u1.as_deref(), Some("m"));
        assert_eq!(top[2].case, CaseTag::Case1);

        // The whole augmented star is needed: no edge can be spared.
        assert_eq!(sol.subgraph.graph().edge_count(), sol.aug.graph().edge_count());

        // The hub's outgoing edges carry the full sum vector.
        let g = sol.aug.graph();
        let hub = g.node_by_label("m").unwrap();
        for &e in g.out_edges(hub) {
            let v = sol.assignment.vector(e).unwrap();
            assert!(v.is_all_ones());
        }
        assert!(sol.recovery.all_recovered());
    }

    #[test]
    fn fork_hits_the_two_contact_case() {
        let sol = solve(&fixtures::fork2());
        let frame = sol.trace.iter().find(|f| f.case == CaseTag::Case3).unwrap();
        assert_eq!(frame.u1.as_deref(), Some("a"));
        assert_eq!(frame.u2.as_deref(), Some("b"));
        assert_eq!(frame.fork.as_deref(), Some("s2"));
        assert!(sol.recovery.all_recovered());
    }

    #[test]
    fn fork_lead_ins_cannot_be_reentered() {
        // The two-contact construction keeps the new lead-ins private: no
        // edge of the earlier subgraph can reach back into them.
        let inst = fixtures::fork2();
        let sol = solve(&inst);
        let aug = &sol.aug;
        let (first, _) = one_path_subgraph(
            aug.graph(),
            &aug.virtual_sources()[..1],
            aug.virtual_terminals(),
        )
        .unwrap();
        let old_edges: BTreeSet<EdgeId> = first.graph().edge_ids().collect();
        let result = sol.subgraph.graph();
        for e_old in result.edge_ids().filter(|e| old_edges.contains(e)) {
            for e_new in result.edge_ids().filter(|e| !old_edges.contains(e)) {
                assert!(
                    !result.reaches(
                        crate::graph::GraphRef::Edge(e_old),
                        crate::graph::GraphRef::Edge(e_new)
                    ),
                    "lead-in edge reachable from the earlier subgraph"
                );
            }
        }
    }

    #[test]
    fn removing_any_edge_breaks_some_pair() {
        for inst in [fixtures::butterfly(), fixtures::fork2(), fixtures::star3x2()] {
            let sol = solve(&inst);
            let g = sol.subgraph.graph();
            for e in g.edge_ids() {
                let mut drop = BTreeSet::new();
                drop.insert(e);
                let pruned = g.without_edges(&drop);
                let broken = (0..sol.aug.n_sources()).any(|i| {
                    (0..sol.aug.n_terminals()).any(|j| {
                        pruned
                            .find_path(
                                sol.aug.virtual_source(i),
                                sol.aug.virtual_terminal(j),
                                &BTreeSet::new(),
                            )
                            .is_none()
                    })
                });
                assert!(broken, "edge {e:?} is redundant");
            }
        }
    }

    #[test]
    fn unit_gains_decode_under_simulation() {
        for inst in [
            fixtures::butterfly(),
            fixtures::star3x2(),
            fixtures::fork2(),
            fixtures::dd(),
        ] {
            let sol = solve(&inst);
            let tuples = crate::verify::random_symbol_tuples(
                sol.field,
                inst.n_sources(),
                32,
                0xd1ce,
            );
            let report = simulate_transmission(&sol.aug, &sol.assignment, &tuples).unwrap();
            assert!(report.all_sums_recovered());
        }
    }

    #[test]
    fn infeasible_instances_are_refused() {
        let err = solve_n_by_two(&fixtures::cut(), FieldSpec::with_default_modulus(1).unwrap())
            .unwrap_err();
        match err {
            NByTwoError::Infeasible(report) => {
                let text = report.to_string();
                assert!(text.contains("s1") && text.contains("t2"), "{text}");
            }
            other => panic!("expected infeasibility, got {other}"),
        }
    }

    #[test]
    fn three_terminals_are_out_of_scope() {
        let err = solve_n_by_two(&fixtures::fan3(), FieldSpec::with_default_modulus(2).unwrap())
            .unwrap_err();
        assert!(matches!(err, NByTwoError::WrongTerminalCount(3)));
    }

    #[test]
    fn construction_is_deterministic() {
        let a = solve(&fixtures::fork2());
        let b = solve(&fixtures::fork2());
        let va: Vec<_> = a.assignment.iter().map(|(e, v)| (e, v.clone())).collect();
        let vb: Vec<_> = b.assignment.iter().map(|(e, v)| (e, v.clone())).collect();
        assert_eq!(va, vb);
        let ta: Vec<String> = a.trace.iter().map(|f| f.to_string()).collect();
        let tb: Vec<String> = b.trace.iter().map(|f| f.to_string()).collect();
        assert_eq!(ta, tb);
    }

    #[test]
    fn stand_in_labels_stay_out_of_results() {
        let sol = solve(&fixtures::star3x2());
        let g = sol.subgraph.graph();
        for v in g.node_ids() {
            assert!(!label_of(g, v).starts_with("@a"));
        }
    }
}
