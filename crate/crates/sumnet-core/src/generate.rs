//! Seeded random instance generation.
//!
//! Instances come out of a layered construction: sources on the first layer,
//! terminals on the last, extra nodes spread over middle layers, and all
//! edges pointing from lower to higher layers (acyclic by construction). One
//! path is planted per source–terminal pair, so the result is feasible by
//! construction; random forward edges and occasional parallel duplicates are
//! sprinkled on top.
//!
//! With `infeasible` set, one pair is sampled and left unplanted, and every
//! other edge insertion is vetoed whenever it would connect that pair — so
//! feasibility fails on exactly the recorded pair.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::flow::check_feasibility;
use crate::graph::{Dag, GraphRef, NodeId};
use crate::instance::Instance;
use crate::solve::SolverKind;

/// Chance of duplicating an edge into a parallel pair, and of accepting any
/// single random extra edge.
const PARALLEL_PROB: f64 = 0.15;
const EXTRA_EDGE_PROB: f64 = 0.15;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GenerateError {
    #[error("shape {sources}x{terminals} does not fit generator kind {kind}")]
    ShapeMismatch {
        kind: SolverKind,
        sources: usize,
        terminals: usize,
    },
    #[error("need at least one source and one terminal")]
    EmptyRole,
}

/// What to generate.
#[derive(Clone, Copy, Debug)]
pub struct GenSpec {
    pub kind: SolverKind,
    pub sources: usize,
    pub terminals: usize,
    /// Middle nodes between the source and terminal layers.
    pub extra_nodes: usize,
    pub seed: u64,
    /// Leave one sampled pair disconnected and record it on the instance.
    pub infeasible: bool,
}

struct Builder {
    g: Dag,
    /// Topological rank of every node: sources 0, middles by layer,
    /// terminals last. Edges only ever point to strictly higher ranks.
    rank: Vec<(NodeId, usize)>,
    /// The pair that must stay disconnected, if generating infeasible input.
    cut: Option<(NodeId, NodeId)>,
}

impl Builder {
    fn rank_of(&self, v: NodeId) -> usize {
        self.rank.iter().find(|(u, _)| *u == v).expect("ranked").1
    }

    /// True if inserting tail -> head would create a route from the cut
    /// pair's source to its terminal.
    fn crosses_cut(&self, tail: NodeId, head: NodeId) -> bool {
        match self.cut {
            Some((s, t)) => {
                (tail == s || self.g.reaches(GraphRef::Node(s), GraphRef::Node(tail)))
                    && (head == t || self.g.reaches(GraphRef::Node(head), GraphRef::Node(t)))
            }
            None => false,
        }
    }

    /// Adds tail -> head unless it would bridge the cut pair. Reuses an
    /// existing edge unless the dice ask for a parallel copy.
    fn connect(&mut self, tail: NodeId, head: NodeId, rng: &mut ChaCha8Rng) -> bool {
        if self.crosses_cut(tail, head) {
            return false;
        }
        let exists = self
            .g
            .out_edges(tail)
            .iter()
            .any(|&e| self.g.edge(e).head == head);
        if exists && !rng.gen_bool(PARALLEL_PROB) {
            return true;
        }
        self.g.add_edge(tail, head).expect("forward edge in a layered DAG");
        true
    }
}

/// Generates one instance. Deterministic for a fixed spec.
pub fn generate_instance(spec: &GenSpec) -> Result<Instance, GenerateError> {
    if spec.sources == 0 || spec.terminals == 0 {
        return Err(GenerateError::EmptyRole);
    }
    let fits = match spec.kind {
        SolverKind::TwoByN => spec.sources == 2,
        SolverKind::NByTwo => (1..=2).contains(&spec.terminals),
    };
    if !fits {
        return Err(GenerateError::ShapeMismatch {
            kind: spec.kind,
            sources: spec.sources,
            terminals: spec.terminals,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut g = Dag::new();
    let sources: Vec<NodeId> = (1..=spec.sources)
        .map(|i| g.add_node(format!("s{i}")).expect("fresh label"))
        .collect();
    let layers = if spec.extra_nodes == 0 {
        0
    } else {
        rng.gen_range(1..=spec.extra_nodes.min(3))
    };
    let mut middles: Vec<(NodeId, usize)> = Vec::new();
    for i in 1..=spec.extra_nodes {
        let v = g.add_node(format!("m{i}")).expect("fresh label");
        middles.push((v, rng.gen_range(1..=layers)));
    }
    let terminals: Vec<NodeId> = (1..=spec.terminals)
        .map(|j| g.add_node(format!("t{j}")).expect("fresh label"))
        .collect();

    let mut rank: Vec<(NodeId, usize)> = Vec::new();
    for &s in &sources {
        rank.push((s, 0));
    }
    for &(v, layer) in &middles {
        rank.push((v, layer));
    }
    for &t in &terminals {
        rank.push((t, layers + 1));
    }

    let cut_pair = if spec.infeasible {
        let i = rng.gen_range(0..spec.sources);
        let j = rng.gen_range(0..spec.terminals);
        Some((i, j))
    } else {
        None
    };

    let mut b = Builder {
        g,
        rank,
        cut: cut_pair.map(|(i, j)| (sources[i], terminals[j])),
    };

    // Plant one path per pair (skipping the cut pair), hopping through
    // randomly chosen middles on strictly increasing layers. If a hop is
    // vetoed by the cut guard, fall back to the direct edge, which is always
    // safe: nothing points into sources and nothing leaves terminals.
    for (i, &s) in sources.iter().enumerate() {
        for (j, &t) in terminals.iter().enumerate() {
            if cut_pair == Some((i, j)) {
                continue;
            }
            let mut stops: Vec<NodeId> = Vec::new();
            if layers > 0 {
                let hops = rng.gen_range(0..=layers);
                let mut layer_choices: Vec<usize> = (1..=layers).collect();
                while layer_choices.len() > hops {
                    let drop = rng.gen_range(0..layer_choices.len());
                    layer_choices.remove(drop);
                }
                for layer in layer_choices {
                    let on_layer: Vec<NodeId> = middles
                        .iter()
                        .filter(|(_, l)| *l == layer)
                        .map(|(v, _)| v)
                        .copied()
                        .collect();
                    if !on_layer.is_empty() {
                        stops.push(on_layer[rng.gen_range(0..on_layer.len())]);
                    }
                }
            }
            let mut chain = vec![s];
            chain.extend(stops);
            chain.push(t);
            let mut ok = true;
            for w in chain.windows(2) {
                if !b.connect(w[0], w[1], &mut rng) {
                    ok = false;
                    break;
                }
            }
            if !ok {
                assert!(b.connect(s, t, &mut rng), "direct edges never cross the cut");
            }
        }
    }

    // Sprinkle extra forward edges between rank-increasing pairs.
    let nodes: Vec<NodeId> = b.rank.iter().map(|(v, _)| *v).collect();
    for &u in &nodes {
        for &v in &nodes {
            if b.rank_of(u) < b.rank_of(v) && rng.gen_bool(EXTRA_EDGE_PROB) {
                b.connect(u, v, &mut rng);
            }
        }
    }

    let mut inst = Instance::new(b.g, sources.clone(), terminals.clone()).expect("roles are valid");
    if let Some((i, j)) = cut_pair {
        inst = inst.with_expected_failure(sources[i], terminals[j]);
    }

    // The construction promises these outright; hold it to them.
    let report = check_feasibility(&inst);
    match cut_pair {
        None => assert!(report.feasible(), "planted paths make the instance feasible"),
        Some((i, j)) => assert_eq!(
            report.failure_pairs(),
            vec![(sources[i], terminals[j])],
            "exactly the recorded pair fails"
        ),
    }
    Ok(inst)
}
