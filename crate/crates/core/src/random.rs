//! Seeded random instances for tests and benchmarks.

use rand::seq::{index, SliceRandom};
use rand::Rng;

use crate::graph::{Edge, Instance};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomSpec {
    pub nodes: usize,
    /// Edges beyond the spanning tree; duplicates of existing pairs are
    /// skipped, so the final count can be lower.
    pub extra_edges: usize,
    pub terminals: usize,
    /// Inclusive integer cost range.
    pub min_cost: u32,
    pub max_cost: u32,
}

impl RandomSpec {
    pub fn new(nodes: usize, extra_edges: usize, terminals: usize) -> Self {
        Self {
            nodes,
            extra_edges,
            terminals,
            min_cost: 1,
            max_cost: 10,
        }
    }
}

/// Connected simple graph: a random spanning tree plus up to
/// `extra_edges` further edges, integer costs, terminals sampled uniformly.
pub fn random_instance<R: Rng + ?Sized>(rng: &mut R, spec: &RandomSpec) -> Instance {
    let n = spec.nodes.max(1);
    let terminals = spec.terminals.clamp(1, n);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut seen = std::collections::HashSet::new();
    let mut edges = Vec::new();
    let cost = |rng: &mut R| f64::from(rng.gen_range(spec.min_cost..=spec.max_cost));
    for i in 1..n {
        let (u, v) = (order[i], order[rng.gen_range(0..i)]);
        seen.insert((u.min(v), u.max(v)));
        edges.push(Edge {
            u,
            v,
            cost: cost(rng),
        });
    }
    let max_pairs = n * (n - 1) / 2;
    for _ in 0..spec.extra_edges {
        if seen.len() >= max_pairs {
            break;
        }
        let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if u == v || !seen.insert((u.min(v), u.max(v))) {
            continue;
        }
        edges.push(Edge {
            u,
            v,
            cost: cost(rng),
        });
    }
    let mut ts = index::sample(rng, n, terminals).into_vec();
    ts.sort_unstable();
    Instance::new(n, edges, ts).expect("generated instance is valid")
}
