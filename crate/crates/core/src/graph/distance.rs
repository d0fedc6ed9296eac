use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;
use std::sync::OnceLock;

use super::{BidirectedView, NodeId};

/// Single-source shortest-path tree computed by Dijkstra's algorithm.
#[derive(Debug, Clone)]
pub struct ShortestPathTree {
    source: NodeId,
    dist: Vec<f64>,
    pred: Vec<Option<usize>>,
}

impl ShortestPathTree {
    pub fn compute(view: &BidirectedView, source: NodeId) -> Self {
        let n = view.node_count();
        let mut dist = vec![f64::INFINITY; n];
        let mut pred = vec![None; n];
        let mut done = vec![false; n];
        let mut heap = BinaryHeap::new();
        dist[source] = 0.0;
        heap.push(Reverse((Dist(0.0), source)));
        // Ties pop the lowest node id first and predecessors only change on
        // strict improvement, so the tree is deterministic.
        while let Some(Reverse((Dist(d), v))) = heap.pop() {
            if std::mem::replace(&mut done[v], true) {
                continue;
            }
            for &a in view.out_arcs(v) {
                let arc = view.arc(a);
                let nd = d + arc.cost;
                if nd < dist[arc.head] {
                    dist[arc.head] = nd;
                    pred[arc.head] = Some(a);
                    heap.push(Reverse((Dist(nd), arc.head)));
                }
            }
        }
        Self { source, dist, pred }
    }

    pub fn source(&self) -> NodeId {
        self.source
    }

    /// Distance to `v`, `f64::INFINITY` when unreachable.
    pub fn distance(&self, v: NodeId) -> f64 {
        self.dist[v]
    }

    pub fn distances(&self) -> &[f64] {
        &self.dist
    }

    /// Arcs of the tree path from the source to `v`, in travel order.
    pub fn path_to(&self, v: NodeId, view: &BidirectedView) -> Option<Vec<usize>> {
        if !self.dist[v].is_finite() {
            return None;
        }
        let mut arcs = Vec::new();
        let mut cur = v;
        while let Some(a) = self.pred[cur] {
            arcs.push(a);
            cur = view.arc(a).tail;
        }
        arcs.reverse();
        Some(arcs)
    }
}

#[derive(Debug, thiserror::Error, PartialEq)]
#[error("node {to} is unreachable from node {from}")]
pub struct Unreachable {
    pub from: NodeId,
    pub to: NodeId,
}

/// Lazily filled cache of shortest-path trees, one per source node.
///
/// Concurrent readers may race to fill the same source; the computation is
/// deterministic so whichever result lands is identical.
#[derive(Debug)]
pub struct DistanceOracle<'g> {
    view: &'g BidirectedView,
    trees: Vec<OnceLock<ShortestPathTree>>,
}

impl<'g> DistanceOracle<'g> {
    pub fn new(view: &'g BidirectedView) -> Self {
        Self {
            view,
            trees: (0..view.node_count()).map(|_| OnceLock::new()).collect(),
        }
    }

    pub fn view(&self) -> &'g BidirectedView {
        self.view
    }

    pub fn tree(&self, source: NodeId) -> &ShortestPathTree {
        self.trees[source].get_or_init(|| ShortestPathTree::compute(self.view, source))
    }

    pub fn distance(&self, u: NodeId, v: NodeId) -> f64 {
        self.tree(u).distance(v)
    }

    /// Number of sources computed so far.
    pub fn cached_sources(&self) -> usize {
        self.trees.iter().filter(|t| t.get().is_some()).count()
    }

    /// Minimal `u → v` cost and an arc sequence realizing it.
    pub fn shortest_path(&self, u: NodeId, v: NodeId) -> Result<(f64, Vec<usize>), Unreachable> {
        let tree = self.tree(u);
        let arcs = tree
            .path_to(v, self.view)
            .ok_or(Unreachable { from: u, to: v })?;
        Ok((tree.distance(v), arcs))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Dist(f64);

impl Eq for Dist {}

impl PartialOrd for Dist {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dist {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Edge, Instance};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn path_graph() -> Instance {
        Instance::new(
            3,
            vec![
                Edge {
                    u: 0,
                    v: 1,
                    cost: 1.0,
                },
                Edge {
                    u: 1,
                    v: 2,
                    cost: 2.0,
                },
            ],
            vec![0, 2],
        )
        .unwrap()
    }

    #[test]
    fn same_node_is_free() {
        let d = path_graph().bidirect();
        let oracle = DistanceOracle::new(&d);
        assert_eq!(oracle.shortest_path(1, 1), Ok((0.0, vec![])));
    }

    #[test]
    fn unique_path() {
        let d = path_graph().bidirect();
        let oracle = DistanceOracle::new(&d);
        let (cost, arcs) = oracle.shortest_path(0, 2).unwrap();
        assert_eq!(cost, 3.0);
        let hops: Vec<_> = arcs
            .iter()
            .map(|&a| (d.arc(a).tail, d.arc(a).head))
            .collect();
        assert_eq!(hops, vec![(0, 1), (1, 2)]);
        assert_eq!(oracle.cached_sources(), 1);
    }

    #[test]
    fn unreachable_target() {
        let g = Instance::new(
            3,
            vec![Edge {
                u: 0,
                v: 1,
                cost: 1.0,
            }],
            vec![0, 1],
        )
        .unwrap();
        let d = g.bidirect();
        let oracle = DistanceOracle::new(&d);
        assert_eq!(
            oracle.shortest_path(0, 2),
            Err(Unreachable { from: 0, to: 2 })
        );
    }

    fn floyd_warshall(n: usize, edges: &[Edge]) -> Vec<Vec<f64>> {
        let mut d = vec![vec![f64::INFINITY; n]; n];
        for (i, row) in d.iter_mut().enumerate() {
            row[i] = 0.0;
        }
        for e in edges {
            d[e.u][e.v] = d[e.u][e.v].min(e.cost);
            d[e.v][e.u] = d[e.v][e.u].min(e.cost);
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let via = d[i][k] + d[k][j];
                    if via < d[i][j] {
                        d[i][j] = via;
                    }
                }
            }
        }
        d
    }

    #[test]
    fn matches_floyd_warshall_on_random_graphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for round in 0..40 {
            let n = 10;
            let integral = round % 2 == 0;
            let mut edges = Vec::new();
            for v in 1..n {
                let u = rng.gen_range(0..v);
                edges.push(Edge { u, v, cost: 0.0 });
            }
            for _ in 0..8 {
                let u = rng.gen_range(0..n);
                let v = rng.gen_range(0..n);
                if u != v {
                    edges.push(Edge { u, v, cost: 0.0 });
                }
            }
            for e in &mut edges {
                e.cost = if integral {
                    rng.gen_range(0..20) as f64
                } else {
                    rng.gen_range(0.0..5.0)
                };
            }
            let g = Instance::new(n, edges.clone(), vec![0]).unwrap();
            let d = g.bidirect();
            let oracle = DistanceOracle::new(&d);
            let fw = floyd_warshall(n, &edges);
            for u in 0..n {
                for v in 0..n {
                    let (cost, arcs) = oracle.shortest_path(u, v).unwrap();
                    if integral {
                        assert_eq!(cost, fw[u][v]);
                    } else {
                        assert!((cost - fw[u][v]).abs() <= 1e-9);
                    }
                    let walked: f64 = arcs.iter().map(|&a| d.arc(a).cost).sum();
                    assert_eq!(walked, cost);
                    if let (Some(&first), Some(&last)) = (arcs.first(), arcs.last()) {
                        assert_eq!(d.arc(first).tail, u);
                        assert_eq!(d.arc(last).head, v);
                    }
                    for w in 0..n {
                        assert!(
                            oracle.distance(u, v)
                                <= oracle.distance(u, w) + oracle.distance(w, v) + 1e-9
                        );
                    }
                }
            }
        }
    }
}
