//! Exact reference solvers used for verification.
//!
//! Both work in integer arithmetic on an all-pairs distance matrix from
//! Floyd–Warshall, so they share no code with the shortest-path oracle or
//! the decomposition.

use crate::graph::{EdgeId, Instance, NodeId};

/// Largest terminal count accepted by [`dreyfus_wagner`].
pub const MAX_DW_TERMINALS: usize = 12;
/// Largest non-terminal count accepted by [`brute_force_subset_mst`].
pub const MAX_BRUTE_FORCE_STEINER: usize = 16;

const INF: i64 = i64::MAX / 4;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub cost: f64,
    /// Witness tree, ascending edge indices, when the oracle builds one.
    pub edges: Option<Vec<EdgeId>>,
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum OracleError {
    #[error("{0} terminals exceed the cap of {MAX_DW_TERMINALS}")]
    TooManyTerminals(usize),
    #[error("{0} non-terminal nodes exceed the cap of {MAX_BRUTE_FORCE_STEINER}")]
    TooManySteinerNodes(usize),
    #[error("edge {0} has a non-integral cost; the oracles are exact integer solvers")]
    NonIntegral(usize),
}

struct Metric {
    dist: Vec<Vec<i64>>,
    /// First hop on a shortest path, and the edge used for it.
    next: Vec<Vec<(NodeId, EdgeId)>>,
}

fn integral_costs(g: &Instance) -> Result<Vec<i64>, OracleError> {
    g.edges()
        .iter()
        .enumerate()
        .map(|(e, edge)| {
            if edge.cost.fract() == 0.0 && edge.cost.abs() < 1e15 {
                Ok(edge.cost as i64)
            } else {
                Err(OracleError::NonIntegral(e))
            }
        })
        .collect()
}

fn floyd_warshall(g: &Instance, costs: &[i64]) -> Metric {
    let n = g.node_count();
    let mut dist = vec![vec![INF; n]; n];
    let mut next = vec![vec![(usize::MAX, usize::MAX); n]; n];
    for (v, row) in dist.iter_mut().enumerate() {
        row[v] = 0;
        next[v][v] = (v, usize::MAX);
    }
    for (e, edge) in g.edges().iter().enumerate() {
        let c = costs[e];
        for (a, b) in [(edge.u, edge.v), (edge.v, edge.u)] {
            if c < dist[a][b] {
                dist[a][b] = c;
                next[a][b] = (b, e);
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            if dist[i][k] == INF {
                continue;
            }
            for j in 0..n {
                let via = dist[i][k] + dist[k][j];
                if via < dist[i][j] {
                    dist[i][j] = via;
                    next[i][j] = next[i][k];
                }
            }
        }
    }
    Metric { dist, next }
}

impl Metric {
    fn path_edges(&self, mut u: NodeId, v: NodeId, out: &mut Vec<EdgeId>) {
        while u != v {
            let (hop, e) = self.next[u][v];
            out.push(e);
            u = hop;
        }
    }
}

/// Classic subset dynamic program: `dp[S][v]` is the cheapest tree
/// connecting terminal subset `S` and node `v`, built from subset splits at
/// `v` followed by a shortest-path extension.
pub fn dreyfus_wagner(g: &Instance, terminals: &[NodeId]) -> Result<OracleResult, OracleError> {
    if terminals.len() > MAX_DW_TERMINALS {
        return Err(OracleError::TooManyTerminals(terminals.len()));
    }
    let costs = integral_costs(g)?;
    if terminals.len() <= 1 {
        return Ok(OracleResult {
            cost: 0.0,
            edges: None,
        });
    }
    let metric = floyd_warshall(g, &costs);
    let d = &metric.dist;
    let n = g.node_count();
    let (&last, rest) = terminals.split_last().expect("nonempty");
    let k = rest.len();
    let full = (1usize << k) - 1;

    let mut dp = vec![vec![INF; n]; full + 1];
    for (i, &t) in rest.iter().enumerate() {
        dp[1 << i] = d[t].clone();
    }
    for s in 1..=full {
        if s.count_ones() < 2 {
            continue;
        }
        let mut row = vec![INF; n];
        // Proper subsets containing the lowest bit of s, so each split is
        // seen once.
        let low = s & s.wrapping_neg();
        let mut t = (s - 1) & s;
        while t > 0 {
            if t & low != 0 {
                let (a, b) = (&dp[t], &dp[s ^ t]);
                for v in 0..n {
                    let c = a[v] + b[v];
                    if c < row[v] {
                        row[v] = c;
                    }
                }
            }
            t = (t - 1) & s;
        }
        let grown: Vec<i64> = (0..n)
            .map(|v| (0..n).map(|u| row[u] + d[u][v]).min().unwrap_or(INF))
            .collect();
        dp[s] = grown;
    }
    Ok(OracleResult {
        cost: dp[full][last] as f64,
        edges: None,
    })
}

/// Minimum over every set `W` of non-terminals of the metric-closure MST on
/// `R ∪ W`, with each MST edge expanded to a graph path, the union reduced
/// to a spanning tree and non-terminal leaves pruned before costing.
pub fn brute_force_subset_mst(
    g: &Instance,
    terminals: &[NodeId],
) -> Result<OracleResult, OracleError> {
    let n = g.node_count();
    let mut is_terminal = vec![false; n];
    for &t in terminals {
        is_terminal[t] = true;
    }
    let steiner: Vec<NodeId> = (0..n).filter(|&v| !is_terminal[v]).collect();
    if steiner.len() > MAX_BRUTE_FORCE_STEINER {
        return Err(OracleError::TooManySteinerNodes(steiner.len()));
    }
    let costs = integral_costs(g)?;
    let metric = floyd_warshall(g, &costs);

    let mut best: Option<(i64, Vec<EdgeId>)> = None;
    for mask in 0u32..(1 << steiner.len()) {
        let mut nodes: Vec<NodeId> = terminals.to_vec();
        nodes.extend(
            steiner
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &v)| v),
        );
        let (mst_cost, mst) = prim(&metric.dist, &nodes);
        let mut union = Vec::new();
        for (u, v) in mst {
            metric.path_edges(u, v, &mut union);
        }
        let witness = prune(g, &costs, &is_terminal, union);
        let cost: i64 = witness.iter().map(|&e| costs[e]).sum();
        debug_assert!(cost <= mst_cost);
        if best.as_ref().is_none_or(|(c, _)| cost < *c) {
            best = Some((cost, witness));
        }
    }
    let (cost, edges) = best.expect("the empty subset is always tried");
    Ok(OracleResult {
        cost: cost as f64,
        edges: Some(edges),
    })
}

/// O(k²) Prim on the complete metric over `nodes`.
fn prim(dist: &[Vec<i64>], nodes: &[NodeId]) -> (i64, Vec<(NodeId, NodeId)>) {
    let k = nodes.len();
    let mut in_tree = vec![false; k];
    let mut key = vec![INF; k];
    let mut link = vec![0usize; k];
    let mut total = 0;
    let mut edges = Vec::with_capacity(k.saturating_sub(1));
    if k == 0 {
        return (0, edges);
    }
    key[0] = 0;
    for _ in 0..k {
        let u = (0..k)
            .filter(|&i| !in_tree[i])
            .min_by_key(|&i| key[i])
            .expect("unvisited node");
        in_tree[u] = true;
        total += key[u];
        if u != 0 {
            edges.push((nodes[link[u]], nodes[u]));
        }
        for v in 0..k {
            let c = dist[nodes[u]][nodes[v]];
            if !in_tree[v] && c < key[v] {
                key[v] = c;
                link[v] = u;
            }
        }
    }
    (total, edges)
}

/// Spanning tree of the deduplicated edge set, then non-terminal leaves
/// stripped until none remain.
fn prune(g: &Instance, costs: &[i64], is_terminal: &[bool], mut edges: Vec<EdgeId>) -> Vec<EdgeId> {
    edges.sort_unstable();
    edges.dedup();
    edges.sort_by_key(|&e| (costs[e], e));
    let n = g.node_count();
    let mut comp: Vec<usize> = (0..n).collect();
    fn root(comp: &mut [usize], mut v: usize) -> usize {
        while comp[v] != v {
            comp[v] = comp[comp[v]];
            v = comp[v];
        }
        v
    }
    let mut tree = Vec::new();
    for e in edges {
        let (a, b) = (
            root(&mut comp, g.edges()[e].u),
            root(&mut comp, g.edges()[e].v),
        );
        if a != b {
            comp[a] = b;
            tree.push(e);
        }
    }
    loop {
        let mut degree = vec![0usize; n];
        for &e in &tree {
            degree[g.edges()[e].u] += 1;
            degree[g.edges()[e].v] += 1;
        }
        let before = tree.len();
        tree.retain(|&e| {
            let edge = g.edges()[e];
            !((degree[edge.u] == 1 && !is_terminal[edge.u])
                || (degree[edge.v] == 1 && !is_terminal[edge.v]))
        });
        if tree.len() == before {
            break;
        }
    }
    tree.sort_unstable();
    tree
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Edge;

    fn e(u: usize, v: usize, cost: f64) -> Edge {
        Edge { u, v, cost }
    }

    #[test]
    fn two_terminals_give_shortest_path() {
        let g = Instance::new(
            4,
            vec![e(0, 1, 1.0), e(1, 3, 1.0), e(0, 3, 5.0), e(2, 3, 1.0)],
            vec![0, 3],
        )
        .unwrap();
        assert_eq!(dreyfus_wagner(&g, &[0, 3]).unwrap().cost, 2.0);
        let bf = brute_force_subset_mst(&g, &[0, 3]).unwrap();
        assert_eq!(bf.cost, 2.0);
        assert_eq!(bf.edges, Some(vec![0, 1]));
    }

    #[test]
    fn star_is_forced() {
        let g = Instance::new(
            4,
            vec![e(0, 3, 1.0), e(1, 3, 1.0), e(2, 3, 1.0)],
            vec![0, 1, 2],
        )
        .unwrap();
        assert_eq!(dreyfus_wagner(&g, &[0, 1, 2]).unwrap().cost, 3.0);
        assert_eq!(brute_force_subset_mst(&g, &[0, 1, 2]).unwrap().cost, 3.0);
    }

    #[test]
    fn all_terminals_is_the_mst() {
        let g = Instance::new(
            3,
            vec![e(0, 1, 1.0), e(1, 2, 2.0), e(0, 2, 4.0)],
            vec![0, 1, 2],
        )
        .unwrap();
        let bf = brute_force_subset_mst(&g, &[0, 1, 2]).unwrap();
        assert_eq!(bf.cost, 3.0);
        assert_eq!(bf.edges, Some(vec![0, 1]));
    }

    #[test]
    fn steiner_shortcut_is_taken() {
        // Triangle of terminals with sides 3 and a center at distance 1.
        // W = {} gives the MST 3 + 3 = 6; W = {center} gives 1 + 1 + 1 = 3.
        let g = Instance::new(
            4,
            vec![
                e(0, 1, 3.0),
                e(1, 2, 3.0),
                e(0, 2, 3.0),
                e(0, 3, 1.0),
                e(1, 3, 1.0),
                e(2, 3, 1.0),
            ],
            vec![0, 1, 2],
        )
        .unwrap();
        let bf = brute_force_subset_mst(&g, &[0, 1, 2]).unwrap();
        assert_eq!(bf.cost, 3.0);
        assert_eq!(bf.edges, Some(vec![3, 4, 5]));
        assert_eq!(dreyfus_wagner(&g, &[0, 1, 2]).unwrap().cost, 3.0);
    }

    #[test]
    fn caps_and_costs_checked() {
        let g = Instance::new(2, vec![e(0, 1, 1.5)], vec![0, 1]).unwrap();
        assert_eq!(
            dreyfus_wagner(&g, &[0, 1]),
            Err(OracleError::NonIntegral(0))
        );
        let many: Vec<_> = (0..13).collect();
        let edges = (1..13).map(|v| e(0, v, 1.0)).collect();
        let g = Instance::new(13, edges, many.clone()).unwrap();
        assert_eq!(
            dreyfus_wagner(&g, &many),
            Err(OracleError::TooManyTerminals(13))
        );
        let edges = (1..18).map(|v| e(0, v, 1.0)).collect();
        let g = Instance::new(18, edges, vec![0]).unwrap();
        assert_eq!(
            brute_force_subset_mst(&g, &[0]),
            Err(OracleError::TooManySteinerNodes(17))
        );
    }
}
