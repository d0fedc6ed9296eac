//! Mapping subproblem solutions back to Steiner trees of the instance.

use crate::graph::{BidirectedView, EdgeId, Instance, NodeId, UnionFind};
use crate::laminar::{LaminarError, LaminarFamily, Nested};
use crate::solution::SubproblemSolution;

#[derive(Debug, Clone, PartialEq)]
pub struct SteinerTree {
    /// Edge indices, ascending.
    pub edges: Vec<EdgeId>,
    pub cost: f64,
    /// Non-terminal nodes touched by the tree, ascending.
    pub steiner_nodes: Vec<NodeId>,
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum TreeError {
    #[error("edge support does not connect terminal {0} to terminal {1}")]
    NotSpanning(usize, usize),
    #[error("edge indicator has {got} entries, instance has {expected} edges")]
    Length { got: usize, expected: usize },
    #[error("not a Steiner tree: {0}")]
    Invalid(&'static str),
}

/// Undirected edge indicator of a solution: an edge is used iff some set
/// routes flow on either of its arcs.
pub fn phi(sol: &SubproblemSolution, view: &BidirectedView, edge_count: usize) -> Vec<bool> {
    let mut chi = vec![false; edge_count];
    for route in &sol.routes {
        for &a in &route.arcs {
            chi[view.arc(a).edge] = true;
        }
    }
    chi
}

/// Cost of an edge indicator vector.
pub fn indicator_cost(chi: &[bool], g: &Instance) -> f64 {
    g.cost_of(chi.iter().enumerate().filter(|(_, &on)| on).map(|(e, _)| e))
}

/// Extracts a Steiner tree from the support of `chi`.
///
/// Takes a minimum spanning forest of the support (ties by edge index),
/// keeps the component holding the terminals and strips non-terminal leaves
/// until none remain.
pub fn extract_steiner_tree(chi: &[bool], g: &Instance) -> Result<SteinerTree, TreeError> {
    if chi.len() != g.edges().len() {
        return Err(TreeError::Length {
            got: chi.len(),
            expected: g.edges().len(),
        });
    }
    let n = g.node_count();
    let mut support: Vec<EdgeId> = (0..chi.len()).filter(|&e| chi[e]).collect();
    support.sort_by(|&a, &b| {
        g.edges()[a]
            .cost
            .total_cmp(&g.edges()[b].cost)
            .then(a.cmp(&b))
    });

    let mut forest = UnionFind::new(n);
    let mut kept = Vec::new();
    for e in support {
        let edge = g.edges()[e];
        if forest.union(edge.u, edge.v) {
            kept.push(e);
        }
    }
    let terminals = g.terminals();
    let anchor = forest.find(terminals[0]);
    if let Some(&t) = terminals.iter().find(|&&t| forest.find(t) != anchor) {
        return Err(TreeError::NotSpanning(terminals[0] + 1, t + 1));
    }
    kept.retain(|&e| forest.find(g.edges()[e].u) == anchor);

    let mut degree = vec![0usize; n];
    let mut incident: Vec<Vec<EdgeId>> = vec![Vec::new(); n];
    for &e in &kept {
        let edge = g.edges()[e];
        degree[edge.u] += 1;
        degree[edge.v] += 1;
        incident[edge.u].push(e);
        incident[edge.v].push(e);
    }
    let mut alive = vec![true; g.edges().len()];
    let mut stack: Vec<NodeId> = (0..n)
        .filter(|&v| degree[v] == 1 && !g.is_terminal(v))
        .collect();
    while let Some(v) = stack.pop() {
        if degree[v] != 1 {
            continue;
        }
        let e = *incident[v]
            .iter()
            .find(|&&e| alive[e])
            .expect("one live edge");
        alive[e] = false;
        degree[v] = 0;
        let w = g.edges()[e].other(v);
        degree[w] -= 1;
        if degree[w] == 1 && !g.is_terminal(w) {
            stack.push(w);
        }
    }

    let mut edges: Vec<EdgeId> = kept.into_iter().filter(|&e| alive[e]).collect();
    edges.sort_unstable();
    let steiner_nodes = (0..n)
        .filter(|&v| degree[v] > 0 && !g.is_terminal(v))
        .collect();
    Ok(SteinerTree {
        cost: g.cost_of(edges.iter().copied()),
        edges,
        steiner_nodes,
    })
}

impl SteinerTree {
    /// Checks that the edges form a tree spanning all terminals whose leaves
    /// are terminals, and that `cost` is their sum.
    pub fn validate(&self, g: &Instance) -> Result<(), TreeError> {
        let n = g.node_count();
        let mut uf = UnionFind::new(n);
        let mut degree = vec![0usize; n];
        for &e in &self.edges {
            let edge = g.edges()[e];
            if !uf.union(edge.u, edge.v) {
                return Err(TreeError::Invalid("contains a cycle"));
            }
            degree[edge.u] += 1;
            degree[edge.v] += 1;
        }
        let t0 = g.terminals()[0];
        if g.terminals().iter().any(|&t| uf.find(t) != uf.find(t0)) {
            return Err(TreeError::Invalid("does not span the terminals"));
        }
        if (0..n).any(|v| degree[v] > 0 && uf.find(v) != uf.find(t0)) {
            return Err(TreeError::Invalid("has a stray component"));
        }
        if (0..n).any(|v| degree[v] == 1 && !g.is_terminal(v)) {
            return Err(TreeError::Invalid("has a non-terminal leaf"));
        }
        if g.cost_of(self.edges.iter().copied()) != self.cost {
            return Err(TreeError::Invalid("cost does not match its edges"));
        }
        Ok(())
    }

    /// `(u, v, cost)` triples with 1-based node ids.
    pub fn edge_list(&self, g: &Instance) -> Vec<(usize, usize, f64)> {
        self.edges
            .iter()
            .map(|&e| {
                let edge = g.edges()[e];
                (edge.u + 1, edge.v + 1, edge.cost)
            })
            .collect()
    }

    /// The laminar family realized by this tree when rooted at `root`.
    ///
    /// Commodities follow the terminal input order with `root` removed. The
    /// result is non-binary when a node branches three or more ways.
    pub fn structure(&self, g: &Instance, root: NodeId) -> Result<LaminarFamily, LaminarError> {
        let commodity: Vec<Option<usize>> = {
            let mut map = vec![None; g.node_count()];
            for (k, &t) in g.terminals().iter().filter(|&&t| t != root).enumerate() {
                map[t] = Some(k);
            }
            map
        };
        let b = commodity.iter().flatten().count();
        let mut adj: Vec<Vec<NodeId>> = vec![Vec::new(); g.node_count()];
        for &e in &self.edges {
            let edge = g.edges()[e];
            adj[edge.u].push(edge.v);
            adj[edge.v].push(edge.u);
        }

        // Iterative post-order from the root.
        let mut order = Vec::new();
        let mut parent = vec![usize::MAX; g.node_count()];
        let mut stack = vec![root];
        parent[root] = root;
        while let Some(v) = stack.pop() {
            order.push(v);
            for &w in &adj[v] {
                if parent[w] == usize::MAX {
                    parent[w] = v;
                    stack.push(w);
                }
            }
        }
        let mut parts: Vec<Vec<Nested>> = vec![Vec::new(); g.node_count()];
        let mut result = None;
        for &v in order.iter().rev() {
            let mut mine = std::mem::take(&mut parts[v]);
            if let Some(k) = commodity[v] {
                mine.push(Nested::Leaf(k));
            }
            let merged = match mine.len() {
                0 => None,
                1 => mine.pop(),
                _ => Some(Nested::Group(mine)),
            };
            if v == root {
                result = merged;
            } else if let Some(m) = merged {
                parts[parent[v]].push(m);
            }
        }
        let tree = result.ok_or(LaminarError::UnsupportedSize(0))?;
        LaminarFamily::from_nested(b, tree, 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Edge;

    fn e(u: usize, v: usize, cost: f64) -> Edge {
        Edge { u, v, cost }
    }

    #[test]
    fn tree_is_returned_unchanged() {
        let g = Instance::new(
            4,
            vec![e(0, 3, 1.0), e(1, 3, 2.0), e(2, 3, 3.0)],
            vec![0, 1, 2],
        )
        .unwrap();
        let t = extract_steiner_tree(&[true, true, true], &g).unwrap();
        assert_eq!(t.edges, vec![0, 1, 2]);
        assert_eq!(t.cost, 6.0);
        assert_eq!(t.steiner_nodes, vec![3]);
        t.validate(&g).unwrap();
    }

    #[test]
    fn pendant_steiner_node_removed() {
        let g = Instance::new(3, vec![e(0, 1, 1.0), e(1, 2, 1.0)], vec![0, 1]).unwrap();
        let t = extract_steiner_tree(&[true, true], &g).unwrap();
        assert_eq!(t.edges, vec![0]);
        assert!(t.steiner_nodes.is_empty());
    }

    #[test]
    fn cycles_and_stray_components_dropped() {
        // Triangle 0-1-2 over terminals 0, 2 plus a disjoint edge 3-4.
        let g = Instance::new(
            5,
            vec![e(0, 1, 1.0), e(1, 2, 1.0), e(0, 2, 5.0), e(3, 4, 1.0)],
            vec![0, 2],
        )
        .unwrap();
        let t = extract_steiner_tree(&[true, true, true, true], &g).unwrap();
        assert_eq!(t.edges, vec![0, 1]);
        assert_eq!(t.cost, 2.0);
        t.validate(&g).unwrap();
    }

    #[test]
    fn support_must_span() {
        let g = Instance::new(3, vec![e(0, 1, 1.0), e(1, 2, 1.0)], vec![0, 2]).unwrap();
        assert_eq!(
            extract_steiner_tree(&[true, false], &g),
            Err(TreeError::NotSpanning(1, 3))
        );
    }

    #[test]
    fn structure_of_trees() {
        // r=0 - 1(h) ; h-2(t1) ; h-3(x) ; x-4(t2) ; x-5(t3)
        let g = Instance::new(
            6,
            vec![
                e(0, 1, 1.0),
                e(1, 2, 1.0),
                e(1, 3, 1.0),
                e(3, 4, 1.0),
                e(3, 5, 1.0),
            ],
            vec![0, 2, 4, 5],
        )
        .unwrap();
        let t = extract_steiner_tree(&[true; 5], &g).unwrap();
        assert_eq!(t.structure(&g, 0).unwrap().encoding(), "(k1,(k2,k3))");
        assert_eq!(t.structure(&g, 2).unwrap().encoding(), "(k1,(k2,k3))");

        // Star: non-binary.
        let g = Instance::new(
            4,
            vec![e(0, 3, 1.0), e(1, 3, 1.0), e(2, 3, 1.0)],
            vec![3, 0, 1, 2],
        )
        .unwrap();
        let t = extract_steiner_tree(&[true; 3], &g).unwrap();
        assert_eq!(t.structure(&g, 3).unwrap().encoding(), "(k1,k2,k3)");

        // Terminal in the middle of a path.
        let g = Instance::new(3, vec![e(0, 1, 1.0), e(1, 2, 1.0)], vec![0, 1, 2]).unwrap();
        let t = extract_steiner_tree(&[true; 2], &g).unwrap();
        assert_eq!(t.structure(&g, 0).unwrap().encoding(), "(k1,k2)");
    }
}
