use super::{EdgeId, Instance, NodeId};

/// Directed copy of one undirected edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arc {
    pub tail: NodeId,
    pub head: NodeId,
    pub cost: f64,
    pub edge: EdgeId,
}

/// Directed graph holding two opposite arcs per edge.
///
/// Edge `e = {u, v}` becomes arc `2e = (u, v)` and arc `2e + 1 = (v, u)`,
/// both with cost `c_e`.
#[derive(Debug, Clone)]
pub struct BidirectedView {
    node_count: usize,
    arcs: Vec<Arc>,
    out_start: Vec<usize>,
    out_arcs: Vec<usize>,
    in_start: Vec<usize>,
    in_arcs: Vec<usize>,
}

impl BidirectedView {
    pub fn new(g: &Instance) -> Self {
        let n = g.node_count();
        let arcs: Vec<Arc> = g
            .edges()
            .iter()
            .enumerate()
            .flat_map(|(idx, e)| {
                [
                    Arc {
                        tail: e.u,
                        head: e.v,
                        cost: e.cost,
                        edge: idx,
                    },
                    Arc {
                        tail: e.v,
                        head: e.u,
                        cost: e.cost,
                        edge: idx,
                    },
                ]
            })
            .collect();
        let (out_start, out_arcs) = csr(n, arcs.iter().map(|a| a.tail));
        let (in_start, in_arcs) = csr(n, arcs.iter().map(|a| a.head));
        Self {
            node_count: n,
            arcs,
            out_start,
            out_arcs,
            in_start,
            in_arcs,
        }
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn arc(&self, a: usize) -> &Arc {
        &self.arcs[a]
    }

    /// Arcs leaving `v` (δ⁺), ascending by arc index.
    pub fn out_arcs(&self, v: NodeId) -> &[usize] {
        &self.out_arcs[self.out_start[v]..self.out_start[v + 1]]
    }

    /// Arcs entering `v` (δ⁻), ascending by arc index.
    pub fn in_arcs(&self, v: NodeId) -> &[usize] {
        &self.in_arcs[self.in_start[v]..self.in_start[v + 1]]
    }
}

fn csr(n: usize, keys: impl Iterator<Item = usize> + Clone) -> (Vec<usize>, Vec<usize>) {
    let mut start = vec![0; n + 1];
    for k in keys.clone() {
        start[k + 1] += 1;
    }
    for i in 0..n {
        start[i + 1] += start[i];
    }
    let mut fill = start.clone();
    let mut items = vec![0; start[n]];
    for (idx, k) in keys.enumerate() {
        items[fill[k]] = idx;
        fill[k] += 1;
    }
    (start, items)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Edge;

    #[test]
    fn two_arcs_per_edge() {
        let g = Instance::new(
            2,
            vec![Edge {
                u: 0,
                v: 1,
                cost: 5.0,
            }],
            vec![0, 1],
        )
        .unwrap();
        let d = g.bidirect();
        assert_eq!(
            d.arcs(),
            &[
                Arc {
                    tail: 0,
                    head: 1,
                    cost: 5.0,
                    edge: 0
                },
                Arc {
                    tail: 1,
                    head: 0,
                    cost: 5.0,
                    edge: 0
                },
            ]
        );
        assert_eq!(d.out_arcs(0), &[0]);
        assert_eq!(d.in_arcs(0), &[1]);
    }

    #[test]
    fn empty_edge_list() {
        let g = Instance::new(1, vec![], vec![0]).unwrap();
        assert_eq!(g.bidirect().arc_count(), 0);
    }
}
