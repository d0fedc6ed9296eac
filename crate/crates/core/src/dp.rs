//! Combinatorial solver for one laminar family.
//!
//! With the family fixed, a solution is determined by the node where each
//! partition happens: every set then follows a shortest path from the node
//! where it starts sharing to the node where it splits (or, for a
//! singleton, to its sink). Bottom-up over the family tree,
//!
//! ```text
//! cost({k}, i) = dist(i, t_k)
//! cost(s, i)   = min_j  dist(i, j) + Σ_{c ∈ children(s)} cost(c, j)
//! ```
//!
//! and the subproblem optimum is `cost(K, r)`. `j = i` is allowed, which is a
//! set that splits where it starts and routes no flow.

use crate::graph::{DistanceOracle, Instance, NodeId};
use crate::laminar::LaminarFamily;
use crate::lp::{commodity_sinks, LpError};
use crate::solution::{SetRoute, SubproblemSolution};

/// Cost and argmin tables, indexed `[family node][graph node]`.
#[derive(Debug, Clone)]
pub struct DpTable {
    pub cost: Vec<Vec<f64>>,
    /// End node chosen for each (set, start) pair: the split node for
    /// internal sets, the sink for singletons.
    pub choice: Vec<Vec<NodeId>>,
}

/// Fills the table for every set and start node.
pub fn dp_table(oracle: &DistanceOracle<'_>, sinks: &[NodeId], family: &LaminarFamily) -> DpTable {
    let n = oracle.view().node_count();
    let sets = family.nodes().len();
    let mut cost = vec![Vec::new(); sets];
    let mut choice = vec![Vec::new(); sets];
    for s in (0..sets).rev() {
        let node = family.node(s);
        if node.is_leaf() {
            let sink = sinks[node.set.lowest().expect("nonempty leaf")];
            let tree = oracle.tree(sink);
            cost[s] = (0..n).map(|i| tree.distance(i)).collect();
            choice[s] = vec![sink; n];
            continue;
        }
        let below: Vec<f64> = (0..n)
            .map(|j| node.children.iter().map(|&c| cost[c][j]).sum())
            .collect();
        let mut row = vec![f64::INFINITY; n];
        let mut arg = vec![0; n];
        for i in 0..n {
            let tree = oracle.tree(i);
            // Strict comparison keeps the lowest node id on ties.
            for (j, &b) in below.iter().enumerate() {
                let v = tree.distance(j) + b;
                if v < row[i] {
                    row[i] = v;
                    arg[i] = j;
                }
            }
        }
        cost[s] = row;
        choice[s] = arg;
    }
    DpTable { cost, choice }
}

/// Optimal solution of the subproblem for `family` rooted at `root`.
pub fn solve_family(
    g: &Instance,
    oracle: &DistanceOracle<'_>,
    root: NodeId,
    family: &LaminarFamily,
) -> Result<SubproblemSolution, LpError> {
    let sinks = commodity_sinks(g, root)?;
    if sinks.len() != family.commodity_count() {
        return Err(LpError::CommodityMismatch {
            family: family.commodity_count(),
            instance: sinks.len(),
        });
    }
    let table = dp_table(oracle, &sinks, family);

    // Top-down: each set starts where its parent ends.
    let sets = family.nodes().len();
    let mut start = vec![root; sets];
    let mut routes = Vec::with_capacity(sets);
    let mut splits = vec![0; family.partition_count()];
    for s in 0..sets {
        let from = start[s];
        let to = table.choice[s][from];
        let node = family.node(s);
        if let Some(p) = family.partition_of_node(s) {
            splits[p] = to;
        }
        for &c in &node.children {
            start[c] = to;
        }
        let (cost, arcs) = oracle
            .shortest_path(from, to)
            .expect("instance terminals are connected");
        routes.push(SetRoute {
            start: from,
            end: to,
            arcs,
            cost,
        });
    }

    Ok(SubproblemSolution {
        family_id: family.id(),
        family: family.encoding(),
        root,
        objective: routes.iter().map(|r| r.cost).sum(),
        splits,
        routes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Edge;
    use crate::laminar::family_by_id;
    use crate::lp::build_lp;

    fn e(u: usize, v: usize, cost: f64) -> Edge {
        Edge { u, v, cost }
    }

    #[test]
    fn single_commodity_is_a_shortest_path() {
        let g = Instance::new(3, vec![e(0, 1, 2.0), e(1, 2, 3.0)], vec![0, 2]).unwrap();
        let d = g.bidirect();
        let oracle = DistanceOracle::new(&d);
        let sol = solve_family(&g, &oracle, 0, &family_by_id(1, 0).unwrap()).unwrap();
        assert_eq!(sol.objective, 5.0);
        assert!(sol.splits.is_empty());
        assert_eq!(sol.routes[0].arcs, vec![0, 2]);

        let lp = build_lp(&g, &d, 0, &family_by_id(1, 0).unwrap()).unwrap();
        let x = sol.induced_lp_point(&lp).unwrap();
        assert_eq!(lp.model.infeasibility(&x), 0.0);
        let flows: Vec<_> = lp
            .model
            .columns
            .iter()
            .zip(&x)
            .filter(|(c, v)| c.name.starts_with("f_") && **v == 1.0)
            .map(|(c, _)| c.name.as_str())
            .collect();
        assert_eq!(flows, ["f_a0_s0", "f_a2_s0"]);
    }

    /// Star with center c = node 3; r, t1, t2 attached with cost 1.
    #[test]
    fn star_splits_at_center() {
        let g = Instance::new(
            4,
            vec![e(0, 3, 1.0), e(1, 3, 1.0), e(2, 3, 1.0)],
            vec![0, 1, 2],
        )
        .unwrap();
        let d = g.bidirect();
        let oracle = DistanceOracle::new(&d);
        let l = family_by_id(2, 0).unwrap();
        let sol = solve_family(&g, &oracle, 0, &l).unwrap();

        // Brute force over the three candidate split nodes (and the fourth,
        // the center): dist(r, j) + dist(j, t1) + dist(j, t2).
        let by_hand = [
            0.0 + 2.0 + 2.0, // r
            2.0 + 0.0 + 2.0, // t1
            2.0 + 2.0 + 0.0, // t2
            1.0 + 1.0 + 1.0, // center
        ];
        assert_eq!(sol.objective, 3.0);
        assert_eq!(
            sol.objective,
            by_hand.iter().copied().fold(f64::INFINITY, f64::min)
        );
        assert_eq!(sol.splits, vec![3]);

        let lp = build_lp(&g, &d, 0, &l).unwrap();
        let x = sol.induced_lp_point(&lp).unwrap();
        assert!(lp.model.residuals(&x).iter().all(|&r| r == 0.0));
        assert_eq!(lp.model.infeasibility(&x), 0.0);
        assert_eq!(lp.model.objective(&x), 3.0);
        let w = lp
            .model
            .columns
            .iter()
            .position(|c| c.name == "w_v4_p0")
            .unwrap();
        assert_eq!(x[w], 1.0);
    }

    #[test]
    fn ties_pick_lowest_node() {
        // Square r-a-t1, r-b-t1 and t2 = a: two equal splits.
        let g = Instance::new(
            4,
            vec![e(0, 1, 1.0), e(1, 2, 1.0), e(0, 3, 1.0), e(3, 2, 1.0)],
            vec![0, 2],
        )
        .unwrap();
        let d = g.bidirect();
        let oracle = DistanceOracle::new(&d);
        let table = dp_table(&oracle, &[2], &family_by_id(1, 0).unwrap());
        assert_eq!(table.cost[0][0], 2.0);
        let g2 = Instance::new(
            4,
            vec![e(0, 1, 1.0), e(1, 2, 1.0), e(0, 3, 1.0), e(3, 2, 1.0)],
            vec![0, 1, 3],
        )
        .unwrap();
        let d2 = g2.bidirect();
        let oracle2 = DistanceOracle::new(&d2);
        let sol = solve_family(&g2, &oracle2, 0, &family_by_id(2, 0).unwrap()).unwrap();
        assert_eq!(sol.objective, 2.0);
        assert_eq!(sol.splits, vec![0]);
    }

    #[test]
    fn origin_mismatch() {
        let g = Instance::new(3, vec![e(0, 1, 2.0), e(1, 2, 3.0)], vec![0, 1, 2]).unwrap();
        let d = g.bidirect();
        let oracle = DistanceOracle::new(&d);
        let sol = solve_family(&g, &oracle, 0, &family_by_id(2, 0).unwrap()).unwrap();
        let lp = build_lp(&g, &d, 1, &family_by_id(2, 0).unwrap()).unwrap();
        assert!(sol.induced_lp_point(&lp).is_err());
    }
}
