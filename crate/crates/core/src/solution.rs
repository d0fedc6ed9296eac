//! Per-family subproblem solutions and their LP column vectors.

use crate::graph::{BidirectedView, NodeId};
use crate::laminar::FamilyId;
use crate::lp::{FamilyLp, VariableKey};

/// Where one family set starts and stops sharing a path, and the arcs it
/// uses in between.
#[derive(Debug, Clone, PartialEq)]
pub struct SetRoute {
    pub start: NodeId,
    pub end: NodeId,
    /// Arc indices of the bidirected view. In travel order when produced by
    /// the combinatorial solver.
    pub arcs: Vec<usize>,
    pub cost: f64,
}

/// Optimal 0/1 solution of one family's subproblem.
#[derive(Debug, Clone, PartialEq)]
pub struct SubproblemSolution {
    pub family_id: FamilyId,
    pub family: String,
    pub root: NodeId,
    /// Sum of route costs; an arc used by two sets is paid twice.
    pub objective: f64,
    /// Split node per partition.
    pub splits: Vec<NodeId>,
    /// Route per family set, in family node order.
    pub routes: Vec<SetRoute>,
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum SolutionError {
    #[error("solution and model come from different inputs: {0}")]
    Origin(&'static str),
    #[error("column {column} = {value} is not within {tol} of 0 or 1")]
    Fractional { column: usize, value: f64, tol: f64 },
    #[error("set {0} has no unique start or end node")]
    Ambiguous(usize),
}

impl SubproblemSolution {
    /// 0/1 column vector of `lp` that realizes this solution.
    pub fn induced_lp_point(&self, lp: &FamilyLp) -> Result<Vec<f64>, SolutionError> {
        if lp.family_id != self.family_id || lp.family != self.family {
            return Err(SolutionError::Origin("family"));
        }
        if lp.root != self.root {
            return Err(SolutionError::Origin("root"));
        }
        let layout = lp.layout;
        if layout.sets != self.routes.len() || layout.partitions != self.splits.len() {
            return Err(SolutionError::Origin("shape"));
        }
        let mut x = vec![0.0; layout.column_count()];
        for (set, route) in self.routes.iter().enumerate() {
            for &arc in &route.arcs {
                if arc >= layout.arcs {
                    return Err(SolutionError::Origin("arc index"));
                }
                x[layout.column(VariableKey::Flow { arc, set })] = 1.0;
            }
            x[layout.column(VariableKey::Start {
                node: route.start,
                set,
            })] = 1.0;
            x[layout.column(VariableKey::End {
                node: route.end,
                set,
            })] = 1.0;
        }
        for (partition, &node) in self.splits.iter().enumerate() {
            x[layout.column(VariableKey::Split { node, partition })] = 1.0;
        }
        Ok(x)
    }

    /// Reads a solution back from an integral LP point.
    ///
    /// Every column must lie within `tol` of 0 or 1. Arcs of a set are
    /// listed in index order, which need not be travel order; the LP may
    /// also carry zero-cost cycles.
    pub fn from_lp_point(
        lp: &FamilyLp,
        view: &BidirectedView,
        values: &[f64],
        tol: f64,
    ) -> Result<Self, SolutionError> {
        let layout = lp.layout;
        if values.len() != layout.column_count() || view.arc_count() != layout.arcs {
            return Err(SolutionError::Origin("shape"));
        }
        for (column, &value) in values.iter().enumerate() {
            if value.abs() > tol && (value - 1.0).abs() > tol {
                return Err(SolutionError::Fractional { column, value, tol });
            }
        }
        let on = |key| values[layout.column(key)] > 0.5;
        let unique = |set: usize, f: &dyn Fn(NodeId) -> VariableKey| {
            let mut hits = (0..layout.nodes).filter(|&i| on(f(i)));
            match (hits.next(), hits.next()) {
                (Some(i), None) => Ok(i),
                _ => Err(SolutionError::Ambiguous(set)),
            }
        };

        let mut routes = Vec::with_capacity(layout.sets);
        for set in 0..layout.sets {
            let start = unique(set, &|node| VariableKey::Start { node, set })?;
            let end = unique(set, &|node| VariableKey::End { node, set })?;
            let arcs: Vec<usize> = (0..layout.arcs)
                .filter(|&arc| on(VariableKey::Flow { arc, set }))
                .collect();
            let cost = arcs.iter().map(|&a| view.arc(a).cost).sum();
            routes.push(SetRoute {
                start,
                end,
                arcs,
                cost,
            });
        }
        let splits = (0..layout.partitions)
            .map(|partition| unique(partition, &|node| VariableKey::Split { node, partition }))
            .collect::<Result<_, _>>()?;
        Ok(Self {
            family_id: lp.family_id,
            family: lp.family.clone(),
            root: lp.root,
            objective: routes.iter().map(|r| r.cost).sum(),
            splits,
            routes,
        })
    }
}
