use super::{LpError, LpModel};
use crate::graph::{BidirectedView, Instance, NodeId};
use crate::laminar::{FamilyId, LaminarFamily};

/// Identifies one column of the per-family model.
///
/// `set` indexes the family's nodes, `partition` its partitions, `arc` the
/// bidirected view.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VariableKey {
    /// f: set `set` routes flow on arc `arc`.
    Flow { arc: usize, set: usize },
    /// ŷ: set `set` starts sharing a path at `node`.
    Start { node: NodeId, set: usize },
    /// ȳ: set `set` stops sharing a path at `node`.
    End { node: NodeId, set: usize },
    /// w: partition `partition` is performed at `node`.
    Split { node: NodeId, partition: usize },
}

/// Column arithmetic for a model over `n` nodes, `m` arcs, `sets` family
/// sets and `partitions` partitions. Columns are laid out as all f
/// (set-major), then ŷ, then ȳ, then w.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VariableLayout {
    pub nodes: usize,
    pub arcs: usize,
    pub sets: usize,
    pub partitions: usize,
}

impl VariableLayout {
    fn start_base(&self) -> usize {
        self.arcs * self.sets
    }

    fn end_base(&self) -> usize {
        self.start_base() + self.nodes * self.sets
    }

    fn split_base(&self) -> usize {
        self.end_base() + self.nodes * self.sets
    }

    pub fn column_count(&self) -> usize {
        self.split_base() + self.nodes * self.partitions
    }

    pub fn column(&self, key: VariableKey) -> usize {
        match key {
            VariableKey::Flow { arc, set } => set * self.arcs + arc,
            VariableKey::Start { node, set } => self.start_base() + set * self.nodes + node,
            VariableKey::End { node, set } => self.end_base() + set * self.nodes + node,
            VariableKey::Split { node, partition } => {
                self.split_base() + partition * self.nodes + node
            }
        }
    }

    pub fn key(&self, column: usize) -> VariableKey {
        assert!(column < self.column_count(), "column {column} out of range");
        let n = self.nodes;
        if column < self.start_base() {
            VariableKey::Flow {
                arc: column % self.arcs,
                set: column / self.arcs,
            }
        } else if column < self.end_base() {
            let c = column - self.start_base();
            VariableKey::Start {
                node: c % n,
                set: c / n,
            }
        } else if column < self.split_base() {
            let c = column - self.end_base();
            VariableKey::End {
                node: c % n,
                set: c / n,
            }
        } else {
            let c = column - self.split_base();
            VariableKey::Split {
                node: c % n,
                partition: c / n,
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModelSize {
    pub variables: usize,
    /// Explicit equality rows: flow conservation, set end, child start and
    /// split-once constraints.
    pub rows: usize,
    /// Root start and commodity sink constraints, stored as bound fixings.
    pub fixings: usize,
}

impl ModelSize {
    pub fn constraints(&self) -> usize {
        self.rows + self.fixings
    }
}

/// Closed-form size of the model for a full-binary family with `b`
/// commodities on `n` nodes and `m` arcs.
pub fn expected_size(n: usize, m: usize, b: usize) -> ModelSize {
    let sets = 2 * b - 1;
    let parts = b - 1;
    ModelSize {
        variables: m * sets + 2 * n * sets + n * parts,
        rows: n * sets + n * parts + 2 * n * parts + parts,
        fixings: n + n * b,
    }
}

/// The model of one laminar family together with its origin.
#[derive(Debug, Clone)]
pub struct FamilyLp {
    pub model: LpModel,
    pub layout: VariableLayout,
    pub family_id: FamilyId,
    pub family: String,
    pub root: NodeId,
    pub sinks: Vec<NodeId>,
    pub fixings: usize,
}

impl FamilyLp {
    pub fn size(&self) -> ModelSize {
        ModelSize {
            variables: self.model.column_count(),
            rows: self.model.row_count(),
            fixings: self.fixings,
        }
    }
}

/// Sinks `t_k` of the commodities `K = R \ {root}`, in terminal input order.
pub fn commodity_sinks(g: &Instance, root: NodeId) -> Result<Vec<NodeId>, LpError> {
    if !g.is_terminal(root) {
        return Err(LpError::RootNotTerminal(root));
    }
    Ok(g.terminals()
        .iter()
        .copied()
        .filter(|&t| t != root)
        .collect())
}

/// Builds the linear relaxation of the per-family integer program.
///
/// Rows, in order:
/// - flow conservation `Σ_{δ⁺(i)} f − Σ_{δ⁻(i)} f = ŷ_i − ȳ_i` for every set
///   and node;
/// - `w^p_i = ȳ^s_i` for every split set `s` with partition `p`;
/// - `w^p_i = ŷ^c_i` for every child `c` of `p`;
/// - `Σ_i w^p_i = 1` for every partition.
///
/// The root set starting at `root` and every singleton `{k}` ending at
/// `t_k` are encoded as fixed bounds. All remaining bounds are `[0, 1]`.
pub fn build_lp(
    g: &Instance,
    view: &BidirectedView,
    root: NodeId,
    family: &LaminarFamily,
) -> Result<FamilyLp, LpError> {
    let sinks = commodity_sinks(g, root)?;
    if sinks.len() != family.commodity_count() {
        return Err(LpError::CommodityMismatch {
            family: family.commodity_count(),
            instance: sinks.len(),
        });
    }
    let n = g.node_count();
    let layout = VariableLayout {
        nodes: n,
        arcs: view.arc_count(),
        sets: family.nodes().len(),
        partitions: family.partition_count(),
    };
    let mut model = LpModel::default();

    for set in 0..layout.sets {
        for (a, arc) in view.arcs().iter().enumerate() {
            model.add_column(format!("f_a{a}_s{set}"), 0.0, 1.0, arc.cost);
        }
    }
    let mut fixings = 0;
    for set in 0..layout.sets {
        for i in 0..n {
            let (lo, hi) = if set == 0 {
                fixings += 1;
                let v = if i == root { 1.0 } else { 0.0 };
                (v, v)
            } else {
                (0.0, 1.0)
            };
            model.add_column(format!("ys_v{}_s{set}", i + 1), lo, hi, 0.0);
        }
    }
    for (set, node) in family.nodes().iter().enumerate() {
        for i in 0..n {
            let (lo, hi) = if node.is_leaf() {
                fixings += 1;
                let k = node.set.lowest().expect("nonempty leaf");
                let v = if i == sinks[k] { 1.0 } else { 0.0 };
                (v, v)
            } else {
                (0.0, 1.0)
            };
            model.add_column(format!("ye_v{}_s{set}", i + 1), lo, hi, 0.0);
        }
    }
    for p in 0..layout.partitions {
        for i in 0..n {
            model.add_column(format!("w_v{}_p{p}", i + 1), 0.0, 1.0, 0.0);
        }
    }
    debug_assert_eq!(model.column_count(), layout.column_count());

    let col = |key| layout.column(key);
    for set in 0..layout.sets {
        for i in 0..n {
            let mut coeffs: Vec<(usize, f64)> = Vec::new();
            coeffs.extend(
                view.out_arcs(i)
                    .iter()
                    .map(|&arc| (col(VariableKey::Flow { arc, set }), 1.0)),
            );
            coeffs.extend(
                view.in_arcs(i)
                    .iter()
                    .map(|&arc| (col(VariableKey::Flow { arc, set }), -1.0)),
            );
            coeffs.push((col(VariableKey::Start { node: i, set }), -1.0));
            coeffs.push((col(VariableKey::End { node: i, set }), 1.0));
            model.add_row(format!("flow_v{}_s{set}", i + 1), coeffs, 0.0);
        }
    }
    for (p, part) in family.partitions().enumerate() {
        for i in 0..n {
            let coeffs = vec![
                (
                    col(VariableKey::Split {
                        node: i,
                        partition: p,
                    }),
                    1.0,
                ),
                (
                    col(VariableKey::End {
                        node: i,
                        set: part.node,
                    }),
                    -1.0,
                ),
            ];
            model.add_row(format!("end_v{}_s{}", i + 1, part.node), coeffs, 0.0);
        }
    }
    for (p, part) in family.partitions().enumerate() {
        for &child in part.children {
            for i in 0..n {
                let coeffs = vec![
                    (
                        col(VariableKey::Split {
                            node: i,
                            partition: p,
                        }),
                        1.0,
                    ),
                    (
                        col(VariableKey::Start {
                            node: i,
                            set: child,
                        }),
                        -1.0,
                    ),
                ];
                model.add_row(format!("start_v{}_s{child}", i + 1), coeffs, 0.0);
            }
        }
    }
    for p in 0..layout.partitions {
        let coeffs = (0..n)
            .map(|i| {
                (
                    col(VariableKey::Split {
                        node: i,
                        partition: p,
                    }),
                    1.0,
                )
            })
            .collect();
        model.add_row(format!("split_p{p}"), coeffs, 1.0);
    }

    Ok(FamilyLp {
        model,
        layout,
        family_id: family.id(),
        family: family.encoding(),
        root,
        sinks,
        fixings,
    })
}

/// The model with every occurrence of 1 on a right-hand side or bound
/// replaced by `lambda`.
///
/// All other right-hand sides and bounds of the per-family model are zero,
/// so this scales them uniformly.
pub fn scale_rhs(model: &LpModel, lambda: f64) -> Result<LpModel, LpError> {
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(LpError::BadScale(lambda));
    }
    let mut scaled = model.clone();
    for row in &mut scaled.rows {
        row.rhs *= lambda;
    }
    for c in &mut scaled.columns {
        c.lower *= lambda;
        c.upper *= lambda;
    }
    Ok(scaled)
}
