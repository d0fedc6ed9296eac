//! Decomposition over laminar families.
//!
//! Every full binary family over `K = R \ {root}` is solved independently,
//! results are folded with an associative minimum keyed by
//! `(objective, family id)`, and the winner is mapped to the original graph
//! and pruned to a Steiner tree.

use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use crate::dp::solve_family;
use crate::graph::{BidirectedView, DistanceOracle, Instance, NodeId};
use crate::laminar::{count_families, family_by_id, FamilyId, LaminarError, LaminarFamily};
use crate::lp::{build_lp, LpError};
use crate::simplex::{solve_with, LpStatus, SimplexError, SolverConfig};
use crate::solution::{SolutionError, SubproblemSolution};
use crate::tree::{extract_steiner_tree, indicator_cost, phi, SteinerTree, TreeError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    /// Split-node dynamic program over shortest paths.
    #[default]
    Dp,
    /// Simplex on the linear relaxation, read back as a 0/1 solution.
    Lp,
}

impl std::fmt::Display for Backend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Backend::Dp => "dp",
            Backend::Lp => "lp",
        })
    }
}

impl std::str::FromStr for Backend {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "dp" => Ok(Backend::Dp),
            "lp" => Ok(Backend::Lp),
            _ => Err(format!("unknown backend `{s}` (expected dp or lp)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    /// Defaults to the first terminal in input order.
    pub root: Option<NodeId>,
    pub backend: Backend,
    /// Worker count; `0` lets the pool pick.
    pub threads: usize,
    pub keep_all: bool,
    pub solver: SolverConfig,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            root: None,
            backend: Backend::Dp,
            threads: 0,
            keep_all: false,
            solver: SolverConfig::default(),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SolveError {
    #[error(transparent)]
    Laminar(#[from] LaminarError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("family {family}: {source}")]
    Simplex {
        family: FamilyId,
        source: SimplexError,
    },
    #[error("family {family}: relaxation is {status:?}")]
    Status { family: FamilyId, status: LpStatus },
    #[error("family {family}: {source}")]
    Solution {
        family: FamilyId,
        source: SolutionError,
    },
    #[error("family {family}: {source}")]
    Tree { family: FamilyId, source: TreeError },
    #[error("cannot build worker pool: {0}")]
    Pool(String),
}

/// Outcome of one family's subproblem.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilyResult {
    pub family_id: FamilyId,
    pub family: String,
    pub objective: f64,
    /// Cost of the edge image of the solution; never above `objective`.
    pub phi_cost: f64,
    /// Cost of the pruned Steiner tree inside that image.
    pub tree_cost: f64,
    pub seconds: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimeStats {
    pub mean: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    pub instance: String,
    /// 1-based.
    pub root: usize,
    pub backend: Backend,
    pub terminals: usize,
    pub families_solved: u64,
    pub best_family: FamilyId,
    pub best_structure: String,
    pub best_objective: f64,
    pub optimal_cost: f64,
    /// `(u, v, cost)` with 1-based nodes, ascending edge index.
    pub tree_edges: Vec<(usize, usize, f64)>,
    pub per_family_time_stats: TimeStats,
    pub total_time: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub families: Option<Vec<FamilyResult>>,
    #[serde(skip)]
    pub tree: SteinerTree,
}

/// Solves the subproblem of one family with the chosen backend.
pub fn solve_subproblem(
    g: &Instance,
    view: &BidirectedView,
    oracle: &DistanceOracle<'_>,
    root: NodeId,
    family: &LaminarFamily,
    backend: Backend,
    solver: &SolverConfig,
) -> Result<SubproblemSolution, SolveError> {
    match backend {
        Backend::Dp => Ok(solve_family(g, oracle, root, family)?),
        Backend::Lp => {
            let id = family.id();
            let lp = build_lp(g, view, root, family)?;
            let sol = solve_with(&lp.model, solver)
                .map_err(|source| SolveError::Simplex { family: id, source })?;
            if sol.status != LpStatus::Optimal {
                return Err(SolveError::Status {
                    family: id,
                    status: sol.status,
                });
            }
            SubproblemSolution::from_lp_point(&lp, view, &sol.values, solver.tolerances.integrality)
                .map_err(|source| SolveError::Solution { family: id, source })
        }
    }
}

struct Best {
    objective: f64,
    id: FamilyId,
    solution: SubproblemSolution,
    tree: SteinerTree,
}

fn better(a: Best, b: Best) -> Best {
    match a.objective.total_cmp(&b.objective).then(a.id.cmp(&b.id)) {
        std::cmp::Ordering::Greater => b,
        _ => a,
    }
}

#[derive(Default)]
struct Fold {
    best: Option<Best>,
    solved: u64,
    time_sum: Duration,
    time_max: Duration,
    all: Vec<FamilyResult>,
}

impl Fold {
    fn merge(mut self, other: Fold) -> Fold {
        self.best = match (self.best, other.best) {
            (Some(a), Some(b)) => Some(better(a, b)),
            (a, b) => a.or(b),
        };
        self.solved += other.solved;
        self.time_sum += other.time_sum;
        self.time_max = self.time_max.max(other.time_max);
        self.all.extend(other.all);
        self
    }
}

/// Runs the decomposition on `g`.
///
/// The result does not depend on the worker count: ties between equally
/// good families go to the lowest family id.
pub fn solve_instance(g: &Instance, options: &SolveOptions) -> Result<SolveReport, SolveError> {
    let started = Instant::now();
    let root = options.root.unwrap_or(g.terminals()[0]);
    if !g.is_terminal(root) {
        return Err(LpError::RootNotTerminal(root).into());
    }
    let b = g.terminals().len() - 1;
    let view = g.bidirect();
    let oracle = DistanceOracle::new(&view);

    let report = |fold: Fold, tree: SteinerTree, best: (FamilyId, String, f64)| {
        let mean = if fold.solved == 0 {
            0.0
        } else {
            fold.time_sum.as_secs_f64() / fold.solved as f64
        };
        let mut families = fold.all;
        families.sort_by_key(|f| f.family_id);
        SolveReport {
            instance: g.name().unwrap_or("unnamed").to_owned(),
            root: root + 1,
            backend: options.backend,
            terminals: g.terminals().len(),
            families_solved: fold.solved,
            best_family: best.0,
            best_structure: best.1,
            best_objective: best.2,
            optimal_cost: tree.cost,
            tree_edges: tree.edge_list(g),
            per_family_time_stats: TimeStats {
                mean,
                max: fold.time_max.as_secs_f64(),
            },
            total_time: started.elapsed().as_secs_f64(),
            families: options.keep_all.then_some(families),
            tree,
        }
    };

    if b == 0 {
        let tree = SteinerTree {
            edges: Vec::new(),
            cost: 0.0,
            steiner_nodes: Vec::new(),
        };
        return Ok(report(Fold::default(), tree, (0, String::new(), 0.0)));
    }

    let count = count_families(b)?;
    family_by_id(b, 0)?;
    let count = u64::try_from(count).map_err(|_| LaminarError::Overflow(b))?;

    let run_one = |id: FamilyId| -> Result<Fold, SolveError> {
        let t0 = Instant::now();
        let family = family_by_id(b, id)?;
        let solution = solve_subproblem(
            g,
            &view,
            &oracle,
            root,
            &family,
            options.backend,
            &options.solver,
        )?;
        let chi = phi(&solution, &view, g.edges().len());
        let tree = extract_steiner_tree(&chi, g)
            .map_err(|source| SolveError::Tree { family: id, source })?;
        let elapsed = t0.elapsed();
        let mut all = Vec::new();
        if options.keep_all {
            all.push(FamilyResult {
                family_id: id,
                family: solution.family.clone(),
                objective: solution.objective,
                phi_cost: indicator_cost(&chi, g),
                tree_cost: tree.cost,
                seconds: elapsed.as_secs_f64(),
            });
        }
        Ok(Fold {
            best: Some(Best {
                objective: solution.objective,
                id,
                solution,
                tree,
            }),
            solved: 1,
            time_sum: elapsed,
            time_max: elapsed,
            all,
        })
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(options.threads)
        .build()
        .map_err(|e| SolveError::Pool(e.to_string()))?;
    let fold = pool.install(|| {
        (0..count)
            .into_par_iter()
            .map(run_one)
            .try_reduce(Fold::default, |a, b| Ok(a.merge(b)))
    })?;

    let mut fold = fold;
    let best = fold.best.take().expect("at least one family");
    Ok(report(
        fold,
        best.tree,
        (best.id, best.solution.family, best.objective),
    ))
}
