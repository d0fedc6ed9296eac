//! Exact Steiner trees by decomposition over laminar families.
//!
//! Rooting the problem at a terminal `r` turns it into routing one unit of
//! flow from `r` to each other terminal. Which commodities share which path
//! segments is a laminar family; with the family fixed, the subproblem has
//! an integral linear relaxation and a simple combinatorial solution. The
//! cheapest subproblem over all full binary families gives a minimum
//! Steiner tree.
//!
//! ```
//! use steiner_laminar::{parse_stp, solve_instance, SolveOptions};
//!
//! let g = parse_stp(
//!     "SECTION Graph\nNodes 4\nEdges 3\nE 1 4 1\nE 2 4 1\nE 3 4 1\nEND\n\
//!      SECTION Terminals\nTerminals 3\nT 1\nT 2\nT 3\nEND\nEOF\n",
//! )
//! .unwrap();
//! let report = solve_instance(&g, &SolveOptions::default()).unwrap();
//! assert_eq!(report.optimal_cost, 3.0);
//! assert_eq!(report.families_solved, 1);
//! ```

pub mod dp;
pub mod driver;
pub mod graph;
pub mod laminar;
pub mod lp;
pub mod oracle;
pub mod random;
pub mod simplex;
pub mod solution;
pub mod tree;

pub use driver::{solve_instance, Backend, SolveError, SolveOptions, SolveReport};
pub use graph::{parse_stp, Instance};
pub use laminar::{count_families, enumerate_families, family_by_id, LaminarFamily};
