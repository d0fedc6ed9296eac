//! Seven-node graph where the sets {k2} and {k3} of family ((k1,k2),k3)
//! travel the same edge h–x, so the edge image of that solution is cheaper
//! than its objective and contains a tree of the other shape (k1,(k2,k3)).
//!
//! ```text
//!   r(1) --1-- h(2) --1-- t1(4)
//!               |  \
//!               3    7
//!               |     \
//!             x(3)    y(7) --2-- t2(5)
//!             /  \
//!            1    1
//!           /      \
//!        t2(5)    t3(6)
//! ```

use steiner_laminar::dp::solve_family;
use steiner_laminar::driver::{solve_subproblem, Backend};
use steiner_laminar::graph::{DistanceOracle, Edge, Instance};
use steiner_laminar::laminar::family_by_id;
use steiner_laminar::simplex::SolverConfig;
use steiner_laminar::tree::{extract_steiner_tree, indicator_cost, phi};
use steiner_laminar::{solve_instance, SolveOptions};

fn graph() -> Instance {
    let e = |u: usize, v: usize, cost: f64| Edge {
        u: u - 1,
        v: v - 1,
        cost,
    };
    Instance::new(
        7,
        vec![
            e(1, 2, 1.0),
            e(2, 4, 1.0),
            e(2, 3, 3.0),
            e(3, 5, 1.0),
            e(3, 6, 1.0),
            e(2, 7, 7.0),
            e(7, 5, 2.0),
        ],
        vec![0, 3, 4, 5],
    )
    .unwrap()
}

#[test]
fn family_encodings() {
    let names: Vec<_> = (0..3)
        .map(|id| family_by_id(3, id).unwrap().encoding())
        .collect();
    assert_eq!(names, ["((k1,k2),k3)", "((k1,k3),k2)", "(k1,(k2,k3))"]);
}

#[test]
fn shared_subpath_favors_the_matching_family() {
    let g = graph();
    let view = g.bidirect();
    let oracle = DistanceOracle::new(&view);
    let l1 = solve_family(&g, &oracle, 0, &family_by_id(3, 0).unwrap()).unwrap();
    let l2 = solve_family(&g, &oracle, 0, &family_by_id(3, 1).unwrap()).unwrap();
    let l3 = solve_family(&g, &oracle, 0, &family_by_id(3, 2).unwrap()).unwrap();
    // l1: r–h, then t1 directly and t2, t3 each through h–x: 1 + 1 + 4 + 4.
    assert_eq!(l1.objective, 10.0);
    assert_eq!(l2.objective, 10.0);
    // l3: r–h, t1, then {k2,k3} together over h–x: 1 + 1 + 3 + 1 + 1.
    assert_eq!(l3.objective, 7.0);
    assert!(l3.objective <= l1.objective);
    assert_eq!(l3.splits, vec![1, 2]);

    let config = SolverConfig::default();
    for (id, dp) in [(0, &l1), (1, &l2), (2, &l3)] {
        let family = family_by_id(3, id).unwrap();
        let lp = solve_subproblem(&g, &view, &oracle, 0, &family, Backend::Lp, &config).unwrap();
        assert!((lp.objective - dp.objective).abs() < 1e-9);
    }
}

#[test]
fn edge_image_collapses_overlap() {
    let g = graph();
    let view = g.bidirect();
    let oracle = DistanceOracle::new(&view);
    let l1 = solve_family(&g, &oracle, 0, &family_by_id(3, 0).unwrap()).unwrap();
    let chi = phi(&l1, &view, g.edges().len());
    assert_eq!(chi, [true, true, true, true, true, false, false]);
    assert_eq!(indicator_cost(&chi, &g), 7.0);
    assert!(indicator_cost(&chi, &g) < l1.objective);

    let tree = extract_steiner_tree(&chi, &g).unwrap();
    tree.validate(&g).unwrap();
    assert_eq!(tree.cost, 7.0);
    assert_eq!(tree.structure(&g, 0).unwrap().encoding(), "(k1,(k2,k3))");
    assert_eq!(
        tree.structure(&g, 0).unwrap().encoding(),
        family_by_id(3, 2).unwrap().encoding()
    );
}

#[test]
fn decomposition_picks_the_cheapest_family() {
    let g = graph();
    let r = solve_instance(&g, &SolveOptions::default()).unwrap();
    assert_eq!(r.families_solved, 3);
    assert_eq!(r.best_family, 2);
    assert_eq!(r.optimal_cost, 7.0);
}
