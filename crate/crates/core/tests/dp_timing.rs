use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use steiner_laminar::dp::solve_family;
use steiner_laminar::graph::DistanceOracle;
use steiner_laminar::laminar::family_by_id;
use steiner_laminar::random::{random_instance, RandomSpec};

#[test]
fn subproblem_at_320_nodes_is_sub_second() {
    let g = random_instance(
        &mut ChaCha8Rng::seed_from_u64(320),
        &RandomSpec::new(320, 320, 8),
    );
    let view = g.bidirect();
    for id in [0, 5_000, 10_394] {
        let family = family_by_id(7, id).unwrap();
        // Includes filling the all-pairs distance cache.
        let oracle = DistanceOracle::new(&view);
        let t0 = Instant::now();
        let sol = solve_family(&g, &oracle, g.terminals()[0], &family).unwrap();
        let elapsed = t0.elapsed();
        assert!(sol.objective.is_finite());
        assert!(elapsed < Duration::from_secs(1), "family {id}: {elapsed:?}");
    }
}
