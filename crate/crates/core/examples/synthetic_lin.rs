//! Writes seeded random instances with the dimensions of SteinLib lin01
//! (53 nodes, 80 edges, 4 terminals) and lin02 (55 nodes, 82 edges,
//! 6 terminals).
//!
//! ```text
//! cargo run -p steiner-laminar --example synthetic_lin -- data/synthetic
//! ```

use std::path::PathBuf;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use steiner_laminar::random::{random_instance, RandomSpec};

fn main() -> std::io::Result<()> {
    let dir = PathBuf::from(
        std::env::args()
            .nth(1)
            .unwrap_or_else(|| "data/synthetic".into()),
    );
    std::fs::create_dir_all(&dir)?;
    for (name, seed, nodes, edges, terminals) in [
        ("lin01-like", 101, 53, 80, 4),
        ("lin02-like", 102, 55, 82, 6),
    ] {
        let mut spec = RandomSpec::new(nodes, edges - (nodes - 1), terminals);
        spec.max_cost = 100;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // Redraw until no extra edge was a duplicate.
        let g = loop {
            let g = random_instance(&mut rng, &spec);
            if g.edges().len() == edges {
                break g.with_name(name);
            }
        };
        std::fs::write(dir.join(format!("{name}.stp")), g.to_stp())?;
    }
    Ok(())
}
