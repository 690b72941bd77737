//! Q as the mixing parameter grows, averaged over a few benchmark seeds;
//! a library-level version of `orgmine sweep --param mu`.
//!
//! ```text
//! cargo run --release --example sweep_mixing -- [seeds]
//! ```

use std::time::Instant;

use orgmine::benchgen::{self, BenchmarkParams};
use orgmine::{eval, pipeline, MineConfig};

fn main() -> orgmine::Result<()> {
    let seeds: u64 = std::env::args()
        .nth(1)
        .map_or(Ok(3), |s| s.parse())
        .expect("seeds is a number");
    let mut config = MineConfig::default();
    config.seeding.pi = 10.0;

    println!("{:>5} {:>8} {:>10}", "mu", "mean Q", "mean time");
    for mu in [0.1, 0.2, 0.3, 0.4, 0.5] {
        let (mut q, mut seconds) = (0.0, 0.0);
        for seed in 0..seeds {
            let params = BenchmarkParams {
                mu,
                rng_seed: seed,
                ..BenchmarkParams::desk_scale()
            };
            let bench = benchgen::generate(&params)?;
            let concerned = benchgen::pick_concerned(&bench.truth, 2, seed)?;
            let started = Instant::now();
            let organization = pipeline::mine(&bench.graph, &concerned, &config)?;
            seconds += started.elapsed().as_secs_f64();
            q += eval::evaluate_organization(&bench.truth, &organization)?.q;
        }
        println!("{mu:>5} {:>8.4} {:>9.3}s", q / seeds as f64, seconds / seeds as f64);
    }
    Ok(())
}
