//! Generates a desk-scale benchmark, mines it around two concerned
//! attributes and prints Q.
//!
//! ```text
//! cargo run --release --example mine_benchmark -- [mu] [pi] [seeds] [numerical|binary|categorical]
//! ```

use std::time::Instant;

use orgmine::benchgen::{self, BenchmarkParams};
use orgmine::{eval, pipeline, AttributeKind, MineConfig};

fn main() -> orgmine::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let arg = |i: usize, default: &str| args.get(i).cloned().unwrap_or_else(|| default.to_string());
    let mu: f64 = arg(0, "0.2").parse().expect("mu");
    let pi: f64 = arg(1, "10").parse().expect("pi");
    let seeds: u64 = arg(2, "3").parse().expect("seeds");
    let kind = match arg(3, "numerical").as_str() {
        "binary" => AttributeKind::Binary,
        "categorical" => AttributeKind::Categorical,
        _ => AttributeKind::Numerical,
    };

    let mut config = MineConfig::default();
    config.seeding.pi = pi;
    let mut total = 0.0;
    for seed in 0..seeds {
        let params = BenchmarkParams {
            mu,
            kind,
            rng_seed: seed,
            ..BenchmarkParams::desk_scale()
        };
        let bench = benchgen::generate(&params)?;
        let concerned = benchgen::pick_concerned(&bench.truth, 2, seed)?;
        let started = Instant::now();
        let org = pipeline::mine(&bench.graph, &concerned, &config)?;
        let elapsed = started.elapsed();
        let report = eval::evaluate_organization(&bench.truth, &org)?;
        let stats = &org.provenance.stats;
        println!(
            "seed {seed}: Q {:.4}  truth {}  pairs {}  seeds {}  skipped {}  discarded {}  subspace J {:.3}  {:.2?}",
            report.q,
            report.truth_count,
            org.len(),
            stats.seeds,
            stats.skipped_visited,
            stats.discarded_subspace,
            report.subspace_jaccard.unwrap_or(0.0),
            elapsed
        );
        total += report.q;
    }
    println!("mean Q {:.4}", total / seeds as f64);
    Ok(())
}
