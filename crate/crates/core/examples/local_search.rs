//! Grows one community-subspace pair from a seed by alternating node and
//! dimension hill climbing, and prints the fitness after every move.

use orgmine::benchgen::{self, BenchmarkParams};
use orgmine::eval::f1;
use orgmine::search::{converge_pair, SearchConfig};
use orgmine::KernelConfig;

fn main() -> orgmine::Result<()> {
    let bench = benchgen::generate(&BenchmarkParams::desk_scale())?;
    let concerned = benchgen::pick_concerned(&bench.truth, 2, 0)?;
    let planted = bench
        .truth
        .communities
        .iter()
        .zip(&bench.truth.subspaces)
        .position(|(_, s)| s.contains_all(concerned.dims()))
        .expect("pick_concerned draws from a planted subspace");
    let target = &bench.truth.communities[planted];

    // Start from three members of the planted community.
    let seed = &target[..3];
    let outcome = converge_pair(
        &bench.graph,
        seed,
        &concerned,
        KernelConfig::default(),
        &SearchConfig::default(),
    )?;
    println!("seed {seed:?}, start subspace {concerned}");
    let steps: Vec<String> = outcome.trace.iter().map(|f| format!("{f:.3}")).collect();
    println!("fitness after each move: {}", steps.join(" "));
    println!(
        "converged after {} alternations: {} members on {}, fitness {:.4}",
        outcome.iterations,
        outcome.community.len(),
        outcome.subspace,
        outcome.fitness
    );
    println!(
        "planted community has {} members on {}; F1 {:.3}",
        target.len(),
        bench.truth.subspaces[planted],
        f1(target, &outcome.community)
    );
    Ok(())
}
