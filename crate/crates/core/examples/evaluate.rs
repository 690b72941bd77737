//! Scores a mined organization against the planted one with the Q
//! indicator, and shows the per-community best matches.

use orgmine::benchgen::{self, BenchmarkParams};
use orgmine::{eval, pipeline, MineConfig};

fn main() -> orgmine::Result<()> {
    let bench = benchgen::generate(&BenchmarkParams::desk_scale())?;
    let concerned = benchgen::pick_concerned(&bench.truth, 2, 0)?;
    let mut config = MineConfig::default();
    config.seeding.pi = 10.0;
    let organization = pipeline::mine(&bench.graph, &concerned, &config)?;

    let report = eval::evaluate_organization(&bench.truth, &organization)?;
    println!(
        "Q = {:.4} over {} planted communities containing {concerned}",
        report.q, report.truth_count
    );
    for m in &report.per_truth_best {
        match m.detected {
            Some(j) => println!(
                "  planted #{} ({} members): best F1 {:.3} with mined #{j} ({} members)",
                m.truth,
                report_size(&bench, &concerned, m.truth),
                m.best_f1,
                organization.pairs[j].community.len()
            ),
            None => println!("  planted #{}: nothing mined", m.truth),
        }
    }
    if let Some(j) = report.subspace_jaccard {
        println!("mean subspace Jaccard of matched pairs {j:.3}");
    }

    // The same indicator on plain community lists.
    let truth = eval::ground_truth_organization(&bench.truth, concerned.dims());
    let half: Vec<_> = truth.iter().step_by(2).cloned().collect();
    println!(
        "Q of every other planted community: {:.3}",
        eval::quality_q(&truth, &half)?.q
    );
    println!("\n{}", report.to_json());
    Ok(())
}

fn report_size(bench: &benchgen::Benchmark, concerned: &orgmine::Subspace, index: usize) -> usize {
    eval::ground_truth_organization(&bench.truth, concerned.dims())[index].len()
}
