//! The redundancy relation and the greedy diversity filter on a handful of
//! hand-made pairs.

use orgmine::pipeline::{is_redundant, select_diverse, OrganizationPair};
use orgmine::{DiversityConfig, Subspace};

fn main() -> orgmine::Result<()> {
    let pair = |members: &[usize], dims: &[usize], fitness| -> orgmine::Result<OrganizationPair> {
        Ok(OrganizationPair::new(
            members.to_vec(),
            Subspace::new(dims.iter().copied(), 6)?,
            fitness,
        ))
    };
    let pairs = vec![
        pair(&[0, 1, 2, 3], &[0, 1], 0.90)?,
        // same people, nearly the same dimensions, less fit: redundant
        pair(&[0, 1, 2, 3, 4], &[0, 1, 2], 0.85)?,
        // same people, different dimensions: a different view, kept
        pair(&[0, 1, 2, 3], &[3, 4, 5], 0.80)?,
        // different people: kept
        pair(&[7, 8, 9], &[0, 1], 0.70)?,
        // exact duplicate of the first
        pair(&[0, 1, 2, 3], &[0, 1], 0.90)?,
    ];
    let diversity = DiversityConfig {
        beta_c: 0.5,
        beta_d: 0.5,
    };
    println!(
        "second redundant w.r.t. first: {}",
        is_redundant(&pairs[1], &pairs[0], &diversity)
    );
    println!(
        "third redundant w.r.t. first: {}",
        is_redundant(&pairs[2], &pairs[0], &diversity)
    );
    for kept in select_diverse(pairs, &diversity) {
        println!(
            "kept {:?} on {} (fitness {})",
            kept.community, kept.subspace, kept.fitness
        );
    }
    Ok(())
}
