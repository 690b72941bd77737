//! Mining community organizations around concerned attributes.
//!
//! Given an attributed network and a set of *concerned* attribute
//! dimensions, `orgmine` finds communities together with the attribute
//! subspaces they are embedded in, where every subspace contains the
//! concerned dimensions. Communities and subspaces are grown from seeds by
//! alternating greedy hill climbing on a kernel-weighted fitness, then
//! filtered into a diverse, non-redundant organization.
//!
//! The crate also ships an LFR-style generator for attributed benchmarks
//! with planted communities and subspaces, and the F1-based `Q` indicator
//! used to score a mined organization against the planted one.
//!
//! ```no_run
//! use orgmine::{benchgen, eval, pipeline};
//!
//! let params = benchgen::BenchmarkParams::desk_scale();
//! let bench = benchgen::generate(&params).unwrap();
//! let concerned = benchgen::pick_concerned(&bench.truth, 2, 1).unwrap();
//! let org = pipeline::mine(&bench.graph, &concerned, &pipeline::MineConfig::default()).unwrap();
//! let truth = eval::ground_truth_organization(&bench.truth, concerned.dims());
//! let report = eval::quality_q(&truth, &org.communities()).unwrap();
//! println!("Q = {:.3}", report.q);
//! ```

pub mod benchgen;
pub mod cli;
pub mod error;
pub mod eval;
pub mod graph;
pub mod kernel;
pub mod pipeline;
pub mod search;
pub mod seeding;

pub use error::{Error, Result};
pub use graph::{AttributeKind, AttributeSchema, AttributedGraph, Dimension, NodeId};
pub use kernel::{CommunityState, KernelConfig, Subspace, Toggle, WeightedView};
pub use pipeline::{DiversityConfig, MineConfig, Organization, OrganizationPair};
pub use seeding::SeedingConfig;

/// Jaccard index of two sorted, duplicate-free slices. Two empty sets
/// have index 1.
pub fn jaccard_sorted<T: Ord>(a: &[T], b: &[T]) -> f64 {
    let inter = intersection_size(a, b);
    let union = a.len() + b.len() - inter;
    if union == 0 {
        1.0
    } else {
        inter as f64 / union as f64
    }
}

/// Size of the intersection of two sorted, duplicate-free slices.
pub fn intersection_size<T: Ord>(a: &[T], b: &[T]) -> usize {
    let (mut i, mut j, mut count) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                count += 1;
                i += 1;
                j += 1;
            }
        }
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jaccard_of_sorted_slices() {
        assert_eq!(jaccard_sorted(&[1, 2, 3], &[2, 3, 4]), 0.5);
        assert_eq!(jaccard_sorted(&[1, 2], &[3]), 0.0);
        assert_eq!(jaccard_sorted::<u8>(&[], &[]), 1.0);
    }
}
