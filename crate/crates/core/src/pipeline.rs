//! End-to-end mining of a diverse community organization.

use std::cmp::Ordering;

use log::{debug, info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{AttributedGraph, NodeId};
use crate::kernel::{KernelConfig, Subspace};
use crate::search::{AdjustOutcome, SearchConfig, SearchContext};
use crate::seeding::{construct_seeds, SeedingConfig};

/// Redundancy thresholds on community and subspace Jaccard overlap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiversityConfig {
    pub beta_c: f64,
    pub beta_d: f64,
}

impl Default for DiversityConfig {
    fn default() -> Self {
        DiversityConfig {
            beta_c: 0.5,
            beta_d: 0.5,
        }
    }
}

impl DiversityConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, beta) in [("beta_c", self.beta_c), ("beta_d", self.beta_d)] {
            if !(0.0..=1.0).contains(&beta) {
                return Err(Error::Config(format!("{name} must lie in [0, 1], got {beta}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MineConfig {
    pub seeding: SeedingConfig,
    pub diversity: DiversityConfig,
    pub kernel: KernelConfig,
    pub search: SearchConfig,
    /// Converge seeds concurrently. Disables the visited-node shortcut,
    /// which depends on processing order.
    pub parallel: bool,
}

impl MineConfig {
    pub fn validate(&self) -> Result<()> {
        self.seeding.validate()?;
        self.diversity.validate()?;
        self.kernel.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrganizationPair {
    /// Sorted member ids.
    pub community: Vec<NodeId>,
    pub subspace: Subspace,
    pub fitness: f64,
}

impl OrganizationPair {
    pub fn new(mut community: Vec<NodeId>, subspace: Subspace, fitness: f64) -> Self {
        community.sort_unstable();
        community.dedup();
        OrganizationPair {
            community,
            subspace,
            fitness,
        }
    }
}

impl From<AdjustOutcome> for OrganizationPair {
    fn from(outcome: AdjustOutcome) -> Self {
        OrganizationPair::new(outcome.community, outcome.subspace, outcome.fitness)
    }
}

/// Counters describing one mining run.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MineStats {
    pub seeds: usize,
    /// Seeds skipped because every node was already in a mined community.
    pub skipped_visited: usize,
    /// Converged pairs whose subspace lost a concerned dimension.
    pub discarded_subspace: usize,
    /// Converged pairs stopped by the alternation cap.
    pub capped: usize,
    /// Pairs entering the diversity filter.
    pub candidates: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub concerned: Subspace,
    pub config: MineConfig,
    pub stats: MineStats,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Organization {
    pub pairs: Vec<OrganizationPair>,
    pub provenance: Provenance,
}

impl Organization {
    pub fn communities(&self) -> Vec<Vec<NodeId>> {
        self.pairs.iter().map(|p| p.community.clone()).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }
}

/// `a` is redundant with respect to `b` when it is no fitter and overlaps
/// it by at least `beta_c` (members) and `beta_d` (dimensions).
pub fn is_redundant(a: &OrganizationPair, b: &OrganizationPair, diversity: &DiversityConfig) -> bool {
    a.fitness <= b.fitness
        && crate::jaccard_sorted(&a.community, &b.community) >= diversity.beta_c
        && a.subspace.jaccard(&b.subspace) >= diversity.beta_d
}

fn selection_order(a: &OrganizationPair, b: &OrganizationPair) -> Ordering {
    b.fitness
        .total_cmp(&a.fitness)
        .then(b.community.len().cmp(&a.community.len()))
        .then_with(|| a.community.cmp(&b.community))
        .then_with(|| a.subspace.cmp(&b.subspace))
}

/// Greedy diversity filter: fittest first, keep a pair unless it is
/// redundant with respect to a pair already kept.
pub fn select_diverse(mut pairs: Vec<OrganizationPair>, diversity: &DiversityConfig) -> Vec<OrganizationPair> {
    pairs.sort_by(selection_order);
    let mut kept: Vec<OrganizationPair> = Vec::new();
    for pair in pairs {
        if !kept.iter().any(|k| is_redundant(&pair, k, diversity)) {
            kept.push(pair);
        }
    }
    kept
}

/// Mines the organization of `graph` around the `concerned` dimensions.
pub fn mine(graph: &AttributedGraph, concerned: &Subspace, config: &MineConfig) -> Result<Organization> {
    config.validate()?;
    if concerned.dims().iter().any(|&d| d >= graph.attribute_count()) {
        return Err(Error::Subspace(format!(
            "concerned dimensions {concerned} exceed the schema's {} attributes",
            graph.attribute_count()
        )));
    }
    let seeds = construct_seeds(graph, concerned, &config.seeding)?;
    let mut stats = MineStats {
        seeds: seeds.len(),
        ..Default::default()
    };
    if seeds.is_empty() {
        warn!(
            "no community seeds for concerned dimensions {concerned}; a larger pi widens the backbone (now {})",
            config.seeding.pi
        );
    }
    let context = SearchContext::new(graph, config.kernel)?;

    let mut survivors = Vec::new();
    if config.parallel {
        let outcomes = seeds
            .par_iter()
            .map(|seed| context.converge(seed, concerned, &config.search))
            .collect::<Result<Vec<_>>>()?;
        for outcome in outcomes {
            stats.capped += outcome.capped as usize;
            if outcome.subspace.is_superset_of(concerned) {
                survivors.push(OrganizationPair::from(outcome));
            } else {
                stats.discarded_subspace += 1;
            }
        }
    } else {
        let mut visited = vec![false; graph.node_count()];
        for seed in &seeds {
            if seed.iter().all(|&v| visited[v]) {
                stats.skipped_visited += 1;
                continue;
            }
            let outcome = context.converge(seed, concerned, &config.search)?;
            stats.capped += outcome.capped as usize;
            if !outcome.subspace.is_superset_of(concerned) {
                stats.discarded_subspace += 1;
                continue;
            }
            for &v in &outcome.community {
                visited[v] = true;
            }
            survivors.push(OrganizationPair::from(outcome));
        }
    }

    stats.candidates = survivors.len();
    debug!("kernel scales computed for {} subspaces", context.cached_subspaces());
    let pairs = select_diverse(survivors, &config.diversity);
    info!(
        "{} seeds, {} skipped, {} discarded, {} candidates, {} pairs kept",
        stats.seeds,
        stats.skipped_visited,
        stats.discarded_subspace,
        stats.candidates,
        pairs.len()
    );
    Ok(Organization {
        pairs,
        provenance: Provenance {
            concerned: concerned.clone(),
            config: *config,
            stats,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(members: &[usize], dims: &[usize], fitness: f64) -> OrganizationPair {
        OrganizationPair::new(
            members.to_vec(),
            Subspace::new(dims.iter().copied(), 10).unwrap(),
            fitness,
        )
    }

    #[test]
    fn identical_pairs_are_mutually_redundant() {
        let a = pair(&[1, 2, 3], &[0, 1], 0.8);
        for beta in [0.0, 0.5, 1.0] {
            let d = DiversityConfig {
                beta_c: beta,
                beta_d: beta,
            };
            assert!(is_redundant(&a, &a.clone(), &d));
        }
    }

    #[test]
    fn disjoint_communities_are_not_redundant() {
        let a = pair(&[1, 2, 3], &[0, 1], 0.5);
        let b = pair(&[4, 5], &[0, 1], 0.9);
        assert!(!is_redundant(
            &a,
            &b,
            &DiversityConfig {
                beta_c: 0.01,
                beta_d: 0.0
            }
        ));
    }

    #[test]
    fn half_overlap_example() {
        let a = pair(&[1, 2, 3], &[0, 1], 0.7);
        let b = pair(&[2, 3, 4], &[0, 1], 0.8);
        let d = DiversityConfig::default();
        assert!(is_redundant(&a, &b, &d));
        assert!(!is_redundant(&b, &a, &d));
    }

    #[test]
    fn select_collapses_duplicates() {
        let a = pair(&[1, 2, 3], &[0, 1], 0.7);
        let kept = select_diverse(vec![a.clone(), a.clone()], &DiversityConfig::default());
        assert_eq!(kept, vec![a]);
    }

    #[test]
    fn select_keeps_non_redundant_reordered() {
        let a = pair(&[1, 2, 3], &[0], 0.4);
        let b = pair(&[4, 5, 6], &[0], 0.9);
        let c = pair(&[7, 8], &[2], 0.6);
        let kept = select_diverse(vec![a.clone(), b.clone(), c.clone()], &DiversityConfig::default());
        assert_eq!(kept, vec![b, c, a]);
    }

    #[test]
    fn select_traces_greedy_filter() {
        let first = pair(&[1, 2, 3, 4], &[0, 1], 0.9);
        let second = pair(&[1, 2, 3, 5], &[0, 1, 2], 0.8); // J_C 0.6, J_D 0.67
        let third = pair(&[1, 2, 8, 9], &[0, 1], 0.7); // J_C 1/3 with first
        let kept = select_diverse(vec![third.clone(), second, first.clone()], &DiversityConfig::default());
        assert_eq!(kept, vec![first, third]);
    }

    #[test]
    fn diversity_config_bounds() {
        assert!(DiversityConfig {
            beta_c: 1.5,
            beta_d: 0.5
        }
        .validate()
        .is_err());
        assert!(DiversityConfig {
            beta_c: 0.5,
            beta_d: -0.1
        }
        .validate()
        .is_err());
    }
}
