//! Community seeds from the concerned-attribute backbone.
//!
//! The backbone keeps the edges whose endpoints are nearly identical on
//! every concerned dimension; label propagation splits it into cohesive
//! parts, and the large enough parts become seeds.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{AttributedGraph, EdgeId, NodeId};
use crate::kernel::Subspace;

/// Sweep cap for label propagation.
pub const MAX_SWEEPS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeedingConfig {
    /// Backbone size parameter: an edge survives when each concerned
    /// difference is below `pi` percent of that dimension's mean edge
    /// difference.
    pub pi: f64,
    pub min_seed_size: usize,
    pub rng_seed: u64,
}

impl Default for SeedingConfig {
    fn default() -> Self {
        SeedingConfig {
            pi: 1.0,
            min_seed_size: 3,
            rng_seed: 0,
        }
    }
}

impl SeedingConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.pi > 0.0 && self.pi.is_finite()) {
            return Err(Error::Config(format!("pi must be positive, got {}", self.pi)));
        }
        if self.min_seed_size < 2 {
            return Err(Error::Config(format!(
                "min_seed_size must be at least 2, got {}",
                self.min_seed_size
            )));
        }
        Ok(())
    }
}

/// Node to label map over the nodes touched by the backbone.
pub type Partition = BTreeMap<NodeId, usize>;

/// Mean difference of each concerned dimension over all edges.
pub fn mean_edge_differences(graph: &AttributedGraph, concerned: &Subspace) -> Vec<f64> {
    let m = graph.edge_count();
    concerned
        .dims()
        .iter()
        .map(|&i| {
            if m == 0 {
                0.0
            } else {
                (0..m).map(|e| graph.edge_difference(e, i)).sum::<f64>() / m as f64
            }
        })
        .collect()
}

/// Edges similar on every concerned dimension.
///
/// With a zero mean difference on some dimension the test for that
/// dimension becomes an exact match.
pub fn build_backbone(graph: &AttributedGraph, concerned: &Subspace, config: &SeedingConfig) -> Vec<EdgeId> {
    let thresholds: Vec<(usize, f64)> = concerned
        .dims()
        .iter()
        .copied()
        .zip(mean_edge_differences(graph, concerned))
        .map(|(i, avg)| (i, config.pi / 100.0 * avg))
        .collect();
    (0..graph.edge_count())
        .filter(|&e| {
            thresholds.iter().all(|&(i, threshold)| {
                let diff = graph.edge_difference(e, i);
                if threshold > 0.0 {
                    diff < threshold
                } else {
                    diff == 0.0
                }
            })
        })
        .collect()
}

/// Asynchronous label propagation over `edges`.
///
/// Every sweep visits the covered nodes in an order shuffled from
/// `rng_seed`; a node takes the most frequent label among its neighbors,
/// preferring the smallest label on ties. Stops when a sweep changes
/// nothing or after [`MAX_SWEEPS`] sweeps.
pub fn label_propagation(edges: &[(NodeId, NodeId)], node_count: usize, rng_seed: u64) -> Partition {
    let mut adjacency: Vec<Vec<NodeId>> = vec![Vec::new(); node_count];
    for &(u, v) in edges {
        adjacency[u].push(v);
        adjacency[v].push(u);
    }
    let mut order: Vec<NodeId> = (0..node_count).filter(|&v| !adjacency[v].is_empty()).collect();
    let mut labels: Vec<usize> = (0..node_count).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut scratch = Vec::new();

    for _ in 0..MAX_SWEEPS {
        order.shuffle(&mut rng);
        let mut changed = false;
        for &v in &order {
            scratch.clear();
            scratch.extend(adjacency[v].iter().map(|&u| labels[u]));
            scratch.sort_unstable();
            let mut best = (0usize, usize::MAX);
            let mut i = 0;
            while i < scratch.len() {
                let label = scratch[i];
                let mut j = i;
                while j < scratch.len() && scratch[j] == label {
                    j += 1;
                }
                if j - i > best.0 {
                    best = (j - i, label);
                }
                i = j;
            }
            if labels[v] != best.1 {
                labels[v] = best.1;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }

    order.sort_unstable();
    order.into_iter().map(|v| (v, labels[v])).collect()
}

/// Groups of at least `min_seed_size` nodes sharing a label, largest
/// first, ties by smallest member.
pub fn extract_seeds(partition: &Partition, config: &SeedingConfig) -> Vec<Vec<NodeId>> {
    let mut groups: BTreeMap<usize, Vec<NodeId>> = BTreeMap::new();
    for (&v, &label) in partition {
        groups.entry(label).or_default().push(v);
    }
    let mut seeds: Vec<Vec<NodeId>> = groups
        .into_values()
        .filter(|g| g.len() >= config.min_seed_size)
        .collect();
    seeds.sort_by(|a, b| b.len().cmp(&a.len()).then(a[0].cmp(&b[0])));
    seeds
}

/// Backbone, label propagation and seed extraction in one call.
pub fn construct_seeds(
    graph: &AttributedGraph,
    concerned: &Subspace,
    config: &SeedingConfig,
) -> Result<Vec<Vec<NodeId>>> {
    config.validate()?;
    let backbone: Vec<(NodeId, NodeId)> = build_backbone(graph, concerned, config)
        .into_iter()
        .map(|e| graph.edge(e))
        .collect();
    let partition = label_propagation(&backbone, graph.node_count(), config.rng_seed);
    Ok(extract_seeds(&partition, config))
}
