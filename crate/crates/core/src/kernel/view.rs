use serde::{Deserialize, Serialize};

use super::{norm_update, norm_variance, CommunityState, EdgeWeights, Subspace, Toggle};
use crate::error::{Error, Result};
use crate::graph::{AttributedGraph, EdgeId, NodeId};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelConfig {
    /// Scaling parameter of the exponential kernel.
    pub theta: f64,
}

impl Default for KernelConfig {
    fn default() -> Self {
        KernelConfig { theta: 1.0 }
    }
}

impl KernelConfig {
    pub fn validate(&self) -> Result<()> {
        if self.theta > 0.0 && self.theta.is_finite() {
            Ok(())
        } else {
            Err(Error::Config(format!("theta must be positive, got {}", self.theta)))
        }
    }
}

/// Edge weights of a graph projected onto one subspace.
///
/// Weights are `exp(-norm / (theta * sd))` where `sd` is the population
/// standard deviation of the edge norms. Dividing by the spread is what
/// keeps fitness comparable across subspaces of different sizes: it gives
/// the same fitness as the kernel applied to z-scored norms.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedView {
    subspace: Subspace,
    theta: f64,
    norms: Vec<f64>,
    weights: Vec<f64>,
    weighted_degree: Vec<f64>,
    variance: f64,
    effective_scale: f64,
}

/// Norm cache and statistics of a toggled subspace, before any weight is
/// computed.
#[derive(Debug, Clone)]
pub(crate) struct Candidate {
    pub subspace: Subspace,
    pub norms: Vec<f64>,
    pub variance: f64,
    pub effective_scale: f64,
}

#[inline]
pub(crate) fn kernel_weight(norm: f64, effective_scale: f64) -> f64 {
    if effective_scale > 0.0 {
        (-norm / effective_scale).exp()
    } else {
        1.0
    }
}

/// Norm of edge `e` under `subspace`, from the graph's difference table.
/// Same value as [`super::subspace_norm`] on the endpoint attributes.
pub(crate) fn edge_norm(graph: &AttributedGraph, e: EdgeId, subspace: &Subspace) -> f64 {
    let mut sum = 0.0;
    for &i in subspace.dims() {
        let d = graph.edge_difference(e, i);
        sum += d * d;
    }
    (sum / subspace.len() as f64).sqrt()
}

/// [`edge_norm`] of every edge, accumulated one dimension at a time.
pub(crate) fn edge_norms(graph: &AttributedGraph, subspace: &Subspace) -> Vec<f64> {
    let mut sums = vec![0.0; graph.edge_count()];
    for &i in subspace.dims() {
        for (sum, &d) in sums.iter_mut().zip(graph.dimension_differences(i)) {
            *sum += d * d;
        }
    }
    let size = subspace.len() as f64;
    sums.iter_mut().for_each(|s| *s = (*s / size).sqrt());
    sums
}

/// Projects `graph` onto `subspace`.
pub fn reweigh(graph: &AttributedGraph, subspace: &Subspace, config: KernelConfig) -> Result<WeightedView> {
    config.validate()?;
    check_subspace(graph, subspace)?;
    let norms = edge_norms(graph, subspace);
    let variance = norm_variance(graph, subspace);
    let candidate = Candidate {
        subspace: subspace.clone(),
        norms,
        variance,
        effective_scale: config.theta * variance.sqrt(),
    };
    Ok(WeightedView::materialize(graph, candidate, config.theta))
}

fn check_subspace(graph: &AttributedGraph, subspace: &Subspace) -> Result<()> {
    match subspace.dims().last() {
        Some(&d) if d < graph.attribute_count() => Ok(()),
        _ => Err(Error::Subspace(format!(
            "{subspace} does not fit a schema of {} attributes",
            graph.attribute_count()
        ))),
    }
}

impl EdgeWeights for WeightedView {
    fn weight(&self, e: EdgeId) -> f64 {
        self.weights[e]
    }

    fn weighted_degree(&self, v: NodeId) -> f64 {
        self.weighted_degree[v]
    }
}

impl WeightedView {
    fn materialize(graph: &AttributedGraph, candidate: Candidate, theta: f64) -> Self {
        let Candidate {
            subspace,
            norms,
            variance,
            effective_scale,
        } = candidate;
        let weights: Vec<f64> = norms.iter().map(|&x| kernel_weight(x, effective_scale)).collect();
        let weighted_degree = (0..graph.node_count())
            .map(|v| graph.neighbors(v).iter().map(|&(_, e)| weights[e]).sum())
            .collect();
        WeightedView {
            subspace,
            theta,
            norms,
            weights,
            weighted_degree,
            variance,
            effective_scale,
        }
    }

    pub fn subspace(&self) -> &Subspace {
        &self.subspace
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn norms(&self) -> &[f64] {
        &self.norms
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, e: usize) -> f64 {
        self.weights[e]
    }

    pub fn variance(&self) -> f64 {
        self.variance
    }

    pub fn effective_scale(&self) -> f64 {
        self.effective_scale
    }

    /// Total weight of edges incident to `v`.
    pub fn weighted_degree(&self, v: NodeId) -> f64 {
        self.weighted_degree[v]
    }

    /// The same view with every weight multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> WeightedView {
        let mut view = self.clone();
        view.weights.iter_mut().for_each(|w| *w *= factor);
        view.weighted_degree.iter_mut().for_each(|w| *w *= factor);
        view
    }

    pub(crate) fn candidate(&self, graph: &AttributedGraph, dim: usize, toggle: Toggle) -> Result<Candidate> {
        let subspace = match toggle {
            Toggle::Add => {
                if dim >= graph.attribute_count() {
                    return Err(Error::Precondition(format!("dimension {dim} out of range")));
                }
                if self.subspace.contains(dim) {
                    return Err(Error::Precondition(format!(
                        "dimension {dim} already in {}",
                        self.subspace
                    )));
                }
                self.subspace.with(dim)
            }
            Toggle::Remove => {
                if !self.subspace.contains(dim) {
                    return Err(Error::Precondition(format!("dimension {dim} not in {}", self.subspace)));
                }
                self.subspace.without(dim).ok_or_else(|| {
                    Error::Precondition(format!("cannot remove the only dimension of {}", self.subspace))
                })?
            }
        };
        let size = self.subspace.len();
        let norms = self
            .norms
            .iter()
            .enumerate()
            .map(|(e, &norm)| norm_update(norm, size, graph.edge_difference(e, dim), toggle))
            .collect::<Result<Vec<f64>>>()?;
        let variance = norm_variance(graph, &subspace);
        Ok(Candidate {
            subspace,
            norms,
            variance,
            effective_scale: self.theta * variance.sqrt(),
        })
    }

    pub(crate) fn from_candidate(graph: &AttributedGraph, candidate: Candidate, theta: f64) -> Self {
        Self::materialize(graph, candidate, theta)
    }

    /// Adds or removes one dimension, updating the cached norms in place
    /// of a full recomputation.
    pub fn update_view(&self, graph: &AttributedGraph, dim: usize, toggle: Toggle) -> Result<WeightedView> {
        let candidate = self.candidate(graph, dim, toggle)?;
        Ok(Self::materialize(graph, candidate, self.theta))
    }
}

/// Fitness of `community` under a candidate without materializing its view.
/// Sums in the same order as [`CommunityState`] so the result matches the
/// materialized view bit for bit.
pub(crate) fn candidate_fitness(graph: &AttributedGraph, candidate: &Candidate, community: &CommunityState) -> f64 {
    let mut invol = 0.0;
    let mut vol = 0.0;
    for &u in community.members() {
        for &(v, e) in graph.neighbors(u) {
            let w = kernel_weight(candidate.norms[e], candidate.effective_scale);
            vol += w;
            if community.contains(v) {
                invol += w;
            }
        }
    }
    super::fitness_ratio(invol, vol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{AttributeKind, AttributeSchema};

    fn graph(values: Vec<f64>, r: usize, edges: &[(usize, usize)]) -> AttributedGraph {
        let schema = AttributeSchema::uniform(AttributeKind::Numerical, r, 0).unwrap();
        AttributedGraph::from_parts(schema, values, edges.iter().copied())
            .unwrap()
            .0
    }

    #[test]
    fn identical_attributes_give_unit_weights() {
        let g = graph(vec![0.4; 8], 2, &[(0, 1), (1, 2), (2, 3)]);
        let view = reweigh(&g, &Subspace::new([0, 1], 2).unwrap(), KernelConfig::default()).unwrap();
        assert_eq!(view.variance(), 0.0);
        assert!(view.weights().iter().all(|&w| w == 1.0));
        assert_eq!(view.weighted_degree(1), 2.0);
    }

    #[test]
    fn two_edges_with_norms_one_and_three() {
        // one dimension, differences 1 and 3 would exceed [0,1]; scale down by 4
        // and compare the weights, which are invariant to a common scaling of norms
        let g = graph(vec![0.0, 0.25, 1.0], 1, &[(0, 1), (1, 2)]);
        let view = reweigh(&g, &Subspace::new([0], 1).unwrap(), KernelConfig::default()).unwrap();
        assert!((view.norms()[0] - 0.25).abs() < 1e-15);
        assert!((view.norms()[1] - 0.75).abs() < 1e-15);
        assert!((view.variance() - 0.0625).abs() < 1e-15);
        assert!((view.weights()[0] - (-1.0f64).exp()).abs() < 1e-15);
        assert!((view.weights()[1] - (-3.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn zero_norm_edge_has_weight_one() {
        let g = graph(vec![0.2, 0.2, 0.9], 1, &[(0, 1), (1, 2)]);
        let view = reweigh(&g, &Subspace::new([0], 1).unwrap(), KernelConfig::default()).unwrap();
        assert!(view.variance() > 0.0);
        assert_eq!(view.weights()[0], 1.0);
    }

    #[test]
    fn empty_graph_gives_empty_view() {
        let g = graph(vec![0.1, 0.2], 1, &[]);
        let view = reweigh(&g, &Subspace::new([0], 1).unwrap(), KernelConfig::default()).unwrap();
        assert!(view.weights().is_empty());
        assert_eq!(view.weighted_degree(0), 0.0);
    }

    #[test]
    fn update_view_preconditions() {
        let g = graph(vec![0.1, 0.2, 0.3, 0.4], 2, &[(0, 1)]);
        let view = reweigh(&g, &Subspace::new([0], 2).unwrap(), KernelConfig::default()).unwrap();
        assert!(view.update_view(&g, 0, Toggle::Remove).is_err());
        assert!(view.update_view(&g, 0, Toggle::Add).is_err());
        assert!(view.update_view(&g, 1, Toggle::Remove).is_err());
        assert!(view.update_view(&g, 2, Toggle::Add).is_err());
    }

    #[test]
    fn rejects_bad_theta() {
        let g = graph(vec![0.1, 0.2], 1, &[(0, 1)]);
        let s = Subspace::new([0], 1).unwrap();
        assert!(reweigh(&g, &s, KernelConfig { theta: 0.0 }).is_err());
        assert!(reweigh(&g, &Subspace::new([0], 1).unwrap(), KernelConfig { theta: -1.0 }).is_err());
    }
}
