//! Subspace norms, kernel reweighting and subspace fitness.
//!
//! The fitness of a community `C` under a subspace `D` is the share of the
//! total weighted degree of `C` that stays inside `C`, with edge weights
//! given by an exponential kernel over the subspace-weighted Euclidean norm
//! of the endpoint attribute differences. Node and dimension toggles are
//! evaluated incrementally from cached sums and cached per-edge norms.

mod community;
mod scale;
mod subspace;
mod view;

pub use community::CommunityState;
pub use subspace::Subspace;
pub use view::{reweigh, KernelConfig, WeightedView};

pub(crate) use scale::{norm_variance, SquareSums};
pub(crate) use view::{candidate_fitness, edge_norm, kernel_weight, Candidate};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{attribute_difference, AttributeSchema, AttributedGraph, EdgeId, NodeId};

/// Direction of a single-element change to a community or subspace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Toggle {
    Add,
    Remove,
}

/// Read access to edge weights and weighted degrees under one subspace.
pub trait EdgeWeights {
    fn weight(&self, e: EdgeId) -> f64;
    /// Total weight of the edges incident to `v`.
    fn weighted_degree(&self, v: NodeId) -> f64;
}

/// Radicands below this are treated as cache corruption rather than
/// rounding noise.
const RADICAND_TOLERANCE: f64 = 1e-12;

/// `sqrt(sum_{i in D} diff_i^2 / |D|)`.
pub fn subspace_norm(a: &[f64], b: &[f64], subspace: &Subspace, schema: &AttributeSchema) -> f64 {
    let sum: f64 = subspace
        .dims()
        .iter()
        .map(|&i| {
            let d = attribute_difference(schema, i, a[i], b[i]);
            d * d
        })
        .sum();
    (sum / subspace.len() as f64).sqrt()
}

/// Norm of the same pair after adding or removing one dimension whose
/// difference is `dim_diff`, from the norm under a subspace of `old_size`
/// dimensions.
pub fn norm_update(old_norm: f64, old_size: usize, dim_diff: f64, toggle: Toggle) -> Result<f64> {
    let size = old_size as f64;
    let scaled = size * old_norm * old_norm;
    let sq = dim_diff * dim_diff;
    let radicand = match toggle {
        Toggle::Add => (scaled + sq) / (size + 1.0),
        Toggle::Remove => {
            if old_size < 2 {
                return Err(Error::Precondition("cannot remove the only dimension".into()));
            }
            (scaled - sq) / (size - 1.0)
        }
    };
    if radicand < -RADICAND_TOLERANCE {
        return Err(Error::NormCorruption(radicand));
    }
    // Removal subtracts nearly equal terms; a result within their rounding
    // error is an exact zero.
    let noise = 8.0 * f64::EPSILON * (scaled + sq) / size.max(1.0);
    if radicand <= noise {
        return Ok(0.0);
    }
    Ok(radicand.sqrt())
}

/// `invol / vol`, with `0` when `vol` is zero.
pub(crate) fn fitness_ratio(invol: f64, vol: f64) -> f64 {
    if vol > 0.0 {
        (invol / vol).clamp(0.0, 1.0)
    } else {
        0.0
    }
}

/// Fitness of `community` under the view it was computed against.
pub fn subspace_fitness(community: &CommunityState) -> f64 {
    community.fitness()
}

/// Fitness change from toggling `node`, in `O(deg(node))`.
///
/// Adding `v` raises the internal weight by twice its weight to the
/// community (both directions of each internal edge) and the total weight
/// by its weighted degree; removal is the reverse.
pub fn fitness_delta_node(
    graph: &AttributedGraph,
    view: &WeightedView,
    community: &CommunityState,
    node: NodeId,
    toggle: Toggle,
) -> Result<f64> {
    community.check_toggle(graph, node, toggle)?;
    let internal = community.internal_weight(graph, view, node);
    let (invol, vol) = community.toggled_sums(internal, view.weighted_degree(node), toggle);
    Ok(fitness_ratio(invol, vol) - community.fitness())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{AttributeKind, Dimension};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn numeric(r: usize) -> AttributeSchema {
        AttributeSchema::uniform(AttributeKind::Numerical, r, 0).unwrap()
    }

    fn unit_graph(n: usize, edges: &[(usize, usize)]) -> AttributedGraph {
        AttributedGraph::from_parts(numeric(1), vec![0.5; n], edges.iter().copied())
            .unwrap()
            .0
    }

    /// Oracle: weights straight from the definition, sums over
    /// ordered node pairs.
    fn brute_fitness(graph: &AttributedGraph, subspace: &Subspace, theta: f64, members: &[usize]) -> f64 {
        let schema = graph.schema();
        let norms: Vec<f64> = graph
            .edges()
            .iter()
            .map(|&(u, v)| {
                let s: f64 = subspace
                    .dims()
                    .iter()
                    .map(|&i| attribute_difference(schema, i, graph.value(u, i), graph.value(v, i)).powi(2))
                    .sum();
                (s / subspace.len() as f64).sqrt()
            })
            .collect();
        let m = norms.len() as f64;
        let mean = norms.iter().sum::<f64>() / m;
        let var = norms.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / m;
        let n = graph.node_count();
        let mut a = vec![vec![0.0; n]; n];
        for (e, &(u, v)) in graph.edges().iter().enumerate() {
            let w = if var > 1e-300 {
                (-norms[e] / (theta * var.sqrt())).exp()
            } else {
                1.0
            };
            a[u][v] = w;
            a[v][u] = w;
        }
        let inside: f64 = members
            .iter()
            .flat_map(|&u| members.iter().map(move |&v| (u, v)))
            .map(|(u, v)| a[u][v])
            .sum();
        let total: f64 = members.iter().map(|&u| a[u].iter().sum::<f64>()).sum();
        if total > 0.0 {
            inside / total
        } else {
            0.0
        }
    }

    fn random_graph(rng: &mut ChaCha8Rng, n: usize, r: usize, p: f64) -> AttributedGraph {
        let values: Vec<f64> = (0..n * r).map(|_| rng.random::<f64>()).collect();
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.random::<f64>() < p {
                    edges.push((u, v));
                }
            }
        }
        AttributedGraph::from_parts(numeric(r), values, edges).unwrap().0
    }

    #[test]
    fn norm_examples() {
        let schema = numeric(3);
        let a = [0.2, 0.7, 0.1];
        let one = Subspace::new([0], 3).unwrap();
        assert_eq!(
            subspace_norm(&a, &a, &Subspace::new([0, 1, 2], 3).unwrap(), &schema),
            0.0
        );
        assert!((subspace_norm(&a, &[0.8, 0.0, 0.0], &one, &schema) - 0.6).abs() < 1e-12);
        let mixed = AttributeSchema::new(vec![Dimension::binary("x"), Dimension::binary("y")]).unwrap();
        let two = Subspace::new([0, 1], 2).unwrap();
        assert!((subspace_norm(&[1.0, 1.0], &[0.0, 1.0], &two, &mixed) - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn norm_update_examples() {
        let added = norm_update(0.5, 2, 0.0, Toggle::Add).unwrap();
        assert!((added - (0.5f64 / 3.0).sqrt()).abs() < 1e-12);
        let back = norm_update(added, 3, 0.0, Toggle::Remove).unwrap();
        assert!((back - 0.5).abs() < 1e-12);
        assert!((norm_update(0.6, 1, 0.6, Toggle::Add).unwrap() - 0.6).abs() < 1e-12);
        assert!(norm_update(0.6, 1, 0.6, Toggle::Remove).is_err());
        assert!(matches!(
            norm_update(0.1, 2, 0.9, Toggle::Remove),
            Err(Error::NormCorruption(_))
        ));
        // rounding residue is clamped, not reported
        assert_eq!(
            norm_update((0.5f64).sqrt() * 0.6, 2, 0.6 + 1e-15, Toggle::Remove).unwrap(),
            0.0
        );
    }

    #[test]
    fn kernel_of_norms_one_and_three() {
        // population standard deviation of {1, 3} is 1
        let scale = 1.0;
        assert_eq!(kernel_weight(1.0, scale), (-1.0f64).exp());
        assert_eq!(kernel_weight(3.0, scale), (-3.0f64).exp());
        assert_eq!(kernel_weight(0.0, scale), 1.0);
    }

    #[test]
    fn fitness_examples() {
        // triangle a,b,c with pendant c-d
        let g = unit_graph(4, &[(0, 1), (1, 2), (0, 2), (2, 3)]);
        let view = reweigh(&g, &Subspace::new([0], 1).unwrap(), KernelConfig::default()).unwrap();
        let c = CommunityState::new(&g, &view, [0, 1, 2]).unwrap();
        assert_eq!(c.invol(), 6.0);
        assert_eq!(c.vol(), 7.0);
        assert!((subspace_fitness(&c) - 6.0 / 7.0).abs() < 1e-12);

        let all = CommunityState::new(&g, &view, 0..4).unwrap();
        assert_eq!(subspace_fitness(&all), 1.0);

        let lonely = unit_graph(3, &[(0, 1)]);
        let view = reweigh(&lonely, &Subspace::new([0], 1).unwrap(), KernelConfig::default()).unwrap();
        let isolated = CommunityState::new(&lonely, &view, [2]).unwrap();
        assert_eq!(subspace_fitness(&isolated), 0.0);
        assert!(CommunityState::new(&lonely, &view, []).is_err());
    }

    #[test]
    fn delta_preconditions_and_inverse() {
        let g = unit_graph(5, &[(0, 1), (1, 2), (0, 2), (2, 3)]);
        let view = reweigh(&g, &Subspace::new([0], 1).unwrap(), KernelConfig::default()).unwrap();
        let mut c = CommunityState::new(&g, &view, [0, 1, 2]).unwrap();
        assert!(fitness_delta_node(&g, &view, &c, 4, Toggle::Add).is_err());
        assert!(fitness_delta_node(&g, &view, &c, 0, Toggle::Add).is_err());
        assert!(fitness_delta_node(&g, &view, &c, 3, Toggle::Remove).is_err());

        let before = c.fitness();
        let d_add = fitness_delta_node(&g, &view, &c, 3, Toggle::Add).unwrap();
        c.apply(&g, &view, 3, Toggle::Add).unwrap();
        let d_remove = fitness_delta_node(&g, &view, &c, 3, Toggle::Remove).unwrap();
        assert!((d_add + d_remove).abs() < 1e-12);
        assert!((c.fitness() - before - d_add).abs() < 1e-12);

        let single = CommunityState::new(&g, &view, [0]).unwrap();
        assert!(fitness_delta_node(&g, &view, &single, 0, Toggle::Remove).is_err());
    }

    #[test]
    fn adding_a_node_without_internal_weight_lowers_fitness() {
        // kernel weights are positive, so zero internal weight only shows up at
        // the level of the cached sums
        let g = unit_graph(5, &[(0, 1), (1, 2), (0, 2), (2, 3), (3, 4)]);
        let view = reweigh(&g, &Subspace::new([0], 1).unwrap(), KernelConfig::default()).unwrap();
        let c = CommunityState::new(&g, &view, [0, 1, 2]).unwrap();
        let (invol, vol) = c.toggled_sums(0.0, 2.0, Toggle::Add);
        assert!(fitness_ratio(invol, vol) < c.fitness());
    }

    #[test]
    fn delta_matches_brute_force_on_small_graphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let g = random_graph(&mut rng, 8, 3, 0.45);
            if g.edge_count() == 0 {
                continue;
            }
            let dims: Vec<usize> = (0..3).filter(|_| rng.random::<bool>()).collect();
            let subspace = Subspace::new(if dims.is_empty() { vec![0] } else { dims }, 3).unwrap();
            let view = reweigh(&g, &subspace, KernelConfig::default()).unwrap();
            let members: Vec<usize> = (0..8).filter(|_| rng.random::<f64>() < 0.5).collect();
            if members.is_empty() {
                continue;
            }
            let c = CommunityState::new(&g, &view, members.iter().copied()).unwrap();
            let base = brute_fitness(&g, &subspace, 1.0, &members);
            assert!((c.fitness() - base).abs() < 1e-9);
            for v in 0..8 {
                let toggle = if c.contains(v) { Toggle::Remove } else { Toggle::Add };
                let Ok(delta) = fitness_delta_node(&g, &view, &c, v, toggle) else {
                    continue;
                };
                let toggled: Vec<usize> = match toggle {
                    Toggle::Add => members.iter().copied().chain([v]).collect(),
                    Toggle::Remove => members.iter().copied().filter(|&u| u != v).collect(),
                };
                let expected = brute_fitness(&g, &subspace, 1.0, &toggled) - base;
                assert!((delta - expected).abs() < 1e-9, "{delta} vs {expected}");
            }
        }
    }

    #[test]
    fn update_view_matches_reweigh_on_random_graph() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = random_graph(&mut rng, 30, 6, 0.2);
        let base = Subspace::new([1, 4], 6).unwrap();
        let view = reweigh(&g, &base, KernelConfig::default()).unwrap();
        for dim in 0..6 {
            let toggle = if base.contains(dim) {
                Toggle::Remove
            } else {
                Toggle::Add
            };
            let updated = view.update_view(&g, dim, toggle).unwrap();
            let target = match toggle {
                Toggle::Add => base.with(dim),
                Toggle::Remove => base.without(dim).unwrap(),
            };
            let fresh = reweigh(&g, &target, KernelConfig::default()).unwrap();
            assert_eq!(updated.subspace(), fresh.subspace());
            let worst = updated
                .weights()
                .iter()
                .zip(fresh.weights())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            assert!(worst <= 1e-9, "dim {dim}: {worst}");
            let back = updated
                .update_view(
                    &g,
                    dim,
                    if toggle == Toggle::Add {
                        Toggle::Remove
                    } else {
                        Toggle::Add
                    },
                )
                .unwrap();
            for (a, b) in back.norms().iter().zip(view.norms()) {
                assert!((a - b).abs() <= 1e-12);
            }
        }
    }

    proptest! {
        #[test]
        fn norm_update_equals_direct_evaluation(
            a in proptest::collection::vec(0.0f64..=1.0, 6),
            b in proptest::collection::vec(0.0f64..=1.0, 6),
            mask in 1u8..63,
            dim in 0usize..6,
        ) {
            let schema = numeric(6);
            let dims: Vec<usize> = (0..6).filter(|i| mask & (1 << i) != 0).collect();
            let s = Subspace::new(dims, 6).unwrap();
            let old = subspace_norm(&a, &b, &s, &schema);
            let diff = (a[dim] - b[dim]).abs();
            if s.contains(dim) {
                if let Some(t) = s.without(dim) {
                    let got = norm_update(old, s.len(), diff, Toggle::Remove).unwrap();
                    prop_assert!((got - subspace_norm(&a, &b, &t, &schema)).abs() < 1e-9);
                }
            } else {
                let got = norm_update(old, s.len(), diff, Toggle::Add).unwrap();
                prop_assert!((got - subspace_norm(&a, &b, &s.with(dim), &schema)).abs() < 1e-9);
            }
        }

        #[test]
        fn kernel_is_monotone(x in 0.0f64..1.0, dx in 1e-6f64..1.0, scale in 0.01f64..2.0) {
            prop_assert!(kernel_weight(x + dx, scale) < kernel_weight(x, scale));
            prop_assert_eq!(kernel_weight(0.0, scale), 1.0);
        }
    }
}
