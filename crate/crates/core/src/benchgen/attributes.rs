use rand::seq::index::sample;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::graph::{AttributeKind, NodeId};
use crate::kernel::Subspace;

/// How "similar" and background values are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttributeNoise {
    /// Half-width of the band around a community's center for similar
    /// numerical values.
    pub delta: f64,
    /// Probability of a background binary `1`.
    pub binary_background: f64,
    /// Domain size of categorical dimensions.
    pub categories: usize,
}

impl Default for AttributeNoise {
    fn default() -> Self {
        AttributeNoise {
            delta: 0.05,
            binary_background: 0.2,
            categories: 10,
        }
    }
}

/// Raw attribute values with the per-community profile they were drawn
/// from.
#[derive(Debug, Clone, PartialEq)]
pub struct PlantedAttributes {
    /// Row-major `n x r` encoded values.
    pub values: Vec<f64>,
    pub subspaces: Vec<Subspace>,
    /// Per community, the similar value of each subspace dimension (the
    /// numerical center or the category index; `1` for binary).
    pub profiles: Vec<Vec<f64>>,
}

/// Draws attribute vectors: each community gets `t` random dimensions;
/// on those, each member takes a similar value with probability `p`, and
/// everything else is background noise.
#[allow(clippy::too_many_arguments)]
pub fn attach_attributes(
    communities: &[Vec<NodeId>],
    n: usize,
    r: usize,
    t: usize,
    p: f64,
    kind: AttributeKind,
    noise: &AttributeNoise,
    rng: &mut ChaCha8Rng,
) -> PlantedAttributes {
    let background = |rng: &mut ChaCha8Rng| match kind {
        AttributeKind::Numerical => rng.random::<f64>(),
        AttributeKind::Binary => rng.random_bool(noise.binary_background) as u8 as f64,
        AttributeKind::Categorical => rng.random_range(0..noise.categories) as f64,
    };
    let mut values: Vec<f64> = (0..n * r).map(|_| background(rng)).collect();

    let mut subspaces = Vec::with_capacity(communities.len());
    let mut profiles = Vec::with_capacity(communities.len());
    for members in communities {
        let subspace = Subspace::new(sample(rng, r, t), r).expect("t >= 1 dimensions below r");
        let profile: Vec<f64> = subspace
            .dims()
            .iter()
            .map(|_| match kind {
                AttributeKind::Numerical => rng.random::<f64>(),
                AttributeKind::Binary => 1.0,
                AttributeKind::Categorical => rng.random_range(0..noise.categories) as f64,
            })
            .collect();
        for &v in members {
            for (&dim, &center) in subspace.dims().iter().zip(&profile) {
                if rng.random_bool(p) {
                    values[v * r + dim] = match kind {
                        AttributeKind::Numerical => rng
                            .random_range(center - noise.delta..=center + noise.delta)
                            .clamp(0.0, 1.0),
                        _ => center,
                    };
                }
            }
        }
        subspaces.push(subspace);
        profiles.push(profile);
    }
    PlantedAttributes {
        values,
        subspaces,
        profiles,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn communities() -> Vec<Vec<NodeId>> {
        vec![(0..40).collect(), (40..100).collect()]
    }

    #[test]
    fn p_one_numerical_stays_in_band() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let noise = AttributeNoise::default();
        let planted = attach_attributes(
            &communities(),
            100,
            8,
            3,
            1.0,
            AttributeKind::Numerical,
            &noise,
            &mut rng,
        );
        for (c, members) in communities().iter().enumerate() {
            assert_eq!(planted.subspaces[c].len(), 3);
            for &v in members {
                for (&dim, &center) in planted.subspaces[c].dims().iter().zip(&planted.profiles[c]) {
                    assert!((planted.values[v * 8 + dim] - center).abs() <= noise.delta + 1e-12);
                }
            }
        }
    }

    #[test]
    fn p_one_binary_sets_every_subspace_dim() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let planted = attach_attributes(
            &communities(),
            100,
            8,
            4,
            1.0,
            AttributeKind::Binary,
            &AttributeNoise::default(),
            &mut rng,
        );
        for (c, members) in communities().iter().enumerate() {
            for &v in members {
                for &dim in planted.subspaces[c].dims() {
                    assert_eq!(planted.values[v * 8 + dim], 1.0);
                }
            }
        }
    }

    #[test]
    fn categorical_values_stay_in_domain() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let planted = attach_attributes(
            &communities(),
            100,
            5,
            2,
            0.9,
            AttributeKind::Categorical,
            &AttributeNoise::default(),
            &mut rng,
        );
        assert!(planted
            .values
            .iter()
            .all(|&x| x.fract() == 0.0 && (0.0..10.0).contains(&x)));
    }
}
