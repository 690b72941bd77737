//! Synthetic attributed benchmarks with planted communities and planted
//! attribute subspaces.

mod attributes;
mod lfr;

use std::io::{BufRead, Write};

use log::info;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use attributes::{attach_attributes, AttributeNoise, PlantedAttributes};

use crate::error::{Error, Result};
use crate::graph::{AttributeKind, AttributeSchema, AttributedGraph, NodeId};
use crate::kernel::Subspace;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BenchmarkParams {
    /// Degree exponent.
    pub tau1: f64,
    /// Community size exponent.
    pub tau2: f64,
    pub n: usize,
    pub d_avg: f64,
    pub d_max: usize,
    pub c_min: usize,
    pub c_max: usize,
    /// Fraction of each node's edges leaving its community.
    pub mu: f64,
    /// Attribute count.
    pub r: usize,
    /// Planted subspace size.
    pub t: usize,
    /// Probability that a member is similar on a subspace dimension.
    pub p: f64,
    #[serde(rename = "type")]
    pub kind: AttributeKind,
    pub rng_seed: u64,
    pub noise: AttributeNoise,
}

impl Default for BenchmarkParams {
    fn default() -> Self {
        BenchmarkParams {
            tau1: 2.0,
            tau2: 1.0,
            n: 5000,
            d_avg: 30.0,
            d_max: 100,
            c_min: 40,
            c_max: 80,
            mu: 0.2,
            r: 20,
            t: 6,
            p: 0.9,
            kind: AttributeKind::Numerical,
            rng_seed: 0,
            noise: AttributeNoise::default(),
        }
    }
}

impl BenchmarkParams {
    /// A thousand-node variant of the defaults that generates and mines in
    /// well under a second.
    pub fn desk_scale() -> Self {
        BenchmarkParams {
            n: 1000,
            d_avg: 20.0,
            d_max: 50,
            c_min: 20,
            c_max: 40,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if !(self.tau1.is_finite() && self.tau2.is_finite()) {
            return fail("power-law exponents must be finite".into());
        }
        if self.n < 2 {
            return fail(format!("n must be at least 2, got {}", self.n));
        }
        if !(self.d_avg >= 1.0 && self.d_avg <= self.d_max as f64) {
            return fail(format!(
                "need 1 <= d_avg <= d_max, got d_avg {} and d_max {}",
                self.d_avg, self.d_max
            ));
        }
        if self.d_max >= self.n {
            return fail(format!("d_max {} must be below n {}", self.d_max, self.n));
        }
        if !(2 <= self.c_min && self.c_min <= self.c_max && self.c_max <= self.n) {
            return fail(format!(
                "need 2 <= c_min <= c_max <= n, got c_min {}, c_max {}, n {}",
                self.c_min, self.c_max, self.n
            ));
        }
        if !(0.0..1.0).contains(&self.mu) {
            return fail(format!("mu must lie in [0, 1), got {}", self.mu));
        }
        if !(1 <= self.t && self.t <= self.r) {
            return fail(format!("need 1 <= t <= r, got t {} and r {}", self.t, self.r));
        }
        if !(0.0..=1.0).contains(&self.p) {
            return fail(format!("p must lie in [0, 1], got {}", self.p));
        }
        let noise = &self.noise;
        if !(noise.delta >= 0.0 && noise.delta.is_finite()) || !(0.0..=1.0).contains(&noise.binary_background) {
            return fail("noise delta must be non-negative and the binary background a probability".into());
        }
        if self.kind == AttributeKind::Categorical && noise.categories < 2 {
            return fail(format!(
                "categorical domains need at least 2 values, got {}",
                noise.categories
            ));
        }
        Ok(())
    }
}

/// Planted communities and their subspaces, index-aligned.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub communities: Vec<Vec<NodeId>>,
    pub subspaces: Vec<Subspace>,
}

impl GroundTruth {
    pub fn len(&self) -> usize {
        self.communities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.communities.is_empty()
    }

    /// One line per community: `ids | dims`.
    pub fn write(&self, mut out: impl Write) -> std::io::Result<()> {
        for (members, subspace) in self.communities.iter().zip(&self.subspaces) {
            let ids: Vec<String> = members.iter().map(usize::to_string).collect();
            let dims: Vec<String> = subspace.dims().iter().map(usize::to_string).collect();
            writeln!(out, "{} | {}", ids.join(" "), dims.join(" "))?;
        }
        Ok(())
    }

    pub fn read(input: impl BufRead, source_name: &str) -> Result<Self> {
        let mut truth = GroundTruth {
            communities: Vec::new(),
            subspaces: Vec::new(),
        };
        for (i, line) in input.lines().enumerate() {
            let line = line.map_err(|e| Error::io(source_name, e))?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (ids, dims) = line
                .split_once('|')
                .ok_or_else(|| Error::parse(source_name, i + 1, "expected `ids | dims`"))?;
            let numbers = |text: &str| -> Result<Vec<usize>> {
                text.split_whitespace()
                    .map(|tok| {
                        tok.parse()
                            .map_err(|_| Error::parse(source_name, i + 1, format!("bad integer `{tok}`")))
                    })
                    .collect()
            };
            let mut members = numbers(ids)?;
            members.sort_unstable();
            members.dedup();
            if members.is_empty() {
                return Err(Error::parse(source_name, i + 1, "community has no members"));
            }
            let subspace = Subspace::new(numbers(dims)?, usize::MAX)
                .map_err(|_| Error::parse(source_name, i + 1, "subspace has no dimensions"))?;
            truth.communities.push(members);
            truth.subspaces.push(subspace);
        }
        Ok(truth)
    }
}

#[derive(Debug, Clone)]
pub struct Benchmark {
    pub graph: AttributedGraph,
    pub truth: GroundTruth,
    pub params: BenchmarkParams,
    /// Degree changes made to satisfy community capacity and stub parity.
    pub adjustments: usize,
}

impl Benchmark {
    pub fn mean_degree(&self) -> f64 {
        mean_degree(&self.graph)
    }

    pub fn empirical_mixing(&self) -> f64 {
        empirical_mixing(&self.graph, &self.truth)
    }
}

/// Generates a benchmark; a pure function of `params`.
pub fn generate(params: &BenchmarkParams) -> Result<Benchmark> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.rng_seed);
    let mut degrees = lfr::degree_sequence(params, &mut rng)?;
    let sizes = lfr::community_sizes(params, &mut rng)?;
    let smallest_internal = lfr::internal_degree(1, params.mu);
    if smallest_internal >= params.c_max {
        return Err(Error::Infeasible(format!(
            "no community of size up to {} can hold internal degree {smallest_internal}",
            params.c_max
        )));
    }
    let assignment = lfr::assign(&mut degrees, &sizes, params.mu, &mut rng);

    let mut edges = Vec::new();
    for members in &assignment.communities {
        let stubs: Vec<NodeId> = members
            .iter()
            .flat_map(|&v| std::iter::repeat_n(v, assignment.internal[v]))
            .collect();
        edges.extend(lfr::wire(stubs, |_, _| true, &mut rng));
    }
    let stubs: Vec<NodeId> = (0..params.n)
        .flat_map(|v| std::iter::repeat_n(v, assignment.external[v]))
        .collect();
    let membership = &assignment.membership;
    edges.extend(lfr::wire(stubs, |u, v| membership[u] != membership[v], &mut rng));

    let planted = attach_attributes(
        &assignment.communities,
        params.n,
        params.r,
        params.t,
        params.p,
        params.kind,
        &params.noise,
        &mut rng,
    );
    let mut values = planted.values;
    if params.kind == AttributeKind::Numerical {
        normalize_columns(&mut values, params.r);
    }
    let schema = AttributeSchema::uniform(params.kind, params.r, params.noise.categories)?;
    let (graph, _) = AttributedGraph::from_parts(schema, values, edges)?;
    let benchmark = Benchmark {
        graph,
        truth: GroundTruth {
            communities: assignment.communities,
            subspaces: planted.subspaces,
        },
        params: *params,
        adjustments: assignment.adjustments,
    };
    info!(
        "generated {} nodes, {} edges, {} communities (mean degree {:.2}, mixing {:.3})",
        params.n,
        benchmark.graph.edge_count(),
        benchmark.truth.len(),
        benchmark.mean_degree(),
        benchmark.empirical_mixing()
    );
    Ok(benchmark)
}

/// Min-max rescales every column to `[0, 1]`, matching what loading the
/// written files would do; constant columns become 0.
fn normalize_columns(values: &mut [f64], r: usize) {
    for dim in 0..r {
        let column = values.iter().skip(dim).step_by(r);
        let (lo, hi) = column.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
            (lo.min(x), hi.max(x))
        });
        let span = hi - lo;
        for x in values.iter_mut().skip(dim).step_by(r) {
            *x = if span > 0.0 { (*x - lo) / span } else { 0.0 };
        }
    }
}

/// Picks a planted community uniformly, then `k` of its subspace dims.
pub fn pick_concerned(truth: &GroundTruth, k: usize, rng_seed: u64) -> Result<Subspace> {
    if truth.is_empty() {
        return Err(Error::Precondition("ground truth has no communities".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let source = &truth.subspaces[rng.random_range(0..truth.len())];
    if k == 0 || k > source.len() {
        return Err(Error::Precondition(format!(
            "k must lie in 1..={} (the planted subspace size), got {k}",
            source.len()
        )));
    }
    let dims = sample(&mut rng, source.len(), k).into_iter().map(|i| source.dims()[i]);
    Subspace::new(dims, usize::MAX)
}

pub fn mean_degree(graph: &AttributedGraph) -> f64 {
    2.0 * graph.edge_count() as f64 / graph.node_count() as f64
}

/// Fraction of edges joining different planted communities.
pub fn empirical_mixing(graph: &AttributedGraph, truth: &GroundTruth) -> f64 {
    let mut membership = vec![usize::MAX; graph.node_count()];
    for (c, members) in truth.communities.iter().enumerate() {
        for &v in members {
            membership[v] = c;
        }
    }
    if graph.edge_count() == 0 {
        return 0.0;
    }
    let crossing = graph
        .edges()
        .iter()
        .filter(|&&(u, v)| membership[u] != membership[v])
        .count();
    crossing as f64 / graph.edge_count() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(seed: u64) -> BenchmarkParams {
        BenchmarkParams {
            rng_seed: seed,
            ..BenchmarkParams::desk_scale()
        }
    }

    #[test]
    fn defaults_match_published_settings() {
        let p = BenchmarkParams::default();
        assert_eq!((p.tau1, p.tau2, p.n, p.d_avg, p.d_max), (2.0, 1.0, 5000, 30.0, 100));
        assert_eq!((p.c_min, p.c_max, p.mu, p.r, p.t, p.p), (40, 80, 0.2, 20, 6, 0.9));
    }

    #[test]
    fn desk_scale_statistics() {
        let b = generate(&small(3)).unwrap();
        let mean = b.mean_degree();
        assert!((mean - 20.0).abs() <= 2.0, "mean degree {mean}");
        let mixing = b.empirical_mixing();
        assert!((mixing - 0.2).abs() <= 0.05, "mixing {mixing}");
        assert!((0..1000).all(|v| b.graph.degree(v) <= 50));
        for (members, subspace) in b.truth.communities.iter().zip(&b.truth.subspaces) {
            assert!((20..=40).contains(&members.len()));
            assert_eq!(subspace.len(), 6);
        }
        let covered: usize = b.truth.communities.iter().map(Vec::len).sum();
        assert_eq!(covered, 1000);
    }

    #[test]
    fn zero_mixing_keeps_edges_inside() {
        let b = generate(&BenchmarkParams { mu: 0.0, ..small(1) }).unwrap();
        assert!(b.empirical_mixing() <= 0.02);
    }

    #[test]
    fn generation_is_deterministic() {
        let a = generate(&small(9)).unwrap();
        let b = generate(&small(9)).unwrap();
        assert_eq!(a.graph.edges(), b.graph.edges());
        assert_eq!(a.graph.values(), b.graph.values());
        assert_eq!(a.truth, b.truth);
    }

    #[test]
    fn infeasible_parameters_are_rejected() {
        let bad = BenchmarkParams {
            c_max: 5,
            d_avg: 30.0,
            ..BenchmarkParams::default()
        };
        assert!(bad.validate().is_err());
        assert!(generate(&BenchmarkParams {
            d_max: 6000,
            ..Default::default()
        })
        .is_err());
        assert!(generate(&BenchmarkParams {
            t: 21,
            ..Default::default()
        })
        .is_err());
    }

    #[test]
    fn pick_concerned_is_subset_of_a_planted_subspace() {
        let b = generate(&small(4)).unwrap();
        for seed in 0..10 {
            let c = pick_concerned(&b.truth, 2, seed).unwrap();
            assert_eq!(c.len(), 2);
            assert!(b.truth.subspaces.iter().any(|s| s.is_superset_of(&c)));
            let full = pick_concerned(&b.truth, 6, seed).unwrap();
            assert!(b.truth.subspaces.contains(&full));
        }
        assert!(pick_concerned(&b.truth, 7, 0).is_err());
    }

    #[test]
    fn ground_truth_round_trip() {
        let truth = GroundTruth {
            communities: vec![vec![0, 2, 5], vec![1, 3]],
            subspaces: vec![Subspace::new([1, 4], 10).unwrap(), Subspace::new([0], 10).unwrap()],
        };
        let mut buf = Vec::new();
        truth.write(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "0 2 5 | 1 4\n1 3 | 0\n");
        assert_eq!(GroundTruth::read(&buf[..], "truth").unwrap(), truth);
        assert!(GroundTruth::read(&b"1 2 3\n"[..], "truth").is_err());
    }

    #[test]
    fn generated_numerical_values_survive_file_round_trip() {
        let b = generate(&BenchmarkParams {
            n: 200,
            d_avg: 8.0,
            d_max: 20,
            c_min: 10,
            c_max: 20,
            r: 4,
            t: 2,
            ..small(2)
        })
        .unwrap();
        let (mut edges, mut nodes) = (Vec::new(), Vec::new());
        crate::graph::write_graph(&b.graph, &mut edges, &mut nodes).unwrap();
        let schema = AttributeSchema::uniform(AttributeKind::Numerical, 4, 0).unwrap();
        let loaded = crate::graph::load_graph(&edges[..], &nodes[..], schema).unwrap();
        assert_eq!(loaded.graph.edges(), b.graph.edges());
        assert_eq!(loaded.graph.values(), b.graph.values());
    }
}
