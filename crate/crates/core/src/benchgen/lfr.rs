//! LFR-style structure: power-law degrees and community sizes, planted
//! communities with a mixing parameter, configuration-model wiring.

use std::collections::HashMap;

use log::debug;
use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::BenchmarkParams;
use crate::error::{Error, Result};
use crate::graph::NodeId;

fn near(a: f64, b: f64) -> bool {
    (a - b).abs() < 1e-9
}

/// Mean of the continuous power law `x^-tau` truncated to `[a, b]`.
pub(crate) fn power_law_mean(a: f64, b: f64, tau: f64) -> f64 {
    if near(a, b) {
        return a;
    }
    if near(tau, 1.0) {
        (b - a) / (b / a).ln()
    } else if near(tau, 2.0) {
        (b / a).ln() / (1.0 / a - 1.0 / b)
    } else {
        (1.0 - tau) / (2.0 - tau) * (b.powf(2.0 - tau) - a.powf(2.0 - tau)) / (b.powf(1.0 - tau) - a.powf(1.0 - tau))
    }
}

/// Inverse-CDF draw from the truncated power law.
pub(crate) fn sample_power_law(rng: &mut ChaCha8Rng, a: f64, b: f64, tau: f64) -> f64 {
    let u: f64 = rng.random();
    if near(a, b) {
        a
    } else if near(tau, 1.0) {
        a * (b / a).powf(u)
    } else {
        let e = 1.0 - tau;
        (a.powf(e) + u * (b.powf(e) - a.powf(e))).powf(1.0 / e)
    }
}

/// Lower cutoff giving the truncated law on `[x_min, d_max]` mean `d_avg`.
pub(crate) fn solve_min_degree(d_avg: f64, d_max: f64, tau: f64) -> Result<f64> {
    let (mut lo, mut hi) = (1.0, d_max);
    if power_law_mean(lo, d_max, tau) > d_avg {
        return Err(Error::Infeasible(format!(
            "average degree {d_avg} is below the smallest mean {:.3} reachable with d_max {d_max}",
            power_law_mean(lo, d_max, tau)
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if power_law_mean(mid, d_max, tau) < d_avg {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

pub(crate) fn degree_sequence(params: &BenchmarkParams, rng: &mut ChaCha8Rng) -> Result<Vec<usize>> {
    let d_max = params.d_max as f64;
    let x_min = solve_min_degree(params.d_avg, d_max, params.tau1)?;
    Ok((0..params.n)
        .map(|_| (sample_power_law(rng, x_min, d_max, params.tau1).round() as usize).clamp(1, params.d_max))
        .collect())
}

/// Power-law community sizes in `[c_min, c_max]` summing to exactly `n`.
pub(crate) fn community_sizes(params: &BenchmarkParams, rng: &mut ChaCha8Rng) -> Result<Vec<usize>> {
    let (c_min, c_max) = (params.c_min, params.c_max);
    let mut sizes = Vec::new();
    let mut total = 0;
    while total < params.n {
        let s = (sample_power_law(rng, c_min as f64, c_max as f64, params.tau2).round() as usize).clamp(c_min, c_max);
        sizes.push(s);
        total += s;
    }
    // trim the overshoot, dropping the last community if trimming alone
    // would push sizes under c_min
    let mut excess = total - params.n;
    let shrinkable: usize = sizes.iter().map(|s| s - c_min).sum();
    if excess > shrinkable {
        let last = sizes.pop().expect("at least one community");
        total -= last;
        let mut deficit = params.n - total;
        let growable: usize = sizes.iter().map(|s| c_max - s).sum();
        if deficit > growable || sizes.is_empty() {
            return Err(Error::Infeasible(format!(
                "cannot split {} nodes into communities of size {c_min}..={c_max}",
                params.n
            )));
        }
        let mut i = 0;
        while deficit > 0 {
            let k = i % sizes.len();
            if sizes[k] < c_max {
                sizes[k] += 1;
                deficit -= 1;
            }
            i += 1;
        }
        excess = 0;
    }
    let mut i = 0;
    while excess > 0 {
        let k = sizes.len() - 1 - i % sizes.len();
        if sizes[k] > c_min {
            sizes[k] -= 1;
            excess -= 1;
        }
        i += 1;
    }
    Ok(sizes)
}

pub(crate) fn internal_degree(degree: usize, mu: f64) -> usize {
    ((1.0 - mu) * degree as f64).round() as usize
}

/// Planted structure before wiring.
pub(crate) struct Assignment {
    pub membership: Vec<usize>,
    pub communities: Vec<Vec<NodeId>>,
    pub internal: Vec<usize>,
    pub external: Vec<usize>,
    /// Degree changes made to satisfy capacity and parity.
    pub adjustments: usize,
}

/// Places nodes into communities so that each node's internal degree fits
/// its community. Nodes with larger internal degree are placed first; a
/// node that fits nowhere has its degree lowered.
pub(crate) fn assign(degrees: &mut [usize], sizes: &[usize], mu: f64, rng: &mut ChaCha8Rng) -> Assignment {
    let n = degrees.len();
    let mut order: Vec<NodeId> = (0..n).collect();
    order.shuffle(rng);
    order.sort_by_key(|&v| std::cmp::Reverse(internal_degree(degrees[v], mu)));

    let mut free: Vec<usize> = sizes.to_vec();
    let mut membership = vec![0; n];
    let mut communities: Vec<Vec<NodeId>> = vec![Vec::new(); sizes.len()];
    let mut adjustments = 0;
    for v in order {
        let need = internal_degree(degrees[v], mu);
        let slots: usize = (0..sizes.len())
            .filter(|&c| free[c] > 0 && sizes[c] > need)
            .map(|c| free[c])
            .sum();
        let community = if slots > 0 {
            let mut pick = rng.random_range(0..slots);
            (0..sizes.len())
                .filter(|&c| free[c] > 0 && sizes[c] > need)
                .find(|&c| {
                    if pick < free[c] {
                        true
                    } else {
                        pick -= free[c];
                        false
                    }
                })
                .expect("slot index within total")
        } else {
            let c = (0..sizes.len())
                .filter(|&c| free[c] > 0)
                .max_by_key(|&c| (sizes[c], std::cmp::Reverse(c)))
                .expect("a free slot remains for every unplaced node");
            while degrees[v] > 1 && internal_degree(degrees[v], mu) >= sizes[c] {
                degrees[v] -= 1;
            }
            adjustments += 1;
            c
        };
        free[community] -= 1;
        membership[v] = community;
        communities[community].push(v);
    }
    for members in &mut communities {
        members.sort_unstable();
    }

    let mut internal: Vec<usize> = (0..n).map(|v| internal_degree(degrees[v], mu)).collect();
    let mut external: Vec<usize> = (0..n).map(|v| degrees[v] - internal[v]).collect();

    for (c, members) in communities.iter().enumerate() {
        let stubs: usize = members.iter().map(|&v| internal[v]).sum();
        if stubs % 2 == 1 {
            let v = *members.choose(rng).expect("communities are non-empty");
            if internal[v] + 1 < sizes[c] {
                internal[v] += 1;
            } else {
                internal[v] -= 1;
            }
            degrees[v] = internal[v] + external[v];
            adjustments += 1;
        }
    }
    let stubs: usize = external.iter().sum();
    if stubs % 2 == 1 {
        let candidates: Vec<NodeId> = (0..n).filter(|&v| external[v] > 0).collect();
        let v = *candidates.choose(rng).expect("odd stub count implies a stub");
        external[v] -= 1;
        degrees[v] -= 1;
        adjustments += 1;
    }
    if adjustments > 0 {
        debug!("{adjustments} degree adjustment(s) for capacity and parity");
    }

    Assignment {
        membership,
        communities,
        internal,
        external,
        adjustments,
    }
}

fn key(u: NodeId, v: NodeId) -> (NodeId, NodeId) {
    (u.min(v), u.max(v))
}

/// Pairs shuffled stubs, then swaps endpoints between bad and random edges
/// until no self-loop, multi-edge or disallowed pair is left or the
/// attempt budget runs out. Edges still bad afterwards are dropped.
pub(crate) fn wire(
    stubs: Vec<NodeId>,
    allowed: impl Fn(NodeId, NodeId) -> bool,
    rng: &mut ChaCha8Rng,
) -> Vec<(NodeId, NodeId)> {
    let mut stubs = stubs;
    stubs.shuffle(rng);
    let mut edges: Vec<(NodeId, NodeId)> = stubs.chunks_exact(2).map(|p| (p[0], p[1])).collect();
    if edges.len() < 2 {
        return edges.into_iter().filter(|&(u, v)| u != v && allowed(u, v)).collect();
    }
    let mut count: HashMap<(NodeId, NodeId), u32> = HashMap::new();
    for &(u, v) in &edges {
        *count.entry(key(u, v)).or_default() += 1;
    }
    let is_bad = |(u, v): (NodeId, NodeId), count: &HashMap<(NodeId, NodeId), u32>| {
        u == v || !allowed(u, v) || count[&key(u, v)] > 1
    };

    let mut bad: Vec<usize> = (0..edges.len()).filter(|&i| is_bad(edges[i], &count)).collect();
    let budget = 10 * edges.len();
    let mut attempts = 0;
    while let Some(&b) = bad.last() {
        if attempts >= budget {
            break;
        }
        if !is_bad(edges[b], &count) {
            bad.pop();
            continue;
        }
        attempts += 1;
        let j = rng.random_range(0..edges.len());
        if j == b {
            continue;
        }
        let (a1, a2) = edges[b];
        let (mut c1, mut c2) = edges[j];
        if rng.random::<bool>() {
            std::mem::swap(&mut c1, &mut c2);
        }
        let (n1, n2) = ((a1, c1), (a2, c2));
        let fresh = |(u, v): (NodeId, NodeId)| u != v && allowed(u, v) && !count.contains_key(&key(u, v));
        if key(n1.0, n1.1) == key(n2.0, n2.1) || !fresh(n1) || !fresh(n2) {
            continue;
        }
        for old in [edges[b], edges[j]] {
            let k = key(old.0, old.1);
            let c = count.get_mut(&k).expect("edge is counted");
            *c -= 1;
            if *c == 0 {
                count.remove(&k);
            }
        }
        *count.entry(key(n1.0, n1.1)).or_default() += 1;
        *count.entry(key(n2.0, n2.1)).or_default() += 1;
        edges[b] = n1;
        edges[j] = n2;
    }
    let mut seen = std::collections::HashSet::new();
    edges
        .into_iter()
        .filter(|&(u, v)| u != v && allowed(u, v) && seen.insert(key(u, v)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn power_law_mean_matches_numerical_integration() {
        for &(a, b, tau) in &[(2.0, 50.0, 2.0), (3.0, 40.0, 1.0), (1.5, 30.0, 2.5)] {
            // midpoint rule oracle
            let steps = 200_000;
            let h = (b - a) / steps as f64;
            let (mut num, mut den) = (0.0, 0.0);
            for i in 0..steps {
                let x: f64 = a + (i as f64 + 0.5) * h;
                let p = x.powf(-tau);
                num += x * p;
                den += p;
            }
            assert!((power_law_mean(a, b, tau) - num / den).abs() < 1e-6);
        }
    }

    #[test]
    fn sampled_mean_matches_target() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x_min = solve_min_degree(20.0, 50.0, 2.0).unwrap();
        assert!((power_law_mean(x_min, 50.0, 2.0) - 20.0).abs() < 1e-9);
        let mean = (0..100_000)
            .map(|_| sample_power_law(&mut rng, x_min, 50.0, 2.0))
            .sum::<f64>()
            / 100_000.0;
        assert!((mean - 20.0).abs() < 0.3, "{mean}");
        assert!(solve_min_degree(2.0, 100.0, 2.0).is_err());
    }

    #[test]
    fn sizes_sum_to_n_within_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in [100, 333, 1000, 1001] {
            let params = BenchmarkParams {
                n,
                c_min: 20,
                c_max: 40,
                ..BenchmarkParams::desk_scale()
            };
            let sizes = community_sizes(&params, &mut rng).unwrap();
            assert_eq!(sizes.iter().sum::<usize>(), n);
            assert!(sizes.iter().all(|&s| (20..=40).contains(&s)), "{sizes:?}");
        }
        let params = BenchmarkParams {
            n: 45,
            c_min: 20,
            c_max: 22,
            ..BenchmarkParams::desk_scale()
        };
        assert!(community_sizes(&params, &mut rng).is_err());
    }

    #[test]
    fn wiring_produces_simple_allowed_edges() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let stubs: Vec<NodeId> = (0..30).flat_map(|v| std::iter::repeat_n(v, 4)).collect();
        let edges = wire(stubs, |u, v| (u < 15) != (v < 15), &mut rng);
        let mut seen = std::collections::HashSet::new();
        for &(u, v) in &edges {
            assert_ne!(u, v);
            assert!((u < 15) != (v < 15));
            assert!(seen.insert(key(u, v)));
        }
        assert!(edges.len() >= 55, "{}", edges.len());
    }
}
