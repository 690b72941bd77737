//! Spread of the edge norms of a subspace, the denominator of the kernel.
//!
//! Norms are taken from fixed-point sums of squared differences. Those
//! sums are exact integers, so the variance of a subspace is the same value
//! whether computed from scratch or from a neighbouring subspace's sums
//! plus or minus one column.

use super::{Subspace, Toggle};
use crate::graph::AttributedGraph;

/// Spread, relative to the root mean square norm, below which norms count
/// as equal.
const SPREAD_NOISE: f64 = 64.0 * f64::EPSILON;

const LANES: usize = 4;
const BLOCK: usize = 256;

/// Per-edge sums of squared differences over one subspace.
#[derive(Debug, Clone, Default)]
pub(crate) struct SquareSums {
    sums: Vec<f64>,
    total: u128,
}

impl SquareSums {
    pub fn compute(graph: &AttributedGraph, subspace: &Subspace) -> Self {
        let mut out = SquareSums::default();
        out.refill(graph, subspace);
        out
    }

    pub fn refill(&mut self, graph: &AttributedGraph, subspace: &Subspace) {
        self.sums.clear();
        self.sums.resize(graph.edge_count(), 0.0);
        for &i in subspace.dims() {
            for (s, &q) in self.sums.iter_mut().zip(graph.dimension_squares(i)) {
                *s += q;
            }
        }
        self.total = subspace.dims().iter().map(|&i| graph.square_total(i)).sum();
    }

    /// Population variance of the norms of a `size`-dimensional subspace.
    pub fn variance(&self, graph: &AttributedGraph, size: usize) -> f64 {
        let stats = Stats::new(graph, self.total, size);
        stats.finish(stats.accumulate(&self.sums, |s, _| s, &self.sums))
    }

    /// Variance for the subspace with `dim` toggled.
    pub fn toggled_variance(&self, graph: &AttributedGraph, size: usize, dim: usize, toggle: Toggle) -> f64 {
        let column = graph.dimension_squares(dim);
        match toggle {
            Toggle::Add => {
                let stats = Stats::new(graph, self.total + graph.square_total(dim), size);
                stats.finish(stats.accumulate(&self.sums, |s, q| s + q, column))
            }
            Toggle::Remove => {
                let stats = Stats::new(graph, self.total - graph.square_total(dim), size);
                stats.finish(stats.accumulate(&self.sums, |s, q| s - q, column))
            }
        }
    }
}

/// Shifted moments of `sqrt(s * unit)`, the shift being the root mean
/// square so the variance does not suffer from cancellation.
struct Stats {
    unit: f64,
    shift: f64,
    count: usize,
}

#[derive(Default)]
struct Moments {
    dev: [f64; LANES],
    dev_sq: [f64; LANES],
}

impl Stats {
    fn new(graph: &AttributedGraph, total: u128, size: usize) -> Self {
        let unit = 1.0 / (graph.square_unit() * size.max(1) as f64);
        let count = graph.edge_count();
        let shift = if count == 0 {
            0.0
        } else {
            (total as f64 * unit / count as f64).sqrt()
        };
        Stats { unit, shift, count }
    }

    /// Moments over all edges, using 256-bit vectors when available. Both
    /// paths perform the same operations in the same order.
    #[inline(always)]
    fn accumulate(&self, sums: &[f64], combine: impl Fn(f64, f64) -> f64, column: &[f64]) -> Moments {
        #[cfg(target_arch = "x86_64")]
        if std::arch::is_x86_feature_detected!("avx") {
            // SAFETY: the feature was detected at runtime.
            return unsafe { self.accumulate_avx(sums, combine, column) };
        }
        self.accumulate_portable(sums, combine, column)
    }

    #[cfg(target_arch = "x86_64")]
    #[target_feature(enable = "avx")]
    unsafe fn accumulate_avx(&self, sums: &[f64], combine: impl Fn(f64, f64) -> f64, column: &[f64]) -> Moments {
        self.accumulate_portable(sums, combine, column)
    }

    /// Works in blocks: an element-wise pass for the shifted norms, then a
    /// four-lane reduction, so both vectorize.
    #[inline(always)]
    fn accumulate_portable(&self, sums: &[f64], combine: impl Fn(f64, f64) -> f64, column: &[f64]) -> Moments {
        let mut m = Moments::default();
        let mut block = [0.0; BLOCK];
        for (s, q) in sums.chunks(BLOCK).zip(column.chunks(BLOCK)) {
            let xs = &mut block[..s.len()];
            for ((x, &s), &q) in xs.iter_mut().zip(s).zip(q) {
                *x = (combine(s, q) * self.unit).sqrt() - self.shift;
            }
            let whole = xs.len() - xs.len() % LANES;
            for chunk in xs[..whole].chunks_exact(LANES) {
                #[allow(clippy::needless_range_loop)]
                for lane in 0..LANES {
                    m.dev[lane] += chunk[lane];
                    m.dev_sq[lane] += chunk[lane] * chunk[lane];
                }
            }
            for (lane, &x) in xs[whole..].iter().enumerate() {
                m.dev[lane] += x;
                m.dev_sq[lane] += x * x;
            }
        }
        m
    }

    fn finish(&self, m: Moments) -> f64 {
        if self.count == 0 {
            return 0.0;
        }
        let n = self.count as f64;
        let mean = ((m.dev[0] + m.dev[2]) + (m.dev[1] + m.dev[3])) / n;
        let variance = (((m.dev_sq[0] + m.dev_sq[2]) + (m.dev_sq[1] + m.dev_sq[3])) / n - mean * mean).max(0.0);
        if variance.sqrt() <= SPREAD_NOISE * self.shift {
            0.0
        } else {
            variance
        }
    }
}

/// Variance of the norms of `subspace` over all edges of `graph`.
pub(crate) fn norm_variance(graph: &AttributedGraph, subspace: &Subspace) -> f64 {
    SquareSums::compute(graph, subspace).variance(graph, subspace.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{AttributeKind, AttributeSchema};

    #[test]
    fn norms_point_one_and_point_three() {
        let schema = AttributeSchema::uniform(AttributeKind::Numerical, 1, 0).unwrap();
        let (g, _) = AttributedGraph::from_parts(schema, vec![0.0, 0.1, 0.4], [(0, 1), (1, 2)]).unwrap();
        let v = norm_variance(&g, &Subspace::new([0], 1).unwrap());
        assert!((v - 0.01).abs() < 1e-15, "{v}");
    }

    #[test]
    fn equal_norms_have_zero_variance() {
        let schema = AttributeSchema::uniform(AttributeKind::Binary, 3, 0).unwrap();
        let values = vec![0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0];
        let (g, _) = AttributedGraph::from_parts(schema, values, [(0, 1), (1, 2)]).unwrap();
        assert_eq!(norm_variance(&g, &Subspace::new([0, 1], 3).unwrap()), 0.0);
    }

    #[test]
    fn toggled_variance_matches_scratch() {
        let schema = AttributeSchema::uniform(AttributeKind::Numerical, 3, 0).unwrap();
        let values: Vec<f64> = (0..15).map(|i| ((i * 37) % 11) as f64 / 10.0).collect();
        let edges = [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4), (1, 3)];
        let (g, _) = AttributedGraph::from_parts(schema, values, edges).unwrap();
        let base = Subspace::new([0, 2], 3).unwrap();
        let sums = SquareSums::compute(&g, &base);
        assert_eq!(
            sums.toggled_variance(&g, 3, 1, Toggle::Add),
            norm_variance(&g, &base.with(1))
        );
        assert_eq!(
            sums.toggled_variance(&g, 1, 0, Toggle::Remove),
            norm_variance(&g, &base.without(0).unwrap())
        );
    }
}
