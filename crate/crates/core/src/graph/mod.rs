//! Attributed graph data model.
//!
//! An [`AttributedGraph`] is an immutable undirected simple graph whose nodes
//! carry one value per schema dimension. Each edge appears once in the edge
//! list (as `(u, v)` with `u < v`, sorted) and twice in the adjacency index.

mod io;
mod schema;

pub use io::{load_graph, load_graph_files, write_graph, write_graph_files, LoadedGraph};
pub use schema::{AttributeKind, AttributeSchema, Dimension};

use crate::error::{Error, Result};

pub type NodeId = usize;
pub type EdgeId = usize;

/// Counts of input edges discarded while building a graph.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EdgeCleanup {
    pub self_loops: usize,
    pub duplicates: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttributedGraph {
    schema: AttributeSchema,
    node_count: usize,
    edges: Vec<(NodeId, NodeId)>,
    offsets: Vec<usize>,
    // (neighbor, edge id), grouped per node by `offsets`
    adjacency: Vec<(NodeId, EdgeId)>,
    values: Vec<f64>,
    // dimension-major: differences[dim * edge_count + e]
    differences: Vec<f64>,
    // squared differences as integer multiples of 1 / square_unit, same
    // layout; sums over any subspace stay below 2^53 and are exact
    squares: Vec<f64>,
    square_unit: f64,
    // per dimension, the sum of `squares`
    square_totals: Vec<u128>,
}

impl AttributedGraph {
    /// Builds a graph from already-encoded attribute values (row-major,
    /// `node_count x schema.len()`). Self-loops and duplicate edges are
    /// dropped and counted.
    pub fn from_parts(
        schema: AttributeSchema,
        values: Vec<f64>,
        edges: impl IntoIterator<Item = (NodeId, NodeId)>,
    ) -> Result<(Self, EdgeCleanup)> {
        schema.validate()?;
        let r = schema.len();
        if !values.len().is_multiple_of(r) {
            return Err(Error::Arity {
                node: values.len() / r,
                expected: r,
                found: values.len() % r,
            });
        }
        let node_count = values.len() / r;
        for (node, row) in values.chunks(r).enumerate() {
            for (dim, &value) in schema.dims.iter().zip(row) {
                check_value(dim, node, value)?;
            }
        }

        let mut cleanup = EdgeCleanup::default();
        let mut list = Vec::new();
        for (u, v) in edges {
            if u >= node_count || v >= node_count {
                return Err(Error::UnknownNode { u, v, node_count });
            }
            if u == v {
                cleanup.self_loops += 1;
                continue;
            }
            list.push((u.min(v), u.max(v)));
        }
        list.sort_unstable();
        let before = list.len();
        list.dedup();
        cleanup.duplicates = before - list.len();

        let mut degree = vec![0usize; node_count + 1];
        for &(u, v) in &list {
            degree[u] += 1;
            degree[v] += 1;
        }
        let mut offsets = Vec::with_capacity(node_count + 1);
        let mut acc = 0;
        offsets.push(0);
        for d in &degree[..node_count] {
            acc += d;
            offsets.push(acc);
        }
        let mut cursor = offsets.clone();
        let mut adjacency = vec![(0, 0); acc];
        for (e, &(u, v)) in list.iter().enumerate() {
            adjacency[cursor[u]] = (v, e);
            cursor[u] += 1;
            adjacency[cursor[v]] = (u, e);
            cursor[v] += 1;
        }

        let mut differences = Vec::with_capacity(r * list.len());
        for dim in 0..r {
            differences.extend(
                list.iter()
                    .map(|&(u, v)| attribute_difference(&schema, dim, values[u * r + dim], values[v * r + dim])),
            );
        }

        let square_unit = 2f64.powi(52 - r.next_power_of_two().trailing_zeros() as i32);
        let squares: Vec<f64> = differences.iter().map(|&d| (d * d * square_unit).round()).collect();
        let square_totals = if list.is_empty() {
            vec![0; r]
        } else {
            squares
                .chunks(list.len())
                .map(|c| c.iter().map(|&q| q as u128).sum())
                .collect()
        };

        Ok((
            AttributedGraph {
                schema,
                node_count,
                edges: list,
                offsets,
                adjacency,
                values,
                differences,
                squares,
                square_unit,
                square_totals,
            },
            cleanup,
        ))
    }

    pub fn schema(&self) -> &AttributeSchema {
        &self.schema
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Attribute count `r`.
    pub fn attribute_count(&self) -> usize {
        self.schema.len()
    }

    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    pub fn edge(&self, e: EdgeId) -> (NodeId, NodeId) {
        self.edges[e]
    }

    /// `(neighbor, edge id)` pairs of `v`.
    pub fn neighbors(&self, v: NodeId) -> &[(NodeId, EdgeId)] {
        &self.adjacency[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn degree(&self, v: NodeId) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn attributes(&self, v: NodeId) -> &[f64] {
        let r = self.schema.len();
        &self.values[v * r..(v + 1) * r]
    }

    pub fn value(&self, v: NodeId, dim: usize) -> f64 {
        self.values[v * self.schema.len() + dim]
    }

    /// Row-major attribute matrix.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Difference of the endpoints of edge `e` on dimension `dim`.
    pub fn edge_difference(&self, e: EdgeId, dim: usize) -> f64 {
        self.differences[dim * self.edges.len() + e]
    }

    /// Differences of every edge on `dim`, indexed by edge id.
    pub fn dimension_differences(&self, dim: usize) -> &[f64] {
        let m = self.edges.len();
        &self.differences[dim * m..(dim + 1) * m]
    }

    /// Fixed-point squared differences of every edge on `dim`, in units of
    /// `1 / square_unit()`.
    pub(crate) fn dimension_squares(&self, dim: usize) -> &[f64] {
        let m = self.edges.len();
        &self.squares[dim * m..(dim + 1) * m]
    }

    pub(crate) fn square_unit(&self) -> f64 {
        self.square_unit
    }

    pub(crate) fn square_total(&self, dim: usize) -> u128 {
        self.square_totals[dim]
    }
}

fn check_value(dim: &Dimension, node: NodeId, value: f64) -> Result<()> {
    let ok = match dim.kind {
        AttributeKind::Numerical => (0.0..=1.0).contains(&value),
        AttributeKind::Binary => value == 0.0 || value == 1.0,
        AttributeKind::Categorical => value >= 0.0 && value.fract() == 0.0 && (value as usize) < dim.domain.len(),
    };
    if ok {
        Ok(())
    } else {
        Err(Error::OutsideDomain {
            node,
            dim: dim.name.clone(),
            value: value.to_string(),
        })
    }
}

/// Difference of two encoded values on one dimension, in `[0, 1]`.
///
/// Numerical: absolute difference of the normalized values. Categorical:
/// `0` when equal, else `1`. Binary: `0` only when both nodes have the
/// attribute (`1`, `1`), else `1`; with `binary_absence_similar` set,
/// (`0`, `0`) also yields `0`.
pub fn attribute_difference(schema: &AttributeSchema, dim: usize, a: f64, b: f64) -> f64 {
    match schema.dims[dim].kind {
        AttributeKind::Numerical => (a - b).abs(),
        AttributeKind::Categorical => {
            if a == b {
                0.0
            } else {
                1.0
            }
        }
        AttributeKind::Binary => {
            let both_present = a == 1.0 && b == 1.0;
            let both_absent = a == 0.0 && b == 0.0;
            if both_present || (schema.binary_absence_similar && both_absent) {
                0.0
            } else {
                1.0
            }
        }
    }
}
