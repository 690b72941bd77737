//! Text formats for attributed graphs.
//!
//! * edges: `u v` per line, whitespace separated, 0-based ids, `#` comments
//! * nodes: `id<TAB>v1<TAB>...<TAB>vr` per line, one row per node
//! * schema: TOML, see [`AttributeSchema`]

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use log::warn;

use super::{AttributeKind, AttributeSchema, AttributedGraph, EdgeCleanup};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct LoadedGraph {
    pub graph: AttributedGraph,
    pub cleanup: EdgeCleanup,
}

fn content_lines<R: BufRead>(reader: R, source: &str) -> impl Iterator<Item = Result<(usize, String)>> + use<R> {
    let source = source.to_string();
    reader.lines().enumerate().filter_map(move |(i, line)| {
        let line = match line {
            Ok(line) => line,
            Err(e) => return Some(Err(Error::io(source.clone(), e))),
        };
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            None
        } else {
            Some(Ok((i + 1, line)))
        }
    })
}

/// Parses the edge and node streams against `schema`.
///
/// Numerical dimensions are min-max normalized over the loaded nodes; a
/// constant dimension maps to `0`. The observed range is recorded in the
/// returned graph's schema.
pub fn load_graph(edges: impl BufRead, nodes: impl BufRead, mut schema: AttributeSchema) -> Result<LoadedGraph> {
    schema.validate()?;
    let r = schema.len();

    let mut rows: Vec<Option<Vec<f64>>> = Vec::new();
    for item in content_lines(nodes, "nodes") {
        let (line_no, line) = item?;
        let mut fields = line.trim_end_matches(['\r', '\n']).split('\t');
        let id_field = fields.next().unwrap_or_default().trim();
        let id: usize = id_field
            .parse()
            .map_err(|_| Error::parse("nodes", line_no, format!("bad node id {id_field:?}")))?;
        let fields: Vec<&str> = fields.collect();
        if fields.len() != r {
            return Err(Error::Arity {
                node: id,
                expected: r,
                found: fields.len(),
            });
        }
        let mut row = Vec::with_capacity(r);
        for (dim, raw) in schema.dims.iter().zip(&fields) {
            let raw = raw.trim();
            let value =
                match dim.kind {
                    AttributeKind::Numerical => raw.parse::<f64>().ok().filter(|x| x.is_finite()).ok_or_else(|| {
                        Error::parse("nodes", line_no, format!("bad number {raw:?} for `{}`", dim.name))
                    })?,
                    AttributeKind::Binary => match raw {
                        "0" => 0.0,
                        "1" => 1.0,
                        _ => {
                            return Err(Error::parse(
                                "nodes",
                                line_no,
                                format!("binary `{}` expects 0 or 1, got {raw:?}", dim.name),
                            ))
                        }
                    },
                    AttributeKind::Categorical => dim.category_index(raw).ok_or_else(|| Error::OutsideDomain {
                        node: id,
                        dim: dim.name.clone(),
                        value: raw.to_string(),
                    })? as f64,
                };
            row.push(value);
        }
        if id >= rows.len() {
            rows.resize(id + 1, None);
        }
        if rows[id].replace(row).is_some() {
            return Err(Error::parse("nodes", line_no, format!("duplicate node id {id}")));
        }
    }
    if let Some(missing) = rows.iter().position(Option::is_none) {
        return Err(Error::parse(
            "nodes",
            0,
            format!("node ids must cover 0..{}; id {missing} has no row", rows.len()),
        ));
    }
    let n = rows.len();
    let mut values: Vec<f64> = rows.into_iter().flatten().flatten().collect();

    for (d, dim) in schema.dims.iter_mut().enumerate() {
        if dim.kind != AttributeKind::Numerical || n == 0 {
            continue;
        }
        let column = (0..n).map(|v| values[v * r + d]);
        let lo = column.clone().fold(f64::INFINITY, f64::min);
        let hi = column.fold(f64::NEG_INFINITY, f64::max);
        dim.range = Some([lo, hi]);
        for v in 0..n {
            let x = &mut values[v * r + d];
            *x = if hi > lo {
                ((*x - lo) / (hi - lo)).clamp(0.0, 1.0)
            } else {
                0.0
            };
        }
    }

    let mut pairs = Vec::new();
    for item in content_lines(edges, "edges") {
        let (line_no, line) = item?;
        let mut it = line.split_whitespace();
        let (Some(a), Some(b), None) = (it.next(), it.next(), it.next()) else {
            return Err(Error::parse("edges", line_no, "expected `u v`"));
        };
        let parse = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| Error::parse("edges", line_no, format!("bad node id {s:?}")))
        };
        pairs.push((parse(a)?, parse(b)?));
    }

    let (graph, cleanup) = AttributedGraph::from_parts(schema, values, pairs)?;
    if cleanup.self_loops > 0 || cleanup.duplicates > 0 {
        warn!(
            "dropped {} self-loop(s) and {} duplicate edge(s)",
            cleanup.self_loops, cleanup.duplicates
        );
    }
    Ok(LoadedGraph { graph, cleanup })
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|e| Error::io(path, e))
}

pub fn load_graph_files(edges: &Path, nodes: &Path, schema: &Path) -> Result<LoadedGraph> {
    let text = std::fs::read_to_string(schema).map_err(|e| Error::io(schema, e))?;
    let schema = AttributeSchema::from_toml(&text)?;
    load_graph(open(edges)?, open(nodes)?, schema)
}

/// Writes the edge and node files. Numerical values are written normalized,
/// so reloading reproduces the attribute matrix exactly.
pub fn write_graph(graph: &AttributedGraph, mut edges: impl Write, mut nodes: impl Write) -> std::io::Result<()> {
    for &(u, v) in graph.edges() {
        writeln!(edges, "{u} {v}")?;
    }
    let schema = graph.schema();
    for v in 0..graph.node_count() {
        write!(nodes, "{v}")?;
        for (dim, &x) in schema.dims.iter().zip(graph.attributes(v)) {
            match dim.kind {
                AttributeKind::Numerical => write!(nodes, "\t{x}")?,
                AttributeKind::Binary => write!(nodes, "\t{}", x as u8)?,
                AttributeKind::Categorical => write!(nodes, "\t{}", dim.domain[x as usize])?,
            }
        }
        writeln!(nodes)?;
    }
    edges.flush()?;
    nodes.flush()
}

/// Writes edges, nodes and schema files. The schema is written without the
/// observed ranges since the node values are already normalized.
pub fn write_graph_files(graph: &AttributedGraph, edges: &Path, nodes: &Path, schema: &Path) -> Result<()> {
    let create = |p: &Path| File::create(p).map(BufWriter::new).map_err(|e| Error::io(p, e));
    write_graph(graph, create(edges)?, create(nodes)?).map_err(|e| Error::io(edges, e))?;
    let mut plain = graph.schema().clone();
    for dim in &mut plain.dims {
        dim.range = None;
    }
    std::fs::write(schema, plain.to_toml()).map_err(|e| Error::io(schema, e))
}
