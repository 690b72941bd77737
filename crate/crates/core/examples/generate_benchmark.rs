//! Generates an attributed benchmark with planted communities and
//! subspaces, prints its statistics and writes it to a directory.
//!
//! ```text
//! cargo run --release --example generate_benchmark -- [out_dir] [mu] [numerical|binary|categorical]
//! ```

use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;

use orgmine::benchgen::{self, BenchmarkParams};
use orgmine::graph::write_graph_files;
use orgmine::{AttributeKind, Error};

fn main() -> orgmine::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let out_dir = PathBuf::from(args.first().map_or("bench", String::as_str));
    let mu: f64 = args.get(1).map_or(Ok(0.2), |s| s.parse()).expect("mu is a number");
    let kind = match args.get(2).map(String::as_str) {
        Some("binary") => AttributeKind::Binary,
        Some("categorical") => AttributeKind::Categorical,
        _ => AttributeKind::Numerical,
    };

    let params = BenchmarkParams {
        mu,
        kind,
        ..BenchmarkParams::desk_scale()
    };
    let bench = benchgen::generate(&params)?;
    println!(
        "{} nodes, {} edges, {} planted communities",
        bench.graph.node_count(),
        bench.graph.edge_count(),
        bench.truth.len()
    );
    println!(
        "mean degree {:.2} (target {}), mixing {:.3} (target {mu})",
        bench.mean_degree(),
        params.d_avg,
        bench.empirical_mixing()
    );
    let sizes: Vec<usize> = bench.truth.communities.iter().map(Vec::len).collect();
    println!("community sizes {sizes:?}");
    println!("first planted subspace {}", bench.truth.subspaces[0]);

    std::fs::create_dir_all(&out_dir).map_err(|e| Error::io(&out_dir, e))?;
    write_graph_files(
        &bench.graph,
        &out_dir.join("edges.txt"),
        &out_dir.join("nodes.tsv"),
        &out_dir.join("schema.toml"),
    )?;
    let truth_path = out_dir.join("truth.txt");
    let file = File::create(&truth_path).map(BufWriter::new);
    file.and_then(|f| bench.truth.write(f))
        .map_err(|e| Error::io(&truth_path, e))?;
    println!("wrote {}", out_dir.display());
    Ok(())
}
