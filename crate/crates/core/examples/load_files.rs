//! Writes a small attributed network in the text formats, loads it back
//! and mines it around a named attribute.
//!
//! The network has two triangles of researchers bridged by one edge; each
//! triangle shares a field and a seniority band.

use orgmine::graph::load_graph_files;
use orgmine::{pipeline, Error, MineConfig, Subspace};

const SCHEMA: &str = r#"
[[dims]]
name = "field"
kind = "categorical"
domain = ["db", "ml", "theory"]

[[dims]]
name = "seniority"
kind = "numerical"

[[dims]]
name = "has_grant"
kind = "binary"
"#;

// id, field, seniority (raw; normalized on load), has_grant
const NODES: &str = "\
0\tdb\t3\t1
1\tdb\t4\t1
2\tdb\t3\t1
3\tml\t12\t0
4\tml\t11\t1
5\tml\t12\t0
";

const EDGES: &str = "\
# two triangles and a bridge
0 1
1 2
0 2
2 3
3 4
4 5
3 5
";

fn main() -> orgmine::Result<()> {
    let dir = std::env::temp_dir().join(format!("orgmine-load-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    for (name, text) in [("schema.toml", SCHEMA), ("nodes.tsv", NODES), ("edges.txt", EDGES)] {
        let path = dir.join(name);
        std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    }

    let loaded = load_graph_files(&dir.join("edges.txt"), &dir.join("nodes.tsv"), &dir.join("schema.toml"))?;
    let graph = loaded.graph;
    let seniority = graph.schema().dim(1);
    println!(
        "{} nodes, {} edges; seniority range {:?} normalized to [0, 1]",
        graph.node_count(),
        graph.edge_count(),
        seniority.range
    );

    let field = graph.schema().index_of("field").expect("schema has a field dimension");
    let concerned = Subspace::new([field], graph.attribute_count())?;
    let mut config = MineConfig::default();
    config.seeding.pi = 50.0;
    let organization = pipeline::mine(&graph, &concerned, &config)?;
    for pair in &organization.pairs {
        let names: Vec<&str> = pair
            .subspace
            .dims()
            .iter()
            .map(|&d| graph.schema().dim(d).name.as_str())
            .collect();
        println!(
            "community {:?} on {names:?}, fitness {:.3}",
            pair.community, pair.fitness
        );
    }
    std::fs::remove_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    Ok(())
}
