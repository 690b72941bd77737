//! Seeds from the concerned-attribute backbone: which edges survive the
//! threshold, how label propagation splits them, and which groups become
//! seeds.

use orgmine::benchgen::{self, BenchmarkParams};
use orgmine::seeding::{build_backbone, extract_seeds, label_propagation, mean_edge_differences};
use orgmine::SeedingConfig;

fn main() -> orgmine::Result<()> {
    let bench = benchgen::generate(&BenchmarkParams::desk_scale())?;
    let graph = &bench.graph;
    let concerned = benchgen::pick_concerned(&bench.truth, 2, 0)?;
    println!("concerned dimensions {concerned}");
    println!("mean edge differences {:?}", mean_edge_differences(graph, &concerned));

    for pi in [1.0, 5.0, 10.0, 20.0] {
        let config = SeedingConfig {
            pi,
            ..SeedingConfig::default()
        };
        let backbone: Vec<_> = build_backbone(graph, &concerned, &config)
            .into_iter()
            .map(|e| graph.edge(e))
            .collect();
        let partition = label_propagation(&backbone, graph.node_count(), config.rng_seed);
        let seeds = extract_seeds(&partition, &config);
        let sizes: Vec<usize> = seeds.iter().map(Vec::len).collect();
        println!(
            "pi {pi:>4}: {} backbone edges over {} nodes, {} seeds of sizes {sizes:?}",
            backbone.len(),
            partition.len(),
            seeds.len()
        );
    }
    Ok(())
}
