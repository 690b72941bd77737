//! Edge reweighting under attribute subspaces: norms, kernel weights,
//! community fitness, and the incremental updates used by the search.

use orgmine::kernel::{fitness_delta_node, norm_update, reweigh, subspace_fitness, subspace_norm};
use orgmine::{AttributeKind, AttributeSchema, AttributedGraph, CommunityState, KernelConfig, Subspace, Toggle};

fn main() -> orgmine::Result<()> {
    // Four nodes in a path 0-1-2-3 plus a chord 0-2; nodes 0..=2 agree on
    // dimension 0, node 3 agrees with them on dimension 1 only.
    let schema = AttributeSchema::uniform(AttributeKind::Numerical, 2, 0)?;
    #[rustfmt::skip]
    let values = vec![
        0.10, 0.50,
        0.12, 0.52,
        0.11, 0.49,
        0.90, 0.51,
    ];
    let (graph, _) = AttributedGraph::from_parts(schema, values, [(0, 1), (1, 2), (2, 3), (0, 2)])?;
    let community = [0, 1, 2];

    for dims in [vec![0], vec![1], vec![0, 1]] {
        let subspace = Subspace::new(dims, graph.attribute_count())?;
        let view = reweigh(&graph, &subspace, KernelConfig::default())?;
        let state = CommunityState::new(&graph, &view, community)?;
        println!("subspace {subspace}");
        for (e, &(u, v)) in graph.edges().iter().enumerate() {
            println!(
                "  edge {u}-{v}: norm {:.3}, weight {:.3}",
                view.norms()[e],
                view.weight(e)
            );
        }
        println!("  fitness of {community:?}: {:.4}", subspace_fitness(&state));

        let delta = fitness_delta_node(&graph, &view, &state, 3, Toggle::Add)?;
        println!("  adding node 3 changes fitness by {delta:+.4}");
    }

    // Adding a dimension to a pair's norm without recomputing the rest.
    let a = graph.attributes(2);
    let b = graph.attributes(3);
    let d0 = Subspace::new([0], 2)?;
    let old = subspace_norm(a, b, &d0, graph.schema());
    let diff = (a[1] - b[1]).abs();
    let updated = norm_update(old, 1, diff, Toggle::Add)?;
    let direct = subspace_norm(a, b, &d0.with(1), graph.schema());
    println!("norm of 2-3 on {{0}}: {old:.4}; adding dimension 1: {updated:.4} (direct {direct:.4})");

    // The same toggle on a whole view.
    let view = reweigh(&graph, &d0, KernelConfig::default())?;
    let both = view.update_view(&graph, 1, Toggle::Add)?;
    println!(
        "kernel scale on {{0}} {:.4}, on {{0,1}} {:.4}",
        view.effective_scale(),
        both.effective_scale()
    );
    Ok(())
}
