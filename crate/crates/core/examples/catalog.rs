//! Connected pattern graphs up to a number of edges, with their invariants.
//!
//! cargo run --example catalog -- [max_edges]

use sbmfourier::graphs::{automorphism_count, canonical_form, enumerate_graphs, profile};

fn main() {
    let d = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(4);
    let graphs = enumerate_graphs(d, true).expect("catalog");
    println!("{} connected graphs with at most {d} edges", graphs.len());
    for g in &graphs {
        let p = profile(g);
        println!(
            "{:<10} v={} e={} aut={:<3} {:<8} tree={} bipartite={} 2-connected={} degrees {:?}",
            g.name(),
            g.vertex_count(),
            g.edge_count(),
            automorphism_count(g),
            canonical_form(g).hex(),
            p.is_tree,
            p.is_bipartite,
            p.is_2connected,
            p.degree_sequence,
        );
    }

    // every graph with at most d edges, isolated-vertex free, built from components
    let all = enumerate_graphs(d, false).expect("catalog");
    println!("{} graphs overall", all.len());
}
