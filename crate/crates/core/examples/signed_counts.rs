//! Signed subgraph counts on sampled graphs, fast paths against enumeration.
//!
//! cargo run --release --example signed_counts -- [n] [seed]

use sbmfourier::counts::{count_path, signed_count, signed_count_naive};
use sbmfourier::graphs::PatternGraph;
use sbmfourier::mc::{sample_er, sample_sbm, SeededStream};
use sbmfourier::sbm::{construct_example, ExampleFamily};

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let n = args.first().and_then(|s| s.parse().ok()).unwrap_or(40);
    let seed = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(1);
    let stream = SeededStream::new(seed, 0);
    let null = sample_er(n, &stream.child(0));
    let model = construct_example(&ExampleFamily::DiagPm1).expect("model");
    let planted = sample_sbm(&model, n, &stream.child(1));
    println!("n = {n}: null has {} edges, planted has {}", null.edge_count(), planted.edge_count());

    let patterns = [
        PatternGraph::edge(),
        PatternGraph::star(2),
        PatternGraph::star(3),
        PatternGraph::cycle(3),
        PatternGraph::cycle(4),
        PatternGraph::k4_minus(),
    ];
    println!("{:<10} {:<16} {:>10} {:>10}", "H", "path", "null", "planted");
    for h in &patterns {
        let a = signed_count(&null, h).expect("count");
        let b = signed_count(&planted, h).expect("count");
        if n <= 40 {
            assert_eq!(a, signed_count_naive(&null, h).expect("naive"));
        }
        println!("{:<10} {:<16} {:>10} {:>10}", h.name(), format!("{:?}", count_path(h)), a, b);
    }
}
