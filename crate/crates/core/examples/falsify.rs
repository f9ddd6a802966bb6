//! Randomized search for the worst ratio of each comparison inequality.
//!
//! cargo run --release --example falsify -- [models] [seed]

use sbmfourier::mc::SeededStream;
use sbmfourier::sbm::RandomFamily;
use sbmfourier::verify::{falsify_search, NONVANISHING_C, PIN_MODELS, PIN_SEED};

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let models = args.first().and_then(|s| s.parse().ok()).unwrap_or(PIN_MODELS);
    let seed = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(PIN_SEED);
    let stream = SeededStream::new(seed, 0);
    let families = [
        (RandomFamily::Diagonal, vec![6]),
        (RandomFamily::Nonnegative, vec![6]),
        (RandomFamily::Nonvanishing(NONVANISHING_C), (1..=6).collect()),
        (RandomFamily::TwoCommunity, vec![2, 4, 6]),
        (RandomFamily::Arbitrary, vec![6]),
    ];
    println!("seed {seed}, {models} models per family");
    for (family, dmaxes) in families {
        for dmax in dmaxes {
            let r = falsify_search(family, dmax, models, &stream).expect("search");
            let witness = r.worst_witness.as_ref().map(|w| {
                format!("trial {} graph {}", w.trial, w.graph.map(|g| g.to_spec()).unwrap_or_default())
            });
            println!(
                "{:<16} dmax {dmax}  violations {:>3}  worst {:.17e}  bound {:?}  {}",
                family.name(),
                r.violations,
                r.worst_ratio,
                r.constant_bound_used,
                witness.unwrap_or_default()
            );
            for p in &r.parts[1..] {
                println!("    {:<24} violations {} worst {:.6e}", p.inequality.name(), p.violations, p.worst_ratio);
            }
        }
    }
}
