//! Runs each family comparison on random models and prints the worst ratios.
//!
//! cargo run --release --example verify_families -- [models] [seed]

use sbmfourier::mc::SeededStream;
use sbmfourier::sbm::RandomFamily;
use sbmfourier::verify::{
    check_diagonal, check_nonnegative, check_nonvanishing, check_one_to_one, check_two_community, generate_models,
    norm_search, VerifyReport, DEFAULT_DMAX, NONVANISHING_C,
};

fn show(r: &VerifyReport) {
    println!("{:<16} passed={} violations={} worst {:.6e}", r.theorem, r.passed(), r.violations, r.worst_ratio);
    for p in &r.parts {
        println!(
            "    {:<24} checks {:>6} skipped {:>5} flagged {:>3} worst {:.6e}",
            p.inequality.name(),
            p.checks,
            p.skipped,
            p.flagged,
            p.worst_ratio
        );
    }
}

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let count = args.first().and_then(|s| s.parse().ok()).unwrap_or(300);
    let seed = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(0);
    let stream = SeededStream::new(seed, 0);
    let models = |f: RandomFamily, i: u64| generate_models(f, count, &stream.child(i)).expect("models");
    let d = DEFAULT_DMAX;

    show(&check_diagonal(&models(RandomFamily::Diagonal, 0), d).unwrap());
    show(&check_nonnegative(&models(RandomFamily::Nonnegative, 1), d).unwrap());
    show(&check_nonvanishing(&models(RandomFamily::Nonvanishing(NONVANISHING_C), 2), NONVANISHING_C, d).unwrap());
    show(&check_two_community(&models(RandomFamily::TwoCommunity, 3), d).unwrap());
    show(&check_one_to_one(&models(RandomFamily::Arbitrary, 4)).unwrap());
    show(&norm_search(count, &stream.child(5)).unwrap());
}
