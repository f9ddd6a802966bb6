//! Slope fits and dominance tables for the example families.
//!
//! cargo run --release --example scaling_exponents

use sbmfourier::graphs::PatternGraph;
use sbmfourier::scaling::{dominance_table, run_example, FamilyTemplate};

fn main() {
    let fits = [
        (FamilyTemplate::Star1Dominant { beta: 0.8 }, vec![PatternGraph::star(1), PatternGraph::star(2)]),
        (FamilyTemplate::Star2Dominant { beta: 0.7 }, vec![PatternGraph::star(1), PatternGraph::star(2)]),
        (FamilyTemplate::LargeStar { d: 4 }, vec![PatternGraph::star(3), PatternGraph::star(4)]),
        (FamilyTemplate::PlantedColoring { alpha: 0.7 }, vec![PatternGraph::cycle(3), PatternGraph::cycle(4)]),
        (FamilyTemplate::Quiet4Cycle, vec![PatternGraph::cycle(4)]),
    ];
    println!("{:<18} {:<10} {:>10} {:>10} pass", "family", "H", "fitted", "predicted");
    for (t, targets) in &fits {
        for r in run_example(t, targets, &t.default_grid()).expect("fit") {
            let predicted = r.predicted_slope.map_or("-".to_string(), |p| format!("{:.4}", p.slope));
            println!("{:<18} {:<10} {:>10.4} {:>10} {}", r.family, r.graph.name(), r.fitted_slope, predicted, r.passes);
        }
    }

    let tables = [
        (FamilyTemplate::Star1Dominant { beta: 0.8 }, 1_000_000, 6),
        (FamilyTemplate::Star2Dominant { beta: 0.7 }, 1_000_000, 6),
        (FamilyTemplate::LargeStar { d: 4 }, 1_000_000, 4),
        (FamilyTemplate::Quiet4Cycle, 6, 6),
        (FamilyTemplate::PlantedColoring { alpha: 0.7 }, 300, 6),
    ];
    for (t, x, dmax) in tables {
        let table = dominance_table(&t, x, dmax, 1.0).expect("table");
        println!("\n{} at n = {} (dmax {}): designated graph first = {:?}", table.family, table.n, dmax, table.designated_first);
        for row in table.rows.iter().take(6) {
            let mark = if row.above_line { "*" } else { " " };
            println!("  {mark} {:<24} psi {:.6e}  psi*sqrt(n) {:.4}", row.graph.name(), row.psi, row.psi_sqrt_n);
        }
    }
}
