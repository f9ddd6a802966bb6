//! Fourier coefficients of one model, computed by every applicable method.
//!
//! cargo run --release --example fourier_coefficients

use sbmfourier::fourier::{
    elimination_plan, phi, phi_cycle_spectral, phi_elimination, phi_label_sum, phi_star, planted_variance_detail, spectrum,
};
use sbmfourier::graphs::{enumerate_graphs, PatternGraph};
use sbmfourier::sbm::{construct_example, make_sbm, ExampleFamily};

const BUDGET: u128 = 1 << 32;

fn main() {
    let m = make_sbm(
        vec![0.2, 0.3, 0.5],
        vec![vec![0.8, -0.3, 0.1], vec![-0.3, 0.5, -0.6], vec![0.1, -0.6, 0.4]],
    )
    .expect("model");
    let s = spectrum(&m).expect("spectrum");
    println!("eigenvalues of sqrt(p) Q sqrt(p): {:?}", s.eigenvalues);

    println!("\n{:<10} {:>24} {:>12} {:<18}", "H", "phi", "psi", "method");
    for h in enumerate_graphs(5, true).expect("catalog") {
        let r = phi(&m, &h).expect("phi");
        println!("{:<10} {:>24.16e} {:>12.6} {}", h.name(), r.phi, r.psi, r.method.as_str());
    }

    // closed forms against the brute-force label sum
    for t in 1..=4 {
        let a = phi_star(&m, t).expect("star").phi;
        let b = phi_label_sum(&m, &PatternGraph::star(t), BUDGET).expect("label sum").phi;
        println!("star{t}: closed form {a:.16e}, label sum {b:.16e}");
    }
    for t in 3..=6 {
        let a = phi_cycle_spectral(&m, t).expect("cycle").phi;
        let b = phi_elimination(&m, &PatternGraph::cycle(t), BUDGET).expect("elimination").phi;
        println!("cyc{t}: spectral {a:.16e}, elimination {b:.16e}");
    }
    let k4 = PatternGraph::complete(4);
    let (order, cost) = elimination_plan(m.k(), &k4);
    println!("k4 elimination order {order:?}, cost {cost}");

    let quiet = construct_example(&ExampleFamily::DiagPm1).expect("example");
    let v = planted_variance_detail(&quiet, &PatternGraph::cycle(4), 20, BUDGET).expect("variance");
    println!("\ndiag_pm1, cyc4, n = 20: planted variance {:.6e} over {} overlap classes", v.variance, v.classes.len());
}
