//! Error-free probability, required dimension, and Plate's bound for the
//! small, medium, and large systems.

use mbat::capacity::{analyze, error_free_prob, CapacityParams, ANALYTIC_CSV_HEADER};

fn main() -> mbat::Result<()> {
    println!("{ANALYTIC_CSV_HEADER}");
    for (d, s, n, target) in [
        (899, 20, 1000, 0.984),
        (6927, 100, 100_000, 0.982),
        (89_897, 1000, 1_000_000, 0.99),
    ] {
        let report = analyze(CapacityParams::new(d, s, n)?, target, 0.01)?;
        println!("{}", mbat::capacity::analytic_csv_row(&report));
    }

    println!();
    println!("D      linearized  exact");
    for d in (500..=1000).step_by(100) {
        let p = error_free_prob(d as f64, 20, 1000);
        println!("{d:<6} {:<11.4} {:.4}", p.linearized, p.exact);
    }
    Ok(())
}
