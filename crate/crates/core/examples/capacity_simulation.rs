//! Monte Carlo separation trials for the small system next to the
//! formula.

use mbat::capacity::{simulate_capacity, simulation_csv_row, CapacityParams, SIMULATION_CSV_HEADER};

fn main() -> mbat::Result<()> {
    let trials = 100;
    println!("{SIMULATION_CSV_HEADER}");
    for d in [350, 500, 700, 900, 1100] {
        let r = simulate_capacity(CapacityParams::new(d, 20, 1000)?, trials, 1)?;
        println!("{}", simulation_csv_row(&r));
    }
    Ok(())
}
