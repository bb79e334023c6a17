//! Perceptron on sentence vectors labelled by which key word they hold.

use mbat::learn::{run_learning, LearnConfig};

fn main() -> mbat::Result<()> {
    let config = LearnConfig {
        dim: 1000,
        train: 1000,
        test: 500,
        ..LearnConfig::default()
    };
    let report = run_learning(&config)?;
    print!("{}", report.to_text());
    Ok(())
}
