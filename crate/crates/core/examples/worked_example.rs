//! The 10-dimensional worked example: bundle two word vectors and read
//! them back by dot product.

use mbat::query::rank_symbols;
use mbat::{bundle, Codebook, Hypervector};

fn main() -> mbat::Result<()> {
    let columns: [(&str, [i8; 10]); 5] = [
        ("smart", [-1, 1, 1, -1, -1, -1, 1, -1, -1, 1]),
        ("girl", [1, 1, 1, -1, -1, 1, -1, -1, -1, -1]),
        ("saw", [-1, -1, 1, 1, 1, -1, 1, 1, 1, -1]),
        ("gray", [1, -1, -1, -1, -1, -1, -1, 1, 1, -1]),
        ("elephant", [1, -1, 1, -1, -1, 1, -1, 1, -1, -1]),
    ];
    let mut cb = Codebook::new(10, 0)?;
    for (name, signs) in columns {
        cb.pin(name, Hypervector::from_signs(&signs)?)?;
    }
    let v = bundle(&[cb.vector("smart")?, cb.vector("girl")?])?;
    println!("smart + girl = {:?}", v.as_slice());
    for r in rank_symbols(&cb, &v)? {
        println!("{:>9} {:>4}", r.symbol, r.score);
    }
    Ok(())
}
