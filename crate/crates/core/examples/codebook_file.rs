//! Writes a codebook with its binding operators to disk, reads it back,
//! and shows that vectors and matrices are reproduced exactly.

use mbat::binding::Bindings;
use mbat::codebook::{Codebook, CodebookFile};
use mbat::{bind, Normalization, Variant};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join("mbat-codebook-example");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("words.mbat");

    let cb = Codebook::new(512, 5)?.with_symbols(["the", "smart", "girl", "@actor"])?;
    let b = Bindings::from_roles(5, 512, Variant::DenseBipolar, Normalization::TermSqrtD, &["M", "actor"])?;
    let file = CodebookFile { codebook: cb, bindings: b.records() };
    file.write(&path)?;
    print!("{}", std::fs::read_to_string(&path)?);

    let back = CodebookFile::read(&path)?;
    let b2 = Bindings::from_records(&back.bindings)?;
    let girl = file.codebook.vector("girl")?;
    println!(
        "round trip equal: {}; bound vectors equal: {}",
        back == file,
        bind(b.get("M")?, &girl)? == bind(b2.get("M")?, &back.codebook.vector("girl")?)?
    );
    Ok(())
}
