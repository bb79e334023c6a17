//! Members of a bundle score about D against it; other vectors score
//! about 0 with spread sqrt(S D).

use mbat::{bundle, contains, derive_vector};

fn main() -> mbat::Result<()> {
    let dim = 2000;
    let seed = 7;
    let members: Vec<_> = (0..20)
        .map(|i| derive_vector(seed, &format!("m{i}"), dim))
        .collect::<mbat::Result<_>>()?;
    let v = bundle(&members)?;

    let hits = members
        .iter()
        .filter(|m| contains(&v, m, None).map(|r| r.decision).unwrap_or(false))
        .count();
    let mut false_alarms = 0;
    for i in 0..1000 {
        let other = derive_vector(seed, &format!("x{i}"), dim)?;
        false_alarms += contains(&v, &other, None)?.decision as usize;
    }
    println!("D={dim} S=20");
    println!("members recognized: {hits}/20");
    println!("non-members accepted: {false_alarms}/1000");
    Ok(())
}
