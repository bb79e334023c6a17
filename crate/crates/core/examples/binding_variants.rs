//! Dense, permutation, and two-input binding under each normalization.

use mbat::{
    bind, bind_power, bound_contains, bundle, cosine, derive_vector, dot, two_input_bind,
    BindingOperator, Normalization, Variant,
};

fn main() -> mbat::Result<()> {
    let dim = 1000;
    let x = derive_vector(1, "x", dim)?;
    let y = derive_vector(1, "y", dim)?;

    for variant in [Variant::DenseBipolar, Variant::Permutation] {
        for norm in [
            Normalization::None,
            Normalization::ResultSqrtD,
            Normalization::TermSqrtD,
            Normalization::BinaryThreshold,
        ] {
            let op = BindingOperator::new(1, "M", dim, variant, norm)?;
            let mx = bind(&op, &x)?;
            let m2x = bind_power(&op, &x, 2)?;
            println!(
                "{:<12} {:<9} |Mx|={:<9.2} cos(Mx,x)={:+.3} cos(M2x,x)={:+.3}",
                variant.name(),
                norm.name(),
                mx.norm(),
                cosine(&mx, &x)?,
                cosine(&m2x, &x)?,
            );
        }
    }

    let op = BindingOperator::new(1, "M", dim, Variant::DenseBipolar, Normalization::TermSqrtD)?;
    let bound = bind(&op, &bundle(&[x.clone(), y.clone()])?)?;
    let z = derive_vector(1, "z", dim)?;
    for (name, c) in [("x", &x), ("z", &z)] {
        let r = bound_contains(&op, &bound, c, None)?;
        println!("M(x+y) contains {name}: score {:.1} -> {}", r.score, r.decision);
    }

    let left = BindingOperator::new(1, "Left", dim, Variant::DenseBipolar, Normalization::TermSqrtD)?;
    let right = BindingOperator::new(1, "Right", dim, Variant::DenseBipolar, Normalization::TermSqrtD)?;
    let xy = two_input_bind(&left, &right, &x, &y)?;
    let yx = two_input_bind(&left, &right, &y, &x)?;
    println!("two-input: dot(B(x,y), B(y,x)) = {:.1} of {:.1}", dot(&xy, &yx)?, dot(&xy, &xy)?);
    Ok(())
}
