//! One sentence under several encodings: role matrices, sequential powers,
//! a surface bag of words, and a weighted mix of all three. Also a nested
//! structure built directly from bindings and sums.

use mbat::structure::{encode_expr, encode_sentence, parse_sentence_spec, Scheme, StructureExpr};
use mbat::{cosine, Bindings, Codebook, Normalization, Variant};

fn main() -> mbat::Result<()> {
    let dim = 4000;
    let cb = Codebook::new(dim, 11)?;
    let roles = ["M", "actor", "verb", "object", "Actor", "Verb", "Relation", "Ordered"];
    let b = Bindings::from_roles(11, dim, Variant::DenseBipolar, Normalization::TermSqrtD, &roles)?;

    let active = parse_sentence_spec("@actor the smart girl | @verb saw | @object the gray elephant")?;
    let passive = parse_sentence_spec(
        "@object the gray elephant | @verb was seen | @actor by the smart girl",
    )?;
    let mix = Scheme::Multi(vec![
        (1.0, Scheme::RoleMatrices),
        (1.0, Scheme::SequentialPowers),
        (1.0, Scheme::Surface),
    ]);
    for (name, scheme) in [
        ("surface", Scheme::Surface),
        ("sequential", Scheme::SequentialPowers),
        ("roles", Scheme::RoleMatrices),
        ("mixed", mix),
    ] {
        let a = encode_sentence(&cb, &b, &active.clone().with_scheme(scheme.clone()))?;
        let p = encode_sentence(&cb, &b, &passive.clone().with_scheme(scheme))?;
        println!("{name:<10} cos(active, passive) = {:.3}", cosine(&a, &p)?);
    }

    // "the little star's beside the big star"
    let flat = StructureExpr::sum(vec![
        StructureExpr::bind("Actor", StructureExpr::bag(&["the", "little", "star"])),
        StructureExpr::bind("Verb", StructureExpr::leaf("'s")),
        StructureExpr::bind("Relation", StructureExpr::bag(&["beside", "the", "big", "star"])),
    ]);
    let ordered_actor = StructureExpr::sum(vec![
        StructureExpr::bag(&["the", "little", "star"]),
        StructureExpr::bind("Ordered", StructureExpr::bag(&["the", "little"])),
    ]);
    let nested = StructureExpr::sum(vec![
        StructureExpr::bind("Actor", ordered_actor),
        StructureExpr::bind("Verb", StructureExpr::leaf("'s")),
        StructureExpr::bind("Relation", StructureExpr::bag(&["beside", "the", "big", "star"])),
    ]);
    let both = StructureExpr::sum(vec![flat.clone(), nested.clone()]);
    let f = encode_expr(&cb, &b, &flat)?;
    let n = encode_expr(&cb, &b, &nested)?;
    let m = encode_expr(&cb, &b, &both)?;
    println!("cos(flat, nested) = {:.3}", cosine(&f, &n)?);
    println!("cos(flat, both) = {:.3}, cos(nested, both) = {:.3}", cosine(&f, &m)?, cosine(&n, &m)?);
    Ok(())
}
