//! Encodes the tagged three-phrase sentence by sequential powers of M and
//! checks the fold against its 13-term closed form.

use mbat::structure::{encode_sentence, parse_sentence_spec};
use mbat::{bind_power, bundle, Bindings, Codebook, Normalization, Variant};

const SENTENCE: &str = "@actor the smart girl | @verb saw | @object the gray elephant";

fn main() -> mbat::Result<()> {
    let dim = 1000;
    let cb = Codebook::new(dim, 42)?;
    let b = Bindings::from_roles(42, dim, Variant::DenseBipolar, Normalization::None, &["M"])?;
    let op = b.get("M")?;

    let spec = parse_sentence_spec(SENTENCE)?;
    for (i, p) in spec.phrases.iter().enumerate() {
        println!("phrase {i}: words {:?} tags {:?}", p.words(), p.tags());
    }
    let folded = encode_sentence(&cb, &b, &spec)?;

    let n = spec.phrases.len();
    let mut terms = Vec::new();
    for (i, p) in spec.phrases.iter().enumerate() {
        for w in p.words() {
            terms.push(bind_power(op, &cb.vector(w)?, n - 1 - i)?);
        }
        for t in p.tags() {
            terms.push(bind_power(op, &cb.tag_vector(t)?, n - 1 - i)?);
        }
    }
    let closed = bundle(&terms)?;
    println!("{} terms; fold equals closed form: {}", terms.len(), folded == closed);
    Ok(())
}
