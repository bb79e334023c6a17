//! Membership, co-occurrence, phrase decoding, and word counts read from
//! one encoded sentence.

use mbat::query::{
    cooccur_score, decode_phrase, format_report, probe_member, read_word_count, ProbeResult,
};
use mbat::structure::{encode_sentence, parse_sentence_spec};
use mbat::{Bindings, Codebook, Normalization, Variant};

const SENTENCE: &str = "@actor the smart girl | @verb saw | @object the gray elephant";

fn main() -> mbat::Result<()> {
    let dim = 2000;
    let distractors = (0..100).map(|i| format!("w{i}"));
    let cb = Codebook::new(dim, 3)?.with_symbols(
        ["the", "smart", "girl", "saw", "gray", "elephant"]
            .iter()
            .map(|s| s.to_string())
            .chain(distractors),
    )?;
    let b = Bindings::from_roles(3, dim, Variant::DenseBipolar, Normalization::TermSqrtD, &["M"])?;
    let op = b.get("M")?;
    let v = encode_sentence(&cb, &b, &parse_sentence_spec(SENTENCE)?)?;

    let mut rows = Vec::new();
    for w in ["girl", "saw", "w7"] {
        rows.push(probe_member(op, &v, w, &cb.vector(w)?, 2, None)?);
    }
    for (a, c) in [("smart", "girl"), ("smart", "elephant")] {
        let (score, level) = cooccur_score(op, &v, &cb.vector(a)?, &cb.vector(c)?, 2)?;
        rows.push(ProbeResult {
            symbol: format!("{a}+{c}"),
            score,
            level: Some(level),
            decision: None,
        });
    }
    for level in 0..3 {
        let (k, count) = read_word_count(&cb, op, &v, level, 5)?;
        rows.push(count);
        rows.extend(decode_phrase(&cb, op, &v, level, k)?);
    }
    print!("{}", format_report(&rows));
    Ok(())
}
