//! Monte Carlo checks with seeds fixed so the outcomes are reproducible.

use mbat::learn::{generate_sentences, run_learning, CorpusSpec, Label, LearnConfig};
use mbat::query::{cooccur_score, decode_phrase, probe_member, rank_symbols, read_word_count};
use mbat::structure::{encode_sentence, parse_sentence_spec};
use mbat::{bind, bundle, cosine, derive_vector, Bindings, Codebook, Normalization, Variant};

const TAGGED_SENTENCE: &str = "@actor the smart girl | @verb saw | @object the gray elephant";

fn setup(dim: usize, seed: u64) -> (Codebook, Bindings) {
    let words = ["the", "smart", "girl", "saw", "gray", "elephant"];
    let distractors = (0..50).map(|i| format!("d{i}"));
    let cb = Codebook::new(dim, seed)
        .unwrap()
        .with_symbols(words.iter().map(|w| w.to_string()).chain(distractors))
        .unwrap();
    let b = Bindings::from_roles(seed, dim, Variant::DenseBipolar, Normalization::TermSqrtD, &["M"])
        .unwrap();
    (cb, b)
}

fn sorted(results: &[mbat::query::ProbeResult]) -> Vec<String> {
    let mut v: Vec<String> = results.iter().map(|r| r.symbol.clone()).collect();
    v.sort();
    v
}

#[test]
fn dense_binding_decorrelates() {
    let dim = 2000;
    let op = mbat::BindingOperator::new(3, "M", dim, Variant::DenseBipolar, Normalization::TermSqrtD)
        .unwrap();
    let limit = 4.0 / (dim as f64).sqrt();
    for i in 0..20 {
        let x = derive_vector(11, &format!("x{i}"), dim).unwrap();
        let c = cosine(&bind(&op, &x).unwrap(), &x).unwrap();
        assert!(c.abs() < limit, "{i}: {c}");
    }
}

#[test]
fn tagged_sentence_decodes_every_phrase() {
    let spec = parse_sentence_spec(TAGGED_SENTENCE).unwrap();
    let mut level2 = 0;
    let mut level0 = 0;
    let mut counts = 0;
    for t in 0..100 {
        let (cb, b) = setup(1000, 700 + t);
        let op = b.get("M").unwrap();
        let v = encode_sentence(&cb, &b, &spec).unwrap();
        if sorted(&decode_phrase(&cb, op, &v, 2, 3).unwrap()) == ["girl", "smart", "the"] {
            level2 += 1;
        }
        if sorted(&decode_phrase(&cb, op, &v, 0, 3).unwrap()) == ["elephant", "gray", "the"] {
            level0 += 1;
        }
        let (k2, _) = read_word_count(&cb, op, &v, 2, 5).unwrap();
        let (k1, _) = read_word_count(&cb, op, &v, 1, 5).unwrap();
        if k2 == 3 && k1 == 1 {
            counts += 1;
        }
    }
    assert!(level2 >= 95, "level 2: {level2}/100");
    assert!(level0 >= 95, "level 0: {level0}/100");
    assert!(counts >= 95, "word counts: {counts}/100");
}

#[test]
fn cooccurrence_grows_with_presence() {
    let spec = parse_sentence_spec(TAGGED_SENTENCE).unwrap();
    let (mut two, mut one, mut none) = (0.0, 0.0, 0.0);
    for t in 0..40 {
        let (cb, b) = setup(1000, 900 + t);
        let op = b.get("M").unwrap();
        let v = encode_sentence(&cb, &b, &spec).unwrap();
        let w = |s: &str| cb.vector(s).unwrap();
        two += cooccur_score(op, &v, &w("smart"), &w("girl"), 2).unwrap().0;
        one += cooccur_score(op, &v, &w("d0"), &w("girl"), 2).unwrap().0;
        none += cooccur_score(op, &v, &w("d0"), &w("d1"), 2).unwrap().0;
    }
    assert!(two > one && one > none, "{two} {one} {none}");
}

#[test]
fn member_probe_separates_members_from_distractors() {
    let spec = parse_sentence_spec(TAGGED_SENTENCE).unwrap();
    let (mut hits, mut false_alarms, mut positive) = (0, 0, 0);
    let trials = 20;
    for t in 0..trials {
        let (cb, b) = setup(1000, 1100 + t);
        let op = b.get("M").unwrap();
        let v = encode_sentence(&cb, &b, &spec).unwrap();
        for w in ["smart", "saw", "elephant"] {
            let r = probe_member(op, &v, w, &cb.vector(w).unwrap(), 2, None).unwrap();
            hits += r.decision.unwrap() as usize;
        }
        for i in 0..50 {
            let s = format!("d{i}");
            let r = probe_member(op, &v, &s, &cb.vector(&s).unwrap(), 2, None).unwrap();
            false_alarms += r.decision.unwrap() as usize;
            positive += (r.score > 0.0) as usize;
        }
    }
    assert!(hits >= 58, "hits {hits}/60");
    assert!(false_alarms <= 60, "false alarms {false_alarms}/1000");
    let frac = positive as f64 / 1000.0;
    assert!((0.44..=0.56).contains(&frac), "non-member scores positive {frac}");
}

#[test]
fn noisy_bundle_cleans_up_to_its_members() {
    let dim = 1000;
    let cb = Codebook::new(dim, 21)
        .unwrap()
        .with_symbols((0..200).map(|i| format!("s{i}")))
        .unwrap();
    let members: Vec<String> = (0..20).map(|i| format!("s{}", i * 7)).collect();
    let vs: Vec<_> = members.iter().map(|m| cb.vector(m).unwrap()).collect();
    let noise = derive_vector(99, "noise", dim).unwrap().scale(3.0);
    let v = bundle(&vs).unwrap().add(&noise).unwrap();
    let ranked = rank_symbols(&cb, &v).unwrap();
    let mut top: Vec<String> = ranked[..20].iter().map(|r| r.symbol.clone()).collect();
    let mut want = members.clone();
    top.sort();
    want.sort();
    assert_eq!(top, want);
}

#[test]
fn corpus_labels_are_balanced() {
    let sentences = generate_sentences(&CorpusSpec::standard(2000, 200, 4)).unwrap();
    let pos = sentences.iter().filter(|s| s.label == Label::Pos).count();
    let frac = pos as f64 / sentences.len() as f64;
    assert!((0.45..=0.55).contains(&frac), "{frac}");
}

#[test]
fn learned_classifier_generalizes() {
    let report = run_learning(&LearnConfig::default()).unwrap();
    assert!(report.converged, "{report:?}");
    assert!(report.test_acc >= 0.95, "{report:?}");
    assert!(report.oracle_acc >= 0.95, "{report:?}");
}
