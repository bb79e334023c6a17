use proptest::prelude::*;

use mbat::binding::{BindConfig, Bindings};
use mbat::capacity::{error_free_prob, pair_error, required_dimension};
use mbat::codebook::{Codebook, CodebookFile};
use mbat::learn::{perceptron_train, predict, Label, LabeledExample};
use mbat::query::{cleanup, decode_phrase, multilevel_probe};
use mbat::structure::{encode_phrase, parse_sentence_spec_with, ParseOptions, Phrase};
use mbat::{
    bind, bind_power, bundle, derive_vector, dot, two_input_bind, BindingOperator, Hypervector,
    Normalization, Variant,
};

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}

fn dense(seed: u64, dim: usize, norm: Normalization) -> BindingOperator {
    BindingOperator::new(seed, "M", dim, Variant::DenseBipolar, norm).unwrap()
}

fn continuous(dim: usize) -> impl Strategy<Value = Hypervector> {
    prop::collection::vec(-50.0f64..50.0, dim).prop_map(|v| Hypervector::new(v).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn derived_vectors_are_pure_and_bipolar(seed in any::<u64>(), sym in "[a-z]{1,8}", dim in 1usize..300) {
        let a = derive_vector(seed, &sym, dim).unwrap();
        prop_assert!(a.is_bipolar());
        prop_assert_eq!(&a, &derive_vector(seed, &sym, dim).unwrap());
        let longer = derive_vector(seed, &sym, dim + 17).unwrap();
        prop_assert_eq!(a.as_slice(), &longer.as_slice()[..dim]);
    }

    #[test]
    fn bundle_is_linear_under_dot(seed in any::<u64>(), x in continuous(97)) {
        let a = derive_vector(seed, "a", 97).unwrap();
        let b = derive_vector(seed, "b", 97).unwrap();
        let lhs = dot(&x, &bundle(&[a.clone(), b.clone()]).unwrap()).unwrap();
        let rhs = dot(&x, &a).unwrap() + dot(&x, &b).unwrap();
        prop_assert!(close(lhs, rhs, 1e-9));
    }

    #[test]
    fn unnormalized_binding_is_linear(seed in any::<u64>(), a in continuous(70), b in continuous(70)) {
        let op = dense(seed, 70, Normalization::None);
        let lhs = bind(&op, &a.add(&b).unwrap()).unwrap();
        let rhs = bind(&op, &a).unwrap().add(&bind(&op, &b).unwrap()).unwrap();
        for (x, y) in lhs.as_slice().iter().zip(rhs.as_slice()) {
            prop_assert!(close(*x, *y, 1e-9));
        }
    }

    #[test]
    fn permutation_preserves_dots(seed in any::<u64>(), a in continuous(50), b in continuous(50)) {
        let op = BindingOperator::new(seed, "P", 50, Variant::Permutation, Normalization::None).unwrap();
        let pa = bind(&op, &a).unwrap();
        let pb = bind(&op, &b).unwrap();
        // Same products in a different order.
        let mut left: Vec<f64> = pa.as_slice().iter().zip(pb.as_slice()).map(|(x, y)| x * y).collect();
        let mut right: Vec<f64> = a.as_slice().iter().zip(b.as_slice()).map(|(x, y)| x * y).collect();
        left.sort_by(f64::total_cmp);
        right.sort_by(f64::total_cmp);
        prop_assert_eq!(left, right);
        prop_assert!(close(dot(&pa, &pb).unwrap(), dot(&a, &b).unwrap(), 1e-12));
    }

    #[test]
    fn cached_and_streamed_rows_agree(seed in any::<u64>(), v in continuous(130), norm_ix in 0usize..4) {
        let norm = [Normalization::None, Normalization::ResultSqrtD, Normalization::TermSqrtD, Normalization::BinaryThreshold][norm_ix];
        let cached = BindingOperator::with_config(seed, "M", 130, Variant::DenseBipolar, &BindConfig {
            normalization: norm,
            ..BindConfig::default()
        }).unwrap();
        let streamed = BindingOperator::with_config(seed, "M", 130, Variant::DenseBipolar, &BindConfig {
            normalization: norm,
            cache_limit_bits: 0,
            ..BindConfig::default()
        }).unwrap();
        prop_assert_eq!(bind(&cached, &v).unwrap(), bind(&streamed, &v).unwrap());
    }

    #[test]
    fn two_input_binding_is_ordered(seed in any::<u64>()) {
        let l = BindingOperator::new(seed, "Left", 64, Variant::DenseBipolar, Normalization::None).unwrap();
        let r = BindingOperator::new(seed, "Right", 64, Variant::DenseBipolar, Normalization::None).unwrap();
        let a = derive_vector(seed, "a", 64).unwrap();
        let b = derive_vector(seed, "b", 64).unwrap();
        prop_assert_ne!(two_input_bind(&l, &r, &a, &b).unwrap(), two_input_bind(&l, &r, &b, &a).unwrap());
    }

    #[test]
    fn phrases_ignore_word_order(seed in any::<u64>(), words in prop::collection::vec("[a-z]{1,6}", 1..8), rot in 0usize..8) {
        let cb = Codebook::new(64, seed).unwrap();
        let mut shuffled = words.clone();
        let k = rot % shuffled.len();
        shuffled.rotate_left(k);
        shuffled.reverse();
        let p = Phrase::new(words, ["tag"]).unwrap();
        let q = Phrase::new(shuffled, ["tag"]).unwrap();
        prop_assert_eq!(encode_phrase(&cb, &p).unwrap(), encode_phrase(&cb, &q).unwrap());
    }

    #[test]
    fn parsed_phrases_keep_their_words(phrases in prop::collection::vec(prop::collection::vec("[a-z]{1,5}", 1..5), 1..5)) {
        let text = phrases.iter().map(|p| p.join(" ")).collect::<Vec<_>>().join(" | ");
        let spec = parse_sentence_spec_with(&text, &ParseOptions { auto_count_tags: false }).unwrap();
        let got: Vec<Vec<String>> = spec.phrases.iter().map(|p| p.words().to_vec()).collect();
        prop_assert_eq!(got, phrases);
    }

    #[test]
    fn probe_is_sum_of_powers(seed in any::<u64>(), depth in 0usize..4, v in continuous(48)) {
        let op = dense(seed, 48, Normalization::TermSqrtD);
        let x = derive_vector(seed, "x", 48).unwrap();
        let lhs = dot(&multilevel_probe(&op, &x, depth).unwrap(), &v).unwrap();
        let rhs: f64 = (0..=depth).map(|i| dot(&bind_power(&op, &x, i).unwrap(), &v).unwrap()).sum();
        prop_assert!(close(lhs, rhs, 1e-9));
    }

    #[test]
    fn cleanup_follows_relabeling(seed in any::<u64>(), pick in 0usize..6) {
        let names = ["a", "b", "c", "d", "e", "f"];
        let renamed = ["q", "r", "s", "t", "u", "v"];
        let mut one = Codebook::new(128, 0).unwrap();
        let mut two = Codebook::new(128, 0).unwrap();
        for (i, (n, m)) in names.iter().zip(renamed).enumerate() {
            let v = derive_vector(seed, &i.to_string(), 128).unwrap();
            one.pin(n, v.clone()).unwrap();
            two.pin(m, v).unwrap();
        }
        let target = derive_vector(seed, &pick.to_string(), 128).unwrap();
        let a = cleanup(&one, &target).unwrap();
        let b = cleanup(&two, &target).unwrap();
        let ia = names.iter().position(|n| *n == a.symbol).unwrap();
        prop_assert_eq!(renamed[ia], b.symbol.as_str());
        prop_assert_eq!(a.score, b.score);
    }

    #[test]
    fn decode_returns_distinct_words(seed in any::<u64>(), k in 1usize..=6, level in 0usize..3) {
        let cb = Codebook::new(96, seed).unwrap().with_symbols(["a", "b", "c", "d", "e", "f", "@x"]).unwrap();
        let op = dense(seed, 96, Normalization::TermSqrtD);
        let v = derive_vector(seed, "anything", 96).unwrap();
        let out = decode_phrase(&cb, &op, &v, level, k).unwrap();
        prop_assert_eq!(out.len(), k);
        let mut names: Vec<&str> = out.iter().map(|r| r.symbol.as_str()).collect();
        names.sort();
        names.dedup();
        prop_assert_eq!(names.len(), k);
        prop_assert!(!names.contains(&"@x"));
    }

    #[test]
    fn decisions_are_scale_invariant(seed in any::<u64>(), c in 0.001f64..1000.0, w in continuous(40)) {
        let x = derive_vector(seed, "x", 40).unwrap();
        let ex = LabeledExample { vector: x.scale(c), label: Label::Pos };
        prop_assert_eq!(predict(&w, &x).unwrap(), predict(&w, &ex.vector).unwrap());
    }

    #[test]
    fn perceptron_commutes_with_power_of_two_scaling(seed in any::<u64>(), e in -8i32..8, labels in prop::collection::vec(any::<bool>(), 12)) {
        let c = 2f64.powi(e);
        let data: Vec<LabeledExample> = labels.iter().enumerate().map(|(i, &pos)| LabeledExample {
            vector: derive_vector(seed, &i.to_string(), 32).unwrap(),
            label: if pos { Label::Pos } else { Label::Neg },
        }).collect();
        let scaled: Vec<LabeledExample> = data.iter().map(|ex| LabeledExample { vector: ex.vector.scale(c), label: ex.label }).collect();
        let a = perceptron_train(&data, 20).unwrap();
        let b = perceptron_train(&scaled, 20).unwrap();
        prop_assert_eq!(a.mistakes, b.mistakes);
        prop_assert_eq!(a.weights.scale(c), b.weights);
    }

    #[test]
    fn codebook_files_round_trip(seed in any::<u64>(), dim in 1usize..80, syms in prop::collection::vec("[a-z@][a-z0-9]{0,6}", 0..6)) {
        let syms: Vec<String> = syms.into_iter().filter(|s| s != "@").collect();
        let cb = Codebook::new(dim, seed).unwrap().with_symbols(&syms).unwrap();
        let bindings = Bindings::from_roles(seed, dim, Variant::Permutation, Normalization::TermSqrtD, &["M", "actor"]).unwrap();
        let file = CodebookFile { codebook: cb, bindings: bindings.records() };
        let text = file.to_text();
        let back = CodebookFile::parse(&text).unwrap();
        prop_assert_eq!(&back, &file);
        prop_assert_eq!(back.to_text(), text);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn error_free_prob_is_monotone(d in 1u32..200_000, s in 1u64..500, n in 1u64..1_000_000) {
        let base = error_free_prob(d as f64, s, n);
        let more_d = error_free_prob(d as f64 + 50.0, s, n);
        let more_s = error_free_prob(d as f64, s + 1, n);
        let more_n = error_free_prob(d as f64, s, n + 10);
        prop_assert!(more_d.linearized >= base.linearized && more_d.exact >= base.exact);
        prop_assert!(more_s.linearized <= base.linearized && more_s.exact <= base.exact);
        prop_assert!(more_n.linearized <= base.linearized && more_n.exact <= base.exact);
    }

    #[test]
    fn pair_error_decays_at_least_exponentially(s in 1u64..200, z in 1.0f64..6.0, delta in 1.0f64..2000.0) {
        // T(sqrt(x)) <= T(sqrt(x0)) exp(-(x - x0)/2) for x >= x0 >= 0; in D
        // this means every extra dimension costs a factor exp(-1/(2(2S-1))).
        let d = z * z * (2 * s - 1) as f64;
        let bound = pair_error(d, s) * (-delta / (2.0 * (2 * s - 1) as f64)).exp();
        prop_assert!(pair_error(d + delta, s) <= bound * (1.0 + 1e-9));
    }

    #[test]
    fn exact_dominates_linearized_near_one(d in 100u32..200_000, s in 1u64..300, n in 1u64..100_000) {
        let p = error_free_prob(d as f64, s, n);
        prop_assert!(p.exact >= p.linearized - 1e-12);
        if p.linearized >= 0.9 {
            prop_assert!(p.exact - p.linearized <= 0.01);
        }
    }
}

#[test]
fn required_dimension_grows_nearly_linearly_in_s() {
    let ratios: Vec<f64> = [50u64, 100, 200, 400]
        .iter()
        .map(|&s| required_dimension(s, 1000, 0.98).unwrap() as f64 / s as f64)
        .collect();
    for w in ratios.windows(2) {
        let change = (w[1] - w[0]).abs() / w[0];
        assert!(change <= 0.15, "{ratios:?}");
    }
}
