//! Values checked against independently computed references.

use mbat::capacity::{error_free_prob, plate_bound, required_dimension, tail_prob, z_value};
use mbat::query::{cleanup, rank_symbols};
use mbat::{bundle, dot, Codebook, Hypervector};

/// Upper normal tail from 30-digit arbitrary precision arithmetic.
const TAIL: &[(f64, f64)] = &[
    (0.0, 0.5),
    (0.5, 0.308_537_538_725_986_896_36),
    (1.0, 0.158_655_253_931_457_051_41),
    (2.0, 0.022_750_131_948_179_207_2),
    (3.0, 0.001_349_898_031_630_094_526_7),
    (4.0, 3.167_124_183_311_992_125_4e-5),
    (4.8, 7.933_281_519_755_953_198_2e-7),
    (5.0, 2.866_515_718_791_939_116_7e-7),
    (6.0, 9.865_876_450_376_981_407e-10),
    (7.0, 1.279_812_543_885_835_004_4e-12),
    (8.0, 6.220_960_574_271_784_123_5e-16),
];

#[test]
fn tail_matches_high_precision_reference() {
    for &(x, want) in TAIL {
        let got = tail_prob(x);
        let rel = (got - want).abs() / want;
        assert!(rel <= 1e-10, "x={x}: {got:e} vs {want:e} (rel {rel:e})");
    }
}

#[test]
fn tail_at_4_8_is_one_in_1_259_000() {
    let want = 1.0 / 1_259_000.0;
    assert!((tail_prob(4.8) - want).abs() / want < 0.01);
}

/// Minimal dimensions found by a brute-force scan in double precision with
/// an independent erfc.
#[test]
fn required_dimensions_match_scan() {
    assert_eq!(required_dimension(20, 1000, 0.984).unwrap(), 898);
    assert_eq!(required_dimension(100, 100_000, 0.982).unwrap(), 6931);
    assert_eq!(required_dimension(1000, 1_000_000, 0.99).unwrap(), 89_897);
}

#[test]
fn worked_small_system() {
    assert!((z_value(899.0, 20) - 4.80).abs() < 0.01);
    // 4.8^2 * 39 = 898.56
    assert!((4.8f64.powi(2) * 39.0 - 898.56).abs() < 1e-9);
    let p = error_free_prob(899.0, 20, 1000);
    assert!((p.linearized - 0.984).abs() < 0.001, "{p:?}");
    let m = error_free_prob(6927.0, 100, 100_000);
    assert!((m.linearized - 0.982).abs() < 0.001, "{m:?}");
}

#[test]
fn plate_bounds_match_reference() {
    // 8 (S+1) ln(N/q) evaluated independently.
    let cases = [
        (20, 1000, 1934.171_478_114_998),
        (100, 100_000, 13_023.421_285_974_322),
        (1000, 1_000_000, 147_512.811_397_570_5),
    ];
    for (s, n, want) in cases {
        let b = plate_bound(s, n, 0.01).unwrap();
        assert!((b.bound - want).abs() / want < 1e-12, "{s}: {}", b.bound);
        assert!((b.validity_floor - 2.0 * (s + 1) as f64 / std::f64::consts::PI).abs() < 1e-12);
    }
}

fn ten_dim_codebook() -> Codebook {
    let columns: [(&str, [i8; 10]); 5] = [
        ("smart", [-1, 1, 1, -1, -1, -1, 1, -1, -1, 1]),
        ("girl", [1, 1, 1, -1, -1, 1, -1, -1, -1, -1]),
        ("saw", [-1, -1, 1, 1, 1, -1, 1, 1, 1, -1]),
        ("gray", [1, -1, -1, -1, -1, -1, -1, 1, 1, -1]),
        ("elephant", [1, -1, 1, -1, -1, 1, -1, 1, -1, -1]),
    ];
    let mut cb = Codebook::new(10, 0).unwrap();
    for (name, signs) in columns {
        cb.pin(name, Hypervector::from_signs(&signs).unwrap()).unwrap();
    }
    cb
}

#[test]
fn ten_dim_sum_and_dots() {
    let cb = ten_dim_codebook();
    let v = bundle(&[cb.vector("smart").unwrap(), cb.vector("girl").unwrap()]).unwrap();
    assert_eq!(v.as_slice(), [0.0, 2.0, 2.0, -2.0, -2.0, 0.0, 0.0, -2.0, -2.0, 0.0]);
    let dots: Vec<f64> = ["smart", "girl", "saw", "gray", "elephant"]
        .iter()
        .map(|s| dot(&cb.vector(s).unwrap(), &v).unwrap())
        .collect();
    assert_eq!(dots, [12.0, 12.0, -8.0, -4.0, 4.0]);
}

#[test]
fn ten_dim_cleanup() {
    let cb = ten_dim_codebook();
    let v = bundle(&[cb.vector("smart").unwrap(), cb.vector("girl").unwrap()]).unwrap();
    let ranked = rank_symbols(&cb, &v).unwrap();
    let top: Vec<&str> = ranked[..2].iter().map(|r| r.symbol.as_str()).collect();
    assert_eq!(top, ["smart", "girl"]);
    assert_eq!(ranked[0].score, 12.0);
    assert_eq!(ranked[1].score, 12.0);
    assert_eq!(cleanup(&cb, &cb.vector("girl").unwrap()).unwrap().symbol, "girl");
}
