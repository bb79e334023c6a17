//! The binding operator: multiplication by a fixed, seeded random matrix.
//!
//! A dense operator has ±1 entries whose row `i` is stream `i` of the key
//! `(seed, role)`; rows are cached as packed bits below a size limit and
//! regenerated on the fly above it. A permutation operator is a seeded
//! Fisher-Yates shuffle of the component indices. Either way the matrix is
//! never exposed, only its action on vectors.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use indexmap::IndexMap;
use rayon::prelude::*;

use crate::error::{check_same_dim, MbatError, Result};
use crate::hypervector::{threshold_bipolar, Hypervector};
use crate::rng::{words_for, StreamKey};

/// Matrices up to this many entries are cached as packed bits (128 MiB).
pub const DEFAULT_CACHE_LIMIT_BITS: u64 = 1 << 30;

/// Below this dimension rows are multiplied on the calling thread.
const PARALLEL_MIN_DIM: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    DenseBipolar,
    Permutation,
}

/// Post-processing applied to every raw matrix product.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Normalization {
    /// The raw product `M v`.
    None,
    /// Rescale the whole result to length `sqrt(D)`.
    ResultSqrtD,
    /// Divide by the operator gain (`sqrt(D)` for dense, 1 for permutations)
    /// so each bound ±1 term keeps expected length `sqrt(D)`. Linear.
    TermSqrtD,
    /// Threshold the result to ±1 (zero maps to +1).
    BinaryThreshold,
}

impl Normalization {
    pub fn is_linear(self) -> bool {
        matches!(self, Normalization::None | Normalization::TermSqrtD)
    }

    pub fn name(self) -> &'static str {
        match self {
            Normalization::None => "none",
            Normalization::ResultSqrtD => "sqrtd",
            Normalization::TermSqrtD => "term",
            Normalization::BinaryThreshold => "binary",
        }
    }
}

impl fmt::Display for Normalization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Normalization {
    type Err = MbatError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Normalization::None),
            "sqrtd" => Ok(Normalization::ResultSqrtD),
            "term" => Ok(Normalization::TermSqrtD),
            "binary" => Ok(Normalization::BinaryThreshold),
            other => Err(MbatError::InvalidArgument(format!(
                "unknown normalization {other:?}"
            ))),
        }
    }
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::DenseBipolar => "dense",
            Variant::Permutation => "perm",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = MbatError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dense" => Ok(Variant::DenseBipolar),
            "perm" => Ok(Variant::Permutation),
            other => Err(MbatError::InvalidArgument(format!(
                "unknown binding variant {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BindConfig {
    pub normalization: Normalization,
    /// Deepest binding power probed by multi-level queries.
    pub max_quote_depth: usize,
    pub cache_limit_bits: u64,
}

impl Default for BindConfig {
    fn default() -> Self {
        Self {
            normalization: Normalization::ResultSqrtD,
            max_quote_depth: 3,
            cache_limit_bits: DEFAULT_CACHE_LIMIT_BITS,
        }
    }
}

struct Dense {
    key: StreamKey,
    dim: usize,
    words: usize,
    rows: Option<Vec<u64>>,
}

impl Dense {
    fn new(key: StreamKey, dim: usize, cache_limit_bits: u64) -> Self {
        let words = words_for(dim);
        let mut dense = Dense {
            key,
            dim,
            words,
            rows: None,
        };
        if (dim as u64).saturating_mul(dim as u64) <= cache_limit_bits {
            let mut rows = vec![0u64; dim * words];
            for (r, chunk) in rows.chunks_mut(words).enumerate() {
                dense.generate_row(r, chunk);
            }
            dense.rows = Some(rows);
        }
        dense
    }

    fn generate_row(&self, r: usize, out: &mut [u64]) {
        self.key.stream(r as u64).fill_bits(out, self.dim);
    }

    fn product(&self, v: &[f64]) -> Vec<f64> {
        let words = self.words;
        let row_dot = |r: usize, buf: &mut Vec<u64>| -> f64 {
            match &self.rows {
                Some(rows) => signed_dot(&rows[r * words..(r + 1) * words], v),
                None => {
                    self.generate_row(r, buf);
                    signed_dot(buf, v)
                }
            }
        };
        if self.dim >= PARALLEL_MIN_DIM {
            (0..self.dim)
                .into_par_iter()
                .map_init(|| vec![0u64; words], |buf, r| row_dot(r, buf))
                .collect()
        } else {
            let mut buf = vec![0u64; words];
            (0..self.dim).map(|r| row_dot(r, &mut buf)).collect()
        }
    }

    fn transpose_product(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        let mut buf = vec![0u64; self.words];
        for (r, &y) in v.iter().enumerate() {
            let bits = match &self.rows {
                Some(rows) => &rows[r * self.words..(r + 1) * self.words],
                None => {
                    self.generate_row(r, &mut buf);
                    &buf[..]
                }
            };
            signed_axpy(bits, y, &mut out);
        }
        out
    }
}

/// Flips the sign of `x` when the packed bit is clear.
#[inline(always)]
fn flip(x: f64, word: u64, bit: usize) -> f64 {
    let mask = ((!word >> bit) & 1) << 63;
    f64::from_bits(x.to_bits() ^ mask)
}

/// `sum_j s_j v_j` with `s_j = ±1` taken from packed bits.
///
/// Sixteen fixed accumulators let the compiler vectorize while keeping the
/// summation order, and so the result, independent of the target.
fn signed_dot(bits: &[u64], v: &[f64]) -> f64 {
    let masks = sign_masks();
    let mut acc = [0.0f64; 16];
    let mut tail = 0.0;
    for (&word, chunk) in bits.iter().zip(v.chunks(64)) {
        if chunk.len() == 64 {
            for half in 0..4 {
                let lo = &masks[((word >> (16 * half)) & 0xff) as usize];
                let hi = &masks[((word >> (16 * half + 8)) & 0xff) as usize];
                let xs = &chunk[16 * half..16 * half + 16];
                for l in 0..8 {
                    acc[l] += f64::from_bits(xs[l].to_bits() ^ lo[l]);
                    acc[l + 8] += f64::from_bits(xs[l + 8].to_bits() ^ hi[l]);
                }
            }
        } else {
            for (b, &x) in chunk.iter().enumerate() {
                tail += flip(x, word, b);
            }
        }
    }
    let mut half = [0.0f64; 8];
    for l in 0..8 {
        half[l] = acc[l] + acc[l + 8];
    }
    let quarter = [half[0] + half[4], half[1] + half[5], half[2] + half[6], half[3] + half[7]];
    (quarter[0] + quarter[2]) + (quarter[1] + quarter[3]) + tail
}

/// For each byte, the eight sign-bit masks that negate where a bit is clear.
fn sign_masks() -> &'static [[u64; 8]; 256] {
    static MASKS: std::sync::OnceLock<[[u64; 8]; 256]> = std::sync::OnceLock::new();
    MASKS.get_or_init(|| {
        let mut t = [[0u64; 8]; 256];
        for (byte, row) in t.iter_mut().enumerate() {
            for (k, m) in row.iter_mut().enumerate() {
                *m = (((!byte >> k) & 1) as u64) << 63;
            }
        }
        t
    })
}

/// `out_j += s_j y`.
fn signed_axpy(bits: &[u64], y: f64, out: &mut [f64]) {
    for (&word, chunk) in bits.iter().zip(out.chunks_mut(64)) {
        for (b, o) in chunk.iter_mut().enumerate() {
            *o += flip(y, word, b);
        }
    }
}

enum Kernel {
    Dense(Dense),
    /// `out[i] = v[perm[i]]`
    Permutation(Vec<u32>),
}

/// A seeded `D x D` binding transform together with its normalization.
#[derive(Clone)]
pub struct BindingOperator {
    role: String,
    seed: u64,
    dim: usize,
    variant: Variant,
    normalization: Normalization,
    kernel: Arc<Kernel>,
}

impl fmt::Debug for BindingOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BindingOperator")
            .field("role", &self.role)
            .field("seed", &self.seed)
            .field("dim", &self.dim)
            .field("variant", &self.variant)
            .field("normalization", &self.normalization)
            .finish()
    }
}

impl BindingOperator {
    pub fn new(
        seed: u64,
        role: &str,
        dim: usize,
        variant: Variant,
        normalization: Normalization,
    ) -> Result<Self> {
        let config = BindConfig {
            normalization,
            ..BindConfig::default()
        };
        Self::with_config(seed, role, dim, variant, &config)
    }

    pub fn with_config(
        seed: u64,
        role: &str,
        dim: usize,
        variant: Variant,
        config: &BindConfig,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(MbatError::InvalidDimension(0));
        }
        if dim > u32::MAX as usize {
            return Err(MbatError::InvalidArgument("dimension too large".into()));
        }
        let kernel = match variant {
            Variant::DenseBipolar => {
                let key = StreamKey::derive("mbat/binding", seed, role.as_bytes());
                Kernel::Dense(Dense::new(key, dim, config.cache_limit_bits))
            }
            Variant::Permutation => {
                let key = StreamKey::derive("mbat/permutation", seed, role.as_bytes());
                let mut stream = key.stream(0);
                let mut perm: Vec<u32> = (0..dim as u32).collect();
                for i in (1..dim).rev() {
                    let j = stream.below(i as u64 + 1) as usize;
                    perm.swap(i, j);
                }
                Kernel::Permutation(perm)
            }
        };
        Ok(Self {
            role: role.to_string(),
            seed,
            dim,
            variant,
            normalization: config.normalization,
            kernel: Arc::new(kernel),
        })
    }

    pub fn from_record(record: &BindingRecord) -> Result<Self> {
        Self::new(
            record.seed,
            &record.role,
            record.dim,
            record.variant,
            record.normalization,
        )
    }

    pub fn record(&self) -> BindingRecord {
        BindingRecord {
            role: self.role.clone(),
            seed: self.seed,
            dim: self.dim,
            variant: self.variant,
            normalization: self.normalization,
        }
    }

    /// The same matrix with a different normalization.
    pub fn with_normalization(&self, normalization: Normalization) -> Self {
        Self {
            normalization,
            ..self.clone()
        }
    }

    pub fn role(&self) -> &str {
        &self.role
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    /// Expected length multiplier of the raw product on a ±1 vector.
    pub fn gain(&self) -> f64 {
        match self.variant {
            Variant::DenseBipolar => (self.dim as f64).sqrt(),
            Variant::Permutation => 1.0,
        }
    }

    fn product(&self, v: &[f64]) -> Vec<f64> {
        match &*self.kernel {
            Kernel::Dense(d) => d.product(v),
            Kernel::Permutation(p) => p.iter().map(|&j| v[j as usize]).collect(),
        }
    }

    fn transpose_product(&self, v: &[f64]) -> Vec<f64> {
        match &*self.kernel {
            Kernel::Dense(d) => d.transpose_product(v),
            Kernel::Permutation(p) => {
                let mut out = vec![0.0; v.len()];
                for (i, &j) in p.iter().enumerate() {
                    out[j as usize] = v[i];
                }
                out
            }
        }
    }

    fn normalize(&self, raw: Vec<f64>) -> Hypervector {
        let v = Hypervector::from_components(raw);
        match self.normalization {
            Normalization::None => v,
            Normalization::TermSqrtD => match self.variant {
                Variant::DenseBipolar => v.scale(1.0 / self.gain()),
                Variant::Permutation => v,
            },
            // The zero vector has no direction; it stays zero.
            Normalization::ResultSqrtD => v
                .normalize_to((self.dim as f64).sqrt())
                .unwrap_or(v),
            Normalization::BinaryThreshold => threshold_bipolar(&v),
        }
    }
}

/// Persistable description of a binding operator; never the matrix itself.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BindingRecord {
    pub role: String,
    pub seed: u64,
    pub dim: usize,
    pub variant: Variant,
    pub normalization: Normalization,
}

/// Applies `op` to `v`: the matrix product followed by the operator's
/// normalization.
pub fn bind(op: &BindingOperator, v: &Hypervector) -> Result<Hypervector> {
    check_same_dim(op.dim, v.dim())?;
    Ok(op.normalize(op.product(v.as_slice())))
}

/// Applies `op` to `v` `power` times; power 0 is the identity.
pub fn bind_power(op: &BindingOperator, v: &Hypervector, power: usize) -> Result<Hypervector> {
    check_same_dim(op.dim, v.dim())?;
    let mut out = v.clone();
    for _ in 0..power {
        out = bind(op, &out)?;
    }
    Ok(out)
}

/// The adjoint of a linear `bind`: `dot(bind(op, x), y) = dot(x, adjoint(op, y))`.
pub(crate) fn bind_adjoint(op: &BindingOperator, v: &Hypervector) -> Result<Hypervector> {
    check_same_dim(op.dim, v.dim())?;
    let raw = op.transpose_product(v.as_slice());
    match op.normalization {
        Normalization::None => Ok(Hypervector::from_components(raw)),
        Normalization::TermSqrtD => Ok(op.normalize(raw)),
        other => Err(MbatError::InvalidArgument(format!(
            "normalization {other} is not linear"
        ))),
    }
}

/// Two-input binding `M_left v1 + M_right v2`, normalized as the left
/// operator specifies. Not commutative in its operands.
pub fn two_input_bind(
    left: &BindingOperator,
    right: &BindingOperator,
    v1: &Hypervector,
    v2: &Hypervector,
) -> Result<Hypervector> {
    check_same_dim(left.dim, right.dim)?;
    check_same_dim(left.dim, v1.dim())?;
    check_same_dim(left.dim, v2.dim())?;
    if left.role == right.role {
        return Err(MbatError::InvalidRoles(format!(
            "two-input binding needs distinct roles, got {:?} twice",
            left.role
        )));
    }
    if left.normalization != right.normalization {
        return Err(MbatError::InvalidArgument(
            "two-input operators must share a normalization".into(),
        ));
    }
    let mut raw = left.product(v1.as_slice());
    let scale = if left.normalization == Normalization::TermSqrtD {
        (1.0 / left.gain(), 1.0 / right.gain())
    } else {
        (1.0, 1.0)
    };
    for (o, r) in raw.iter_mut().zip(right.product(v2.as_slice())) {
        *o = *o * scale.0 + r * scale.1;
    }
    match left.normalization {
        Normalization::None | Normalization::TermSqrtD => Ok(Hypervector::from_components(raw)),
        _ => Ok(left.normalize(raw)),
    }
}

/// Recognition through binding: `dot(bind(op, candidate), bound_bundle)`.
///
/// The default threshold is half the candidate's own bound self-product,
/// the midpoint between the member and non-member means for any
/// normalization.
pub fn bound_contains(
    op: &BindingOperator,
    bound_bundle: &Hypervector,
    candidate: &Hypervector,
    threshold: Option<f64>,
) -> Result<crate::RecognitionScore> {
    check_same_dim(op.dim, bound_bundle.dim())?;
    if !candidate.is_bipolar() {
        return Err(MbatError::InvalidArgument(
            "membership candidates must be bipolar".into(),
        ));
    }
    let probe = bind(op, candidate)?;
    let score = crate::dot(&probe, bound_bundle)?;
    let threshold = threshold.unwrap_or_else(|| crate::dot(&probe, &probe).unwrap_or(0.0) / 2.0);
    Ok(crate::RecognitionScore::new(score, threshold))
}

/// Role-indexed set of binding operators sharing one dimension.
#[derive(Debug, Clone, Default)]
pub struct Bindings {
    ops: IndexMap<String, BindingOperator>,
}

impl Bindings {
    pub fn new() -> Self {
        Self::default()
    }

    /// One operator per role, all from the same seed.
    pub fn from_roles<S: AsRef<str>>(
        seed: u64,
        dim: usize,
        variant: Variant,
        normalization: Normalization,
        roles: &[S],
    ) -> Result<Self> {
        let mut out = Self::new();
        for role in roles {
            out.insert(BindingOperator::new(
                seed,
                role.as_ref(),
                dim,
                variant,
                normalization,
            )?)?;
        }
        Ok(out)
    }

    pub fn from_records(records: &[BindingRecord]) -> Result<Self> {
        let mut out = Self::new();
        for r in records {
            out.insert(BindingOperator::from_record(r)?)?;
        }
        Ok(out)
    }

    pub fn insert(&mut self, op: BindingOperator) -> Result<()> {
        if let Some(first) = self.ops.values().next() {
            check_same_dim(first.dim, op.dim)?;
        }
        if self.ops.contains_key(&op.role) {
            return Err(MbatError::InvalidRoles(format!(
                "role {:?} registered twice",
                op.role
            )));
        }
        self.ops.insert(op.role.clone(), op);
        Ok(())
    }

    pub fn get(&self, role: &str) -> Result<&BindingOperator> {
        self.ops
            .get(role)
            .ok_or_else(|| MbatError::InvalidRoles(format!("no operator registered for {role:?}")))
    }

    pub fn roles(&self) -> impl Iterator<Item = &str> {
        self.ops.keys().map(String::as_str)
    }

    pub fn records(&self) -> Vec<BindingRecord> {
        self.ops.values().map(BindingOperator::record).collect()
    }

    /// Copies every operator with a different normalization.
    pub fn with_normalization(&self, normalization: Normalization) -> Self {
        Self {
            ops: self
                .ops
                .iter()
                .map(|(k, op)| (k.clone(), op.with_normalization(normalization)))
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{cosine, derive_vector, dot};

    fn op(role: &str, dim: usize, norm: Normalization) -> BindingOperator {
        BindingOperator::new(17, role, dim, Variant::DenseBipolar, norm).unwrap()
    }

    #[test]
    fn dense_operator_is_deterministic() {
        let v = derive_vector(1, "x", 300).unwrap();
        let a = bind(&op("Actor", 300, Normalization::None), &v).unwrap();
        let b = bind(&op("Actor", 300, Normalization::None), &v).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn cached_and_streamed_rows_agree() {
        let v = derive_vector(1, "x", 130).unwrap();
        let cached = op("M", 130, Normalization::None);
        let config = BindConfig {
            normalization: Normalization::None,
            cache_limit_bits: 0,
            ..BindConfig::default()
        };
        let streamed =
            BindingOperator::with_config(17, "M", 130, Variant::DenseBipolar, &config).unwrap();
        assert_eq!(bind(&cached, &v).unwrap(), bind(&streamed, &v).unwrap());
        assert_eq!(
            bind_adjoint(&cached, &v).unwrap(),
            bind_adjoint(&streamed, &v).unwrap()
        );
    }

    #[test]
    fn adjoint_matches_forward_dot() {
        for variant in [Variant::DenseBipolar, Variant::Permutation] {
            for norm in [Normalization::None, Normalization::TermSqrtD] {
                let m = BindingOperator::new(3, "M", 200, variant, norm).unwrap();
                let x = derive_vector(3, "x", 200).unwrap();
                let y = derive_vector(3, "y", 200).unwrap().scale(0.5);
                let lhs = dot(&bind(&m, &x).unwrap(), &y).unwrap();
                let rhs = dot(&x, &bind_adjoint(&m, &y).unwrap()).unwrap();
                assert!((lhs - rhs).abs() <= 1e-9 * lhs.abs().max(1.0), "{lhs} vs {rhs}");
            }
        }
        let m = op("M", 10, Normalization::ResultSqrtD);
        assert!(bind_adjoint(&m, &derive_vector(0, "a", 10).unwrap()).is_err());
    }

    #[test]
    fn raw_entries_are_plus_minus_one() {
        let m = op("M", 70, Normalization::None);
        for j in [0usize, 33, 69] {
            let mut e = vec![0.0; 70];
            e[j] = 1.0;
            let col = bind(&m, &Hypervector::new(e).unwrap()).unwrap();
            assert!(col.is_bipolar());
        }
    }

    #[test]
    fn normalizations() {
        let v = derive_vector(1, "v", 256).unwrap();
        let sq = bind(&op("M", 256, Normalization::ResultSqrtD), &v).unwrap();
        assert!((sq.norm() - 16.0).abs() <= 1e-9 * 16.0);
        let bin = bind(&op("M", 256, Normalization::BinaryThreshold), &v).unwrap();
        assert!(bin.is_bipolar());
        let raw = bind(&op("M", 256, Normalization::None), &v).unwrap();
        let term = bind(&op("M", 256, Normalization::TermSqrtD), &v).unwrap();
        for (a, b) in raw.as_slice().iter().zip(term.as_slice()) {
            assert!((a / 16.0 - b).abs() < 1e-12);
        }
        let zero = Hypervector::zeros(256).unwrap();
        assert!(bind(&op("M", 256, Normalization::ResultSqrtD), &zero)
            .unwrap()
            .is_zero());
    }

    #[test]
    fn permutation_preserves_components_and_dots() {
        let p = BindingOperator::new(5, "P", 500, Variant::Permutation, Normalization::None)
            .unwrap();
        let a = derive_vector(5, "a", 500).unwrap();
        let b = derive_vector(5, "b", 500).unwrap();
        let pa = bind(&p, &a).unwrap();
        assert!(pa.is_bipolar());
        let count = |v: &Hypervector| v.as_slice().iter().filter(|&&x| x > 0.0).count();
        assert_eq!(count(&pa), count(&a));
        assert_eq!(
            dot(&pa, &bind(&p, &b).unwrap()).unwrap(),
            dot(&a, &b).unwrap()
        );
        let term = p.with_normalization(Normalization::TermSqrtD);
        assert_eq!(bind(&term, &a).unwrap(), pa);
    }

    #[test]
    fn bind_power_zero_and_one() {
        let m = op("M", 64, Normalization::ResultSqrtD);
        let v = derive_vector(2, "v", 64).unwrap();
        assert_eq!(bind_power(&m, &v, 0).unwrap(), v);
        assert_eq!(bind_power(&m, &v, 1).unwrap(), bind(&m, &v).unwrap());
    }

    #[test]
    fn two_input_errors_and_definition() {
        let l = op("Left", 128, Normalization::None);
        let r = op("Right", 128, Normalization::None);
        let a = derive_vector(1, "a", 128).unwrap();
        let got = two_input_bind(&l, &r, &a, &a).unwrap();
        let want = bind(&l, &a).unwrap().add(&bind(&r, &a).unwrap()).unwrap();
        assert_eq!(got, want);
        assert!(matches!(
            two_input_bind(&l, &l, &a, &a),
            Err(MbatError::InvalidRoles(_))
        ));
        let short = derive_vector(1, "a", 64).unwrap();
        assert!(matches!(
            two_input_bind(&l, &r, &a, &short),
            Err(MbatError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn dimension_checks() {
        assert_eq!(
            BindingOperator::new(0, "M", 0, Variant::DenseBipolar, Normalization::None)
                .unwrap_err(),
            MbatError::InvalidDimension(0)
        );
        let m = op("M", 32, Normalization::None);
        assert!(bind(&m, &derive_vector(0, "a", 33).unwrap()).is_err());
    }

    #[test]
    fn registry_rejects_unknown_roles() {
        let b = Bindings::from_roles(1, 16, Variant::DenseBipolar, Normalization::None, &["M"])
            .unwrap();
        assert!(b.get("M").is_ok());
        assert!(matches!(b.get("Actor"), Err(MbatError::InvalidRoles(_))));
        let mut b2 = b.clone();
        assert!(b2
            .insert(BindingOperator::new(1, "M", 16, Variant::DenseBipolar, Normalization::None).unwrap())
            .is_err());
        assert_eq!(Bindings::from_records(&b.records()).unwrap().len(), 1);
    }

    #[test]
    fn dense_decorrelates_input() {
        let m = op("M", 1000, Normalization::None);
        let v = derive_vector(8, "q", 1000).unwrap();
        assert!(cosine(&v, &bind(&m, &v).unwrap()).unwrap().abs() < 0.15);
    }
}
