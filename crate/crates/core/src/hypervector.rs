//! Hypervectors, bundling, and dot-product recognition.

use crate::error::{check_same_dim, MbatError, Result};
use crate::rng::{sign_at, words_for, StreamKey};

/// Whether every component is exactly ±1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Bipolar,
    Continuous,
}

/// A fixed-dimension vector of finite real components.
///
/// The [`Kind`] is derived from the components at construction, so a
/// continuous result that happens to contain only ±1 entries reports
/// itself as bipolar.
#[derive(Debug, Clone, PartialEq)]
pub struct Hypervector {
    components: Vec<f64>,
    kind: Kind,
}

impl Hypervector {
    pub fn new(components: Vec<f64>) -> Result<Self> {
        if components.is_empty() {
            return Err(MbatError::InvalidDimension(0));
        }
        if let Some(i) = components.iter().position(|c| !c.is_finite()) {
            return Err(MbatError::InvalidArgument(format!(
                "component {i} is not finite"
            )));
        }
        Ok(Self::from_components(components))
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(MbatError::InvalidDimension(0));
        }
        Ok(Self {
            components: vec![0.0; dim],
            kind: Kind::Continuous,
        })
    }

    /// Builds a bipolar vector from signs; any non-negative entry maps to +1.
    pub fn from_signs(signs: &[i8]) -> Result<Self> {
        Self::new(signs.iter().map(|&s| if s >= 0 { 1.0 } else { -1.0 }).collect())
    }

    /// Internal constructor for results of finite arithmetic.
    pub(crate) fn from_components(components: Vec<f64>) -> Self {
        debug_assert!(!components.is_empty());
        debug_assert!(components.iter().all(|c| c.is_finite()));
        let kind = if components.iter().all(|&c| c == 1.0 || c == -1.0) {
            Kind::Bipolar
        } else {
            Kind::Continuous
        };
        Self { components, kind }
    }

    pub(crate) fn from_bits(words: &[u64], dim: usize) -> Self {
        let components = (0..dim).map(|i| sign_at(words, i)).collect();
        Self {
            components,
            kind: Kind::Bipolar,
        }
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn is_bipolar(&self) -> bool {
        self.kind == Kind::Bipolar
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.components
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.components
    }

    pub fn norm(&self) -> f64 {
        dot_slices(&self.components, &self.components).sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(|&c| c == 0.0)
    }

    pub fn negate(&self) -> Self {
        Self {
            components: self.components.iter().map(|c| -c).collect(),
            kind: self.kind,
        }
    }

    /// Multiplies every component by `c`.
    ///
    /// Panics if `c` is not finite.
    pub fn scale(&self, c: f64) -> Self {
        assert!(c.is_finite(), "scale factor must be finite");
        Self::from_components(self.components.iter().map(|x| x * c).collect())
    }

    /// Rescales to Euclidean length `target`.
    pub fn normalize_to(&self, target: f64) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(MbatError::UndefinedNormalization);
        }
        Ok(self.scale(target / n))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_same_dim(self.dim(), other.dim())?;
        Ok(Self::from_components(
            self.components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a + b)
                .collect(),
        ))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        check_same_dim(self.dim(), other.dim())?;
        Ok(Self::from_components(
            self.components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a - b)
                .collect(),
        ))
    }
}

/// Accumulates a weighted sum without reclassifying after every term.
pub(crate) struct Accumulator {
    sum: Vec<f64>,
}

impl Accumulator {
    pub fn new(dim: usize) -> Self {
        Self {
            sum: vec![0.0; dim],
        }
    }

    pub fn add(&mut self, v: &Hypervector) -> Result<()> {
        check_same_dim(self.sum.len(), v.dim())?;
        for (s, x) in self.sum.iter_mut().zip(v.as_slice()) {
            *s += x;
        }
        Ok(())
    }

    pub fn add_scaled(&mut self, v: &Hypervector, weight: f64) -> Result<()> {
        check_same_dim(self.sum.len(), v.dim())?;
        for (s, x) in self.sum.iter_mut().zip(v.as_slice()) {
            *s += weight * x;
        }
        Ok(())
    }

    pub fn finish(self) -> Result<Hypervector> {
        if self.sum.is_empty() {
            return Err(MbatError::InvalidDimension(0));
        }
        if self.sum.iter().any(|c| !c.is_finite()) {
            return Err(MbatError::InvalidArgument("sum overflowed".into()));
        }
        Ok(Hypervector::from_components(self.sum))
    }
}

/// Deterministically derives the bipolar vector for `symbol`.
///
/// Component `i` is bit `i` of stream 0 under the key
/// `(master_seed, symbol)`, so prefixes agree across dimensions.
pub fn derive_vector(master_seed: u64, symbol: &str, dim: usize) -> Result<Hypervector> {
    if dim == 0 {
        return Err(MbatError::InvalidDimension(0));
    }
    let key = StreamKey::derive("mbat/symbol", master_seed, symbol.as_bytes());
    let mut words = vec![0u64; words_for(dim)];
    key.stream(0).fill_bits(&mut words, dim);
    Ok(Hypervector::from_bits(&words, dim))
}

/// Componentwise sum of a nonempty list of equal-dimension vectors.
pub fn bundle<'a, I>(vs: I) -> Result<Hypervector>
where
    I: IntoIterator<Item = &'a Hypervector>,
{
    let mut iter = vs.into_iter();
    let first = iter
        .next()
        .ok_or_else(|| MbatError::InvalidArgument("cannot bundle an empty list".into()))?;
    let mut acc = Accumulator::new(first.dim());
    acc.add(first)?;
    for v in iter {
        acc.add(v)?;
    }
    acc.finish()
}

pub fn dot(a: &Hypervector, b: &Hypervector) -> Result<f64> {
    check_same_dim(a.dim(), b.dim())?;
    Ok(dot_slices(a.as_slice(), b.as_slice()))
}

/// Fixed-order four-lane dot product; deterministic for a given length.
#[inline]
pub(crate) fn dot_slices(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut lanes = [0.0f64; 4];
    let chunks = a.len() / 4;
    for c in 0..chunks {
        let i = c * 4;
        lanes[0] += a[i] * b[i];
        lanes[1] += a[i + 1] * b[i + 1];
        lanes[2] += a[i + 2] * b[i + 2];
        lanes[3] += a[i + 3] * b[i + 3];
    }
    let mut tail = 0.0;
    for i in chunks * 4..a.len() {
        tail += a[i] * b[i];
    }
    (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]) + tail
}

pub fn cosine(a: &Hypervector, b: &Hypervector) -> Result<f64> {
    let d = dot(a, b)?;
    let na = a.norm();
    let nb = b.norm();
    if na == 0.0 || nb == 0.0 {
        return Err(MbatError::UndefinedCosine);
    }
    Ok((d / (na * nb)).clamp(-1.0, 1.0))
}

/// Maps each component to +1 when `>= 0`, otherwise -1.
pub fn threshold_bipolar(v: &Hypervector) -> Hypervector {
    Hypervector {
        components: v
            .as_slice()
            .iter()
            .map(|&c| if c >= 0.0 { 1.0 } else { -1.0 })
            .collect(),
        kind: Kind::Bipolar,
    }
}

/// Outcome of comparing a dot-product score against a threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecognitionScore {
    pub score: f64,
    pub threshold: f64,
    pub decision: bool,
}

impl RecognitionScore {
    pub fn new(score: f64, threshold: f64) -> Self {
        Self {
            score,
            threshold,
            decision: score >= threshold,
        }
    }
}

/// Tests whether a bipolar `candidate` was bundled into `bundle_v`.
///
/// The default threshold is `D/2`, halfway between the member mean `D`
/// and the non-member mean 0.
pub fn contains(
    bundle_v: &Hypervector,
    candidate: &Hypervector,
    threshold: Option<f64>,
) -> Result<RecognitionScore> {
    check_same_dim(bundle_v.dim(), candidate.dim())?;
    if !candidate.is_bipolar() {
        return Err(MbatError::InvalidArgument(
            "membership candidates must be bipolar".into(),
        ));
    }
    let score = dot_slices(candidate.as_slice(), bundle_v.as_slice());
    let threshold = threshold.unwrap_or(bundle_v.dim() as f64 / 2.0);
    Ok(RecognitionScore::new(score, threshold))
}
