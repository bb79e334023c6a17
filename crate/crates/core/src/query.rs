//! Recognition and decoding against encoded structures.

use rayon::prelude::*;
use std::fmt::Write as _;

use crate::binding::{bind, bind_adjoint, bind_power, BindingOperator};
use crate::codebook::{tag_symbol, Codebook};
use crate::error::{check_same_dim, MbatError, Result};
use crate::hypervector::{dot_slices, Accumulator, Hypervector};
use crate::structure::count_tag;

/// One scored symbol from a probe.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeResult {
    pub symbol: String,
    pub score: f64,
    pub level: Option<usize>,
    pub decision: Option<bool>,
}

impl ProbeResult {
    fn scored(symbol: &str, score: f64, level: Option<usize>) -> Self {
        Self {
            symbol: symbol.to_string(),
            score,
            level,
            decision: None,
        }
    }
}

/// `sum_{i=0..=max_depth} bind_power(op, candidate, i)`.
pub fn multilevel_probe(
    op: &BindingOperator,
    candidate: &Hypervector,
    max_depth: usize,
) -> Result<Hypervector> {
    check_same_dim(op.dim(), candidate.dim())?;
    let mut acc = Accumulator::new(candidate.dim());
    let mut term = candidate.clone();
    acc.add(&term)?;
    for _ in 0..max_depth {
        term = bind(op, &term)?;
        acc.add(&term)?;
    }
    acc.finish()
}

/// Scores `candidate` against `v` with the multilevel probe.
///
/// The default threshold is half the smallest self-product among the
/// probe's terms, the midpoint between member and non-member means at the
/// weakest level.
pub fn probe_member(
    op: &BindingOperator,
    v: &Hypervector,
    symbol: &str,
    candidate: &Hypervector,
    max_depth: usize,
    threshold: Option<f64>,
) -> Result<ProbeResult> {
    check_same_dim(op.dim(), v.dim())?;
    check_same_dim(op.dim(), candidate.dim())?;
    let mut term = candidate.clone();
    let mut score = 0.0;
    let mut weakest = f64::INFINITY;
    let mut best_level = 0;
    let mut best = f64::NEG_INFINITY;
    for level in 0..=max_depth {
        if level > 0 {
            term = bind(op, &term)?;
        }
        let s = dot_slices(term.as_slice(), v.as_slice());
        if s > best {
            best = s;
            best_level = level;
        }
        score += s;
        weakest = weakest.min(dot_slices(term.as_slice(), term.as_slice()));
    }
    let threshold = threshold.unwrap_or(weakest / 2.0);
    Ok(ProbeResult {
        symbol: symbol.to_string(),
        score,
        level: Some(best_level),
        decision: Some(score >= threshold),
    })
}

/// `max_i dot(bind_power(op, a + b, i), v)` and the level attaining it.
///
/// Ties go to the smaller level.
pub fn cooccur_score(
    op: &BindingOperator,
    v: &Hypervector,
    a: &Hypervector,
    b: &Hypervector,
    max_depth: usize,
) -> Result<(f64, usize)> {
    check_same_dim(op.dim(), v.dim())?;
    let mut term = a.add(b)?;
    let mut best = (dot_slices(term.as_slice(), v.as_slice()), 0);
    for level in 1..=max_depth {
        term = bind(op, &term)?;
        let s = dot_slices(term.as_slice(), v.as_slice());
        if s > best.0 {
            best = (s, level);
        }
    }
    Ok(best)
}

/// Scores every codebook symbol against `v`, best first; ties keep
/// codebook order.
pub fn rank_symbols(codebook: &Codebook, v: &Hypervector) -> Result<Vec<ProbeResult>> {
    check_same_dim(codebook.dim(), v.dim())?;
    let symbols: Vec<&str> = codebook.symbols().collect();
    let mut out = symbols
        .par_iter()
        .map(|s| {
            let sv = codebook.vector(s)?;
            Ok(ProbeResult::scored(s, dot_slices(sv.as_slice(), v.as_slice()), None))
        })
        .collect::<Result<Vec<_>>>()?;
    out.sort_by(|x, y| y.score.total_cmp(&x.score));
    Ok(out)
}

/// The codebook symbol with the largest dot product with `v`.
pub fn cleanup(codebook: &Codebook, v: &Hypervector) -> Result<ProbeResult> {
    if codebook.is_empty() {
        return Err(MbatError::InvalidArgument("cleanup needs a nonempty codebook".into()));
    }
    Ok(rank_symbols(codebook, v)?.swap_remove(0))
}

/// Scores of `bind_power(op, x, level) . v` for each `x`.
///
/// For linear normalizations the adjoint is applied to `v` once, so each
/// symbol costs one dot product.
fn level_scores(
    op: &BindingOperator,
    v: &Hypervector,
    level: usize,
    vectors: &[Hypervector],
) -> Result<Vec<f64>> {
    check_same_dim(op.dim(), v.dim())?;
    if op.normalization().is_linear() {
        let mut pulled = v.clone();
        for _ in 0..level {
            pulled = bind_adjoint(op, &pulled)?;
        }
        Ok(vectors
            .iter()
            .map(|x| dot_slices(x.as_slice(), pulled.as_slice()))
            .collect())
    } else {
        vectors
            .par_iter()
            .map(|x| Ok(dot_slices(bind_power(op, x, level)?.as_slice(), v.as_slice())))
            .collect()
    }
}

/// The `word_count` non-tag symbols scoring highest at `level`, ordered by
/// score (descending) then symbol.
pub fn decode_phrase(
    codebook: &Codebook,
    op: &BindingOperator,
    v: &Hypervector,
    level: usize,
    word_count: usize,
) -> Result<Vec<ProbeResult>> {
    if word_count == 0 {
        return Err(MbatError::InvalidArgument("word count must be at least 1".into()));
    }
    let words: Vec<&str> = codebook.words().collect();
    if word_count > words.len() {
        return Err(MbatError::InvalidArgument(format!(
            "asked for {word_count} words from a vocabulary of {}",
            words.len()
        )));
    }
    let vectors = words
        .iter()
        .map(|w| codebook.vector(w))
        .collect::<Result<Vec<_>>>()?;
    let scores = level_scores(op, v, level, &vectors)?;
    let mut out: Vec<ProbeResult> = words
        .iter()
        .zip(scores)
        .map(|(w, s)| ProbeResult::scored(w, s, Some(level)))
        .collect();
    out.sort_by(|x, y| y.score.total_cmp(&x.score).then_with(|| x.symbol.cmp(&y.symbol)));
    out.truncate(word_count);
    Ok(out)
}

/// The word count `k` in `1..=max_k` whose count tag scores highest at
/// `level`.
///
/// The decision is false when the best score falls below half the tag's
/// bound self-product; the count is then meaningless.
pub fn read_word_count(
    codebook: &Codebook,
    op: &BindingOperator,
    v: &Hypervector,
    level: usize,
    max_k: usize,
) -> Result<(usize, ProbeResult)> {
    if max_k == 0 {
        return Err(MbatError::InvalidArgument("max word count must be at least 1".into()));
    }
    let tags = (1..=max_k)
        .map(|k| codebook.tag_vector(&count_tag(k)))
        .collect::<Result<Vec<_>>>()?;
    let scores = level_scores(op, v, level, &tags)?;
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate() {
        if s > scores[best] {
            best = i;
        }
    }
    let bound = bind_power(op, &tags[best], level)?;
    let threshold = dot_slices(bound.as_slice(), bound.as_slice()) / 2.0;
    let k = best + 1;
    Ok((
        k,
        ProbeResult {
            symbol: tag_symbol(&count_tag(k)),
            score: scores[best],
            level: Some(level),
            decision: Some(scores[best] >= threshold),
        },
    ))
}

/// Formats like C's `%g` with six significant digits.
pub fn format_sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent");
    if !(-4..6).contains(&exp) {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (5 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Tab-separated `symbol score level decision` lines with a header row.
pub fn format_report(results: &[ProbeResult]) -> String {
    let mut out = String::from("symbol\tscore\tlevel\tdecision\n");
    for r in results {
        let level = r.level.map_or("-".to_string(), |l| l.to_string());
        let decision = r.decision.map_or("-".to_string(), |d| d.to_string());
        let _ = writeln!(out, "{}\t{}\t{}\t{}", r.symbol, format_sig6(r.score), level, decision);
    }
    out
}
