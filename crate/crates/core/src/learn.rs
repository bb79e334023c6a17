//! Learning a sentence classifier from encoded sentences.
//!
//! Sentences are random phrase sequences that contain exactly one of two
//! key words. The discriminant `sum_i M^i (pos - neg)` separates them
//! without training; a perceptron trained on the same vectors finds its
//! own separator using only dot products and additions.

use rayon::prelude::*;
use std::fmt::Write as _;

use crate::binding::{bind, BindingOperator, Normalization, Variant};
use crate::codebook::Codebook;
use crate::error::{check_same_dim, MbatError, Result};
use crate::hypervector::{dot_slices, Accumulator, Hypervector};
use crate::query::multilevel_probe;
use crate::rng::StreamKey;
use crate::structure::step_state;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Pos,
    Neg,
}

impl Label {
    pub fn sign(self) -> f64 {
        match self {
            Label::Pos => 1.0,
            Label::Neg => -1.0,
        }
    }

    /// Zero counts as positive.
    pub fn of_score(score: f64) -> Self {
        if score >= 0.0 {
            Label::Pos
        } else {
            Label::Neg
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledExample {
    pub vector: Hypervector,
    pub label: Label,
}

/// Parameters of a generated corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusSpec {
    pub count: usize,
    pub vocab: Vec<String>,
    pub pos_word: String,
    pub neg_word: String,
    pub max_phrases: usize,
    pub max_phrase_words: usize,
    pub seed: u64,
}

impl CorpusSpec {
    /// `vocab_size` filler words `w0, w1, ...` plus `girl` and `elephant`.
    pub fn standard(count: usize, vocab_size: usize, seed: u64) -> Self {
        let mut vocab: Vec<String> = (0..vocab_size).map(|i| format!("w{i}")).collect();
        vocab.push("girl".into());
        vocab.push("elephant".into());
        Self {
            count,
            vocab,
            pos_word: "girl".into(),
            neg_word: "elephant".into(),
            max_phrases: 4,
            max_phrase_words: 5,
            seed,
        }
    }

    fn fillers(&self) -> Result<Vec<&str>> {
        if self.pos_word == self.neg_word {
            return Err(MbatError::InvalidArgument("key words must differ".into()));
        }
        for key in [&self.pos_word, &self.neg_word] {
            if !self.vocab.contains(key) {
                return Err(MbatError::InvalidArgument(format!("{key:?} is not in the vocabulary")));
            }
        }
        if !(1..=4).contains(&self.max_phrases) || self.max_phrase_words == 0 {
            return Err(MbatError::InvalidArgument(
                "sentences have 1 to 4 phrases of at least one word".into(),
            ));
        }
        let fillers: Vec<&str> = self
            .vocab
            .iter()
            .map(String::as_str)
            .filter(|w| *w != self.pos_word && *w != self.neg_word)
            .collect();
        if fillers.is_empty() {
            return Err(MbatError::InvalidArgument(
                "vocabulary has no words besides the key words".into(),
            ));
        }
        Ok(fillers)
    }
}

/// A generated sentence before encoding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawSentence {
    pub phrases: Vec<Vec<String>>,
    pub label: Label,
}

/// Draws the sentences of `spec`; sentence `i` uses stream `i` of the
/// corpus key.
pub fn generate_sentences(spec: &CorpusSpec) -> Result<Vec<RawSentence>> {
    let fillers = spec.fillers()?;
    let key = StreamKey::derive("mbat/corpus", spec.seed, b"");
    Ok((0..spec.count as u64)
        .map(|i| {
            let mut s = key.stream(i);
            let n = s.range_inclusive(1, spec.max_phrases as u64) as usize;
            let mut phrases: Vec<Vec<String>> = (0..n)
                .map(|_| {
                    let len = s.range_inclusive(1, spec.max_phrase_words as u64) as usize;
                    (0..len)
                        .map(|_| fillers[s.below(fillers.len() as u64) as usize].to_string())
                        .collect()
                })
                .collect();
            let label = if s.coin() { Label::Pos } else { Label::Neg };
            let word = match label {
                Label::Pos => &spec.pos_word,
                Label::Neg => &spec.neg_word,
            };
            let p = s.below(n as u64) as usize;
            let at = s.below(phrases[p].len() as u64 + 1) as usize;
            phrases[p].insert(at, word.clone());
            RawSentence { phrases, label }
        })
        .collect())
}

/// Generates and encodes a corpus with sequential powers of `op`.
///
/// Linear operators use a table of `M^i w` per word, so each sentence is a
/// plain sum; other normalizations fold phrase by phrase.
pub fn generate_corpus(
    codebook: &Codebook,
    op: &BindingOperator,
    spec: &CorpusSpec,
) -> Result<Vec<LabeledExample>> {
    check_same_dim(codebook.dim(), op.dim())?;
    let sentences = generate_sentences(spec)?;
    if op.normalization().is_linear() {
        let levels = spec.max_phrases;
        let table = spec
            .vocab
            .par_iter()
            .map(|w| {
                let mut powers = Vec::with_capacity(levels);
                powers.push(codebook.vector(w)?);
                for l in 1..levels {
                    let next = bind(op, &powers[l - 1])?;
                    powers.push(next);
                }
                Ok((w.as_str(), powers))
            })
            .collect::<Result<std::collections::HashMap<_, _>>>()?;
        sentences
            .par_iter()
            .map(|s| {
                let n = s.phrases.len();
                let mut acc = Accumulator::new(codebook.dim());
                for (k, phrase) in s.phrases.iter().enumerate() {
                    for w in phrase {
                        acc.add(&table[w.as_str()][n - 1 - k])?;
                    }
                }
                Ok(LabeledExample {
                    vector: acc.finish()?,
                    label: s.label,
                })
            })
            .collect()
    } else {
        sentences
            .par_iter()
            .map(|s| {
                let bundles = s
                    .phrases
                    .iter()
                    .map(|p| {
                        let vs = p.iter().map(|w| codebook.vector(w)).collect::<Result<Vec<_>>>()?;
                        crate::bundle(&vs)
                    })
                    .collect::<Result<Vec<_>>>()?;
                let mut state = bundles[0].clone();
                for b in &bundles[1..] {
                    state = step_state(op, &state, std::slice::from_ref(b))?;
                }
                Ok(LabeledExample {
                    vector: state,
                    label: s.label,
                })
            })
            .collect()
    }
}

/// `sum_{i=0..=max_depth} M^i (pos - neg)`.
pub fn analytic_discriminant(
    codebook: &Codebook,
    op: &BindingOperator,
    pos_word: &str,
    neg_word: &str,
    max_depth: usize,
) -> Result<Hypervector> {
    let diff = codebook.vector(pos_word)?.sub(&codebook.vector(neg_word)?)?;
    multilevel_probe(op, &diff, max_depth)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    pub weights: Hypervector,
    pub mistakes: usize,
    pub epochs: usize,
    pub converged: bool,
}

fn check_data(data: &[LabeledExample]) -> Result<usize> {
    let first = data
        .first()
        .ok_or_else(|| MbatError::InvalidArgument("empty dataset".into()))?;
    let dim = first.vector.dim();
    for e in data {
        check_same_dim(dim, e.vector.dim())?;
    }
    Ok(dim)
}

/// Classic perceptron: on `y w.x <= 0`, `w += y x`. Stops after the first
/// epoch without mistakes.
pub fn perceptron_train(data: &[LabeledExample], max_epochs: usize) -> Result<LinearModel> {
    let dim = check_data(data)?;
    let mut w = vec![0.0; dim];
    let mut mistakes = 0;
    let mut epochs = 0;
    let mut converged = false;
    while epochs < max_epochs {
        epochs += 1;
        let mut epoch_mistakes = 0;
        for e in data {
            let y = e.label.sign();
            if y * dot_slices(&w, e.vector.as_slice()) <= 0.0 {
                for (wi, xi) in w.iter_mut().zip(e.vector.as_slice()) {
                    *wi += y * xi;
                }
                epoch_mistakes += 1;
            }
        }
        mistakes += epoch_mistakes;
        if epoch_mistakes == 0 {
            converged = true;
            break;
        }
    }
    Ok(LinearModel {
        weights: Hypervector::new(w)?,
        mistakes,
        epochs,
        converged,
    })
}

pub fn predict(weights: &Hypervector, x: &Hypervector) -> Result<Label> {
    check_same_dim(weights.dim(), x.dim())?;
    Ok(Label::of_score(dot_slices(weights.as_slice(), x.as_slice())))
}

/// Fraction of examples whose predicted label matches.
pub fn evaluate(weights: &Hypervector, data: &[LabeledExample]) -> Result<f64> {
    check_data(data)?;
    let mut right = 0;
    for e in data {
        if predict(weights, &e.vector)? == e.label {
            right += 1;
        }
    }
    Ok(right as f64 / data.len() as f64)
}

/// `min_i y_i (w . x_i) / |w|`; negative when some example is misclassified.
pub fn margin(weights: &Hypervector, data: &[LabeledExample]) -> Result<f64> {
    check_data(data)?;
    let n = weights.norm();
    if n == 0.0 {
        return Err(MbatError::UndefinedNormalization);
    }
    let mut m = f64::INFINITY;
    for e in data {
        check_same_dim(weights.dim(), e.vector.dim())?;
        m = m.min(e.label.sign() * dot_slices(weights.as_slice(), e.vector.as_slice()) / n);
    }
    Ok(m)
}

/// Largest example norm.
pub fn max_norm(data: &[LabeledExample]) -> f64 {
    data.iter().map(|e| e.vector.norm()).fold(0.0, f64::max)
}

/// `(R / gamma)^2`, defined only for a positive margin.
pub fn mistake_bound(radius: f64, gamma: f64) -> Option<f64> {
    (gamma > 0.0).then(|| (radius / gamma).powi(2))
}

#[derive(Debug, Clone, PartialEq)]
pub struct LearnConfig {
    pub dim: usize,
    pub seed: u64,
    pub variant: Variant,
    pub normalization: Normalization,
    pub train: usize,
    pub test: usize,
    pub vocab_size: usize,
    pub max_depth: usize,
    pub max_epochs: usize,
}

impl Default for LearnConfig {
    fn default() -> Self {
        Self {
            dim: 1000,
            seed: 1,
            variant: Variant::DenseBipolar,
            normalization: Normalization::TermSqrtD,
            train: 1000,
            test: 500,
            vocab_size: 200,
            max_depth: 3,
            max_epochs: 100,
        }
    }
}

/// Outcome of one end-to-end learning run.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingReport {
    pub mistakes: usize,
    pub epochs: usize,
    pub converged: bool,
    pub oracle_acc: f64,
    pub train_acc: f64,
    pub test_acc: f64,
    /// Margin of the analytic discriminant on the training set.
    pub margin: f64,
    /// Margin of the learned weights (meaningful once converged).
    pub learned_margin: Option<f64>,
    pub radius: f64,
    /// `(R / gamma)^2` using the analytic margin, or the learned one when
    /// the analytic discriminant does not separate the training set.
    pub mistake_bound: Option<f64>,
}

impl TrainingReport {
    pub fn to_text(&self) -> String {
        let opt = |x: Option<f64>| x.map_or("none".to_string(), |v| v.to_string());
        let mut out = String::new();
        let _ = writeln!(out, "mistakes={}", self.mistakes);
        let _ = writeln!(out, "epochs={}", self.epochs);
        let _ = writeln!(out, "converged={}", self.converged);
        let _ = writeln!(out, "oracleAcc={}", self.oracle_acc);
        let _ = writeln!(out, "trainAcc={}", self.train_acc);
        let _ = writeln!(out, "testAcc={}", self.test_acc);
        let _ = writeln!(out, "margin={}", self.margin);
        let _ = writeln!(out, "learnedMargin={}", opt(self.learned_margin));
        let _ = writeln!(out, "radius={}", self.radius);
        let _ = writeln!(out, "mistakeBound={}", opt(self.mistake_bound));
        out
    }
}

/// Generates a corpus, checks the analytic discriminant, trains, and
/// evaluates on held-out sentences.
pub fn run_learning(config: &LearnConfig) -> Result<TrainingReport> {
    let codebook = Codebook::new(config.dim, config.seed)?;
    let op = BindingOperator::new(
        config.seed,
        "M",
        config.dim,
        config.variant,
        config.normalization,
    )?;
    let spec = CorpusSpec::standard(config.train + config.test, config.vocab_size, config.seed);
    let mut all = generate_corpus(&codebook, &op, &spec)?;
    let test = all.split_off(config.train);
    let train = all;
    let oracle = analytic_discriminant(
        &codebook,
        &op,
        &spec.pos_word,
        &spec.neg_word,
        config.max_depth,
    )?;
    let model = perceptron_train(&train, config.max_epochs)?;
    let oracle_margin = margin(&oracle, &train)?;
    let learned_margin = if model.weights.is_zero() {
        None
    } else {
        Some(margin(&model.weights, &train)?)
    };
    let radius = max_norm(&train);
    let gamma = if oracle_margin > 0.0 {
        Some(oracle_margin)
    } else {
        learned_margin.filter(|m| *m > 0.0)
    };
    Ok(TrainingReport {
        mistakes: model.mistakes,
        epochs: model.epochs,
        converged: model.converged,
        oracle_acc: evaluate(&oracle, &train)?,
        train_acc: evaluate(&model.weights, &train)?,
        test_acc: if test.is_empty() {
            f64::NAN
        } else {
            evaluate(&model.weights, &test)?
        },
        margin: oracle_margin,
        learned_margin,
        radius,
        mistake_bound: gamma.and_then(|g| mistake_bound(radius, g)),
    })
}
