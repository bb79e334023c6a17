//! Encoding phrases, sentences, and structure trees into single vectors.
//!
//! A phrase is a bag of word and tag vectors. Sentences are built from
//! phrases under one of several schemes: sequential folding through the
//! recurrent operator `M` (phrase `k` of `n` ends up under `M^(n-k)`),
//! one role matrix per phrase, a structureless surface sum, or a weighted
//! mix of these.

use crate::binding::{bind, BindingOperator, Bindings};
use crate::codebook::{is_tag_symbol, Codebook};
use crate::error::{check_same_dim, MbatError, Result};
use crate::hypervector::{Accumulator, Hypervector};

/// Role name of the recurrent operator used for sequential encoding.
pub const SEQUENCE_ROLE: &str = "M";

/// The word-count tag for a phrase of `k` words (`phraseHas3words`).
pub fn count_tag(k: usize) -> String {
    if k == 1 {
        "phraseHas1word".to_string()
    } else {
        format!("phraseHas{k}words")
    }
}

fn parse_count_tag(tag: &str) -> Option<usize> {
    if tag == "phraseHas1word" {
        return Some(1);
    }
    tag.strip_prefix("phraseHas")?
        .strip_suffix("words")?
        .parse()
        .ok()
}

/// An order-free group of words plus tags (tags are stored without `@`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Phrase {
    words: Vec<String>,
    tags: Vec<String>,
}

impl Phrase {
    pub fn new<W, T>(words: W, tags: T) -> Result<Self>
    where
        W: IntoIterator,
        W::Item: Into<String>,
        T: IntoIterator,
        T::Item: Into<String>,
    {
        let words: Vec<String> = words.into_iter().map(Into::into).collect();
        let tags: Vec<String> = tags.into_iter().map(Into::into).collect();
        if words.is_empty() {
            return Err(MbatError::InvalidArgument(
                "a phrase needs at least one word".into(),
            ));
        }
        for w in &words {
            if w.is_empty() || w.chars().any(char::is_whitespace) || is_tag_symbol(w) {
                return Err(MbatError::InvalidArgument(format!("bad word {w:?}")));
            }
        }
        for t in &tags {
            if t.is_empty() || t.chars().any(char::is_whitespace) {
                return Err(MbatError::InvalidArgument(format!("bad tag {t:?}")));
            }
            if let Some(k) = parse_count_tag(t) {
                if k != words.len() {
                    return Err(MbatError::InvalidArgument(format!(
                        "tag {t} on a phrase of {} words",
                        words.len()
                    )));
                }
            }
        }
        Ok(Self { words, tags })
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn tags(&self) -> &[String] {
        &self.tags
    }

    /// Appends the word-count tag unless one is already present.
    pub fn with_count_tag(mut self) -> Self {
        if !self.tags.iter().any(|t| parse_count_tag(t).is_some()) {
            self.tags.push(count_tag(self.words.len()));
        }
        self
    }

    /// Adds `tag` to the phrase.
    pub fn with_tag(mut self, tag: &str) -> Self {
        self.tags.push(tag.to_string());
        self
    }

    /// The structural role: the first tag that is not a word count.
    pub fn role(&self) -> Option<&str> {
        self.tags
            .iter()
            .map(String::as_str)
            .find(|t| parse_count_tag(t).is_none())
    }
}

/// How the phrases of a sentence are combined.
#[derive(Debug, Clone, PartialEq)]
pub enum Scheme {
    /// Fold phrases through the recurrent operator [`SEQUENCE_ROLE`].
    SequentialPowers,
    /// Bind each phrase by the operator named by its role tag.
    RoleMatrices,
    /// Plain sum of every word, no structure.
    Surface,
    /// Weighted sum of several schemes.
    Multi(Vec<(f64, Scheme)>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SentenceSpec {
    pub phrases: Vec<Phrase>,
    pub scheme: Scheme,
}

impl SentenceSpec {
    pub fn new(phrases: Vec<Phrase>, scheme: Scheme) -> Result<Self> {
        if phrases.is_empty() {
            return Err(MbatError::InvalidArgument(
                "a sentence needs at least one phrase".into(),
            ));
        }
        Ok(Self { phrases, scheme })
    }

    pub fn with_scheme(mut self, scheme: Scheme) -> Self {
        self.scheme = scheme;
        self
    }
}

/// A tree of sums and bindings over codebook symbols.
#[derive(Debug, Clone, PartialEq)]
pub enum StructureExpr {
    Leaf(String),
    Sum(Vec<(f64, StructureExpr)>),
    Bind(String, Box<StructureExpr>),
}

impl StructureExpr {
    pub fn leaf(symbol: &str) -> Self {
        StructureExpr::Leaf(symbol.to_string())
    }

    /// Unit-weight sum of leaves.
    pub fn bag(symbols: &[&str]) -> Self {
        StructureExpr::Sum(symbols.iter().map(|s| (1.0, Self::leaf(s))).collect())
    }

    /// Unit-weight sum of subexpressions.
    pub fn sum(parts: Vec<StructureExpr>) -> Self {
        StructureExpr::Sum(parts.into_iter().map(|p| (1.0, p)).collect())
    }

    pub fn bind(role: &str, child: StructureExpr) -> Self {
        StructureExpr::Bind(role.to_string(), Box::new(child))
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct EncodeOptions {
    /// Rescale each phrase bundle to length `sqrt(D)` before it is combined.
    pub normalize_phrases: bool,
}

/// Sum of the phrase's word and tag vectors.
pub fn encode_phrase(codebook: &Codebook, phrase: &Phrase) -> Result<Hypervector> {
    phrase_bundle(codebook, phrase, None)
}

fn phrase_bundle(codebook: &Codebook, phrase: &Phrase, skip_tag: Option<&str>) -> Result<Hypervector> {
    let mut acc = Accumulator::new(codebook.dim());
    for w in &phrase.words {
        acc.add(&codebook.vector(w)?)?;
    }
    let mut skipped = false;
    for t in &phrase.tags {
        if !skipped && Some(t.as_str()) == skip_tag {
            skipped = true;
            continue;
        }
        acc.add(&codebook.tag_vector(t)?)?;
    }
    acc.finish()
}

/// One recurrent update: `bind(op, state) + sum(inputs)`.
pub fn step_state(
    op: &BindingOperator,
    state: &Hypervector,
    inputs: &[Hypervector],
) -> Result<Hypervector> {
    let bound = bind(op, state)?;
    let mut acc = Accumulator::new(bound.dim());
    acc.add(&bound)?;
    for v in inputs {
        acc.add(v)?;
    }
    acc.finish()
}

pub fn encode_sentence(
    codebook: &Codebook,
    bindings: &Bindings,
    spec: &SentenceSpec,
) -> Result<Hypervector> {
    encode_sentence_with(codebook, bindings, spec, &EncodeOptions::default())
}

pub fn encode_sentence_with(
    codebook: &Codebook,
    bindings: &Bindings,
    spec: &SentenceSpec,
    options: &EncodeOptions,
) -> Result<Hypervector> {
    if spec.phrases.is_empty() {
        return Err(MbatError::InvalidArgument(
            "a sentence needs at least one phrase".into(),
        ));
    }
    encode_scheme(codebook, bindings, &spec.phrases, &spec.scheme, options)
}

fn prepare(v: Hypervector, options: &EncodeOptions) -> Result<Hypervector> {
    if options.normalize_phrases {
        let target = (v.dim() as f64).sqrt();
        v.normalize_to(target)
    } else {
        Ok(v)
    }
}

fn encode_scheme(
    codebook: &Codebook,
    bindings: &Bindings,
    phrases: &[Phrase],
    scheme: &Scheme,
    options: &EncodeOptions,
) -> Result<Hypervector> {
    match scheme {
        Scheme::SequentialPowers => {
            let op = bindings.get(SEQUENCE_ROLE)?;
            check_same_dim(codebook.dim(), op.dim())?;
            let mut state = prepare(encode_phrase(codebook, &phrases[0])?, options)?;
            for p in &phrases[1..] {
                let input = prepare(encode_phrase(codebook, p)?, options)?;
                state = step_state(op, &state, &[input])?;
            }
            Ok(state)
        }
        Scheme::RoleMatrices => {
            let mut acc = Accumulator::new(codebook.dim());
            for p in phrases {
                let role = p.role().ok_or_else(|| {
                    MbatError::InvalidRoles(format!(
                        "phrase {:?} has no role tag",
                        p.words.join(" ")
                    ))
                })?;
                let op = bindings.get(role)?;
                let inner = prepare(phrase_bundle(codebook, p, Some(role))?, options)?;
                acc.add(&bind(op, &inner)?)?;
            }
            acc.finish()
        }
        Scheme::Surface => {
            let mut acc = Accumulator::new(codebook.dim());
            for p in phrases {
                for w in &p.words {
                    acc.add(&codebook.vector(w)?)?;
                }
            }
            acc.finish()
        }
        Scheme::Multi(parts) => {
            if parts.is_empty() {
                return Err(MbatError::InvalidArgument("empty multi scheme".into()));
            }
            let mut acc = Accumulator::new(codebook.dim());
            for (weight, sub) in parts {
                if !weight.is_finite() {
                    return Err(MbatError::InvalidArgument("non-finite weight".into()));
                }
                let v = encode_scheme(codebook, bindings, phrases, sub, options)?;
                acc.add_scaled(&v, *weight)?;
            }
            acc.finish()
        }
    }
}

/// Recursively evaluates a structure tree.
pub fn encode_expr(
    codebook: &Codebook,
    bindings: &Bindings,
    expr: &StructureExpr,
) -> Result<Hypervector> {
    match expr {
        StructureExpr::Leaf(s) => codebook.vector(s),
        StructureExpr::Sum(parts) => {
            if parts.is_empty() {
                return Err(MbatError::InvalidArgument("empty sum".into()));
            }
            let mut acc = Accumulator::new(codebook.dim());
            for (w, e) in parts {
                if !w.is_finite() {
                    return Err(MbatError::InvalidArgument("non-finite weight".into()));
                }
                acc.add_scaled(&encode_expr(codebook, bindings, e)?, *w)?;
            }
            acc.finish()
        }
        StructureExpr::Bind(role, child) => {
            let op = bindings.get(role)?;
            bind(op, &encode_expr(codebook, bindings, child)?)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParseOptions {
    /// Append `phraseHasKwords` to every phrase that lacks a count tag.
    pub auto_count_tags: bool,
}

impl Default for ParseOptions {
    fn default() -> Self {
        Self {
            auto_count_tags: true,
        }
    }
}

/// Parses the phrase grammar with default options.
///
/// Phrases are separated by `|`, tokens by whitespace; `@name` is a tag and
/// `#` starts a comment running to the end of the line.
pub fn parse_sentence_spec(text: &str) -> Result<SentenceSpec> {
    parse_sentence_spec_with(text, &ParseOptions::default())
}

pub fn parse_sentence_spec_with(text: &str, options: &ParseOptions) -> Result<SentenceSpec> {
    struct Pending {
        start: usize,
        words: Vec<String>,
        tags: Vec<(usize, String)>,
    }
    let err = |position: usize, message: &str| MbatError::Parse {
        position,
        message: message.to_string(),
    };
    let mut groups: Vec<Pending> = Vec::new();
    let mut current = Pending {
        start: 0,
        words: Vec::new(),
        tags: Vec::new(),
    };
    let mut saw_separator = false;

    let mut token_start: Option<usize> = None;
    let mut in_comment = false;
    let flush_token = |start: Option<usize>, end: usize, cur: &mut Pending| -> Result<()> {
        if let Some(s) = start {
            let tok = &text[s..end];
            if let Some(tag) = tok.strip_prefix('@') {
                if tag.is_empty() || tag.contains('@') {
                    return Err(err(s, "malformed tag"));
                }
                cur.tags.push((s, tag.to_string()));
            } else if tok.contains('@') {
                return Err(err(s, "'@' is only allowed at the start of a tag"));
            } else {
                cur.words.push(tok.to_string());
            }
        }
        Ok(())
    };

    for (i, c) in text.char_indices() {
        if in_comment {
            if c == '\n' {
                in_comment = false;
            }
            continue;
        }
        match c {
            '#' => {
                flush_token(token_start.take(), i, &mut current)?;
                in_comment = true;
            }
            '|' => {
                flush_token(token_start.take(), i, &mut current)?;
                saw_separator = true;
                let next = Pending {
                    start: i + 1,
                    words: Vec::new(),
                    tags: Vec::new(),
                };
                groups.push(std::mem::replace(&mut current, next));
            }
            c if c.is_whitespace() => {
                flush_token(token_start.take(), i, &mut current)?;
            }
            _ => {
                if token_start.is_none() {
                    token_start = Some(i);
                }
            }
        }
    }
    flush_token(token_start.take(), text.len(), &mut current)?;
    groups.push(current);

    if !saw_separator && groups[0].words.is_empty() && groups[0].tags.is_empty() {
        return Err(err(0, "empty sentence"));
    }
    let mut phrases = Vec::with_capacity(groups.len());
    for g in groups {
        if g.words.is_empty() {
            let msg = if g.tags.is_empty() {
                "empty phrase"
            } else {
                "phrase has tags but no words"
            };
            return Err(err(g.start, msg));
        }
        let tag_positions: Vec<usize> = g.tags.iter().map(|(p, _)| *p).collect();
        let tags: Vec<String> = g.tags.into_iter().map(|(_, t)| t).collect();
        let phrase = Phrase::new(g.words, tags.clone()).map_err(|e| {
            // Point at the offending count tag when there is one.
            let pos = tags
                .iter()
                .position(|t| parse_count_tag(t).is_some())
                .map(|i| tag_positions[i])
                .unwrap_or(g.start);
            err(pos, &e.to_string())
        })?;
        phrases.push(if options.auto_count_tags {
            phrase.with_count_tag()
        } else {
            phrase
        });
    }
    SentenceSpec::new(phrases, Scheme::SequentialPowers)
}
