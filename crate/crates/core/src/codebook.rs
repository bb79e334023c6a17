//! Seeded symbol-to-vector codebooks and their text file format.
//!
//! A codebook file records only what is needed to re-derive every vector:
//!
//! ```text
//! mbat-codebook 1
//! dim 1000
//! seed 42
//! policy derive
//! symbol the
//! symbol @actor
//! pin smart +--+-++-+-
//! binding M 42 dense sqrtd
//! checksum 3f2a...
//! ```
//!
//! `symbol` lines list derived symbols in order, `pin` lines carry vectors
//! that were supplied verbatim, `binding` lines describe operators, and the
//! final `checksum` is the SHA-256 of every preceding byte.

use std::path::Path;

use indexmap::{IndexMap, IndexSet};
use sha2::{Digest, Sha256};

use crate::binding::{BindingRecord, Normalization, Variant};
use crate::error::{check_same_dim, MbatError, Result};
use crate::hypervector::{derive_vector, Hypervector};

pub const FORMAT_VERSION: u32 = 1;
const MAGIC: &str = "mbat-codebook";

/// Prefix reserved for tag symbols such as `@actor` or `@phraseHas3words`.
pub const TAG_PREFIX: char = '@';

pub fn tag_symbol(tag: &str) -> String {
    format!("{TAG_PREFIX}{tag}")
}

pub fn is_tag_symbol(symbol: &str) -> bool {
    symbol.starts_with(TAG_PREFIX)
}

/// What to do when a lookup names a symbol that was never registered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum UnknownSymbolPolicy {
    #[default]
    DeriveOnDemand,
    Reject,
}

impl UnknownSymbolPolicy {
    fn name(self) -> &'static str {
        match self {
            UnknownSymbolPolicy::DeriveOnDemand => "derive",
            UnknownSymbolPolicy::Reject => "reject",
        }
    }
}

/// Deterministic mapping from symbols to bipolar vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    dim: usize,
    master_seed: u64,
    symbols: IndexSet<String>,
    pinned: IndexMap<String, Hypervector>,
    policy: UnknownSymbolPolicy,
}

impl Codebook {
    pub fn new(dim: usize, master_seed: u64) -> Result<Self> {
        if dim == 0 {
            return Err(MbatError::InvalidDimension(0));
        }
        Ok(Self {
            dim,
            master_seed,
            symbols: IndexSet::new(),
            pinned: IndexMap::new(),
            policy: UnknownSymbolPolicy::default(),
        })
    }

    pub fn with_symbols<I, S>(mut self, symbols: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        for s in symbols {
            self.add_symbol(s.as_ref())?;
        }
        Ok(self)
    }

    pub fn with_policy(mut self, policy: UnknownSymbolPolicy) -> Self {
        self.policy = policy;
        self
    }

    /// Registers `symbol`; returns false if it was already present.
    pub fn add_symbol(&mut self, symbol: &str) -> Result<bool> {
        validate_symbol(symbol)?;
        Ok(self.symbols.insert(symbol.to_string()))
    }

    /// Registers `symbol` with an explicitly supplied bipolar vector.
    pub fn pin(&mut self, symbol: &str, vector: Hypervector) -> Result<()> {
        validate_symbol(symbol)?;
        check_same_dim(self.dim, vector.dim())?;
        if !vector.is_bipolar() {
            return Err(MbatError::InvalidArgument(format!(
                "pinned vector for {symbol:?} is not bipolar"
            )));
        }
        self.symbols.insert(symbol.to_string());
        self.pinned.insert(symbol.to_string(), vector);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn policy(&self) -> UnknownSymbolPolicy {
        self.policy
    }

    pub fn symbols(&self) -> impl Iterator<Item = &str> {
        self.symbols.iter().map(String::as_str)
    }

    /// Registered symbols outside the tag namespace.
    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.symbols().filter(|s| !is_tag_symbol(s))
    }

    pub fn contains(&self, symbol: &str) -> bool {
        self.symbols.contains(symbol)
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn is_pinned(&self, symbol: &str) -> bool {
        self.pinned.contains_key(symbol)
    }

    pub fn vector(&self, symbol: &str) -> Result<Hypervector> {
        if let Some(v) = self.pinned.get(symbol) {
            return Ok(v.clone());
        }
        if self.policy == UnknownSymbolPolicy::Reject && !self.symbols.contains(symbol) {
            return Err(MbatError::UnknownSymbol(symbol.to_string()));
        }
        derive_vector(self.master_seed, symbol, self.dim)
    }

    pub fn tag_vector(&self, tag: &str) -> Result<Hypervector> {
        self.vector(&tag_symbol(tag))
    }
}

fn validate_symbol(symbol: &str) -> Result<()> {
    if symbol.is_empty() || symbol.chars().any(char::is_whitespace) {
        return Err(MbatError::InvalidArgument(format!(
            "symbol {symbol:?} must be nonempty and contain no whitespace"
        )));
    }
    if symbol == "@" {
        return Err(MbatError::InvalidArgument("empty tag symbol".into()));
    }
    Ok(())
}

/// Short hex digest of a vector's exact components.
pub fn vector_checksum(v: &Hypervector) -> String {
    let mut hasher = Sha256::new();
    for c in v.as_slice() {
        hasher.update(c.to_le_bytes());
    }
    hex::encode(&hasher.finalize()[..8])
}

/// A codebook plus the binding operators persisted alongside it.
#[derive(Debug, Clone, PartialEq)]
pub struct CodebookFile {
    pub codebook: Codebook,
    pub bindings: Vec<BindingRecord>,
}

impl CodebookFile {
    pub fn to_text(&self) -> String {
        let cb = &self.codebook;
        let mut body = format!(
            "{MAGIC} {FORMAT_VERSION}\ndim {}\nseed {}\npolicy {}\n",
            cb.dim,
            cb.master_seed,
            cb.policy.name()
        );
        for s in cb.symbols() {
            match cb.pinned.get(s) {
                Some(v) => {
                    let signs: String = v
                        .as_slice()
                        .iter()
                        .map(|&c| if c > 0.0 { '+' } else { '-' })
                        .collect();
                    body.push_str(&format!("pin {s} {signs}\n"));
                }
                None => body.push_str(&format!("symbol {s}\n")),
            }
        }
        for b in &self.bindings {
            body.push_str(&format!(
                "binding {} {} {} {}\n",
                b.role, b.seed, b.variant, b.normalization
            ));
        }
        let digest = hex::encode(Sha256::digest(body.as_bytes()));
        body.push_str(&format!("checksum {digest}\n"));
        body
    }

    pub fn parse(text: &str) -> Result<Self> {
        let corrupt = |msg: String| MbatError::CorruptFile(msg);
        let body_end = text
            .trim_end_matches('\n')
            .rfind('\n')
            .map(|i| i + 1)
            .ok_or_else(|| corrupt("missing checksum line".into()))?;
        let (body, tail) = text.split_at(body_end);
        let expected = tail
            .trim_end()
            .strip_prefix("checksum ")
            .ok_or_else(|| corrupt("missing checksum line (truncated?)".into()))?;
        let actual = hex::encode(Sha256::digest(body.as_bytes()));
        if expected != actual {
            return Err(corrupt("checksum mismatch".into()));
        }

        let mut lines = body.lines().enumerate();
        let mut header = |name: &str| -> Result<String> {
            let (n, line) = lines
                .next()
                .ok_or_else(|| corrupt(format!("missing {name} line")))?;
            let mut parts = line.splitn(2, ' ');
            match (parts.next(), parts.next()) {
                (Some(k), Some(v)) if k == name => Ok(v.to_string()),
                _ => Err(corrupt(format!("line {}: expected {name}", n + 1))),
            }
        };
        let version = header(MAGIC)?;
        if version != FORMAT_VERSION.to_string() {
            return Err(corrupt(format!("unsupported format version {version}")));
        }
        let dim: usize = header("dim")?
            .parse()
            .map_err(|_| corrupt("bad dim".into()))?;
        let seed: u64 = header("seed")?
            .parse()
            .map_err(|_| corrupt("bad seed".into()))?;
        let policy = match header("policy")?.as_str() {
            "derive" => UnknownSymbolPolicy::DeriveOnDemand,
            "reject" => UnknownSymbolPolicy::Reject,
            other => return Err(corrupt(format!("bad policy {other:?}"))),
        };
        let mut codebook = Codebook::new(dim, seed)
            .map_err(|e| corrupt(e.to_string()))?
            .with_policy(policy);
        let mut bindings = Vec::new();
        for (n, line) in lines {
            let at = |msg: &str| corrupt(format!("line {}: {msg}", n + 1));
            let fields: Vec<&str> = line.split(' ').collect();
            match fields.as_slice() {
                ["symbol", s] => {
                    if !codebook.add_symbol(s).map_err(|e| at(&e.to_string()))? {
                        return Err(at("duplicate symbol"));
                    }
                }
                ["pin", s, signs] => {
                    if codebook.contains(s) {
                        return Err(at("duplicate symbol"));
                    }
                    let comps: Option<Vec<f64>> = signs
                        .chars()
                        .map(|c| match c {
                            '+' => Some(1.0),
                            '-' => Some(-1.0),
                            _ => None,
                        })
                        .collect();
                    let comps = comps.ok_or_else(|| at("bad pinned vector"))?;
                    let v = Hypervector::new(comps).map_err(|e| at(&e.to_string()))?;
                    codebook.pin(s, v).map_err(|e| at(&e.to_string()))?;
                }
                ["binding", role, seed, variant, norm] => {
                    let seed = seed.parse().map_err(|_| at("bad binding seed"))?;
                    let variant: Variant = variant.parse().map_err(|_| at("bad variant"))?;
                    let normalization: Normalization =
                        norm.parse().map_err(|_| at("bad normalization"))?;
                    bindings.push(BindingRecord {
                        role: role.to_string(),
                        seed,
                        dim,
                        variant,
                        normalization,
                    });
                }
                _ => return Err(at("unrecognized line")),
            }
        }
        Ok(Self { codebook, bindings })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| MbatError::CorruptFile(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        std::fs::write(path, self.to_text())
    }
}
