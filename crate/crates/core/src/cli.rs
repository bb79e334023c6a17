//! The `mbat` command line.
//!
//! Every report starts with `#` lines recording the tool version, the
//! effective configuration, and the arguments; running those arguments
//! again reproduces the report byte for byte.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::binding::{BindingOperator, Bindings, Normalization, Variant};
use crate::capacity::{self, CapacityParams};
use crate::codebook::{tag_symbol, vector_checksum, Codebook, CodebookFile, UnknownSymbolPolicy};
use crate::error::MbatError;
use crate::hypervector::{contains, Hypervector};
use crate::learn::{run_learning, LearnConfig};
use crate::query::{self, format_report, ProbeResult};
use crate::structure::{encode_sentence, parse_sentence_spec, Scheme, SEQUENCE_ROLE};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "MBAT_THREADS";

#[derive(Debug, Parser)]
#[command(name = "mbat", version, about = "Matrix binding of additive terms")]
pub struct Cli {
    /// Vector dimension.
    #[arg(long, global = true, default_value_t = 1000)]
    pub dim: usize,
    /// Master seed for symbols, matrices, and experiments.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Binding operator family.
    #[arg(long, global = true, default_value = "dense", value_parser = parse_variant)]
    pub variant: Variant,
    /// Normalization after each binding: none, sqrtd, term, binary.
    #[arg(long, global = true, default_value = "term", value_parser = parse_norm)]
    pub norm: Normalization,
    /// Number of binding levels probed.
    #[arg(long, global = true, default_value_t = 3)]
    pub depth: usize,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

fn parse_variant(s: &str) -> Result<Variant, MbatError> {
    s.parse()
}

fn parse_norm(s: &str) -> Result<Normalization, MbatError> {
    s.parse()
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Create or inspect codebook files.
    #[command(subcommand)]
    Codebook(CodebookCmd),
    /// Encode a sentence and print its checksum.
    Encode(EncodeArgs),
    /// Probe an encoded sentence.
    Query(QueryArgs),
    /// Capacity analytics and simulations.
    #[command(subcommand)]
    Capacity(CapacityCmd),
    /// Train a perceptron on generated sentences.
    Learn(LearnArgs),
}

#[derive(Debug, Subcommand)]
pub enum CodebookCmd {
    /// Write a codebook file with the given symbols.
    Create {
        path: PathBuf,
        symbols: Vec<String>,
        /// Comma-separated binding roles stored with the codebook.
        #[arg(long, default_value = "M", value_delimiter = ',')]
        roles: Vec<String>,
        /// Refuse symbols not listed in the file.
        #[arg(long)]
        strict: bool,
    },
    /// Print dimension, seed, and per-symbol checksums.
    Inspect { path: PathBuf },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SchemeArg {
    Sequential,
    Roles,
    Surface,
}

impl SchemeArg {
    fn scheme(self) -> Scheme {
        match self {
            SchemeArg::Sequential => Scheme::SequentialPowers,
            SchemeArg::Roles => Scheme::RoleMatrices,
            SchemeArg::Surface => Scheme::Surface,
        }
    }
}

#[derive(Debug, Args)]
pub struct SourceArgs {
    /// Codebook file; without one, symbols and operators derive from the
    /// global flags.
    #[arg(long)]
    pub codebook: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "sequential")]
    pub scheme: SchemeArg,
}

#[derive(Debug, Args)]
pub struct EncodeArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Also print every component.
    #[arg(long)]
    pub full: bool,
    /// Sentence text, e.g. "@actor the smart girl | @verb saw".
    pub sentence: String,
}

#[derive(Debug, Args)]
pub struct QueryArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Sentence to encode and probe.
    #[arg(long, conflicts_with = "vector", required_unless_present = "vector")]
    pub sentence: Option<String>,
    /// Vector written by `encode --full`.
    #[arg(long)]
    pub vector: Option<PathBuf>,
    /// Operator used for level probes.
    #[arg(long, default_value = SEQUENCE_ROLE)]
    pub role: String,
    /// member:SYM, contains:SYM, cooccur:A,B, decode:LEVEL:K,
    /// count:LEVEL[:MAXK], or cleanup.
    #[arg(required = true)]
    pub probes: Vec<String>,
}

#[derive(Debug, Args)]
pub struct CellArgs {
    /// Dimensions: a list `700,800` or a range `200:1000:50`.
    #[arg(long = "dims", value_parser = parse_range)]
    pub dims: Vec<Vec<u64>>,
    /// Bundled vector counts (S).
    #[arg(long = "bundled", value_parser = parse_range, default_value = "20")]
    pub bundled: Vec<Vec<u64>>,
    /// Distractor counts (N).
    #[arg(long = "distractors", value_parser = parse_range, default_value = "1000")]
    pub distractors: Vec<Vec<u64>>,
}

fn parse_range(s: &str) -> Result<Vec<u64>, String> {
    let num = |t: &str| t.trim().parse::<u64>().map_err(|e| format!("{t:?}: {e}"));
    if let Some((a, rest)) = s.split_once(':') {
        let (b, step) = match rest.split_once(':') {
            Some((b, step)) => (num(b)?, num(step)?),
            None => (num(rest)?, 1),
        };
        let a = num(a)?;
        if step == 0 || b < a {
            return Err(format!("bad range {s:?}"));
        }
        Ok((a..=b).step_by(step as usize).collect())
    } else {
        s.split(',').map(num).collect()
    }
}

impl CellArgs {
    fn flat(v: &[Vec<u64>]) -> Vec<u64> {
        v.iter().flatten().copied().collect()
    }

    fn cells(&self, default_dim: usize) -> Vec<(u64, u64, u64)> {
        let mut dims = Self::flat(&self.dims);
        if dims.is_empty() {
            dims.push(default_dim as u64);
        }
        let mut out = Vec::new();
        for &s in &Self::flat(&self.bundled) {
            for &n in &Self::flat(&self.distractors) {
                for &d in &dims {
                    out.push((d, s, n));
                }
            }
        }
        out
    }
}

#[derive(Debug, Subcommand)]
pub enum CapacityCmd {
    /// Error rates, required dimension, and Plate's bound per cell.
    Analytic {
        #[command(flatten)]
        cells: CellArgs,
        /// Target error-free probability for the required dimension.
        #[arg(long, default_value_t = 0.98)]
        target: f64,
        /// Error probability q in Plate's bound.
        #[arg(long, default_value_t = 0.01)]
        plate_q: f64,
    },
    /// Monte Carlo separation trials per cell.
    Simulate {
        #[command(flatten)]
        cells: CellArgs,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        /// Completed cells are appended here and skipped on rerun.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        /// Allow runs above the desk-scale work limit.
        #[arg(long)]
        large: bool,
    },
}

#[derive(Debug, Args)]
pub struct LearnArgs {
    #[arg(long, default_value_t = 1000)]
    pub train: usize,
    #[arg(long, default_value_t = 500)]
    pub test: usize,
    #[arg(long, default_value_t = 200)]
    pub vocab: usize,
    #[arg(long, default_value_t = 100)]
    pub max_epochs: usize,
}

/// Vector-dimension work units (trials x vectors x D) allowed without
/// `--large`.
pub const DESK_SCALE_WORK: f64 = 5e10;

#[derive(Debug)]
enum CliError {
    Usage(String),
    Run(MbatError),
    Io(std::io::Error),
}

impl From<MbatError> for CliError {
    fn from(e: MbatError) -> Self {
        CliError::Run(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Runs the command line and returns the process exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(stdout, "{text}");
            } else {
                let _ = write!(stderr, "{text}");
            }
            return code;
        }
    };
    let threads = match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Some(n),
            _ => {
                let _ = writeln!(stderr, "error: {THREADS_ENV} must be a positive integer");
                return 2;
            }
        },
        Err(_) => None,
    };
    let arg_text = args
        .iter()
        .skip(1)
        .map(|a| quote(&a.to_string_lossy()))
        .collect::<Vec<_>>()
        .join(" ");
    let result = match threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| execute(&cli, &arg_text)),
            Err(e) => Err(CliError::Usage(e.to_string())),
        },
        None => execute(&cli, &arg_text),
    };
    let result = result.and_then(|text| {
        if text.is_empty() {
            Ok(())
        } else {
            emit(&cli, stdout, &text)
        }
    });
    match result {
        Ok(()) => 0,
        Err(CliError::Usage(m)) => {
            let _ = writeln!(stderr, "error: {m}");
            2
        }
        Err(CliError::Run(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            1
        }
        Err(CliError::Io(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            1
        }
    }
}

fn quote(s: &str) -> String {
    if !s.is_empty()
        && s
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || "-_./:,=+@".contains(c))
    {
        s.to_string()
    } else {
        format!("'{}'", s.replace('\'', "'\\''"))
    }
}

struct Header {
    lines: String,
}

impl Header {
    fn new(command: &str, args: &str) -> Self {
        let mut lines = String::new();
        let _ = writeln!(lines, "# mbat {VERSION} {command}");
        let _ = writeln!(lines, "# args: {args}");
        Self { lines }
    }

    fn config(mut self, dim: usize, seed: u64, variant: Variant, norm: Normalization, depth: usize) -> Self {
        let _ = writeln!(
            self.lines,
            "# config: dim={dim} seed={seed} variant={variant} norm={norm} depth={depth}"
        );
        self
    }

    fn line(mut self, text: &str) -> Self {
        let _ = writeln!(self.lines, "# {text}");
        self
    }
}

fn emit(cli: &Cli, stdout: &mut dyn Write, text: &str) -> CliResult<()> {
    match &cli.out {
        Some(path) => fs::write(path, text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn execute(cli: &Cli, args: &str) -> CliResult<String> {
    if cli.dim == 0 {
        return Err(CliError::Usage("--dim must be positive".into()));
    }
    match &cli.command {
        Command::Codebook(cmd) => cmd_codebook(cli, cmd, args),
        Command::Encode(a) => cmd_encode(cli, a, args),
        Command::Query(a) => cmd_query(cli, a, args),
        Command::Capacity(cmd) => cmd_capacity(cli, cmd, args),
        Command::Learn(a) => cmd_learn(cli, a, args),
    }
}

fn cmd_codebook(cli: &Cli, cmd: &CodebookCmd, args: &str) -> CliResult<String> {
    match cmd {
        CodebookCmd::Create {
            path,
            symbols,
            roles,
            strict,
        } => {
            let policy = if *strict {
                UnknownSymbolPolicy::Reject
            } else {
                UnknownSymbolPolicy::DeriveOnDemand
            };
            let codebook = Codebook::new(cli.dim, cli.seed)?
                .with_symbols(symbols)?
                .with_policy(policy);
            let bindings = Bindings::from_roles(cli.seed, cli.dim, cli.variant, cli.norm, roles)?;
            let file = CodebookFile {
                codebook,
                bindings: bindings.records(),
            };
            file.write(path)?;
            Ok(String::new())
        }
        CodebookCmd::Inspect { path } => {
            let file = CodebookFile::read(path)?;
            let cb = &file.codebook;
            let mut out = Header::new("codebook inspect", args).lines;
            let _ = writeln!(out, "dim\t{}", cb.dim());
            let _ = writeln!(out, "seed\t{}", cb.master_seed());
            let _ = writeln!(out, "symbols\t{}", cb.len());
            for r in &file.bindings {
                let _ = writeln!(out, "binding\t{}\t{}\t{}", r.role, r.variant, r.normalization);
            }
            for s in cb.symbols() {
                let _ = writeln!(out, "symbol\t{s}\t{}", vector_checksum(&cb.vector(s)?));
            }
            Ok(out)
        }
    }
}

/// Codebook and operators for encoding, from a file or the global flags.
fn load_context(cli: &Cli, source: &SourceArgs, extra_roles: &[&str]) -> CliResult<(Codebook, Bindings)> {
    match &source.codebook {
        Some(path) => {
            let file = CodebookFile::read(path)?;
            let bindings = Bindings::from_records(&file.bindings)?;
            Ok((file.codebook, bindings))
        }
        None => {
            let codebook = Codebook::new(cli.dim, cli.seed)?;
            let mut roles: Vec<&str> = vec![SEQUENCE_ROLE];
            for r in extra_roles {
                if !roles.contains(r) {
                    roles.push(r);
                }
            }
            let bindings = Bindings::from_roles(cli.seed, cli.dim, cli.variant, cli.norm, &roles)?;
            Ok((codebook, bindings))
        }
    }
}

fn context_header(header: Header, cb: &Codebook, bindings: &Bindings, cli: &Cli) -> Header {
    let (variant, norm) = bindings
        .records()
        .first()
        .map_or((cli.variant, cli.norm), |r| (r.variant, r.normalization));
    header.config(cb.dim(), cb.master_seed(), variant, norm, cli.depth)
}

fn encode_text(cli: &Cli, source: &SourceArgs, text: &str, extra_roles: &[&str]) -> CliResult<(Codebook, Bindings, Hypervector)> {
    let spec = parse_sentence_spec(text)?.with_scheme(source.scheme.scheme());
    let roles: Vec<&str> = spec
        .phrases
        .iter()
        .filter_map(|p| p.role())
        .chain(extra_roles.iter().copied())
        .collect();
    let (mut cb, bindings) = load_context(cli, source, &roles)?;
    if source.codebook.is_none() {
        for p in &spec.phrases {
            for w in p.words() {
                cb.add_symbol(w)?;
            }
            for t in p.tags() {
                cb.add_symbol(&tag_symbol(t))?;
            }
        }
    }
    let v = encode_sentence(&cb, &bindings, &spec)?;
    Ok((cb, bindings, v))
}

fn cmd_encode(cli: &Cli, a: &EncodeArgs, args: &str) -> CliResult<String> {
    let (cb, bindings, v) = encode_text(cli, &a.source, &a.sentence, &[])?;
    let mut out = context_header(Header::new("encode", args), &cb, &bindings, cli).lines;
    let _ = writeln!(out, "dim\t{}", v.dim());
    let _ = writeln!(out, "norm\t{}", v.norm());
    let _ = writeln!(out, "checksum\t{}", vector_checksum(&v));
    if a.full {
        out.push_str("components\n");
        for c in v.as_slice() {
            let _ = writeln!(out, "{c}");
        }
    }
    Ok(out)
}

fn read_vector_file(path: &Path) -> CliResult<Hypervector> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines().skip_while(|l| *l != "components");
    if lines.next().is_none() {
        return Err(MbatError::CorruptFile(format!(
            "{} has no components section",
            path.display()
        ))
        .into());
    }
    let comps = lines
        .filter(|l| !l.trim().is_empty())
        .map(|l| l.trim().parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| MbatError::CorruptFile(format!("{}: {e}", path.display())))?;
    Ok(Hypervector::new(comps)?)
}

enum Probe {
    Member(String),
    Contains(String),
    Cooccur(String, String),
    Decode(usize, usize),
    Count(usize, usize),
    Cleanup,
}

fn parse_probe(s: &str) -> CliResult<Probe> {
    let bad = || CliError::Usage(format!("malformed probe {s:?}"));
    let num = |t: &str| t.parse::<usize>().map_err(|_| bad());
    let sym = |t: &str| {
        if t.is_empty() || t.contains(char::is_whitespace) {
            Err(bad())
        } else {
            Ok(t.to_string())
        }
    };
    if s == "cleanup" {
        return Ok(Probe::Cleanup);
    }
    let (kind, rest) = s.split_once(':').ok_or_else(bad)?;
    match kind {
        "member" => Ok(Probe::Member(sym(rest)?)),
        "contains" => Ok(Probe::Contains(sym(rest)?)),
        "cooccur" => {
            let (a, b) = rest.split_once(',').ok_or_else(bad)?;
            Ok(Probe::Cooccur(sym(a)?, sym(b)?))
        }
        "decode" => {
            let (l, k) = rest.split_once(':').ok_or_else(bad)?;
            Ok(Probe::Decode(num(l)?, num(k)?))
        }
        "count" => match rest.split_once(':') {
            Some((l, k)) => Ok(Probe::Count(num(l)?, num(k)?)),
            None => Ok(Probe::Count(num(rest)?, 8)),
        },
        _ => Err(bad()),
    }
}

fn cmd_query(cli: &Cli, a: &QueryArgs, args: &str) -> CliResult<String> {
    let probes = a
        .probes
        .iter()
        .map(|p| parse_probe(p))
        .collect::<CliResult<Vec<_>>>()?;
    let (cb, bindings, v) = match (&a.sentence, &a.vector) {
        (Some(text), _) => encode_text(cli, &a.source, text, &[a.role.as_str()])?,
        (None, Some(path)) => {
            let (cb, b) = load_context(cli, &a.source, &[a.role.as_str()])?;
            (cb, b, read_vector_file(path)?)
        }
        (None, None) => return Err(CliError::Usage("need --sentence or --vector".into())),
    };
    let op: &BindingOperator = bindings.get(&a.role)?;
    let mut rows: Vec<ProbeResult> = Vec::new();
    for p in &probes {
        match p {
            Probe::Member(s) => {
                rows.push(query::probe_member(op, &v, s, &cb.vector(s)?, cli.depth, None)?)
            }
            Probe::Contains(s) => {
                let r = contains(&v, &cb.vector(s)?, None)?;
                rows.push(ProbeResult {
                    symbol: s.clone(),
                    score: r.score,
                    level: Some(0),
                    decision: Some(r.decision),
                });
            }
            Probe::Cooccur(x, y) => {
                let (score, level) =
                    query::cooccur_score(op, &v, &cb.vector(x)?, &cb.vector(y)?, cli.depth)?;
                rows.push(ProbeResult {
                    symbol: format!("{x}+{y}"),
                    score,
                    level: Some(level),
                    decision: None,
                });
            }
            Probe::Decode(level, k) => rows.extend(query::decode_phrase(&cb, op, &v, *level, *k)?),
            Probe::Count(level, max_k) => {
                rows.push(query::read_word_count(&cb, op, &v, *level, *max_k)?.1)
            }
            Probe::Cleanup => rows.push(query::cleanup(&cb, &v)?),
        }
    }
    let mut out = context_header(Header::new("query", args), &cb, &bindings, cli).lines;
    out.push_str(&format_report(&rows));
    Ok(out)
}

fn cmd_capacity(cli: &Cli, cmd: &CapacityCmd, args: &str) -> CliResult<String> {
    match cmd {
        CapacityCmd::Analytic {
            cells,
            target,
            plate_q,
        } => {
            let mut out = Header::new("capacity analytic", args)
                .line(&format!("target={target} plateQ={plate_q}"))
                .lines;
            out.push_str(capacity::ANALYTIC_CSV_HEADER);
            out.push('\n');
            for (d, s, n) in cells.cells(cli.dim) {
                let params = CapacityParams::new(d as usize, s as usize, n as usize)?;
                let report = capacity::analyze(params, *target, *plate_q)?;
                out.push_str(&capacity::analytic_csv_row(&report));
                out.push('\n');
            }
            Ok(out)
        }
        CapacityCmd::Simulate {
            cells,
            trials,
            checkpoint,
            large,
        } => {
            let cells = cells.cells(cli.dim);
            let work: f64 = cells
                .iter()
                .map(|&(d, s, n)| *trials as f64 * (s + n) as f64 * d as f64)
                .sum();
            if work > DESK_SCALE_WORK && !large {
                return Err(CliError::Usage(format!(
                    "sweep needs {work:.3e} vector operations; pass --large to run it"
                )));
            }
            let done = match checkpoint {
                Some(p) if p.exists() => fs::read_to_string(p)?,
                _ => String::new(),
            };
            let mut ckpt = match checkpoint {
                Some(p) => Some(fs::OpenOptions::new().create(true).append(true).open(p)?),
                None => None,
            };
            let mut out = Header::new("capacity simulate", args)
                .line(&format!("trials={trials} seed={}", cli.seed))
                .lines;
            out.push_str(capacity::SIMULATION_CSV_HEADER);
            out.push('\n');
            for (d, s, n) in cells {
                let prefix = format!("{d},{s},{n},{trials},");
                let suffix = format!(",{}", cli.seed);
                let cached = done
                    .lines()
                    .find(|l| l.starts_with(&prefix) && l.ends_with(&suffix));
                let row = match cached {
                    Some(l) => l.to_string(),
                    None => {
                        let params = CapacityParams::new(d as usize, s as usize, n as usize)?;
                        let r = capacity::simulate_capacity(params, *trials, cli.seed)?;
                        let row = capacity::simulation_csv_row(&r);
                        if let Some(f) = ckpt.as_mut() {
                            writeln!(f, "{row}")?;
                            f.flush()?;
                        }
                        row
                    }
                };
                out.push_str(&row);
                out.push('\n');
            }
            Ok(out)
        }
    }
}

fn cmd_learn(cli: &Cli, a: &LearnArgs, args: &str) -> CliResult<String> {
    let config = LearnConfig {
        dim: cli.dim,
        seed: cli.seed,
        variant: cli.variant,
        normalization: cli.norm,
        train: a.train,
        test: a.test,
        vocab_size: a.vocab,
        max_depth: cli.depth,
        max_epochs: a.max_epochs,
    };
    if a.train == 0 {
        return Err(CliError::Usage("--train must be positive".into()));
    }
    let report = run_learning(&config)?;
    let mut out = Header::new("learn", args)
        .config(cli.dim, cli.seed, cli.variant, cli.norm, cli.depth)
        .lines;
    out.push_str(&report.to_text());
    Ok(out)
}
