//! Bundle capacity: analytic error rates and Monte Carlo separation trials.
//!
//! A bundle of `S` random bipolar vectors is compared against `N` further
//! random vectors. The analytic side approximates each member/distractor
//! comparison by a normal tail at `Z = sqrt(D / (2S - 1))`; the simulation
//! counts how often every member outscores every distractor.

use rayon::prelude::*;
use statrs::function::erf::erfc;
use std::fmt::Write as _;

use crate::error::{MbatError, Result};
use crate::rng::{words_for, StreamKey};

/// Largest dimension [`required_dimension`] will consider.
pub const MAX_SEARCH_DIM: u64 = 1 << 32;

/// One-sided standard normal tail `P[X >= x]`.
pub fn tail_prob(x: f64) -> f64 {
    0.5 * erfc(x / std::f64::consts::SQRT_2)
}

/// `sqrt(D / (2S - 1))`.
pub fn z_value(dim: f64, bundled: u64) -> f64 {
    (dim / (2 * bundled - 1) as f64).sqrt()
}

/// Probability that one distractor outscores one member.
pub fn pair_error(dim: f64, bundled: u64) -> f64 {
    tail_prob(z_value(dim, bundled))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorFreeProb {
    /// `max(0, 1 - N S T(Z))`; accurate only when close to 1.
    pub linearized: f64,
    /// `(1 - T(Z))^(N S)`.
    pub exact: f64,
}

pub fn error_free_prob(dim: f64, bundled: u64, distractors: u64) -> ErrorFreeProb {
    let t = pair_error(dim, bundled);
    let pairs = distractors as f64 * bundled as f64;
    ErrorFreeProb {
        linearized: (1.0 - pairs * t).clamp(0.0, 1.0),
        exact: (pairs * (-t).ln_1p()).exp().clamp(0.0, 1.0),
    }
}

fn check_counts(bundled: u64, distractors: u64) -> Result<()> {
    if bundled == 0 || distractors == 0 {
        return Err(MbatError::InvalidArgument(
            "bundle and distractor counts must be positive".into(),
        ));
    }
    Ok(())
}

fn check_probability(p: f64, name: &str) -> Result<()> {
    if !(p > 0.0 && p < 1.0) {
        return Err(MbatError::InvalidArgument(format!("{name} must lie in (0, 1), got {p}")));
    }
    Ok(())
}

/// Smallest integer `D` whose linearized error-free probability reaches
/// `p_target`.
pub fn required_dimension(bundled: u64, distractors: u64, p_target: f64) -> Result<u64> {
    check_counts(bundled, distractors)?;
    check_probability(p_target, "target probability")?;
    let ok = |d: u64| error_free_prob(d as f64, bundled, distractors).linearized >= p_target;
    if !ok(MAX_SEARCH_DIM) {
        return Err(MbatError::SolverLimit {
            limit: MAX_SEARCH_DIM,
        });
    }
    let mut hi = 1u64;
    while !ok(hi) {
        hi *= 2;
    }
    let mut lo = hi / 2;
    // Invariant: ok(hi), and lo == 0 or !ok(lo).
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlateBound {
    /// `8 (S + 1) ln(N / q)`.
    pub bound: f64,
    /// The bound holds only for `D > 2 (S + 1) / pi`.
    pub validity_floor: f64,
}

pub fn plate_bound(bundled: u64, distractors: u64, q: f64) -> Result<PlateBound> {
    check_counts(bundled, distractors)?;
    check_probability(q, "q")?;
    let s1 = (bundled + 1) as f64;
    Ok(PlateBound {
        bound: 8.0 * s1 * (distractors as f64 / q).ln(),
        validity_floor: 2.0 * s1 / std::f64::consts::PI,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CapacityParams {
    pub dim: usize,
    pub bundled: usize,
    pub distractors: usize,
}

impl CapacityParams {
    pub fn new(dim: usize, bundled: usize, distractors: usize) -> Result<Self> {
        if dim == 0 {
            return Err(MbatError::InvalidDimension(0));
        }
        check_counts(bundled as u64, distractors as u64)?;
        Ok(Self {
            dim,
            bundled,
            distractors,
        })
    }
}

/// Analytic summary of one `(D, S, N)` cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CapacityReport {
    pub params: CapacityParams,
    pub z: f64,
    pub pair_error: f64,
    pub error_free: ErrorFreeProb,
    pub p_target: f64,
    /// `Err` carries the solver failure so sweeps can flag the row.
    pub required_dim: std::result::Result<u64, MbatError>,
    pub plate_q: f64,
    pub plate: PlateBound,
}

pub fn analyze(params: CapacityParams, p_target: f64, plate_q: f64) -> Result<CapacityReport> {
    check_probability(p_target, "target probability")?;
    let (d, s, n) = (
        params.dim as f64,
        params.bundled as u64,
        params.distractors as u64,
    );
    Ok(CapacityReport {
        params,
        z: z_value(d, s),
        pair_error: pair_error(d, s),
        error_free: error_free_prob(d, s, n),
        p_target,
        required_dim: required_dimension(s, n, p_target),
        plate_q,
        plate: plate_bound(s, n, plate_q)?,
    })
}

pub const ANALYTIC_CSV_HEADER: &str =
    "D,S,N,Z,pairError,linearizedP,exactP,pTarget,requiredD,plateQ,plateBound,plateValidityFloor,status";

pub fn analytic_csv_row(r: &CapacityReport) -> String {
    let (required, status) = match &r.required_dim {
        Ok(d) => (d.to_string(), "ok".to_string()),
        Err(MbatError::SolverLimit { limit }) => (String::new(), format!("solver-limit>{limit}")),
        Err(e) => (String::new(), format!("error:{e}")),
    };
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{},{}",
        r.params.dim,
        r.params.bundled,
        r.params.distractors,
        r.z,
        r.pair_error,
        r.error_free.linearized,
        r.error_free.exact,
        r.p_target,
        required,
        r.plate_q,
        r.plate.bound,
        r.plate.validity_floor,
        status
    )
}

/// Outcome of one separation trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialOutcome {
    /// Members among the `S` highest-scoring vectors.
    pub bundled_in_top: usize,
    /// Every member strictly outscores every distractor.
    pub error_free: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationResult {
    pub params: CapacityParams,
    pub trials: usize,
    pub frac_bundled_in_top_s: f64,
    pub frac_error_free_trials: f64,
    pub seed: u64,
}

fn trial_key(seed: u64, trial: u64) -> StreamKey {
    StreamKey::derive("mbat/capacity", seed, b"").child(trial)
}

/// Runs trial `trial` of the experiment seeded by `seed`.
///
/// Vector `k` of the trial is stream `k` of the trial key; the first `S`
/// are bundled. Ranking ties favour the earlier vector.
pub fn simulate_trial(params: CapacityParams, seed: u64, trial: u64) -> TrialOutcome {
    let CapacityParams {
        dim,
        bundled: s,
        distractors: n,
    } = params;
    let key = trial_key(seed, trial);
    let nw = words_for(dim);
    let mut members = vec![0u64; nw * s];
    let mut sum = vec![0i32; nw * 64];
    for (k, chunk) in members.chunks_mut(nw).enumerate() {
        key.stream(k as u64).fill_bits(chunk, dim);
        for (i, x) in sum.iter_mut().enumerate().take(dim) {
            *x += if (chunk[i / 64] >> (i % 64)) & 1 == 1 { 1 } else { -1 };
        }
    }
    let table = ByteTable::new(&sum, dim);

    let mut dots: Vec<(i64, usize)> = Vec::with_capacity(s + n);
    for (k, chunk) in members.chunks(nw).enumerate() {
        dots.push((table.dot(chunk), k));
    }
    let mut words = vec![0u64; nw];
    for k in s..s + n {
        key.stream(k as u64).fill_bits(&mut words, dim);
        dots.push((table.dot(&words), k));
    }

    let min_member = dots[..s].iter().map(|d| d.0).min().expect("S >= 1");
    let max_distractor = dots[s..].iter().map(|d| d.0).max().expect("N >= 1");
    let order = |a: &(i64, usize), b: &(i64, usize)| b.0.cmp(&a.0).then(a.1.cmp(&b.1));
    if s < dots.len() {
        dots.select_nth_unstable_by(s - 1, order);
    }
    let bundled_in_top = dots[..s].iter().filter(|d| d.1 < s).count();
    TrialOutcome {
        bundled_in_top,
        error_free: min_member > max_distractor,
    }
}

/// Per-byte partial dot products against a fixed integer vector.
struct ByteTable {
    table: Vec<i32>,
    bytes: usize,
}

impl ByteTable {
    fn new(v: &[i32], dim: usize) -> Self {
        let bytes = dim.div_ceil(8);
        let mut table = vec![0i32; bytes * 256];
        for j in 0..bytes {
            let comp = |bit: usize| v.get(8 * j + bit).copied().filter(|_| 8 * j + bit < dim).unwrap_or(0);
            let base: i32 = (0..8).map(|b| -comp(b)).sum();
            let row = &mut table[j * 256..(j + 1) * 256];
            row[0] = base;
            for byte in 1..256usize {
                let low = byte.trailing_zeros() as usize;
                row[byte] = row[byte & (byte - 1)] + 2 * comp(low);
            }
        }
        Self { table, bytes }
    }

    fn dot(&self, words: &[u64]) -> i64 {
        let mut total = 0i64;
        for j in 0..self.bytes {
            let byte = ((words[j / 8] >> (8 * (j % 8))) & 0xff) as usize;
            total += self.table[j * 256 + byte] as i64;
        }
        total
    }
}

/// Runs `trials` independent trials and averages them.
///
/// Outcomes are integer counts summed in trial order, so the result does
/// not depend on how trials are spread over threads.
pub fn simulate_capacity(params: CapacityParams, trials: usize, seed: u64) -> Result<SimulationResult> {
    if trials == 0 {
        return Err(MbatError::InvalidArgument("need at least one trial".into()));
    }
    let outcomes: Vec<TrialOutcome> = (0..trials as u64)
        .into_par_iter()
        .map(|t| simulate_trial(params, seed, t))
        .collect();
    let in_top: usize = outcomes.iter().map(|o| o.bundled_in_top).sum();
    let error_free = outcomes.iter().filter(|o| o.error_free).count();
    Ok(SimulationResult {
        params,
        trials,
        frac_bundled_in_top_s: in_top as f64 / (trials * params.bundled) as f64,
        frac_error_free_trials: error_free as f64 / trials as f64,
        seed,
    })
}

pub const SIMULATION_CSV_HEADER: &str =
    "D,S,N,trials,fracBundledInTopS,fracErrorFreeTrials,linearizedP,exactP,seed";

pub fn simulation_csv_row(r: &SimulationResult) -> String {
    let p = error_free_prob(r.params.dim as f64, r.params.bundled as u64, r.params.distractors as u64);
    let mut out = String::new();
    let _ = write!(
        out,
        "{},{},{},{},{},{},{},{},{}",
        r.params.dim,
        r.params.bundled,
        r.params.distractors,
        r.trials,
        r.frac_bundled_in_top_s,
        r.frac_error_free_trials,
        p.linearized,
        p.exact,
        r.seed
    );
    out
}
