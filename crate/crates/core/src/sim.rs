//! Monte-Carlo logical error rates and the strip-splitting work model.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::decode::{
    DecodeError, MonolithicDecoder, NoiseModel, PreparedDecoder, StripwiseDecoder,
};
use crate::families::{build, FamilyError, FamilyId, FamilyModel};
use crate::gf2::BitVector;
use crate::model::{DetectorModel, ModelError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("shots must be at least 1")]
    NoShots,
    #[error("flip probability must lie in [0, 0.5), got {0}")]
    InvalidProbability(f64),
    #[error("alpha must be greater than 1, got {0}")]
    InvalidAlpha(f64),
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Decode(#[from] DecodeError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DecoderKind {
    Monolithic,
    Stripwise,
}

impl std::str::FromStr for DecoderKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "monolithic" => Ok(DecoderKind::Monolithic),
            "stripwise" => Ok(DecoderKind::Stripwise),
            _ => Err(format!(
                "unknown decoder `{s}` (expected monolithic or stripwise)"
            )),
        }
    }
}

impl DecoderKind {
    pub fn prepare(self, model: &DetectorModel) -> Result<PreparedDecoder, DecodeError> {
        Ok(match self {
            DecoderKind::Monolithic => PreparedDecoder::Monolithic(
                MonolithicDecoder::new(&model.incidence_matrix())?,
                model.clone(),
            ),
            DecoderKind::Stripwise => PreparedDecoder::Stripwise(StripwiseDecoder::new(model)?),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub family: FamilyId,
    #[serde(rename = "L")]
    pub size: usize,
    pub p_values: Vec<f64>,
    pub shots: u64,
    pub seed: u64,
    pub decoder: DecoderKind,
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        if self.shots == 0 {
            return Err(SimError::NoShots);
        }
        for &p in &self.p_values {
            NoiseModel::new(p).map_err(|_| SimError::InvalidProbability(p))?;
        }
        Ok(())
    }
}

/// Default probability grid `0.02, 0.04, ..., 0.48`.
pub fn default_p_grid() -> Vec<f64> {
    (1..=24).map(|k| k as f64 / 50.0).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimPoint {
    pub p: f64,
    pub failures: u64,
    pub shots: u64,
    pub estimate: f64,
    pub stderr: f64,
    pub analytic: f64,
}

impl SimPoint {
    fn new(p: f64, failures: u64, shots: u64, chain_length: usize) -> Self {
        let estimate = failures as f64 / shots as f64;
        SimPoint {
            p,
            failures,
            shots,
            estimate,
            stderr: (estimate * (1.0 - estimate) / shots as f64).sqrt(),
            analytic: analytic_rep(chain_length, p),
        }
    }
}

/// Generator for one shot. Distinct `(seed, p_index, shot)` triples give
/// independent ChaCha8 streams, so results do not depend on scheduling.
pub fn shot_rng(seed: u64, p_index: u64, shot: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&p_index.to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(shot);
    rng
}

/// Each bit is set independently with probability `p`.
pub fn sample_error<R: Rng + ?Sized>(n_fault: usize, p: f64, rng: &mut R) -> BitVector {
    let mut e = BitVector::zeros(n_fault);
    if p <= 0.0 {
        return e;
    }
    for i in 0..n_fault {
        if rng.gen::<f64>() < p {
            e.set(i, true).expect("in range");
        }
    }
    e
}

/// Probability that a majority of an `L`-bit repetition chain flips:
/// `sum_{w = ceil((L+1)/2)}^{L} C(L, w) p^w (1-p)^(L-w)`.
pub fn analytic_rep(length: usize, p: f64) -> f64 {
    assert!(length >= 1, "chain length must be positive");
    let start = length / 2 + 1;
    if p <= 0.0 {
        return 0.0;
    }
    if p >= 1.0 {
        return 1.0;
    }
    if p == 0.5 {
        // every pattern is equally likely: count them exactly
        let mut binom: u128 = 1;
        let mut count: u128 = 0;
        for w in 0..=length {
            if w >= start {
                count += binom;
            }
            binom = binom * (length - w) as u128 / (w + 1) as u128;
        }
        return count as f64 / 2f64.powi(length as i32);
    }
    // first term by direct product, then the ratio recurrence
    let q = 1.0 - p;
    let mut term = 1.0f64;
    for i in 0..start {
        term *= (length - i) as f64 / (i + 1) as f64;
    }
    term *= p.powi(start as i32) * q.powi((length - start) as i32);
    let ratio = p / q;
    let mut total = 0.0;
    for w in start..=length {
        total += term;
        term *= (length - w) as f64 / (w + 1) as f64 * ratio;
    }
    total.min(1.0)
}

/// Counts shots whose residual `ê + e` has odd parity on `logical_faults`.
/// `p` may equal 1/2 here; the decoders do not depend on it.
pub fn count_failures(
    decoder: &PreparedDecoder,
    model: &DetectorModel,
    logical_faults: &[usize],
    p: f64,
    shots: u64,
    seed: u64,
    p_index: u64,
) -> Result<u64, DecodeError> {
    let h = model.incidence_matrix();
    let n = model.n_fault();
    (0..shots)
        .into_par_iter()
        .map(|shot| {
            let mut rng = shot_rng(seed, p_index, shot);
            let e = sample_error(n, p, &mut rng);
            let s = h.mat_vec(&e).expect("sizes match");
            let r = decoder.decode(&s)?;
            let flipped = logical_faults
                .iter()
                .filter(|&&f| r.correction.get(f).expect("in range") != e.get(f).expect("in range"))
                .count();
            Ok(u64::from(flipped % 2 == 1))
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))
}

/// Runs every probability of `config` on the family's designated logical strip.
pub fn run_sim(config: &SimConfig) -> Result<Vec<SimPoint>, SimError> {
    config.validate()?;
    let fam = build(config.family, config.size)?;
    run_sim_on(&fam, config)
}

pub fn run_sim_on(fam: &FamilyModel, config: &SimConfig) -> Result<Vec<SimPoint>, SimError> {
    config.validate()?;
    let decoder = config.decoder.prepare(&fam.model)?;
    let logical = &fam.logical_faults[0];
    config
        .p_values
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let failures = count_failures(
                &decoder,
                &fam.model,
                logical,
                p,
                config.shots,
                config.seed,
                i as u64,
            )?;
            Ok(SimPoint::new(p, failures, config.shots, logical.len()))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WallTimes {
    pub monolithic_seconds: f64,
    pub stripwise_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub alpha: f64,
    /// Detector counts of the strips that carry detectors.
    pub n_per_strip: Vec<usize>,
    #[serde(rename = "N")]
    pub n_total: usize,
    pub m: usize,
    pub mono_work: f64,
    pub strip_work: f64,
    pub predicted_balanced_speedup: f64,
    pub measured_ratio: f64,
    pub wall_times: Option<WallTimes>,
}

fn power(x: f64, alpha: f64) -> f64 {
    if alpha.fract() == 0.0 && alpha.abs() < i32::MAX as f64 {
        x.powi(alpha as i32)
    } else {
        x.powf(alpha)
    }
}

/// Spins for about `n^alpha` steps.
fn synthetic_work(n: usize, alpha: f64) -> u64 {
    let steps = power(n as f64, alpha).round() as u64;
    let mut acc = 0x9e37_79b9_7f4a_7c15u64;
    for i in 0..steps {
        acc = std::hint::black_box(acc.rotate_left(5) ^ i).wrapping_mul(0x2545_f491_4f6c_dd1d);
    }
    acc
}

/// Work ratio `N^alpha / sum_j n_j^alpha`. With `repeats > 0` it also times a
/// synthetic `n^alpha` workload on the whole model and on each strip.
pub fn bench(model: &DetectorModel, alpha: f64, repeats: usize) -> Result<BenchReport, SimError> {
    if alpha.partial_cmp(&1.0) != Some(std::cmp::Ordering::Greater) || !alpha.is_finite() {
        return Err(SimError::InvalidAlpha(alpha));
    }
    let stats = model.strip_stats();
    if stats.non_local > 0 {
        // surface the first offending fault
        model.block_decompose()?;
    }
    let n_per_strip: Vec<usize> = model
        .detectors_by_strip()
        .iter()
        .map(Vec::len)
        .filter(|&n| n > 0)
        .collect();
    let n_total: usize = n_per_strip.iter().sum();
    let m = n_per_strip.len();
    let mono_work = power(n_total as f64, alpha);
    let strip_work: f64 = n_per_strip.iter().map(|&n| power(n as f64, alpha)).sum();

    let wall_times = (repeats > 0).then(|| {
        let start = Instant::now();
        for _ in 0..repeats {
            std::hint::black_box(synthetic_work(n_total, alpha));
        }
        let mono = start.elapsed().as_secs_f64() / repeats as f64;
        let start = Instant::now();
        for _ in 0..repeats {
            for &n in &n_per_strip {
                std::hint::black_box(synthetic_work(n, alpha));
            }
        }
        let strip = start.elapsed().as_secs_f64() / repeats as f64;
        WallTimes {
            monolithic_seconds: mono,
            stripwise_seconds: strip,
        }
    });

    Ok(BenchReport {
        alpha,
        n_per_strip,
        n_total,
        m,
        mono_work,
        strip_work,
        predicted_balanced_speedup: power(m as f64, alpha - 1.0),
        measured_ratio: if strip_work > 0.0 {
            mono_work / strip_work
        } else {
            1.0
        },
        wall_times,
    })
}

/// `printf("%.12g")`.
pub fn format_g12(x: f64) -> String {
    const DIGITS: i32 = 12;
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if !(-4..DIGITS).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (DIGITS - 1 - exp).max(0) as usize;
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

pub const SIM_CSV_HEADER: &str = "family,L,p,shots,failures,estimate,stderr,analytic";
pub const BENCH_CSV_HEADER: &str =
    "family,L,alpha,N,m,mono_work,strip_work,ratio,predicted_balanced";

pub fn sim_csv_row(family: &str, size: usize, point: &SimPoint) -> String {
    format!(
        "{family},{size},{},{},{},{},{},{}",
        format_g12(point.p),
        point.shots,
        point.failures,
        format_g12(point.estimate),
        format_g12(point.stderr),
        format_g12(point.analytic)
    )
}

/// `size` is left empty when the model has no linear size.
pub fn bench_csv_row(family: &str, size: Option<usize>, report: &BenchReport) -> String {
    let size = size.map_or_else(String::new, |s| s.to_string());
    format!(
        "{family},{size},{},{},{},{},{},{},{}",
        format_g12(report.alpha),
        report.n_total,
        report.m,
        format_g12(report.mono_work),
        format_g12(report.strip_work),
        format_g12(report.measured_ratio),
        format_g12(report.predicted_balanced_speedup)
    )
}
