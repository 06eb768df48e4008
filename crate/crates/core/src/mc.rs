//! Deterministic chunked Monte Carlo.
//!
//! Work is cut into chunks of `chunk_size` samples. Chunk `c` draws from
//! `RngStream::new(master_seed, c)` and chunk results are merged in ascending
//! chunk order, so a run is a pure function of `(master_seed, chunk_size,
//! n_samples)` whatever the number of worker threads.

use rayon::prelude::*;

use crate::closed_form::{
    avg_coherence_mixed, avg_coherence_pure, tail_bound_mixed, tail_bound_pure,
};
use crate::coherence::{c_i_mixed, c_i_pure, c_r, c_r_pure};
use crate::random::{sample_haar_pure, sample_hs_mixed, RngStream};
use crate::{Error, Result};

pub const DEFAULT_CHUNK_SIZE: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McConfig {
    pub master_seed: u64,
    pub chunk_size: usize,
    /// Worker threads; `None` uses the global rayon pool.
    pub threads: Option<usize>,
}

impl McConfig {
    pub fn new(master_seed: u64) -> Self {
        Self {
            master_seed,
            chunk_size: DEFAULT_CHUNK_SIZE,
            threads: None,
        }
    }

    pub fn with_chunk_size(mut self, chunk_size: usize) -> Self {
        self.chunk_size = chunk_size;
        self
    }

    pub fn with_threads(mut self, threads: Option<usize>) -> Self {
        self.threads = threads;
        self
    }
}

/// Streaming mean and variance (Welford), mergeable with Chan's pairwise update.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Welford {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Welford {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&mut self, other: &Welford) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let total = self.count + other.count;
        let delta = other.mean - self.mean;
        let weight = other.count as f64 / total as f64;
        self.mean += delta * weight;
        self.m2 += other.m2 + delta * delta * self.count as f64 * weight;
        self.count = total;
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    pub fn stderr(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            (self.variance() / self.count as f64).sqrt()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorResult {
    pub mean: f64,
    pub stderr: f64,
    pub n_samples: u64,
    pub master_seed: u64,
    pub chunk_size: usize,
}

impl EstimatorResult {
    pub fn from_welford(acc: &Welford, config: &McConfig) -> Self {
        Self {
            mean: acc.mean(),
            stderr: acc.stderr(),
            n_samples: acc.count(),
            master_seed: config.master_seed,
            chunk_size: config.chunk_size,
        }
    }

    /// `|mean - target| <= k * stderr`.
    pub fn agrees_with(&self, target: f64, k: f64) -> bool {
        (self.mean - target).abs() <= k * self.stderr
    }

    /// Distance from `target` in units of the standard error.
    pub fn z_score(&self, target: f64) -> f64 {
        (self.mean - target).abs() / self.stderr
    }
}

/// Runs `task(rng, count)` once per chunk and returns the chunk results in
/// chunk order. The last chunk is truncated so that counts sum to `total`.
pub fn run_chunked<T, F>(total: usize, config: &McConfig, task: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&mut RngStream, usize) -> T + Sync,
{
    if config.chunk_size == 0 {
        return Err(Error::domain("chunk_size", "must be at least 1"));
    }
    let chunk_size = config.chunk_size;
    let n_chunks = total.div_ceil(chunk_size);
    let run_chunk = |c: usize| {
        let count = chunk_size.min(total - c * chunk_size);
        let mut rng = RngStream::new(config.master_seed, c as u64);
        task(&mut rng, count)
    };
    match config.threads {
        Some(0) => Err(Error::domain("threads", "must be at least 1")),
        Some(threads) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| Error::domain("threads", e.to_string()))?;
            Ok(pool.install(|| (0..n_chunks).into_par_iter().map(run_chunk).collect()))
        }
        None => Ok((0..n_chunks).into_par_iter().map(run_chunk).collect()),
    }
}

/// Mean and standard error of `sample(rng)` over `samples` draws.
pub fn estimate<F>(samples: usize, config: &McConfig, sample: F) -> Result<EstimatorResult>
where
    F: Fn(&mut RngStream) -> Result<f64> + Sync,
{
    let chunks = run_chunked(samples, config, |rng, count| {
        let mut acc = Welford::default();
        for _ in 0..count {
            acc.push(sample(rng)?);
        }
        Ok(acc)
    })?;
    let mut total = Welford::default();
    for chunk in chunks {
        total.merge(&chunk?);
    }
    Ok(EstimatorResult::from_welford(&total, config))
}

/// Every sampled value, in deterministic chunk order.
pub fn collect_samples<F>(samples: usize, config: &McConfig, sample: F) -> Result<Vec<f64>>
where
    F: Fn(&mut RngStream) -> Result<f64> + Sync,
{
    let chunks = run_chunked(samples, config, |rng, count| {
        (0..count).map(|_| sample(rng)).collect::<Result<Vec<f64>>>()
    })?;
    let mut out = Vec::with_capacity(samples);
    for chunk in chunks {
        out.extend(chunk?);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ensemble {
    /// Haar-random pure states.
    Pure,
    /// Hilbert–Schmidt random mixed states.
    Mixed,
}

impl Ensemble {
    pub fn as_str(&self) -> &'static str {
        match self {
            Ensemble::Pure => "pure",
            Ensemble::Mixed => "mixed",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Measure {
    /// Skew information-based coherence `C_I`.
    Skew,
    /// Relative entropy of coherence `C_r`.
    RelativeEntropy,
}

impl Measure {
    pub fn as_str(&self) -> &'static str {
        match self {
            Measure::Skew => "skew",
            Measure::RelativeEntropy => "rel-ent",
        }
    }
}

/// Draws one state from `ensemble` and evaluates `measure` on it.
pub fn sample_coherence(
    ensemble: Ensemble,
    measure: Measure,
    n: usize,
    rng: &mut RngStream,
) -> Result<f64> {
    match (ensemble, measure) {
        (Ensemble::Pure, Measure::Skew) => Ok(c_i_pure(&sample_haar_pure(rng, n)).value),
        (Ensemble::Pure, Measure::RelativeEntropy) => Ok(c_r_pure(&sample_haar_pure(rng, n))),
        (Ensemble::Mixed, Measure::Skew) => Ok(c_i_mixed(&sample_hs_mixed(rng, n))?.value),
        (Ensemble::Mixed, Measure::RelativeEntropy) => c_r(&sample_hs_mixed(rng, n)),
    }
}

fn check_dim(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::domain("dimension", "must be positive"))
    } else {
        Ok(())
    }
}

pub fn estimate_average(
    ensemble: Ensemble,
    n: usize,
    samples: usize,
    measure: Measure,
    config: &McConfig,
) -> Result<EstimatorResult> {
    check_dim(n)?;
    if samples < 2 {
        return Err(Error::domain("samples", "at least 2 samples are needed"));
    }
    estimate(samples, config, |rng| sample_coherence(ensemble, measure, n, rng))
}

/// Analytic `C_I` average of the ensemble.
pub fn analytic_average(ensemble: Ensemble, n: usize) -> Result<f64> {
    match ensemble {
        Ensemble::Pure => Ok(avg_coherence_pure(n)),
        Ensemble::Mixed => avg_coherence_mixed(n),
    }
}

/// Analytic tail bound of the ensemble.
pub fn tail_bound(ensemble: Ensemble, n: usize, epsilon: f64) -> f64 {
    match ensemble {
        Ensemble::Pure => tail_bound_pure(n, epsilon),
        Ensemble::Mixed => tail_bound_mixed(n, epsilon),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailEstimate {
    /// Fraction of samples with `|C_I - center| > epsilon`.
    pub frequency: f64,
    pub bound: f64,
    pub epsilon: f64,
    pub n_samples: u64,
    /// The analytic mean the deviations are measured from.
    pub center: f64,
}

impl TailEstimate {
    pub fn is_sound(&self) -> bool {
        self.frequency <= self.bound
    }
}

pub fn estimate_tail(
    ensemble: Ensemble,
    n: usize,
    epsilon: f64,
    samples: usize,
    config: &McConfig,
) -> Result<TailEstimate> {
    check_dim(n)?;
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::domain("epsilon", format!("{epsilon} is not a positive number")));
    }
    if samples == 0 {
        return Err(Error::domain("samples", "at least 1 sample is needed"));
    }
    let center = analytic_average(ensemble, n)?;
    let chunks = run_chunked(samples, config, |rng, count| {
        let mut hits = 0u64;
        for _ in 0..count {
            let c = sample_coherence(ensemble, Measure::Skew, n, rng)?;
            if (c - center).abs() > epsilon {
                hits += 1;
            }
        }
        Ok::<u64, Error>(hits)
    })?;
    let mut hits = 0u64;
    for chunk in chunks {
        hits += chunk?;
    }
    Ok(TailEstimate {
        frequency: hits as f64 / samples as f64,
        bound: tail_bound(ensemble, n, epsilon),
        epsilon,
        n_samples: samples as u64,
        center,
    })
}

/// One row of the mixed-state average sweep over `N = 2^m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Figure1Row {
    pub n: usize,
    pub analytic: f64,
    pub mc_mean: f64,
    pub mc_stderr: f64,
    pub n_samples: u64,
    pub seed: u64,
}

/// Analytic mixed-state averages for `N = 2, 4, ..., 2^max_exp`.
pub fn figure1_analytic(max_exp: u32) -> Result<Vec<(usize, f64)>> {
    if max_exp == 0 {
        return Err(Error::domain("max_exp", "must be at least 1"));
    }
    (1..=max_exp)
        .map(|m| {
            let n = 1usize << m;
            Ok((n, avg_coherence_mixed(n)?))
        })
        .collect()
}

/// Analytic curve plus a Monte Carlo estimate at every `N = 2^m`.
pub fn figure1_sweep(max_exp: u32, samples: usize, config: &McConfig) -> Result<Vec<Figure1Row>> {
    figure1_analytic(max_exp)?
        .into_iter()
        .map(|(n, analytic)| {
            let est = estimate_average(Ensemble::Mixed, n, samples, Measure::Skew, config)?;
            Ok(Figure1Row {
                n,
                analytic,
                mc_mean: est.mean,
                mc_stderr: est.stderr,
                n_samples: est.n_samples,
                seed: config.master_seed,
            })
        })
        .collect()
}

/// The `p`-quantile (`0 <= p <= 1`) of `values` by the nearest-rank rule.
pub fn quantile(values: &[f64], p: f64) -> f64 {
    assert!(!values.is_empty(), "quantile of an empty sample");
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let rank = ((p * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    sorted[rank - 1]
}
