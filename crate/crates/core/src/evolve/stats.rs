//! Median estimates over repeated runs and parameter sweeps.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ga::{fujiyama_fitness, run_ga, GAConfig, Timing};
use crate::error::{invalid, Error, Result};
use crate::stream::rng_for;

/// Median with a bootstrap percentile interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MedianCi {
    pub median: f64,
    pub lower: f64,
    pub upper: f64,
}

/// Linear-interpolation quantile of sorted data, `q` in [0, 1].
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

pub fn median(samples: &[f64]) -> Result<f64> {
    if samples.is_empty() {
        return invalid("median of an empty sample");
    }
    let mut v = samples.to_vec();
    v.sort_by(f64::total_cmp);
    Ok(quantile_sorted(&v, 0.5))
}

/// Sample median plus the 2.5% and 97.5% percentiles of the medians of
/// `resamples` bootstrap resamples, each of `sample_size` draws with
/// replacement.
pub fn bootstrap_median_ci<R: Rng + ?Sized>(
    samples: &[f64],
    sample_size: usize,
    resamples: usize,
    rng: &mut R,
) -> Result<MedianCi> {
    if samples.is_empty() {
        return invalid("cannot bootstrap an empty sample");
    }
    if sample_size == 0 || resamples == 0 {
        return invalid("bootstrap sample size and resample count must be positive");
    }
    let med = median(samples)?;
    let mut draw = vec![0.0; sample_size];
    let mut medians = Vec::with_capacity(resamples);
    for _ in 0..resamples {
        for d in draw.iter_mut() {
            *d = samples[rng.gen_range(0..samples.len())];
        }
        draw.sort_by(f64::total_cmp);
        medians.push(quantile_sorted(&draw, 0.5));
    }
    medians.sort_by(f64::total_cmp);
    Ok(MedianCi {
        median: med,
        lower: quantile_sorted(&medians, 0.025),
        upper: quantile_sorted(&medians, 0.975),
    })
}

/// Summary of one timing measure across runs.
///
/// Censored runs enter the median at the cutoff value (a lower bound). When
/// more than half of the runs are censored the median itself is unknown and
/// reported as `null`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimingSummary {
    pub median: Option<f64>,
    pub ci_lo: Option<f64>,
    pub ci_hi: Option<f64>,
    /// Number of censored runs.
    pub censored: usize,
    pub median_censored: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BootstrapConfig {
    pub sample_size: usize,
    pub resamples: usize,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        BootstrapConfig {
            sample_size: 100,
            resamples: 10_000,
        }
    }
}

pub fn summarize_timings<R: Rng + ?Sized>(
    timings: &[Timing],
    bootstrap: &BootstrapConfig,
    rng: &mut R,
) -> Result<TimingSummary> {
    let censored = timings.iter().filter(|t| t.is_censored()).count();
    if timings.is_empty() || 2 * censored > timings.len() {
        return Ok(TimingSummary {
            median: None,
            ci_lo: None,
            ci_hi: None,
            censored,
            median_censored: true,
        });
    }
    let values: Vec<f64> = timings
        .iter()
        .map(|t| match *t {
            Timing::Reached(g) => g as f64,
            Timing::Censored { cutoff } => cutoff as f64,
        })
        .collect();
    let ci = bootstrap_median_ci(&values, bootstrap.sample_size, bootstrap.resamples, rng)?;
    Ok(TimingSummary {
        median: Some(ci.median),
        ci_lo: Some(ci.lower),
        ci_hi: Some(ci.upper),
        censored,
        median_censored: false,
    })
}

/// One mutation rate of a sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    #[serde(rename = "muL")]
    pub mu_l: f64,
    pub runs: usize,
    pub discovery: TimingSummary,
    pub adaptation: TimingSummary,
    /// Per-run timings in run order.
    pub discovery_runs: Vec<Timing>,
    pub adaptation_runs: Vec<Timing>,
}

impl SweepPoint {
    /// Fraction of runs that adapted before the cutoff.
    pub fn adaptation_success_rate(&self) -> f64 {
        let ok = self.adaptation_runs.iter().filter(|t| !t.is_censored()).count();
        ok as f64 / self.runs.max(1) as f64
    }

    pub fn discovery_success_rate(&self) -> f64 {
        let ok = self.discovery_runs.iter().filter(|t| !t.is_censored()).count();
        ok as f64 / self.runs.max(1) as f64
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub ga: GAConfig,
    pub mu_l: Vec<f64>,
    pub runs: usize,
    pub seed: u64,
    pub workers: usize,
    pub bootstrap: BootstrapConfig,
}

/// Independent Fujiyama runs at each mutation rate. Run `r` at rate index `i`
/// draws from its own stream, so results do not depend on `workers`.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<SweepPoint>> {
    if config.runs == 0 {
        return invalid("a sweep needs at least one run per point");
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers.max(1))
        .build()
        .map_err(|e| Error::InvalidArgument(format!("worker pool: {e}")))?;
    config
        .mu_l
        .iter()
        .enumerate()
        .map(|(i, &mu_l)| {
            let ga = GAConfig {
                lambda: mu_l,
                ..config.ga
            };
            ga.validate()?;
            let records = pool.install(|| {
                (0..config.runs)
                    .into_par_iter()
                    .map(|r| {
                        let mut rng = rng_for(&[config.seed, 0x6761, i as u64, r as u64]);
                        run_ga(&ga, fujiyama_fitness, &mut rng)
                            .map(|rec| (rec.discovery, rec.adaptation))
                    })
                    .collect::<Result<Vec<_>>>()
            })?;
            let (discovery_runs, adaptation_runs): (Vec<_>, Vec<_>) = records.into_iter().unzip();
            let mut rng = rng_for(&[config.seed, 0x6273, i as u64]);
            Ok(SweepPoint {
                mu_l,
                runs: config.runs,
                discovery: summarize_timings(&discovery_runs, &config.bootstrap, &mut rng)?,
                adaptation: summarize_timings(&adaptation_runs, &config.bootstrap, &mut rng)?,
                discovery_runs,
                adaptation_runs,
            })
        })
        .collect()
}
