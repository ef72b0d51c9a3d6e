//! Batched classification of whole search spaces on a worker pool.

use std::ops::Range;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::checkpoint::{Checkpoint, RunParams};
use super::histogram::Histogram;
use crate::assembly::{AssemblyConfig, Classifier};
use crate::error::{invalid, Error, Result};
use crate::genome::SearchSpace;
use crate::stream::{mix, StreamKey};

/// Which genomes of a space get classified.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum Sampling {
    #[default]
    Full,
    /// Splits the index range into blocks of `stride` consecutive genomes and
    /// takes one genome from each, at a seed-dependent offset.
    Stratified { stride: u64 },
}

impl Sampling {
    pub fn sample_count(&self, space: &SearchSpace) -> Result<u64> {
        match *self {
            Sampling::Full => Ok(space.cardinality()),
            Sampling::Stratified { stride } => {
                if stride == 0 || space.cardinality() % stride != 0 {
                    return invalid(format!(
                        "stride {stride} does not divide the space size {}",
                        space.cardinality()
                    ));
                }
                Ok(space.cardinality() / stride)
            }
        }
    }

    /// Enumeration index of sample `j`.
    #[inline]
    pub fn index(&self, seed: u64, j: u64) -> u64 {
        match *self {
            Sampling::Full => j,
            Sampling::Stratified { stride } => {
                j * stride + mix(&[seed, 0x5354_5241_5441, j]) % stride
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumerateConfig {
    pub assembly: AssemblyConfig,
    /// Assemblies per tile set.
    pub k: usize,
    pub seed: u64,
    /// Genomes per batch.
    pub batch_size: u64,
    pub workers: usize,
    pub sampling: Sampling,
}

impl Default for EnumerateConfig {
    fn default() -> Self {
        EnumerateConfig {
            assembly: AssemblyConfig::default(),
            k: 8,
            seed: 0,
            batch_size: 1 << 16,
            workers: 1,
            sampling: Sampling::Full,
        }
    }
}

/// An in-progress enumeration producing one histogram per redundancy in `ks`.
///
/// Every genome is assembled `max(ks)` times; the histogram for `k` classifies
/// it from the first `k` of those runs.
pub struct Enumeration {
    space: SearchSpace,
    config: EnumerateConfig,
    ks: Vec<usize>,
    histograms: Vec<Histogram>,
    next_sample: u64,
    total_samples: u64,
    pool: rayon::ThreadPool,
}

impl Enumeration {
    pub fn new(space: &SearchSpace, config: &EnumerateConfig, ks: &[usize]) -> Result<Self> {
        config.assembly.validate()?;
        if ks.is_empty() || ks.contains(&0) {
            return invalid("need at least one redundancy k >= 1");
        }
        if config.batch_size == 0 {
            return invalid("batch size must be positive");
        }
        let total_samples = config.sampling.sample_count(space)?;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.workers.max(1))
            .build()
            .map_err(|e| Error::InvalidArgument(format!("worker pool: {e}")))?;
        Ok(Enumeration {
            space: space.clone(),
            config: *config,
            ks: ks.to_vec(),
            histograms: vec![Histogram::new(); ks.len()],
            next_sample: 0,
            total_samples,
            pool,
        })
    }

    /// Continues from a checkpoint written by an identical configuration.
    pub fn resume(
        space: &SearchSpace,
        config: &EnumerateConfig,
        ks: &[usize],
        checkpoint: Checkpoint,
    ) -> Result<Self> {
        let mut e = Enumeration::new(space, config, ks)?;
        let expected = e.params();
        if checkpoint.params != expected {
            return Err(Error::Checkpoint(
                "checkpoint was written with different parameters".into(),
            ));
        }
        if checkpoint.histograms.len() != ks.len() || checkpoint.next_sample > e.total_samples {
            return Err(Error::Checkpoint("checkpoint state out of range".into()));
        }
        e.histograms = checkpoint.histograms;
        e.next_sample = checkpoint.next_sample;
        Ok(e)
    }

    pub fn params(&self) -> RunParams {
        RunParams::new(&self.space, &self.config, &self.ks)
    }

    pub fn checkpoint(&self) -> Checkpoint {
        Checkpoint {
            params: self.params(),
            next_sample: self.next_sample,
            histograms: self.histograms.clone(),
        }
    }

    pub fn space(&self) -> &SearchSpace {
        &self.space
    }

    pub fn config(&self) -> &EnumerateConfig {
        &self.config
    }

    pub fn is_done(&self) -> bool {
        self.next_sample >= self.total_samples
    }

    pub fn samples_done(&self) -> u64 {
        self.next_sample
    }

    pub fn total_samples(&self) -> u64 {
        self.total_samples
    }

    pub fn total_batches(&self) -> u64 {
        self.total_samples.div_ceil(self.config.batch_size)
    }

    pub fn batches_done(&self) -> u64 {
        self.next_sample.div_ceil(self.config.batch_size)
    }

    pub fn histograms(&self) -> &[Histogram] {
        &self.histograms
    }

    /// Processes up to `max_batches` batches, in parallel across the pool,
    /// then merges their partial histograms in batch order. Returns how many
    /// batches ran.
    pub fn step(&mut self, max_batches: u64) -> Result<u64> {
        let b = self.config.batch_size;
        let ranges: Vec<Range<u64>> = (0..max_batches)
            .map(|m| self.next_sample + m * b)
            .take_while(|&start| start < self.total_samples)
            .map(|start| start..(start + b).min(self.total_samples))
            .collect();
        let Some(last) = ranges.last() else {
            return Ok(0);
        };
        let end = last.end;

        let space = &self.space;
        let config = &self.config;
        let ks = &self.ks;
        let partials: Vec<Vec<Histogram>> = self.pool.install(|| {
            ranges
                .par_iter()
                .map_init(
                    || Classifier::new(&config.assembly),
                    |classifier, range| {
                        let classifier = classifier.as_mut().map_err(|e| {
                            Error::InvalidArgument(format!("classifier setup: {e}"))
                        })?;
                        classify_range(space, config, ks, classifier, range.clone())
                    },
                )
                .collect::<Result<Vec<_>>>()
        })?;

        for partial in &partials {
            for (acc, h) in self.histograms.iter_mut().zip(partial) {
                acc.merge(h);
            }
        }
        self.next_sample = end;
        Ok(partials.len() as u64)
    }

    /// Runs to completion.
    pub fn finish(mut self) -> Result<Vec<Histogram>> {
        let wave = (self.config.workers.max(1) as u64) * 4;
        while !self.is_done() {
            self.step(wave)?;
        }
        Ok(self.histograms)
    }
}

fn classify_range(
    space: &SearchSpace,
    config: &EnumerateConfig,
    ks: &[usize],
    classifier: &mut Classifier,
    range: Range<u64>,
) -> Result<Vec<Histogram>> {
    let mut out = vec![Histogram::new(); ks.len()];
    for j in range {
        let index = config.sampling.index(config.seed, j);
        let tiles = space.decode(&space.genome_at_index(index)?)?;
        let classes =
            classifier.classify_prefixes(&tiles, ks, StreamKey::new(config.seed, index))?;
        for (h, class) in out.iter_mut().zip(&classes) {
            h.record(index, class);
        }
    }
    Ok(out)
}

/// Classifies every genome selected by `config.sampling` at redundancy
/// `config.k`.
pub fn enumerate_space(space: &SearchSpace, config: &EnumerateConfig) -> Result<Histogram> {
    let mut hs = Enumeration::new(space, config, &[config.k])?.finish()?;
    Ok(hs.pop().expect("one histogram per k"))
}

/// One histogram per entry of `ks`, sharing assembly runs between them.
pub fn enumerate_ladder(
    space: &SearchSpace,
    config: &EnumerateConfig,
    ks: &[usize],
) -> Result<Vec<Histogram>> {
    Enumeration::new(space, config, ks)?.finish()
}
