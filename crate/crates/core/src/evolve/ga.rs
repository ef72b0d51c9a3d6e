//! Generational genetic algorithm with roulette-wheel selection.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::operators::{crossover_single_point, crossover_uniform, mutate_in_place, FlipCount, RouletteWheel};
use crate::error::{invalid, Result};
use crate::genome::Genome;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reproduction {
    /// Copy one roulette-selected parent, then mutate.
    #[default]
    Asexual,
    /// Two parents, single-point crossover, then mutate.
    SinglePoint,
    /// Two parents, uniform crossover, then mutate.
    Uniform,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Initial {
    #[default]
    Zeros,
    /// Every bit set with probability one half.
    Random,
}

/// Fitness level that counts as reaching the target, and the fraction of the
/// population that must reach it for adaptation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Target {
    pub threshold: f64,
    pub proportion: f64,
}

impl Target {
    /// Individuals needed for adaptation in a population of `n`.
    pub fn quorum(&self, n: usize) -> usize {
        ((self.proportion * n as f64).ceil() as usize).max(1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GAConfig {
    pub population: usize,
    pub length: usize,
    /// Expected flips per genome per generation.
    pub lambda: f64,
    pub reproduction: Reproduction,
    pub initial: Initial,
    /// Last generation simulated.
    pub cutoff: u64,
    pub target: Target,
}

impl Default for GAConfig {
    fn default() -> Self {
        GAConfig {
            population: 512,
            length: 32,
            lambda: 0.3,
            reproduction: Reproduction::Asexual,
            initial: Initial::Zeros,
            cutoff: 20_000,
            target: Target {
                threshold: 25.0,
                proportion: 0.5,
            },
        }
    }
}

impl GAConfig {
    pub fn validate(&self) -> Result<()> {
        if self.population == 0 {
            return invalid("population must be non-empty");
        }
        if self.cutoff == 0 {
            return invalid("cutoff must be at least one generation");
        }
        if !(self.target.proportion > 0.0 && self.target.proportion <= 1.0) {
            return invalid(format!(
                "target proportion must lie in (0, 1], got {}",
                self.target.proportion
            ));
        }
        FlipCount::new(self.lambda)?;
        Ok(())
    }
}

/// Generation at which an event happened, or the cutoff it was not reached by.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Timing {
    Reached(u64),
    Censored { cutoff: u64 },
}

impl Timing {
    pub fn generation(&self) -> Option<u64> {
        match *self {
            Timing::Reached(g) => Some(g),
            Timing::Censored { .. } => None,
        }
    }

    pub fn is_censored(&self) -> bool {
        matches!(self, Timing::Censored { .. })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenerationStats {
    pub generation: u64,
    pub best: f64,
    pub mean: f64,
    pub count_at_target: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub config: GAConfig,
    /// One entry per simulated generation, starting at 0.
    pub trace: Vec<GenerationStats>,
    pub discovery: Timing,
    pub adaptation: Timing,
}

impl RunRecord {
    pub fn last_generation(&self) -> u64 {
        self.trace.last().map_or(0, |s| s.generation)
    }
}

/// First generation in which any individual reached the configured threshold.
pub fn discovery_time(record: &RunRecord) -> Timing {
    first_where(record, |s| s.count_at_target > 0)
}

/// First generation in which at least `proportion` of the population reached
/// `threshold`. Only the threshold the run was configured with is tracked.
pub fn adaptation_time(record: &RunRecord, proportion: f64, threshold: f64) -> Result<Timing> {
    if threshold != record.config.target.threshold {
        return invalid(format!(
            "run tracked threshold {}, not {threshold}",
            record.config.target.threshold
        ));
    }
    if !(proportion > 0.0 && proportion <= 1.0) {
        return invalid(format!("proportion must lie in (0, 1], got {proportion}"));
    }
    let quorum = Target {
        threshold,
        proportion,
    }
    .quorum(record.config.population);
    Ok(first_where(record, |s| s.count_at_target >= quorum))
}

fn first_where(record: &RunRecord, pred: impl Fn(&GenerationStats) -> bool) -> Timing {
    record
        .trace
        .iter()
        .find(|s| pred(s))
        .map(|s| Timing::Reached(s.generation))
        .unwrap_or(Timing::Censored {
            cutoff: record.config.cutoff,
        })
}

/// Hamming weight as fitness.
pub fn fujiyama_fitness(genome: &Genome) -> f64 {
    genome.hamming_weight() as f64
}

/// Runs generations until both discovery and adaptation have happened or the
/// cutoff generation has been evaluated.
///
/// Each generation is evaluated in full before any parent is chosen, and the
/// next generation replaces the current one entirely.
pub fn run_ga<F, R>(config: &GAConfig, fitness: F, rng: &mut R) -> Result<RunRecord>
where
    F: Fn(&Genome) -> f64,
    R: Rng + ?Sized,
{
    config.validate()?;
    let n = config.population;
    let flips = FlipCount::new(config.lambda)?;
    let mut current: Vec<Genome> = (0..n)
        .map(|_| match config.initial {
            Initial::Zeros => Genome::zeros(config.length),
            Initial::Random => {
                Genome::from_bits(&(0..config.length).map(|_| rng.gen()).collect::<Vec<bool>>())
            }
        })
        .collect();
    let mut next = current.clone();
    let mut scores = vec![0.0; n];
    let mut wheel = RouletteWheel::default();
    let quorum = config.target.quorum(n);
    let mut trace = Vec::new();
    let mut discovery = None;
    let mut adaptation = None;

    for generation in 0..=config.cutoff {
        for (s, g) in scores.iter_mut().zip(&current) {
            *s = fitness(g);
        }
        let at_target = scores
            .iter()
            .filter(|&&s| s >= config.target.threshold)
            .count();
        trace.push(GenerationStats {
            generation,
            best: scores.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            mean: scores.iter().sum::<f64>() / n as f64,
            count_at_target: at_target,
        });
        if discovery.is_none() && at_target > 0 {
            discovery = Some(generation);
        }
        if adaptation.is_none() && at_target >= quorum {
            adaptation = Some(generation);
        }
        if (discovery.is_some() && adaptation.is_some()) || generation == config.cutoff {
            break;
        }

        wheel.reset(&scores)?;
        for child in next.iter_mut() {
            let a = wheel.spin(rng);
            match config.reproduction {
                Reproduction::Asexual => child.clone_from(&current[a]),
                Reproduction::SinglePoint => {
                    let b = wheel.spin(rng);
                    *child = crossover_single_point(&current[a], &current[b], rng)?;
                }
                Reproduction::Uniform => {
                    let b = wheel.spin(rng);
                    *child = crossover_uniform(&current[a], &current[b], rng)?;
                }
            }
            mutate_in_place(child, &flips, rng);
        }
        std::mem::swap(&mut current, &mut next);
    }

    let timing = |g: Option<u64>| {
        g.map(Timing::Reached).unwrap_or(Timing::Censored {
            cutoff: config.cutoff,
        })
    };
    Ok(RunRecord {
        config: *config,
        trace,
        discovery: timing(discovery),
        adaptation: timing(adaptation),
    })
}
