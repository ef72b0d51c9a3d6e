//! Bitstring genetic algorithm and the Fujiyama test landscape.

mod ga;
mod operators;
mod stats;

pub use ga::{
    adaptation_time, discovery_time, fujiyama_fitness, run_ga, GAConfig, GenerationStats, Initial,
    Reproduction, RunRecord, Target, Timing,
};
pub use operators::{
    crossover_at, crossover_single_point, crossover_uniform, mutate, mutate_bitwise,
    mutate_in_place, poisson_sample, roulette_index, roulette_select, FlipCount, RouletteWheel,
};
pub use stats::{
    bootstrap_median_ci, median, quantile_sorted, run_sweep, summarize_timings, BootstrapConfig,
    MedianCi, SweepConfig, SweepPoint, TimingSummary,
};
