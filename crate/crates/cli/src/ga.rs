use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::ValueEnum;
use jatam_core::evolve::{
    run_sweep, BootstrapConfig, GAConfig, Initial, Reproduction, SweepConfig, SweepPoint, Target,
};
use serde::{Deserialize, Serialize};

use crate::space::write_atomic;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Landscape {
    Fujiyama,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    Asexual,
    SinglePoint,
    Uniform,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Start {
    Zeros,
    Random,
}

#[derive(clap::Args)]
pub struct Args {
    #[arg(long, value_enum, default_value_t = Landscape::Fujiyama)]
    landscape: Landscape,
    #[arg(long, default_value_t = 512)]
    pop: usize,
    /// Genome length in bits.
    #[arg(long, default_value_t = 32)]
    length: usize,
    /// Expected flips per genome, comma separated.
    #[arg(long = "muL-grid", value_delimiter = ',', conflicts_with = "mu_l")]
    mu_l_grid: Vec<f64>,
    /// A single expected flip count per genome.
    #[arg(long = "muL")]
    mu_l: Option<f64>,
    /// Per-bit mutation rate; converted to flips per genome as mu * length.
    #[arg(long, conflicts_with_all = ["mu_l", "mu_l_grid"])]
    mu: Option<f64>,
    /// Independent runs per mutation rate.
    #[arg(long, default_value_t = 100)]
    runs: usize,
    /// Last generation simulated.
    #[arg(long, default_value_t = 20_000)]
    cutoff: u64,
    /// Fitness counted as reaching the target.
    #[arg(long, default_value_t = 25.0)]
    threshold: f64,
    /// Fraction of the population at the target that counts as adapted.
    #[arg(long, default_value_t = 0.5)]
    proportion: f64,
    #[arg(long, value_enum, default_value_t = Mode::Asexual)]
    reproduction: Mode,
    #[arg(long, value_enum, default_value_t = Start::Zeros)]
    initial: Start,
    /// Bootstrap resamples.
    #[arg(long, default_value_t = 10_000)]
    bootstrap: usize,
    /// Draws per bootstrap resample.
    #[arg(long, default_value_t = 100)]
    sample_size: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Rerun from the `config` section of an earlier sweep file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Sweep JSON to write.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Serialize, Deserialize)]
pub struct SweepFile {
    pub landscape: String,
    pub config: SweepConfig,
    pub points: Vec<SweepPoint>,
}

#[derive(Deserialize)]
struct Echo {
    config: SweepConfig,
}

impl Args {
    fn sweep(&self) -> Result<SweepConfig> {
        if let Some(path) = &self.config {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let echo: Echo = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
            return Ok(echo.config);
        }
        let mu_l = match (self.mu, self.mu_l, self.mu_l_grid.is_empty()) {
            (Some(mu), _, _) => vec![mu * self.length as f64],
            (None, Some(x), _) => vec![x],
            (None, None, false) => self.mu_l_grid.clone(),
            (None, None, true) => bail!("give --muL-grid, --muL or --mu"),
        };
        if let Some(bad) = mu_l.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
            bail!("mutation rates must be finite and >= 0, got {bad}");
        }
        Ok(SweepConfig {
            ga: GAConfig {
                population: self.pop,
                length: self.length,
                lambda: mu_l[0],
                reproduction: match self.reproduction {
                    Mode::Asexual => Reproduction::Asexual,
                    Mode::SinglePoint => Reproduction::SinglePoint,
                    Mode::Uniform => Reproduction::Uniform,
                },
                initial: match self.initial {
                    Start::Zeros => Initial::Zeros,
                    Start::Random => Initial::Random,
                },
                cutoff: self.cutoff,
                target: Target {
                    threshold: self.threshold,
                    proportion: self.proportion,
                },
            },
            mu_l,
            runs: self.runs,
            seed: self.seed,
            workers: self.workers,
            bootstrap: BootstrapConfig {
                sample_size: self.sample_size,
                resamples: self.bootstrap,
            },
        })
    }
}

pub fn run(args: Args) -> Result<()> {
    let config = args.sweep()?;
    let points = run_sweep(&config)?;
    for p in &points {
        let show = |m: Option<f64>| m.map_or("censored".to_string(), |v| format!("{v}"));
        eprintln!(
            "muL {}: discovery {} adaptation {} ({} of {} runs adapted)",
            p.mu_l,
            show(p.discovery.median),
            show(p.adaptation.median),
            p.runs - p.adaptation.censored,
            p.runs
        );
    }
    let file = SweepFile {
        landscape: "fujiyama".into(),
        config,
        points,
    };
    write_atomic(&args.out, (serde_json::to_string_pretty(&file)? + "\n").as_bytes())
        .with_context(|| format!("writing {}", args.out.display()))
}
