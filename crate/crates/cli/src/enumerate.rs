use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use jatam_core::assembly::{AssemblyConfig, ContactRule};
use jatam_core::classify::{
    write_histogram_csv, Checkpoint, EnumerateConfig, Enumeration, RunSummary, Sampling,
};
use serde::{Deserialize, Serialize};

use crate::space::{write_atomic, Contact, SpaceArgs};

#[derive(clap::Args)]
pub struct Args {
    #[command(flatten)]
    space: SpaceArgs,
    /// Grid side length.
    #[arg(long, default_value_t = 19)]
    grid: usize,
    /// Assemblies per genome; a comma list writes one histogram per value.
    #[arg(long, value_delimiter = ',', default_value = "8")]
    k: Vec<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Genomes per batch.
    #[arg(long, default_value_t = 1 << 16)]
    batch_size: u64,
    /// Classify one genome from every block of this many instead of all.
    #[arg(long)]
    stride: Option<u64>,
    #[arg(long, value_enum, default_value_t = Contact::Strict)]
    contact: Contact,
    /// Compare runs by rotation-invariant shape hash.
    #[arg(long)]
    rot_invariant: bool,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Rerun from a config.json echoed by an earlier run; space and run
    /// flags are then taken from the file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Continue from this checkpoint.
    #[arg(long)]
    resume: Option<PathBuf>,
    /// Where to save checkpoints (defaults to the --resume path).
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    /// Batches between checkpoints and progress lines.
    #[arg(long, default_value_t = 64)]
    checkpoint_every: u64,
    /// No progress lines.
    #[arg(long)]
    quiet: bool,
}

/// Everything that determines the outputs, echoed as `config.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnumerateJob {
    pub space: SpaceArgs,
    pub ks: Vec<usize>,
    pub config: EnumerateConfig,
}

#[derive(Serialize)]
struct Timing {
    seconds: f64,
    genomes: u64,
    genomes_per_second: f64,
    workers: usize,
}

impl Args {
    fn job(&self) -> Result<EnumerateJob> {
        if let Some(path) = &self.config {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            return serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()));
        }
        let mut ks = self.k.clone();
        ks.sort_unstable();
        ks.dedup();
        Ok(EnumerateJob {
            space: self.space.clone(),
            ks,
            config: EnumerateConfig {
                assembly: AssemblyConfig {
                    grid: self.grid,
                    contact: ContactRule::from(self.contact),
                    rotation_invariant: self.rot_invariant,
                },
                k: self.k.iter().copied().max().unwrap_or(0),
                seed: self.seed,
                batch_size: self.batch_size,
                workers: self.workers,
                sampling: match self.stride {
                    Some(stride) => Sampling::Stratified { stride },
                    None => Sampling::Full,
                },
            },
        })
    }
}

fn file_for(out: &Path, stem: &str, ext: &str, k: usize, many: bool) -> PathBuf {
    if many {
        out.join(format!("{stem}_k{k}.{ext}"))
    } else {
        out.join(format!("{stem}.{ext}"))
    }
}

pub fn run(args: Args) -> Result<()> {
    let job = args.job()?;
    let space = job.space.space()?;
    if job.ks.is_empty() {
        bail!("need at least one --k");
    }
    fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;

    let mut enumeration = match &args.resume {
        Some(path) => {
            let ck = Checkpoint::load(path).with_context(|| format!("loading checkpoint {}", path.display()))?;
            Enumeration::resume(&space, &job.config, &job.ks, ck)?
        }
        None => Enumeration::new(&space, &job.config, &job.ks)?,
    };
    let checkpoint_path = args.checkpoint.clone().or_else(|| args.resume.clone());
    let every = args.checkpoint_every.max(1);
    let total = enumeration.total_batches();
    let started = Instant::now();
    let first_sample = enumeration.samples_done();

    while !enumeration.is_done() {
        enumeration.step(every)?;
        if let Some(path) = &checkpoint_path {
            enumeration
                .checkpoint()
                .save(path)
                .with_context(|| format!("writing checkpoint {}", path.display()))?;
        }
        if !args.quiet {
            eprintln!("batches {}/{}", enumeration.batches_done(), total);
        }
    }
    let elapsed = started.elapsed().as_secs_f64();
    let classified = enumeration.samples_done() - first_sample;

    let expected = enumeration.total_samples();
    let many = job.ks.len() > 1;
    for (&k, hist) in job.ks.iter().zip(enumeration.histograms()) {
        if hist.total() != expected || !hist.is_consistent() {
            bail!("histogram for k={k} is inconsistent: {} of {expected} genomes", hist.total());
        }
        let csv_path = file_for(&args.out, "histogram", "csv", k, many);
        let tmp = csv_path.with_extension("tmp");
        let mut w = BufWriter::new(File::create(&tmp).with_context(|| format!("creating {}", tmp.display()))?);
        write_histogram_csv(&mut w, hist, &space)?;
        w.into_inner().map_err(|e| e.into_error())?.sync_all()?;
        fs::rename(&tmp, &csv_path)?;
        let summary = RunSummary::new(&space, &job.config, k, hist);
        write_atomic(&file_for(&args.out, "summary", "json", k, many), summary.to_json().as_bytes())?;
    }
    write_atomic(
        &args.out.join("config.json"),
        (serde_json::to_string_pretty(&job)? + "\n").as_bytes(),
    )?;
    let timing = Timing {
        seconds: elapsed,
        genomes: classified,
        genomes_per_second: classified as f64 / elapsed.max(1e-9),
        workers: job.config.workers,
    };
    write_atomic(&args.out.join("timing.json"), (serde_json::to_string_pretty(&timing)? + "\n").as_bytes())?;
    if !args.quiet {
        eprintln!("classified {classified} genomes in {elapsed:.2}s");
    }
    Ok(())
}
