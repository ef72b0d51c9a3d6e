use std::fmt::Write as _;
use std::fs::File;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::ValueEnum;
use jatam_core::assembly::{Assembler, AssemblyConfig, Classification, Classifier};
use jatam_core::classify::{read_histogram_csv, CroppedShape};
use jatam_core::stream::StreamKey;
use jatam_core::{Genome, SearchSpace};

use crate::space::{Contact, SpaceArgs};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Ascii,
    Svg,
}

#[derive(clap::Args)]
pub struct Args {
    /// Genome as `0x<hex>/<bits>` or as a string of 0s and 1s.
    #[arg(long, required_unless_present = "from_histogram")]
    genome: Option<String>,
    /// Render the most frequent shapes of a histogram CSV instead.
    #[arg(long, conflicts_with = "genome")]
    from_histogram: Option<PathBuf>,
    /// Shapes to take from the histogram.
    #[arg(long, default_value_t = 10)]
    top: usize,
    #[command(flatten)]
    space: SpaceArgs,
    #[arg(long, value_enum, default_value_t = Format::Ascii)]
    format: Format,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Assemblies used to classify; the drawing shows the first run unless the
    /// runs agree on a shape or one shape predominates.
    #[arg(long, default_value_t = 1)]
    k: usize,
    #[arg(long, default_value_t = 19)]
    grid: usize,
    #[arg(long, value_enum, default_value_t = Contact::Strict)]
    contact: Contact,
    /// Write here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_genome(text: &str, bits: usize) -> Result<Genome> {
    let text = text.trim();
    if !text.is_empty() && text.chars().all(|c| c == '0' || c == '1') && !text.contains('/') {
        let g = Genome::from_bits(&text.chars().map(|c| c == '1').collect::<Vec<_>>());
        if g.len() != bits {
            bail!("genome has {} bits, the space needs {bits}", g.len());
        }
        return Ok(g);
    }
    let g: Genome = text.parse()?;
    if g.len() != bits {
        bail!("genome has {} bits, the space needs {bits}", g.len());
    }
    Ok(g)
}

struct Drawing {
    label: String,
    shape: CroppedShape,
}

struct Renderer {
    space: SearchSpace,
    config: AssemblyConfig,
    classifier: Classifier,
    assembler: Assembler,
    seed: u64,
    k: usize,
}

impl Renderer {
    fn draw(&mut self, genome: &Genome) -> Result<Drawing> {
        let index = self
            .space
            .index_of(genome)
            .context("genome lies outside the search space")?;
        let tiles = self.space.decode(genome)?;
        let key = StreamKey::new(self.seed, index);
        let class = self.classifier.classify(&tiles, self.k, key)?;
        let (name, shape) = match &class {
            Classification::Deterministic { hash, shape } => (format!("deterministic {hash}"), shape.clone()),
            Classification::StericNondet { predominant, shape } => {
                (format!("steric_nondet predominant {predominant}"), shape.clone())
            }
            other => {
                // Show how far the first run got before it stopped.
                self.assembler.load(&tiles)?;
                self.assembler.run(&mut key.run_rng(0))?;
                let name = match other {
                    Classification::Unbound => "unbound",
                    _ => "trivial_nondet",
                };
                (format!("{name} (partial)"), CroppedShape::try_from_cells(self.assembler.placed_cells())?)
            }
        };
        Ok(Drawing {
            label: format!(
                "{genome} {name} {}x{} cells={} k={} grid={}",
                shape.width(),
                shape.height(),
                shape.cell_count(),
                self.k,
                self.config.grid
            ),
            shape,
        })
    }
}

const CELL: usize = 16;
const TEXT: usize = 18;

fn svg(panels: &[Drawing]) -> String {
    let cols = panels.len().clamp(1, 4);
    let slot_w = panels.iter().map(|d| d.shape.width()).max().unwrap_or(1) * CELL + 2 * CELL;
    let slot_w = slot_w.max(22 * CELL);
    let slot_h = panels.iter().map(|d| d.shape.height()).max().unwrap_or(1) * CELL + TEXT + 2 * CELL;
    let rows = panels.len().div_ceil(cols);
    let (w, h) = (cols * slot_w, rows.max(1) * slot_h);
    let mut s = String::new();
    writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#).unwrap();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    )
    .unwrap();
    writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#).unwrap();
    for (i, d) in panels.iter().enumerate() {
        let (x0, y0) = ((i % cols) * slot_w + CELL, (i / cols) * slot_h + CELL / 2);
        writeln!(
            s,
            r#"<text x="{x0}" y="{}" font-family="monospace" font-size="11">{}</text>"#,
            y0 + TEXT / 2 + 4,
            d.label
        )
        .unwrap();
        for (x, y) in d.shape.occupied() {
            writeln!(
                s,
                r##"<rect x="{}" y="{}" width="{CELL}" height="{CELL}" fill="#3a6ea5" stroke="black" stroke-width="1"/>"##,
                x0 + x * CELL,
                y0 + TEXT + y * CELL
            )
            .unwrap();
        }
    }
    s.push_str("</svg>\n");
    s
}

fn ascii(panels: &[Drawing]) -> String {
    panels
        .iter()
        .map(|d| format!("{}\n{}", d.label, d.shape.to_ascii()))
        .collect::<Vec<_>>()
        .join("\n")
}

pub fn run(args: Args) -> Result<()> {
    let space = args.space.space()?;
    let config = AssemblyConfig {
        grid: args.grid,
        contact: args.contact.into(),
        rotation_invariant: false,
    };
    if args.k == 0 {
        bail!("--k must be at least 1");
    }
    let mut r = Renderer {
        classifier: Classifier::new(&config)?,
        assembler: Assembler::new(&config)?,
        space,
        config,
        seed: args.seed,
        k: args.k,
    };
    let mut panels = Vec::new();
    if let Some(path) = &args.from_histogram {
        let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
        let mut rows = read_histogram_csv(file)?;
        rows.sort_by(|a, b| b.det_count.cmp(&a.det_count).then_with(|| a.hash_hex.cmp(&b.hash_hex)));
        for (rank, row) in rows.iter().take(args.top).enumerate() {
            let mut d = r.draw(&row.genome()?)?;
            d.label = format!(
                "#{} {} det={} freq={:.6e} | {}",
                rank + 1,
                row.hash_hex,
                row.det_count,
                row.frequency,
                d.label
            );
            panels.push(d);
        }
    } else {
        let text = args.genome.as_deref().unwrap_or_default();
        panels.push(r.draw(&parse_genome(text, r.space.bit_len())?)?);
    }
    let output = match args.format {
        Format::Ascii => ascii(&panels),
        Format::Svg => svg(&panels),
    };
    match &args.out {
        Some(path) => std::fs::write(path, output).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{output}"),
    }
    Ok(())
}
