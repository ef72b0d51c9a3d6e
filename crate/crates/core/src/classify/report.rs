//! Histogram CSV and run summary JSON.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::enumerate::{EnumerateConfig, Sampling};
use super::histogram::{ClassTallies, Histogram};
use super::shape::collision_probability;
use crate::assembly::ContactRule;
use crate::error::{Error, Result};
use crate::genome::{Genome, SearchSpace};

pub const CSV_HEADER: [&str; 8] = [
    "hash_hex",
    "width",
    "height",
    "cell_count",
    "det_count",
    "steric_count",
    "representative_genome",
    "frequency",
];

/// One line of the histogram CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistogramRow {
    pub hash_hex: String,
    pub width: usize,
    pub height: usize,
    pub cell_count: usize,
    pub det_count: u64,
    pub steric_count: u64,
    pub representative_genome: String,
    /// `det_count` over the number of genomes classified (the whole space
    /// unless sampling).
    pub frequency: f64,
}

impl HistogramRow {
    pub fn genome(&self) -> Result<Genome> {
        self.representative_genome.parse()
    }
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::InvalidArgument(format!("csv: {other:?}")),
    }
}

/// Rows in ascending hash order.
pub fn histogram_rows(histogram: &Histogram, space: &SearchSpace) -> Result<Vec<HistogramRow>> {
    let total = histogram.total().max(1) as f64;
    histogram
        .shapes
        .values()
        .map(|rec| {
            let genome = space.genome_at_index(rec.representative())?;
            Ok(HistogramRow {
                hash_hex: rec.hash.to_string(),
                width: rec.shape.width(),
                height: rec.shape.height(),
                cell_count: rec.shape.cell_count(),
                det_count: rec.det_count,
                steric_count: rec.steric_count,
                representative_genome: genome.to_string(),
                frequency: rec.det_count as f64 / total,
            })
        })
        .collect()
}

pub fn write_histogram_csv<W: Write>(
    out: W,
    histogram: &Histogram,
    space: &SearchSpace,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in histogram_rows(histogram, space)? {
        w.serialize(row).map_err(csv_err)?;
    }
    if histogram.shapes.is_empty() {
        w.write_record(CSV_HEADER).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_histogram_csv<R: Read>(input: R) -> Result<Vec<HistogramRow>> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers().map_err(csv_err)?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::InvalidArgument(format!(
            "unexpected histogram header {header:?}"
        )));
    }
    r.deserialize().map(|row| row.map_err(csv_err)).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpaceSummary {
    pub tiles: usize,
    pub labels: u32,
    pub mask_preset: Option<String>,
    pub bit_len: usize,
    pub cardinality: u64,
}

/// Deterministic description of a finished enumeration. Wall-clock time is
/// deliberately left out so repeated runs produce identical files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub space: SpaceSummary,
    pub grid: usize,
    pub k: usize,
    pub seed: u64,
    pub contact: ContactRule,
    pub rotation_invariant: bool,
    pub sampling: Sampling,
    pub classified: u64,
    pub totals: ClassTallies,
    pub shape_hashes: usize,
    pub deterministic_shapes: usize,
    pub mixed_shapes: usize,
    pub hash_collisions: u64,
    /// Chance of any collision among `shape_hashes` random 32-bit values.
    pub collision_probability: f64,
}

impl RunSummary {
    pub fn new(
        space: &SearchSpace,
        config: &EnumerateConfig,
        k: usize,
        histogram: &Histogram,
    ) -> Self {
        RunSummary {
            space: SpaceSummary {
                tiles: space.tiles(),
                labels: space.labels(),
                mask_preset: space.mask_preset().map(|p| p.name().to_string()),
                bit_len: space.bit_len(),
                cardinality: space.cardinality(),
            },
            grid: config.assembly.grid,
            k,
            seed: config.seed,
            contact: config.assembly.contact,
            rotation_invariant: config.assembly.rotation_invariant,
            sampling: config.sampling,
            classified: histogram.total(),
            totals: histogram.tallies,
            shape_hashes: histogram.shapes.len(),
            deterministic_shapes: histogram.deterministic_shape_count(),
            mixed_shapes: histogram.mixed_shapes().count(),
            hash_collisions: histogram.collisions,
            collision_probability: collision_probability(histogram.shapes.len() as u64),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary serializes") + "\n"
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::AssemblyConfig;
    use crate::classify::enumerate_space;

    fn run() -> (SearchSpace, EnumerateConfig, Histogram) {
        let space = SearchSpace::new(1, 8).unwrap();
        let cfg = EnumerateConfig {
            assembly: AssemblyConfig::with_grid(11),
            k: 4,
            ..EnumerateConfig::default()
        };
        let h = enumerate_space(&space, &cfg).unwrap();
        (space, cfg, h)
    }

    #[test]
    fn csv_round_trip() {
        let (space, _, h) = run();
        let mut buf = Vec::new();
        write_histogram_csv(&mut buf, &h, &space).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text.lines().next().unwrap(), CSV_HEADER.join(","));
        let rows = read_histogram_csv(&buf[..]).unwrap();
        assert_eq!(rows, histogram_rows(&h, &space).unwrap());
        let det: u64 = rows.iter().map(|r| r.det_count).sum();
        assert_eq!(det, h.tallies.deterministic);
        for row in &rows {
            assert!(space.contains(&row.genome().unwrap()));
        }
    }

    #[test]
    fn empty_histogram_still_has_header() {
        let space = SearchSpace::new(1, 2).unwrap();
        let mut buf = Vec::new();
        write_histogram_csv(&mut buf, &Histogram::new(), &space).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().trim_end(), CSV_HEADER.join(","));
    }

    #[test]
    fn summary_json_fields() {
        let (space, cfg, h) = run();
        let json: serde_json::Value =
            serde_json::from_str(&RunSummary::new(&space, &cfg, 4, &h).to_json()).unwrap();
        assert_eq!(json["space"]["cardinality"], 4096);
        assert_eq!(json["classified"], 4096);
        assert_eq!(json["k"], 4);
        assert_eq!(json["grid"], 11);
        assert!(json.get("totals").unwrap().get("steric_nondet").is_some());
    }
}
