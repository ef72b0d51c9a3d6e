//! Shape hashing, whole-space classification and its outputs.

mod checkpoint;
mod enumerate;
mod hash;
mod histogram;
mod report;
mod shape;

pub use checkpoint::{Checkpoint, RunParams};
pub use enumerate::{enumerate_ladder, enumerate_space, EnumerateConfig, Enumeration, Sampling};
pub use hash::{oat_hash, OneAtATime};
pub use histogram::{ClassTallies, Histogram, ShapeRecord};
pub use report::{
    histogram_rows, read_histogram_csv, write_histogram_csv, HistogramRow, RunSummary,
    SpaceSummary, CSV_HEADER,
};
pub use shape::{
    collision_probability, crop, hash_sorted_cells, rotation_invariant_hash, shape_hash,
    shapediff, shapesim, CroppedShape, ShapeHash,
};
