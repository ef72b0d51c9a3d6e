//! Self-assembly of square tiles on a lattice, classification of whole genome
//! spaces by the shapes they build, and a bitstring genetic algorithm.

pub mod assembly;
pub mod classify;
pub mod error;
pub mod evolve;
pub mod genome;
pub mod stream;

pub use error::{Error, Result};
pub use genome::{Genome, MaskPreset, SearchSpace, Tile, TileSet};
