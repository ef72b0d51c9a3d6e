//! Binary genomes, the tile-set codec and search-space indexing.
//!
//! A genome is a fixed-length bitstring. Bit position 0 is the first bit of the
//! string; when a genome is read as an integer (text form, enumeration index)
//! position 0 is the most significant bit.
//!
//! Tile sets are laid out tile-major starting with the seed tile, each tile as
//! its four edge labels in the order north, east, south, west, each label
//! `log2(b)` bits wide with the most significant bit first.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Edge directions, also used as indices into a tile's label array.
pub const NORTH: usize = 0;
pub const EAST: usize = 1;
pub const SOUTH: usize = 2;
pub const WEST: usize = 3;

/// Fixed-length bitstring, byte-packed MSB-first. Padding bits in the final
/// byte are always zero.
#[derive(PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Genome {
    bytes: Vec<u8>,
    len: usize,
}

impl Clone for Genome {
    fn clone(&self) -> Self {
        Genome {
            bytes: self.bytes.clone(),
            len: self.len,
        }
    }

    // Reuses the existing allocation; the GA copies parents this way.
    fn clone_from(&mut self, source: &Self) {
        self.bytes.clone_from(&source.bytes);
        self.len = source.len;
    }
}

impl Genome {
    pub fn zeros(len: usize) -> Self {
        Genome {
            bytes: vec![0; len.div_ceil(8)],
            len,
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut g = Genome {
            bytes: vec![0xFF; len.div_ceil(8)],
            len,
        };
        g.clear_padding();
        g
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut g = Genome::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            g.set(i, b);
        }
        g
    }

    /// Builds a genome from packed bytes. Bits past `len` are cleared.
    pub fn from_bytes(bytes: Vec<u8>, len: usize) -> Result<Self> {
        if bytes.len() != len.div_ceil(8) {
            return invalid(format!(
                "{} bytes cannot hold exactly {len} bits",
                bytes.len()
            ));
        }
        let mut g = Genome { bytes, len };
        g.clear_padding();
        Ok(g)
    }

    /// The low `len` bits of `value`, read as an integer (position 0 = MSB).
    pub fn from_u64(value: u64, len: usize) -> Result<Self> {
        if len > 64 || (len < 64 && value >> len != 0) {
            return invalid(format!("value {value:#x} does not fit in {len} bits"));
        }
        let mut g = Genome::zeros(len);
        for i in 0..len {
            g.set(i, (value >> (len - 1 - i)) & 1 == 1);
        }
        Ok(g)
    }

    /// Integer value of the bitstring, if it fits in 64 bits.
    pub fn to_u64(&self) -> Option<u64> {
        if self.len > 64 {
            return None;
        }
        Some((0..self.len).fold(0u64, |acc, i| (acc << 1) | self.get(i) as u64))
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    /// Mutable packed storage. Callers must leave the padding bits zero.
    pub(crate) fn bytes_mut(&mut self) -> &mut [u8] {
        &mut self.bytes
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit {i} out of range for length {}", self.len);
        self.bytes[i >> 3] & (0x80 >> (i & 7)) != 0
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit {i} out of range for length {}", self.len);
        let mask = 0x80 >> (i & 7);
        if value {
            self.bytes[i >> 3] |= mask;
        } else {
            self.bytes[i >> 3] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit {i} out of range for length {}", self.len);
        self.bytes[i >> 3] ^= 0x80 >> (i & 7);
    }

    pub fn complement(&self) -> Genome {
        let mut g = Genome {
            bytes: self.bytes.iter().map(|b| !b).collect(),
            len: self.len,
        };
        g.clear_padding();
        g
    }

    /// Number of set bits.
    pub fn hamming_weight(&self) -> usize {
        self.bytes.iter().map(|b| b.count_ones() as usize).sum()
    }

    pub fn hamming_distance(&self, other: &Genome) -> Result<usize> {
        if self.len != other.len {
            return invalid(format!("lengths differ: {} vs {}", self.len, other.len));
        }
        Ok(self
            .bytes
            .iter()
            .zip(&other.bytes)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum())
    }

    /// Reads `width` bits starting at `start` as an unsigned integer, MSB first.
    pub fn field(&self, start: usize, width: usize) -> u32 {
        (start..start + width).fold(0u32, |acc, i| (acc << 1) | self.get(i) as u32)
    }

    fn set_field(&mut self, start: usize, width: usize, value: u32) {
        for k in 0..width {
            self.set(start + k, (value >> (width - 1 - k)) & 1 == 1);
        }
    }

    fn clear_padding(&mut self) {
        let rem = self.len % 8;
        if rem != 0 {
            if let Some(last) = self.bytes.last_mut() {
                *last &= 0xFFu8 << (8 - rem);
            }
        }
    }
}

impl fmt::Display for Genome {
    /// `0x<hex>/<len>`, the hex digits spelling the genome as an integer.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = self.len.div_ceil(4).max(1);
        let mut hex = String::with_capacity(digits);
        for d in 0..digits {
            // Digit d covers integer bits [4*(digits-1-d), +4); integer bit j
            // lives at string position len-1-j.
            let mut nibble = 0u32;
            for b in (0..4).rev() {
                let j = 4 * (digits - 1 - d) + b;
                let bit = j < self.len && self.get(self.len - 1 - j);
                nibble = (nibble << 1) | bit as u32;
            }
            hex.push(char::from_digit(nibble, 16).unwrap());
        }
        write!(f, "0x{hex}/{}", self.len)
    }
}

impl fmt::Debug for Genome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Genome {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (hex, len) = s
            .split_once('/')
            .ok_or_else(|| Error::InvalidArgument(format!("genome {s:?} lacks '/<bits>'")))?;
        let hex = hex
            .strip_prefix("0x")
            .or_else(|| hex.strip_prefix("0X"))
            .unwrap_or(hex);
        let len: usize = len
            .trim()
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("bad bit length in {s:?}")))?;
        if hex.is_empty() {
            return invalid(format!("no hex digits in {s:?}"));
        }
        let mut g = Genome::zeros(len);
        // Walk digits from least significant; integer bit j sits at position len-1-j.
        for (d, c) in hex.chars().rev().enumerate() {
            let nibble = c
                .to_digit(16)
                .ok_or_else(|| Error::InvalidArgument(format!("bad hex digit {c:?}")))?;
            for b in 0..4 {
                if (nibble >> b) & 1 == 1 {
                    let j = 4 * d + b;
                    if j >= len {
                        return invalid(format!("{s:?} does not fit in {len} bits"));
                    }
                    g.set(len - 1 - j, true);
                }
            }
        }
        Ok(g)
    }
}

impl Serialize for Genome {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Genome {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Four edge labels in N, E, S, W order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Tile(pub [u8; 4]);

impl Tile {
    pub const INERT: Tile = Tile([0; 4]);

    pub fn new(n: u8, e: u8, s: u8, w: u8) -> Self {
        Tile([n, e, s, w])
    }

    /// Label facing `dir` after a clockwise rotation by `orientation` quarter turns.
    #[inline]
    pub fn edge(&self, orientation: u8, dir: usize) -> u8 {
        self.0[(dir + 4 - orientation as usize % 4) % 4]
    }

    /// All four labels as seen in place under `orientation`.
    pub fn rotated(&self, orientation: u8) -> [u8; 4] {
        std::array::from_fn(|dir| self.edge(orientation, dir))
    }
}

/// Ordered tile types; tile 0 is the seed. `labels` is the alphabet size `b`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TileSet {
    pub labels: u32,
    pub tiles: Vec<Tile>,
}

impl TileSet {
    pub fn new(labels: u32, tiles: Vec<Tile>) -> Result<Self> {
        if tiles.is_empty() {
            return invalid("a tile set needs at least the seed tile");
        }
        if !(2..=256).contains(&labels) {
            return invalid(format!("label count {labels} outside [2, 256]"));
        }
        if let Some(bad) = tiles
            .iter()
            .flat_map(|t| t.0)
            .find(|&l| l as u32 >= labels)
        {
            return invalid(format!("label {bad} out of range for {labels} labels"));
        }
        Ok(TileSet { labels, tiles })
    }

    /// Shorthand for tests and examples: tiles given as `(n, e, s, w)` tuples.
    pub fn from_tuples(labels: u32, tiles: &[(u8, u8, u8, u8)]) -> Result<Self> {
        TileSet::new(
            labels,
            tiles
                .iter()
                .map(|&(n, e, s, w)| Tile::new(n, e, s, w))
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.tiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tiles.is_empty()
    }
}

/// Well-known masked subspaces.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaskPreset {
    /// Three tiles, eight labels; the third tile's west label and the low bit
    /// of its south label are held at zero, leaving 2^32 genomes.
    S32_3_8,
}

impl MaskPreset {
    pub fn name(self) -> &'static str {
        match self {
            MaskPreset::S32_3_8 => "s32_3_8",
        }
    }
}

impl FromStr for MaskPreset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "s32_3_8" | "S32_3_8" => Ok(MaskPreset::S32_3_8),
            other => invalid(format!("unknown mask preset {other:?}")),
        }
    }
}

/// The genomes for `tiles` tile types over `labels` bonding labels, optionally
/// with some bit positions pinned.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SearchSpace {
    tiles: usize,
    labels: u32,
    /// `(position, value)`, sorted by position.
    fixed: Vec<(usize, bool)>,
    /// Free positions, free bit 0 first (i.e. the last string position first).
    #[serde(skip)]
    free: Vec<usize>,
    preset: Option<MaskPreset>,
}

impl SearchSpace {
    pub fn new(tiles: usize, labels: u32) -> Result<Self> {
        SearchSpace::with_fixed(tiles, labels, Vec::new())
    }

    pub fn with_fixed(tiles: usize, labels: u32, mut fixed: Vec<(usize, bool)>) -> Result<Self> {
        if tiles == 0 {
            return invalid("need at least one tile type");
        }
        if labels < 2 || !labels.is_power_of_two() || labels > 256 {
            return invalid(format!(
                "label count must be a power of two in [2, 256], got {labels}"
            ));
        }
        let bit_len = tiles * 4 * labels.trailing_zeros() as usize;
        fixed.sort_unstable();
        for w in fixed.windows(2) {
            if w[0].0 == w[1].0 {
                return invalid(format!("bit {} fixed twice", w[0].0));
            }
        }
        if let Some(&(pos, _)) = fixed.last() {
            if pos >= bit_len {
                return invalid(format!("fixed bit {pos} beyond genome length {bit_len}"));
            }
        }
        let free = (0..bit_len)
            .rev()
            .filter(|p| fixed.binary_search_by_key(p, |&(q, _)| q).is_err())
            .collect::<Vec<_>>();
        if free.len() > 63 {
            return invalid(format!(
                "{} free bits is too many to enumerate",
                free.len()
            ));
        }
        Ok(SearchSpace {
            tiles,
            labels,
            fixed,
            free,
            preset: None,
        })
    }

    pub fn preset(preset: MaskPreset) -> Self {
        match preset {
            MaskPreset::S32_3_8 => {
                // Third tile: N (24..27) and E (27..30) free, S (30..33) low bit
                // pinned, W (33..36) pinned.
                let fixed = [32, 33, 34, 35].into_iter().map(|p| (p, false)).collect();
                let mut s = SearchSpace::with_fixed(3, 8, fixed).expect("valid preset");
                s.preset = Some(preset);
                s
            }
        }
    }

    pub fn tiles(&self) -> usize {
        self.tiles
    }

    pub fn labels(&self) -> u32 {
        self.labels
    }

    pub fn mask_preset(&self) -> Option<MaskPreset> {
        self.preset
    }

    pub fn fixed_bits(&self) -> &[(usize, bool)] {
        &self.fixed
    }

    pub fn bits_per_label(&self) -> usize {
        self.labels.trailing_zeros() as usize
    }

    pub fn bit_len(&self) -> usize {
        self.tiles * 4 * self.bits_per_label()
    }

    pub fn free_bit_count(&self) -> usize {
        self.free.len()
    }

    /// Number of genomes in the space.
    pub fn cardinality(&self) -> u64 {
        1u64 << self.free.len()
    }

    pub fn genome_at_index(&self, index: u64) -> Result<Genome> {
        if index >= self.cardinality() {
            return invalid(format!(
                "index {index} out of range for a space of {} genomes",
                self.cardinality()
            ));
        }
        let mut g = Genome::zeros(self.bit_len());
        for &(pos, value) in &self.fixed {
            g.set(pos, value);
        }
        for (j, &pos) in self.free.iter().enumerate() {
            if (index >> j) & 1 == 1 {
                g.set(pos, true);
            }
        }
        Ok(g)
    }

    /// Inverse of [`SearchSpace::genome_at_index`]; `None` if the genome is
    /// not a member of this space.
    pub fn index_of(&self, genome: &Genome) -> Option<u64> {
        if genome.len() != self.bit_len() || self.fixed.iter().any(|&(p, v)| genome.get(p) != v) {
            return None;
        }
        Some(
            self.free
                .iter()
                .enumerate()
                .fold(0u64, |acc, (j, &p)| acc | (genome.get(p) as u64) << j),
        )
    }

    pub fn contains(&self, genome: &Genome) -> bool {
        self.index_of(genome).is_some()
    }

    pub fn decode(&self, genome: &Genome) -> Result<TileSet> {
        decode_tileset(genome, self)
    }

    pub fn encode(&self, tiles: &TileSet) -> Result<Genome> {
        encode_tileset(tiles, self)
    }
}

impl fmt::Display for SearchSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.preset {
            Some(p) => write!(f, "{}", p.name()),
            None if self.fixed.is_empty() => write!(f, "S{},{}", self.tiles, self.labels),
            None => write!(
                f,
                "S{},{} with {} fixed bits",
                self.tiles,
                self.labels,
                self.fixed.len()
            ),
        }
    }
}

pub fn decode_tileset(genome: &Genome, space: &SearchSpace) -> Result<TileSet> {
    if genome.len() != space.bit_len() {
        return invalid(format!(
            "genome has {} bits, {space} needs {}",
            genome.len(),
            space.bit_len()
        ));
    }
    let w = space.bits_per_label();
    let tiles = (0..space.tiles)
        .map(|t| Tile(std::array::from_fn(|e| genome.field((t * 4 + e) * w, w) as u8)))
        .collect();
    Ok(TileSet {
        labels: space.labels,
        tiles,
    })
}

pub fn encode_tileset(tiles: &TileSet, space: &SearchSpace) -> Result<Genome> {
    if tiles.len() != space.tiles {
        return invalid(format!(
            "{} tiles given, {space} has {}",
            tiles.len(),
            space.tiles
        ));
    }
    let w = space.bits_per_label();
    let mut g = Genome::zeros(space.bit_len());
    for (t, tile) in tiles.tiles.iter().enumerate() {
        for (e, &label) in tile.0.iter().enumerate() {
            if label as u32 >= space.labels {
                return invalid(format!(
                    "tile {t} edge {e}: label {label} out of range for {} labels",
                    space.labels
                ));
            }
            g.set_field((t * 4 + e) * w, w, label as u32);
        }
    }
    Ok(g)
}

pub fn hamming_weight(genome: &Genome) -> usize {
    genome.hamming_weight()
}
