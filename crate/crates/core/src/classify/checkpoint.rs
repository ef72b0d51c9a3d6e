//! Binary snapshots of an interrupted enumeration.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! magic      8 bytes  "JTAMCKPT"
//! version    u32      1
//! params     tiles u32, labels u32, preset u8 (0 none, 1 s32_3_8),
//!            fixed count u32 then (position u32, value u8) each,
//!            grid u32, contact u8, rotation_invariant u8, seed u64,
//!            sampling u8 (0 full, 1 stratified) + stride u64,
//!            k count u32 then k u32 each
//! progress   next_sample u64
//! histograms one per k:
//!            tallies 4 x u64 (det, trivial, steric, unbound), collisions u64,
//!            record count u32, then per record:
//!              hash u32, det_count u64, steric_count u64,
//!              first_det u64, first_steric u64 (u64::MAX = none),
//!              width u32, height u32, origin row u32, origin col u32,
//!              bitmap packed row-major, MSB first, ceil(w*h/8) bytes
//! ```
//!
//! Files are written to a temporary sibling and renamed into place.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use super::enumerate::{EnumerateConfig, Sampling};
use super::histogram::{ClassTallies, Histogram, ShapeRecord};
use super::shape::{CroppedShape, ShapeHash};
use crate::assembly::ContactRule;
use crate::error::{Error, Result};
use crate::genome::{MaskPreset, SearchSpace};

const MAGIC: &[u8; 8] = b"JTAMCKPT";
const VERSION: u32 = 1;
const NONE: u64 = u64::MAX;

/// Everything that must agree between the run that wrote a checkpoint and the
/// run resuming it. Batch size and worker count are free to change.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunParams {
    pub tiles: u32,
    pub labels: u32,
    pub preset: Option<MaskPreset>,
    pub fixed: Vec<(u32, bool)>,
    pub grid: u32,
    pub contact: ContactRule,
    pub rotation_invariant: bool,
    pub seed: u64,
    pub sampling: Sampling,
    pub ks: Vec<u32>,
}

impl RunParams {
    pub fn new(space: &SearchSpace, config: &EnumerateConfig, ks: &[usize]) -> Self {
        RunParams {
            tiles: space.tiles() as u32,
            labels: space.labels(),
            preset: space.mask_preset(),
            fixed: space
                .fixed_bits()
                .iter()
                .map(|&(p, v)| (p as u32, v))
                .collect(),
            grid: config.assembly.grid as u32,
            contact: config.assembly.contact,
            rotation_invariant: config.assembly.rotation_invariant,
            seed: config.seed,
            sampling: config.sampling,
            ks: ks.iter().map(|&k| k as u32).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Checkpoint {
    pub params: RunParams,
    /// Samples `0..next_sample` are already in the histograms.
    pub next_sample: u64,
    pub histograms: Vec<Histogram>,
}

impl Checkpoint {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Vec::new();
        w.extend_from_slice(MAGIC);
        put_u32(&mut w, VERSION);
        let p = &self.params;
        put_u32(&mut w, p.tiles);
        put_u32(&mut w, p.labels);
        w.push(match p.preset {
            None => 0,
            Some(MaskPreset::S32_3_8) => 1,
        });
        put_u32(&mut w, p.fixed.len() as u32);
        for &(pos, v) in &p.fixed {
            put_u32(&mut w, pos);
            w.push(v as u8);
        }
        put_u32(&mut w, p.grid);
        w.push(match p.contact {
            ContactRule::Strict => 0,
            ContactRule::Permissive => 1,
        });
        w.push(p.rotation_invariant as u8);
        put_u64(&mut w, p.seed);
        match p.sampling {
            Sampling::Full => {
                w.push(0);
                put_u64(&mut w, 0);
            }
            Sampling::Stratified { stride } => {
                w.push(1);
                put_u64(&mut w, stride);
            }
        }
        put_u32(&mut w, p.ks.len() as u32);
        for &k in &p.ks {
            put_u32(&mut w, k);
        }
        put_u64(&mut w, self.next_sample);
        for h in &self.histograms {
            write_histogram(&mut w, h);
        }
        w
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader { bytes, pos: 0 };
        if r.take(8)? != MAGIC {
            return corrupt("bad magic");
        }
        let version = r.u32()?;
        if version != VERSION {
            return corrupt(&format!("unsupported version {version}"));
        }
        let tiles = r.u32()?;
        let labels = r.u32()?;
        let preset = match r.u8()? {
            0 => None,
            1 => Some(MaskPreset::S32_3_8),
            x => return corrupt(&format!("unknown preset tag {x}")),
        };
        let n_fixed = r.u32()?;
        let mut fixed = Vec::new();
        for _ in 0..n_fixed {
            let pos = r.u32()?;
            fixed.push((pos, r.flag()?));
        }
        let grid = r.u32()?;
        let contact = match r.u8()? {
            0 => ContactRule::Strict,
            1 => ContactRule::Permissive,
            x => return corrupt(&format!("unknown contact rule tag {x}")),
        };
        let rotation_invariant = r.flag()?;
        let seed = r.u64()?;
        let sampling = match (r.u8()?, r.u64()?) {
            (0, _) => Sampling::Full,
            (1, stride) => Sampling::Stratified { stride },
            (x, _) => return corrupt(&format!("unknown sampling tag {x}")),
        };
        let n_ks = r.u32()?;
        let ks = (0..n_ks).map(|_| r.u32()).collect::<Result<Vec<_>>>()?;
        let next_sample = r.u64()?;
        let histograms = ks
            .iter()
            .map(|_| read_histogram(&mut r))
            .collect::<Result<Vec<_>>>()?;
        if r.pos != bytes.len() {
            return corrupt("trailing bytes");
        }
        Ok(Checkpoint {
            params: RunParams {
                tiles,
                labels,
                preset,
                fixed,
                grid,
                contact,
                rotation_invariant,
                seed,
                sampling,
                ks,
            },
            next_sample,
            histograms,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut tmp = path.as_os_str().to_owned();
        tmp.push(".tmp");
        let tmp = Path::new(&tmp);
        {
            let mut f = fs::File::create(tmp)?;
            f.write_all(&self.to_bytes())?;
            f.sync_all()?;
        }
        fs::rename(tmp, path)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Checkpoint::from_bytes(&fs::read(path)?)
    }

    /// `Ok(None)` when the file does not exist.
    pub fn load_if_present(path: &Path) -> Result<Option<Self>> {
        match fs::read(path) {
            Ok(bytes) => Checkpoint::from_bytes(&bytes).map(Some),
            Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(e.into()),
        }
    }
}

fn corrupt<T>(msg: &str) -> Result<T> {
    Err(Error::Checkpoint(msg.to_string()))
}

fn put_u32(w: &mut Vec<u8>, v: u32) {
    w.extend_from_slice(&v.to_le_bytes());
}

fn put_u64(w: &mut Vec<u8>, v: u64) {
    w.extend_from_slice(&v.to_le_bytes());
}

fn write_histogram(w: &mut Vec<u8>, h: &Histogram) {
    let t = &h.tallies;
    for v in [t.deterministic, t.trivial_nondet, t.steric_nondet, t.unbound, h.collisions] {
        put_u64(w, v);
    }
    put_u32(w, h.shapes.len() as u32);
    for rec in h.shapes.values() {
        put_u32(w, rec.hash.0);
        put_u64(w, rec.det_count);
        put_u64(w, rec.steric_count);
        put_u64(w, rec.first_deterministic.unwrap_or(NONE));
        put_u64(w, rec.first_steric.unwrap_or(NONE));
        let s = &rec.shape;
        let (row, col) = s.origin();
        for v in [s.width(), s.height(), row, col] {
            put_u32(w, v as u32);
        }
        let mut packed = vec![0u8; s.bitmap().len().div_ceil(8)];
        for (i, _) in s.bitmap().iter().enumerate().filter(|(_, &b)| b) {
            packed[i / 8] |= 0x80 >> (i % 8);
        }
        w.extend_from_slice(&packed);
    }
}

fn read_histogram(r: &mut Reader<'_>) -> Result<Histogram> {
    let tallies = ClassTallies {
        deterministic: r.u64()?,
        trivial_nondet: r.u64()?,
        steric_nondet: r.u64()?,
        unbound: r.u64()?,
    };
    let collisions = r.u64()?;
    let n = r.u32()?;
    let mut h = Histogram {
        tallies,
        collisions,
        ..Histogram::default()
    };
    for _ in 0..n {
        let hash = ShapeHash(r.u32()?);
        let det_count = r.u64()?;
        let steric_count = r.u64()?;
        let opt = |v: u64| (v != NONE).then_some(v);
        let first_deterministic = opt(r.u64()?);
        let first_steric = opt(r.u64()?);
        let width = r.u32()? as usize;
        let height = r.u32()? as usize;
        let row = r.u32()? as usize;
        let col = r.u32()? as usize;
        if width == 0 || height == 0 || width > 255 || height > 255 {
            return corrupt("shape dimensions out of range");
        }
        let packed = r.take((width * height).div_ceil(8))?;
        let cells = (0..width * height)
            .filter(|&i| packed[i / 8] & (0x80 >> (i % 8)) != 0)
            .map(|i| (row + i / width, col + i % width));
        let shape = CroppedShape::try_from_cells(cells)
            .map_err(|_| Error::Checkpoint("empty shape".into()))?;
        if shape.width() != width || shape.height() != height || shape.origin() != (row, col) {
            return corrupt("shape bitmap does not fill its bounding box");
        }
        if first_deterministic.is_none() && first_steric.is_none() {
            return corrupt("shape record without a genome");
        }
        h.shapes.insert(
            hash,
            ShapeRecord {
                hash,
                shape,
                det_count,
                steric_count,
                first_deterministic,
                first_steric,
            },
        );
    }
    if !h.is_consistent() {
        return corrupt("shape counts disagree with class tallies");
    }
    Ok(h)
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len());
        let Some(end) = end else {
            return corrupt("truncated");
        };
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn flag(&mut self) -> Result<bool> {
        match self.u8()? {
            0 => Ok(false),
            1 => Ok(true),
            x => corrupt(&format!("bad flag byte {x}")),
        }
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}
