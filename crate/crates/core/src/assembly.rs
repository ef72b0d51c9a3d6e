//! Stochastic tile assembly on a bounded square grid.
//!
//! Labels bond in adjacent pairs (1-2, 3-4, ...); label 0 never bonds, and
//! neither does the top label of the alphabet since its partner would lie
//! outside it. Bonding is irreversible and a single bond holds a tile in
//! place. Tiles may be rotated in quarter turns but not flipped.
//!
//! One assembly grows the structure from the seed (tile 0, unrotated, at the
//! grid centre) with a movelist: a LIFO stack of frontier cells plus a marking
//! per cell that keeps any cell from sitting on the stack twice.

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::classify::{hash_sorted_cells, CroppedShape, ShapeHash};
use crate::error::{invalid, Error, Result};
use crate::genome::TileSet;
use crate::stream::StreamKey;

/// Whether labels `i` and `j` form a bonding pair.
#[inline]
pub fn bonds(i: u8, j: u8) -> bool {
    if i == 0 {
        return false;
    }
    if i % 2 == 1 {
        j == i + 1
    } else {
        j + 1 == i
    }
}

/// The label that `label` bonds with inside an alphabet of `labels` symbols.
#[inline]
pub fn partner(label: u8, labels: u32) -> Option<u8> {
    let p = match label {
        0 => return None,
        l if l % 2 == 1 => l as u32 + 1,
        l => l as u32 - 1,
    };
    (p < labels).then_some(p as u8)
}

/// A label with no partner in the alphabet.
#[inline]
pub fn is_inert(label: u8, labels: u32) -> bool {
    partner(label, labels).is_none()
}

/// Which contacts are admissible when a tile is placed next to several
/// occupied cells.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContactRule {
    /// At least one bond, and every other contact either bonds or involves an
    /// inert label. Two bonding labels that are not partners may not touch.
    #[default]
    Strict,
    /// At least one bond; any other contact is allowed.
    Permissive,
}

impl ContactRule {
    #[inline]
    fn compatible(self, a: u8, b: u8, labels: u32) -> bool {
        match self {
            ContactRule::Strict => bonds(a, b) || is_inert(a, labels) || is_inert(b, labels),
            ContactRule::Permissive => true,
        }
    }
}

/// A tile type in a particular orientation, with its edges as seen in place.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Placement {
    pub tile: u8,
    pub orientation: u8,
    pub edges: [u8; 4],
}

const MAX_PLACEMENTS: usize = 64;

/// Distinct placements of a tile set, and for every label which of them bond
/// to it on each face.
///
/// Placements whose in-place edge configuration repeats one already listed are
/// dropped, whether the repeat comes from a rotationally symmetric tile or from
/// a duplicated tile type. The surviving placement is the one with the lowest
/// tile index, then the lowest orientation.
#[derive(Clone, Debug)]
pub struct BondingTable {
    labels: u32,
    placements: Vec<Placement>,
    /// `entries[label][face]`: placements whose edge on `face` bonds `label`.
    entries: Vec<[Vec<usize>; 4]>,
}

impl BondingTable {
    pub fn new(tiles: &TileSet) -> Result<Self> {
        let mut placements: Vec<Placement> = Vec::new();
        for (t, tile) in tiles.tiles.iter().enumerate() {
            for r in 0..4u8 {
                let edges = tile.rotated(r);
                if placements.iter().all(|p| p.edges != edges) {
                    placements.push(Placement {
                        tile: t as u8,
                        orientation: r,
                        edges,
                    });
                }
            }
        }
        if placements.len() > MAX_PLACEMENTS {
            return invalid(format!(
                "{} distinct placements exceed the supported {MAX_PLACEMENTS}",
                placements.len()
            ));
        }
        let entries = (0..tiles.labels)
            .map(|label| {
                std::array::from_fn(|face| {
                    placements
                        .iter()
                        .enumerate()
                        .filter(|(_, p)| bonds(p.edges[face], label as u8))
                        .map(|(i, _)| i)
                        .collect()
                })
            })
            .collect();
        Ok(BondingTable {
            labels: tiles.labels,
            placements,
            entries,
        })
    }

    pub fn labels(&self) -> u32 {
        self.labels
    }

    pub fn placements(&self) -> &[Placement] {
        &self.placements
    }

    /// Placements presenting a partner of `label` on `face`.
    pub fn bonding(&self, label: u8, face: usize) -> impl Iterator<Item = &Placement> + '_ {
        self.entries[label as usize][face]
            .iter()
            .map(|&i| &self.placements[i])
    }

    pub fn entry_indices(&self, label: u8, face: usize) -> &[usize] {
        &self.entries[label as usize][face]
    }
}

pub fn build_bonding_table(tiles: &TileSet) -> Result<BondingTable> {
    BondingTable::new(tiles)
}

/// A placed tile.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Cell {
    pub tile: u8,
    pub orientation: u8,
}

/// A `dim` x `dim` board, row 0 at the north edge.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AssemblyGrid {
    dim: usize,
    cells: Vec<Option<Cell>>,
}

impl AssemblyGrid {
    pub fn empty(dim: usize) -> Self {
        AssemblyGrid {
            dim,
            cells: vec![None; dim * dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn center(&self) -> (usize, usize) {
        ((self.dim - 1) / 2, (self.dim - 1) / 2)
    }

    pub fn get(&self, row: usize, col: usize) -> Option<Cell> {
        self.cells[row * self.dim + col]
    }

    pub fn set(&mut self, row: usize, col: usize, cell: Option<Cell>) {
        self.cells[row * self.dim + col] = cell;
    }

    pub fn is_occupied(&self, row: usize, col: usize) -> bool {
        self.get(row, col).is_some()
    }

    /// Occupied cells in row-major order.
    pub fn occupied(&self) -> impl Iterator<Item = (usize, usize, Cell)> + '_ {
        self.cells
            .iter()
            .enumerate()
            .filter_map(|(i, c)| c.map(|c| (i / self.dim, i % self.dim, c)))
    }

    pub fn tile_count(&self) -> usize {
        self.cells.iter().filter(|c| c.is_some()).count()
    }

    /// In-place edge labels of the tile at `(row, col)`.
    pub fn edges_at(&self, tiles: &TileSet, row: usize, col: usize) -> Option<[u8; 4]> {
        self.get(row, col)
            .map(|c| tiles.tiles[c.tile as usize].rotated(c.orientation))
    }

    /// Neighbouring cell in direction `dir`, if inside the grid.
    pub fn neighbor(&self, row: usize, col: usize, dir: usize) -> Option<(usize, usize)> {
        let (r, c) = (row as isize, col as isize);
        let (nr, nc) = match dir {
            0 => (r - 1, c),
            1 => (r, c + 1),
            2 => (r + 1, c),
            _ => (r, c - 1),
        };
        let d = self.dim as isize;
        (nr >= 0 && nc >= 0 && nr < d && nc < d).then_some((nr as usize, nc as usize))
    }

    /// Number of neighbours the tile at `(row, col)` is bonded to.
    pub fn bond_count(&self, tiles: &TileSet, row: usize, col: usize) -> usize {
        let Some(edges) = self.edges_at(tiles, row, col) else {
            return 0;
        };
        (0..4)
            .filter(|&dir| {
                self.neighbor(row, col, dir)
                    .and_then(|(nr, nc)| self.edges_at(tiles, nr, nc))
                    .is_some_and(|n| bonds(edges[dir], n[(dir + 2) % 4]))
            })
            .count()
    }
}

/// Cell-wise equality of type and orientation.
pub fn outcome_equivalent(a: &AssemblyGrid, b: &AssemblyGrid) -> Result<bool> {
    if a.dim != b.dim {
        return invalid(format!("grid dimensions differ: {} vs {}", a.dim, b.dim));
    }
    Ok(a.cells == b.cells)
}

/// Result of a single assembly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AssemblyOutcome {
    Bounded(AssemblyGrid),
    /// A tile landed on the outermost ring of the grid.
    Unbound,
    /// Some frontier cell admitted more than one distinct placement.
    TrivialNondet,
}

/// Outcome kinds without payload.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassKind {
    Deterministic,
    TrivialNondet,
    StericNondet,
    Unbound,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Classification {
    Deterministic {
        hash: ShapeHash,
        shape: CroppedShape,
    },
    TrivialNondet,
    /// Runs disagreed on the shape. `predominant` is the shape produced most
    /// often across the runs (ties go to the one seen first).
    StericNondet {
        predominant: ShapeHash,
        shape: CroppedShape,
    },
    Unbound,
}

impl Classification {
    pub fn kind(&self) -> ClassKind {
        match self {
            Classification::Deterministic { .. } => ClassKind::Deterministic,
            Classification::TrivialNondet => ClassKind::TrivialNondet,
            Classification::StericNondet { .. } => ClassKind::StericNondet,
            Classification::Unbound => ClassKind::Unbound,
        }
    }

    pub fn is_deterministic(&self) -> bool {
        matches!(self, Classification::Deterministic { .. })
    }

    /// The shape a histogram files this result under, if any.
    pub fn shape_hash(&self) -> Option<ShapeHash> {
        match self {
            Classification::Deterministic { hash, .. } => Some(*hash),
            Classification::StericNondet { predominant, .. } => Some(*predominant),
            _ => None,
        }
    }

    pub fn shape(&self) -> Option<&CroppedShape> {
        match self {
            Classification::Deterministic { shape, .. }
            | Classification::StericNondet { shape, .. } => Some(shape),
            _ => None,
        }
    }
}

/// Parameters shared by every assembly in an experiment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssemblyConfig {
    /// Grid side length, odd and at least 3.
    pub grid: usize,
    pub contact: ContactRule,
    /// Compare runs by rotation-invariant shape hash instead of the plain one.
    pub rotation_invariant: bool,
}

impl Default for AssemblyConfig {
    fn default() -> Self {
        AssemblyConfig {
            grid: 19,
            contact: ContactRule::Strict,
            rotation_invariant: false,
        }
    }
}

impl AssemblyConfig {
    pub fn with_grid(grid: usize) -> Self {
        AssemblyConfig {
            grid,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid < 3 || self.grid % 2 == 0 || self.grid > 255 {
            return invalid(format!(
                "grid dimension must be odd and within [3, 255], got {}",
                self.grid
            ));
        }
        Ok(())
    }
}

/// Fixed-capacity LIFO of cell indices with per-cell markings.
#[derive(Clone, Debug)]
pub struct Movelist {
    items: Vec<u32>,
    capacity: usize,
    marked: Vec<bool>,
}

impl Movelist {
    /// A stack for `cells` distinct cells holding at most `capacity` at once.
    pub fn new(cells: usize, capacity: usize) -> Self {
        Movelist {
            items: Vec::with_capacity(capacity),
            capacity,
            marked: vec![false; cells],
        }
    }

    /// Pushes `cell` unless it is already on the stack. Returns whether it was
    /// added. A full stack is left untouched.
    #[inline]
    pub fn push(&mut self, cell: u32) -> Result<bool> {
        if self.marked[cell as usize] {
            return Ok(false);
        }
        if self.items.len() >= self.capacity {
            return Err(Error::Capacity(self.capacity));
        }
        self.marked[cell as usize] = true;
        self.items.push(cell);
        Ok(true)
    }

    #[inline]
    pub fn pop(&mut self) -> Option<u32> {
        let cell = self.items.pop()?;
        self.marked[cell as usize] = false;
        Some(cell)
    }

    pub fn is_marked(&self, cell: u32) -> bool {
        self.marked[cell as usize]
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn clear(&mut self) {
        for &c in &self.items {
            self.marked[c as usize] = false;
        }
        self.items.clear();
    }
}

/// Bitmask lookup tables derived from a [`BondingTable`].
#[derive(Clone, Debug)]
struct Rules {
    placements: Vec<Placement>,
    /// `bond[label][dir]`: placements whose `dir` edge bonds a neighbour label.
    bond: Vec<[u64; 4]>,
    /// `allow[label][dir]`: placements whose `dir` edge may touch that label.
    allow: Vec<[u64; 4]>,
}

impl Rules {
    fn new(tiles: &TileSet, contact: ContactRule) -> Result<Self> {
        let table = BondingTable::new(tiles)?;
        let labels = table.labels;
        let mut bond = vec![[0u64; 4]; labels as usize];
        let mut allow = vec![[0u64; 4]; labels as usize];
        for label in 0..labels as usize {
            for dir in 0..4 {
                for &i in &table.entries[label][dir] {
                    bond[label][dir] |= 1 << i;
                }
                for (i, p) in table.placements.iter().enumerate() {
                    if contact.compatible(p.edges[dir], label as u8, labels) {
                        allow[label][dir] |= 1 << i;
                    }
                }
            }
        }
        Ok(Rules {
            placements: table.placements,
            bond,
            allow,
        })
    }
}

/// Raw result of one engine run; the structure stays in the engine's buffers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RunStatus {
    Bounded,
    Unbound,
    TrivialNondet,
}

const EMPTY: u8 = u8::MAX;

/// Reusable assembly buffers for one grid size.
///
/// The board is stored with a one-cell empty margin so neighbour lookups need
/// no bounds checks.
#[derive(Clone, Debug)]
pub struct Assembler {
    dim: usize,
    stride: usize,
    board: Vec<u8>,
    /// 0 outside the grid, 1 inside, 2 on the border ring.
    zone: Vec<u8>,
    movelist: Movelist,
    placed: Vec<u32>,
    contact: ContactRule,
    rules: Option<Rules>,
}

impl Assembler {
    pub fn new(config: &AssemblyConfig) -> Result<Self> {
        config.validate()?;
        let dim = config.grid;
        let stride = dim + 2;
        let mut zone = vec![0u8; stride * stride];
        for row in 0..dim {
            for col in 0..dim {
                let border = row == 0 || col == 0 || row == dim - 1 || col == dim - 1;
                zone[(row + 1) * stride + col + 1] = if border { 2 } else { 1 };
            }
        }
        Ok(Assembler {
            dim,
            stride,
            board: vec![EMPTY; stride * stride],
            zone,
            // Each cell is on the stack at most once at any time.
            movelist: Movelist::new(stride * stride, dim * dim),
            placed: Vec::with_capacity(dim * dim),
            contact: config.contact,
            rules: None,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Compiles `tiles` for the following runs.
    pub fn load(&mut self, tiles: &TileSet) -> Result<()> {
        self.rules = Some(Rules::new(tiles, self.contact)?);
        Ok(())
    }

    pub fn placements(&self) -> &[Placement] {
        self.rules.as_ref().map_or(&[], |r| &r.placements)
    }

    fn reset(&mut self) {
        for &c in &self.placed {
            self.board[c as usize] = EMPTY;
        }
        self.placed.clear();
        self.movelist.clear();
    }

    /// Grows one structure from the seed with the loaded tile set.
    pub fn run<R: RngCore>(&mut self, rng: &mut R) -> Result<RunStatus> {
        self.reset();
        let rules = self
            .rules
            .as_ref()
            .ok_or_else(|| Error::InvalidArgument("no tile set loaded".into()))?;
        let stride = self.stride as isize;
        let offsets = [-stride, 1, stride, -1];
        let center = (self.dim / 2 + 1) * self.stride + self.dim / 2 + 1;

        // Placement 0 is always the unrotated seed.
        self.board[center] = 0;
        self.placed.push(center as u32);
        push_frontier(
            &self.board,
            &self.zone,
            &mut self.movelist,
            center,
            &offsets,
            rng,
        )?;

        while let Some(cell) = self.movelist.pop() {
            let cell = cell as usize;
            let mut bonding = 0u64;
            let mut allowed = u64::MAX;
            for (dir, &off) in offsets.iter().enumerate() {
                let n = self.board[(cell as isize + off) as usize];
                if n != EMPTY {
                    let facing = rules.placements[n as usize].edges[(dir + 2) & 3] as usize;
                    bonding |= rules.bond[facing][dir];
                    allowed &= rules.allow[facing][dir];
                }
            }
            let candidates = bonding & allowed;
            match candidates.count_ones() {
                0 => continue,
                1 => {}
                _ => return Ok(RunStatus::TrivialNondet),
            }
            self.board[cell] = candidates.trailing_zeros() as u8;
            self.placed.push(cell as u32);
            if self.zone[cell] == 2 {
                return Ok(RunStatus::Unbound);
            }
            push_frontier(
                &self.board,
                &self.zone,
                &mut self.movelist,
                cell,
                &offsets,
                rng,
            )?;
        }
        Ok(RunStatus::Bounded)
    }

    /// `(row, col)` of every tile placed in the last run, in placement order.
    pub fn placed_cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.placed.iter().map(move |&c| {
            let c = c as usize;
            (c / self.stride - 1, c % self.stride - 1)
        })
    }

    pub fn placed_count(&self) -> usize {
        self.placed.len()
    }

    /// Copies the last run's structure out as a grid.
    pub fn grid(&self) -> AssemblyGrid {
        let mut grid = AssemblyGrid::empty(self.dim);
        let placements = self.placements();
        for (&c, (row, col)) in self.placed.iter().zip(self.placed_cells()) {
            let p = placements[self.board[c as usize] as usize];
            grid.set(
                row,
                col,
                Some(Cell {
                    tile: p.tile,
                    orientation: p.orientation,
                }),
            );
        }
        grid
    }
}

#[inline]
fn push_frontier<R: RngCore>(
    board: &[u8],
    zone: &[u8],
    movelist: &mut Movelist,
    cell: usize,
    offsets: &[isize; 4],
    rng: &mut R,
) -> Result<()> {
    let mut fresh = [0u32; 4];
    let mut n = 0;
    for &off in offsets {
        let nb = (cell as isize + off) as usize;
        if zone[nb] != 0 && board[nb] == EMPTY && !movelist.is_marked(nb as u32) {
            fresh[n] = nb as u32;
            n += 1;
        }
    }
    if n > 1 {
        let bits = rng.next_u64();
        for i in (1..n).rev() {
            let j = (((bits >> (16 * i)) & 0xFFFF) * (i as u64 + 1)) >> 16;
            fresh.swap(i, j as usize);
        }
    }
    for &c in &fresh[..n] {
        movelist.push(c)?;
    }
    Ok(())
}

/// One assembly of `tiles` on a `dim` x `dim` grid.
pub fn assemble_once<R: Rng>(
    tiles: &TileSet,
    config: &AssemblyConfig,
    rng: &mut R,
) -> Result<AssemblyOutcome> {
    let mut engine = Assembler::new(config)?;
    engine.load(tiles)?;
    Ok(match engine.run(rng)? {
        RunStatus::Bounded => AssemblyOutcome::Bounded(engine.grid()),
        RunStatus::Unbound => AssemblyOutcome::Unbound,
        RunStatus::TrivialNondet => AssemblyOutcome::TrivialNondet,
    })
}

/// Runs repeated assemblies of one tile set and classifies the result,
/// reusing buffers across tile sets.
#[derive(Clone, Debug)]
pub struct Classifier {
    engine: Assembler,
    rotation_invariant: bool,
    coords: Vec<(u8, u8)>,
    /// `(hash, count, first run)` per distinct shape seen so far.
    seen: Vec<(ShapeHash, u32, u32)>,
    run_hashes: Vec<ShapeHash>,
    first_shape: Option<CroppedShape>,
    key: Option<StreamKey>,
}

impl Classifier {
    pub fn new(config: &AssemblyConfig) -> Result<Self> {
        Ok(Classifier {
            engine: Assembler::new(config)?,
            rotation_invariant: config.rotation_invariant,
            coords: Vec::with_capacity(config.grid * config.grid),
            seen: Vec::new(),
            run_hashes: Vec::new(),
            first_shape: None,
            key: None,
        })
    }

    pub fn classify(&mut self, tiles: &TileSet, k: usize, key: StreamKey) -> Result<Classification> {
        Ok(self.classify_prefixes(tiles, &[k], key)?.pop().unwrap())
    }

    /// Classifications at several redundancies from one series of runs: the
    /// result for `k` uses runs `0..k`, so larger `k` extend smaller ones.
    pub fn classify_prefixes(
        &mut self,
        tiles: &TileSet,
        ks: &[usize],
        key: StreamKey,
    ) -> Result<Vec<Classification>> {
        if ks.contains(&0) {
            return invalid("redundancy k must be at least 1");
        }
        let k_max = ks.iter().copied().max().unwrap_or(0);
        self.engine.load(tiles)?;
        self.run_hashes.clear();
        self.first_shape = None;
        self.key = Some(key);
        let mut trivial_at = usize::MAX;
        let mut unbound_at = usize::MAX;

        for run in 0..k_max {
            let mut rng = key.run_rng(run as u32);
            match self.engine.run(&mut rng)? {
                RunStatus::TrivialNondet => {
                    trivial_at = run;
                    break;
                }
                RunStatus::Unbound => {
                    unbound_at = unbound_at.min(run);
                    self.run_hashes.push(ShapeHash(0));
                }
                RunStatus::Bounded => {
                    let hash = self.hash_current();
                    self.run_hashes.push(hash);
                }
            }
        }

        let mut out = Vec::with_capacity(ks.len());
        for &k in ks {
            out.push(if trivial_at < k {
                Classification::TrivialNondet
            } else if unbound_at < k {
                Classification::Unbound
            } else {
                self.shape_verdict(k)
            });
        }
        Ok(out)
    }

    fn hash_current(&mut self) -> ShapeHash {
        self.coords.clear();
        self.coords
            .extend(self.engine.placed_cells().map(|(r, c)| (r as u8, c as u8)));
        if self.first_shape.is_none() {
            self.first_shape = Some(CroppedShape::from_cells(
                self.coords.iter().map(|&(r, c)| (r as usize, c as usize)),
            ));
        }
        if self.rotation_invariant {
            let shape = CroppedShape::from_cells(
                self.coords.iter().map(|&(r, c)| (r as usize, c as usize)),
            );
            crate::classify::rotation_invariant_hash(&shape)
        } else {
            hash_sorted_cells(&mut self.coords)
        }
    }

    /// Verdict over bounded runs `0..k`.
    fn shape_verdict(&mut self, k: usize) -> Classification {
        let hashes = &self.run_hashes[..k];
        let first = hashes[0];
        if hashes.iter().all(|&h| h == first) {
            return Classification::Deterministic {
                hash: first,
                shape: self.first_shape.clone().expect("bounded run recorded"),
            };
        }
        self.seen.clear();
        for (run, &h) in hashes.iter().enumerate() {
            match self.seen.iter_mut().find(|(s, _, _)| *s == h) {
                Some(entry) => entry.1 += 1,
                None => self.seen.push((h, 1, run as u32)),
            }
        }
        let &(predominant, _, run) = self
            .seen
            .iter()
            .max_by(|a, b| a.1.cmp(&b.1).then(b.2.cmp(&a.2)))
            .unwrap();
        // Re-run the predominant shape's first occurrence to recover its bitmap.
        let shape = self
            .replay_shape(run)
            .expect("replayed run reproduces its bounded outcome");
        Classification::StericNondet { predominant, shape }
    }

    fn replay_shape(&mut self, run: u32) -> Option<CroppedShape> {
        let mut rng = self.key?.run_rng(run);
        match self.engine.run(&mut rng).ok()? {
            RunStatus::Bounded => Some(CroppedShape::from_cells(self.engine.placed_cells())),
            _ => None,
        }
    }
}

/// Classifies `tiles` from `k` independent assemblies.
///
/// Precedence when runs disagree: any trivially non-deterministic run wins,
/// then any unbound run; otherwise differing shapes mean steric
/// non-determinism.
pub fn classify_tileset(
    tiles: &TileSet,
    config: &AssemblyConfig,
    k: usize,
    key: StreamKey,
) -> Result<Classification> {
    Classifier::new(config)?.classify(tiles, k, key)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genome::SearchSpace;
    use crate::stream::rng_for;
    use statrs::distribution::{ChiSquared, ContinuousCDF};

    fn set(tiles: &[(u8, u8, u8, u8)]) -> TileSet {
        TileSet::from_tuples(8, tiles).unwrap()
    }

    fn grid19() -> AssemblyConfig {
        AssemblyConfig::default()
    }

    #[test]
    fn bonding_pairs() {
        assert!(bonds(1, 2) && bonds(2, 1) && bonds(5, 6));
        assert!(!bonds(3, 3) && !bonds(2, 3) && !bonds(4, 5));
        for j in 0..8 {
            assert!(!bonds(0, j) && !bonds(j, 0));
            for i in 0..8 {
                assert_eq!(bonds(i, j), bonds(j, i));
            }
        }
        assert_eq!(partner(6, 8), Some(5));
        assert!(is_inert(0, 8) && is_inert(7, 8) && is_inert(3, 4));
        assert!(!is_inert(3, 8));
    }

    #[test]
    fn contact_rules() {
        assert!(!ContactRule::Strict.compatible(1, 3, 8));
        assert!(ContactRule::Strict.compatible(1, 2, 8));
        assert!(ContactRule::Strict.compatible(1, 0, 8));
        assert!(ContactRule::Strict.compatible(7, 4, 8));
        assert!(ContactRule::Permissive.compatible(1, 3, 8));
    }

    #[test]
    fn bonding_table_examples() {
        let inert = BondingTable::new(&set(&[(0, 0, 0, 0)])).unwrap();
        assert_eq!(inert.placements().len(), 1);
        for label in 0..8 {
            for face in 0..4 {
                assert_eq!(inert.bonding(label, face).count(), 0);
            }
        }

        let t = BondingTable::new(&set(&[(2, 0, 0, 0), (1, 0, 0, 0)])).unwrap();
        for face in 0..4 {
            let entries: Vec<_> = t.bonding(2, face).collect();
            assert_eq!(entries.len(), 1);
            assert_eq!(entries[0].tile, 1);
            assert_eq!(entries[0].edges[face], 1);
        }
        for face in 0..4 {
            assert_eq!(t.bonding(0, face).count(), 0);
        }

        let sym = BondingTable::new(&set(&[(1, 1, 1, 1)])).unwrap();
        assert_eq!(sym.placements().len(), 1);
        for face in 0..4 {
            assert_eq!(sym.bonding(2, face).count(), 1);
        }

        // A duplicated tile type collapses onto the first copy.
        let dup = BondingTable::new(&set(&[(1, 0, 0, 0), (0, 1, 0, 0)])).unwrap();
        assert_eq!(dup.placements().len(), 4);
        assert!(dup.placements().iter().all(|p| p.tile == 0));

        for (label, face) in [(1u8, 0usize), (2, 1), (3, 3)] {
            assert!(t.entry_indices(label, face).len() <= 2 * 4);
        }
    }

    #[test]
    fn inert_set_is_a_monomer() {
        let tiles = set(&[(0, 0, 0, 0), (0, 0, 0, 0)]);
        let outcome = assemble_once(&tiles, &grid19(), &mut rng_for(&[1])).unwrap();
        let AssemblyOutcome::Bounded(grid) = outcome else {
            panic!("expected a bounded monomer, got {outcome:?}");
        };
        assert_eq!(grid.tile_count(), 1);
        assert!(grid.is_occupied(9, 9));
        let c = classify_tileset(&tiles, &grid19(), 8, StreamKey::new(0, 0)).unwrap();
        assert_eq!(c.shape().unwrap().cell_count(), 1);
        assert!(c.is_deterministic());
    }

    #[test]
    fn vertical_dimer() {
        let tiles = set(&[(2, 0, 0, 0), (0, 0, 1, 0)]);
        for seed in 0..20 {
            let outcome = assemble_once(&tiles, &grid19(), &mut rng_for(&[seed])).unwrap();
            let AssemblyOutcome::Bounded(grid) = outcome else {
                panic!("expected a dimer");
            };
            let cells: Vec<_> = grid.occupied().map(|(r, c, _)| (r, c)).collect();
            assert_eq!(cells, vec![(8, 9), (9, 9)]);
            assert_eq!(grid.get(8, 9), Some(Cell { tile: 1, orientation: 0 }));
        }
        let c = classify_tileset(&tiles, &grid19(), 16, StreamKey::new(5, 5)).unwrap();
        let shape = c.shape().unwrap();
        assert!(c.is_deterministic());
        assert_eq!((shape.width(), shape.height()), (1, 2));
    }

    #[test]
    fn self_stacking_column_is_unbound() {
        let tiles = set(&[(2, 0, 1, 0), (0, 0, 0, 0)]);
        let outcome = assemble_once(&tiles, &grid19(), &mut rng_for(&[3])).unwrap();
        assert_eq!(outcome, AssemblyOutcome::Unbound);
        let c = classify_tileset(&tiles, &grid19(), 4, StreamKey::new(0, 1)).unwrap();
        assert_eq!(c, Classification::Unbound);
    }

    #[test]
    fn two_candidates_are_trivial() {
        // Both (1,0,0,0) rotations of tile 1 and tile 2 bond the seed's label 2.
        let tiles = set(&[(2, 0, 0, 0), (1, 0, 0, 0), (1, 3, 0, 0)]);
        let outcome = assemble_once(&tiles, &grid19(), &mut rng_for(&[4])).unwrap();
        assert_eq!(outcome, AssemblyOutcome::TrivialNondet);
    }

    #[test]
    fn movelist_contract() {
        let mut m = Movelist::new(10, 3);
        assert!(m.push(4).unwrap());
        assert!(!m.push(4).unwrap());
        assert!(m.is_marked(4));
        assert!(m.push(7).unwrap());
        assert!(m.push(1).unwrap());
        assert!(matches!(m.push(2), Err(Error::Capacity(3))));
        assert_eq!(m.len(), 3);
        assert!(!m.is_marked(2));
        assert_eq!(m.pop(), Some(1));
        assert!(!m.is_marked(1));
        assert_eq!(m.pop(), Some(7));
        m.clear();
        assert!(m.is_empty() && !m.is_marked(4));
        assert_eq!(m.pop(), None);
    }

    #[test]
    fn grid_validation() {
        for bad in [1, 2, 18, 257] {
            assert!(Assembler::new(&AssemblyConfig::with_grid(bad)).is_err());
        }
        assert!(Assembler::new(&AssemblyConfig::with_grid(3)).is_ok());
        let a = AssemblyGrid::empty(5);
        assert!(outcome_equivalent(&a, &AssemblyGrid::empty(7)).is_err());
    }

    #[test]
    fn configuration_equivalence_is_positional() {
        let mut a = AssemblyGrid::empty(7);
        let cell = Some(Cell { tile: 0, orientation: 0 });
        a.set(3, 3, cell);
        a.set(2, 3, cell);
        let mut b = AssemblyGrid::empty(7);
        b.set(3, 4, cell);
        b.set(2, 4, cell);
        assert!(outcome_equivalent(&a, &a).unwrap());
        assert!(!outcome_equivalent(&a, &b).unwrap());
    }

    fn bonded_and_connected(tiles: &TileSet, grid: &AssemblyGrid) -> bool {
        let (cr, cc) = grid.center();
        let mut seen = vec![false; grid.dim() * grid.dim()];
        let mut stack = vec![(cr, cc)];
        seen[cr * grid.dim() + cc] = true;
        let mut reached = 0;
        while let Some((r, c)) = stack.pop() {
            reached += 1;
            let edges = grid.edges_at(tiles, r, c).unwrap();
            for dir in 0..4 {
                let Some((nr, nc)) = grid.neighbor(r, c, dir) else { continue };
                let Some(n) = grid.edges_at(tiles, nr, nc) else { continue };
                if bonds(edges[dir], n[(dir + 2) % 4]) && !seen[nr * grid.dim() + nc] {
                    seen[nr * grid.dim() + nc] = true;
                    stack.push((nr, nc));
                }
            }
        }
        let stable = grid
            .occupied()
            .all(|(r, c, _)| (r, c) == (cr, cc) || grid.bond_count(tiles, r, c) >= 1);
        stable && reached == grid.tile_count()
    }

    #[test]
    fn bounded_results_are_stable_and_connected() {
        let space = SearchSpace::new(2, 8).unwrap();
        let mut rng = rng_for(&[6]);
        let mut bounded = 0;
        for contact in [ContactRule::Strict, ContactRule::Permissive] {
            let cfg = AssemblyConfig { contact, ..grid19() };
            for _ in 0..3000 {
                let i = rng.gen_range(0..space.cardinality());
                let tiles = space.decode(&space.genome_at_index(i).unwrap()).unwrap();
                if let AssemblyOutcome::Bounded(g) = assemble_once(&tiles, &cfg, &mut rng).unwrap() {
                    bounded += 1;
                    assert!(g.is_occupied(9, 9));
                    assert!(bonded_and_connected(&tiles, &g), "genome index {i}");
                }
            }
        }
        assert!(bounded > 1000);
    }

    #[test]
    fn deterministic_sets_stay_deterministic() {
        let space = SearchSpace::new(2, 8).unwrap();
        let cfg = grid19();
        let mut classifier = Classifier::new(&cfg).unwrap();
        let mut rng = rng_for(&[7]);
        let mut checked = 0;
        while checked < 40 {
            let i = rng.gen_range(0..space.cardinality());
            let tiles = space.decode(&space.genome_at_index(i).unwrap()).unwrap();
            let Classification::Deterministic { hash, .. } =
                classifier.classify(&tiles, 8, StreamKey::new(1, i)).unwrap()
            else {
                continue;
            };
            if classifier.classify(&tiles, 1, StreamKey::new(1, i)).unwrap().shape_hash() != Some(hash) {
                panic!("prefix disagrees");
            }
            let again = classifier.classify(&tiles, 100, StreamKey::new(2, i)).unwrap();
            assert_eq!(again.shape_hash(), Some(hash), "genome index {i}");
            assert!(again.is_deterministic());
            checked += 1;
        }
    }

    #[test]
    fn unbound_runs_stay_unbound_or_reach_the_old_border() {
        // The same stream replays the same growth on both grids until a tile
        // lands on the smaller grid's border ring.
        let space = SearchSpace::new(2, 8).unwrap();
        let (d, small, large) = (11, AssemblyConfig::with_grid(11), AssemblyConfig::with_grid(13));
        let mut rng = rng_for(&[8]);
        let mut checked = 0;
        while checked < 300 {
            let i = rng.gen_range(0..space.cardinality());
            let tiles = space.decode(&space.genome_at_index(i).unwrap()).unwrap();
            let key = StreamKey::new(3, i);
            if assemble_once(&tiles, &small, &mut key.run_rng(0)).unwrap() != AssemblyOutcome::Unbound {
                continue;
            }
            match assemble_once(&tiles, &large, &mut key.run_rng(0)).unwrap() {
                // Growth past the old border may also expose an ambiguity.
                AssemblyOutcome::Unbound | AssemblyOutcome::TrivialNondet => {}
                AssemblyOutcome::Bounded(g) => {
                    let (cr, cc) = g.center();
                    let reach = g
                        .occupied()
                        .map(|(r, c, _)| r.abs_diff(cr).max(c.abs_diff(cc)))
                        .max()
                        .unwrap();
                    assert!(reach >= (d - 1) / 2, "genome index {i}");
                }
            }
            checked += 1;
        }
    }

    #[test]
    fn frontier_order_is_uniform() {
        let cfg = AssemblyConfig::with_grid(5);
        let engine = Assembler::new(&cfg).unwrap();
        let stride = engine.stride;
        let center = 3 * stride + 3;
        let offsets = [-(stride as isize), 1, stride as isize, -1];
        let mut counts = [[0u64; 4]; 4];
        let mut rng = rng_for(&[9]);
        let draws = 40_000;
        for _ in 0..draws {
            let mut m = Movelist::new(stride * stride, 25);
            push_frontier(&engine.board, &engine.zone, &mut m, center, &offsets, &mut rng).unwrap();
            for slot in counts.iter_mut() {
                let cell = m.pop().unwrap() as isize - center as isize;
                slot[offsets.iter().position(|&o| o == cell).unwrap()] += 1;
            }
        }
        let expected = draws as f64 / 4.0;
        let chi2 = ChiSquared::new(3.0).unwrap();
        for slot in counts {
            let stat: f64 = slot.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
            assert!(1.0 - chi2.cdf(stat) > 1e-3, "{slot:?}");
        }
    }
}
