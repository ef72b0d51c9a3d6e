//! Reference implementations used as test oracles. Nothing here calls into
//! the assembly engine.

#![allow(dead_code)]

/// Class and shape a reference assembler assigns to a tile set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Truth {
    /// Width, height and row-major occupancy of the single shape produced.
    Deterministic(usize, usize, Vec<bool>),
    Steric,
    Unbound,
    Trivial,
}

fn partner(label: u8, labels: u8) -> Option<u8> {
    let p = match label {
        0 => return None,
        l if l % 2 == 1 => l + 1,
        l => l - 1,
    };
    (p < labels).then_some(p)
}

fn bond(a: u8, b: u8, labels: u8) -> bool {
    partner(a, labels) == Some(b)
}

fn inert(a: u8, labels: u8) -> bool {
    partner(a, labels).is_none()
}

/// Edges facing N, E, S, W after `r` clockwise quarter turns: the edge now
/// facing `dir` used to face `dir - r`.
fn turned(t: [u8; 4], r: usize) -> [u8; 4] {
    std::array::from_fn(|dir| t[(dir + 4 - r) % 4])
}

enum Run {
    Shape(Vec<(usize, usize)>),
    Unbound,
    Trivial,
}

/// Plain reference assemblers that try every tile in every rotation at a cell
/// instead of using lookup tables.
pub struct ReferenceAssembler {
    pub d: usize,
    pub labels: u8,
    /// Forbid contact between non-partner, non-inert labels.
    pub strict: bool,
}

/// Frontier discipline of a [`ReferenceAssembler`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Order {
    /// Newest cell first, each batch of new neighbours shuffled with the same
    /// draws as the engine, one generator per run keyed like the engine's.
    Lifo { seed: u64, index: u64 },
    /// Every step, rescan the whole frontier and fill a uniformly chosen cell
    /// with one fit. Any frontier cell with several fits ends the run.
    Uniform,
}

impl ReferenceAssembler {
    fn fits(&self, grid: &[Option<[u8; 4]>], tiles: &[[u8; 4]], r: usize, c: usize) -> Vec<[u8; 4]> {
        let d = self.d;
        let around = [
            (r > 0).then(|| grid[(r - 1) * d + c]).flatten(),
            (c + 1 < d).then(|| grid[r * d + c + 1]).flatten(),
            (r + 1 < d).then(|| grid[(r + 1) * d + c]).flatten(),
            (c > 0).then(|| grid[r * d + c - 1]).flatten(),
        ];
        let mut out: Vec<[u8; 4]> = Vec::new();
        for &t in tiles {
            for rot in 0..4 {
                let e = turned(t, rot);
                let mut bonded = false;
                let mut clash = false;
                for dir in 0..4 {
                    if let Some(n) = around[dir] {
                        let theirs = n[(dir + 2) % 4];
                        if bond(e[dir], theirs, self.labels) {
                            bonded = true;
                        } else if !inert(e[dir], self.labels) && !inert(theirs, self.labels) {
                            clash = true;
                        }
                    }
                }
                if bonded && !(self.strict && clash) && !out.contains(&e) {
                    out.push(e);
                }
            }
        }
        out
    }

    fn run_uniform(&self, tiles: &[[u8; 4]], rng: &mut impl rand::Rng) -> Run {
        let d = self.d;
        let mut grid: Vec<Option<[u8; 4]>> = vec![None; d * d];
        grid[(d / 2) * d + d / 2] = Some(tiles[0]);
        loop {
            let mut ready = Vec::new();
            for r in 0..d {
                for c in 0..d {
                    if grid[r * d + c].is_some() {
                        continue;
                    }
                    let touching = (r > 0 && grid[(r - 1) * d + c].is_some())
                        || (c + 1 < d && grid[r * d + c + 1].is_some())
                        || (r + 1 < d && grid[(r + 1) * d + c].is_some())
                        || (c > 0 && grid[r * d + c - 1].is_some());
                    if !touching {
                        continue;
                    }
                    let f = self.fits(&grid, tiles, r, c);
                    match f.len() {
                        0 => {}
                        1 => ready.push((r, c, f[0])),
                        _ => return Run::Trivial,
                    }
                }
            }
            if ready.is_empty() {
                let cells = (0..d * d).filter(|&i| grid[i].is_some()).map(|i| (i / d, i % d));
                return Run::Shape(cells.collect());
            }
            let (r, c, e) = ready[rng.gen_range(0..ready.len())];
            if r == 0 || c == 0 || r == d - 1 || c == d - 1 {
                return Run::Unbound;
            }
            grid[r * d + c] = Some(e);
        }
    }

    fn run_lifo(&self, tiles: &[[u8; 4]], rng: &mut impl rand::RngCore) -> Run {
        let d = self.d;
        let mut grid: Vec<Option<[u8; 4]>> = vec![None; d * d];
        let mut stack: Vec<(usize, usize)> = Vec::new();
        let centre = (d / 2, d / 2);
        grid[centre.0 * d + centre.1] = Some(tiles[0]);
        let mut placed = vec![centre];
        let mut cell = centre;
        loop {
            // Empty, not yet stacked neighbours in N, E, S, W order.
            let (r, c) = (cell.0 as isize, cell.1 as isize);
            let mut fresh: Vec<(usize, usize)> = [(r - 1, c), (r, c + 1), (r + 1, c), (r, c - 1)]
                .into_iter()
                .filter(|&(y, x)| y >= 0 && x >= 0 && (y as usize) < d && (x as usize) < d)
                .map(|(y, x)| (y as usize, x as usize))
                .filter(|&(y, x)| grid[y * d + x].is_none() && !stack.contains(&(y, x)))
                .collect();
            if fresh.len() > 1 {
                let bits = rng.next_u64();
                for i in (1..fresh.len()).rev() {
                    let j = (((bits >> (16 * i)) & 0xFFFF) * (i as u64 + 1)) >> 16;
                    fresh.swap(i, j as usize);
                }
            }
            stack.extend(fresh);
            loop {
                let Some((y, x)) = stack.pop() else {
                    return Run::Shape(placed);
                };
                let f = self.fits(&grid, tiles, y, x);
                match f.len() {
                    0 => continue,
                    1 => {}
                    _ => return Run::Trivial,
                }
                grid[y * d + x] = Some(f[0]);
                placed.push((y, x));
                if y == 0 || x == 0 || y == d - 1 || x == d - 1 {
                    return Run::Unbound;
                }
                cell = (y, x);
                break;
            }
        }
    }

    /// Classifies from `k` runs: any ambiguous run wins, then any unbound
    /// run, then differing shapes.
    pub fn classify(&self, tiles: &[[u8; 4]], k: usize, order: Order, rng: &mut impl rand::Rng) -> Truth {
        let mut shapes = Vec::new();
        let mut unbound = false;
        for run in 0..k {
            let outcome = match order {
                Order::Lifo { seed, index } => {
                    self.run_lifo(tiles, &mut jatam_core::stream::rng_for(&[seed, index, run as u64]))
                }
                Order::Uniform => self.run_uniform(tiles, rng),
            };
            match outcome {
                Run::Trivial => return Truth::Trivial,
                Run::Unbound => unbound = true,
                Run::Shape(cells) => shapes.push(crop(&cells)),
            }
        }
        if unbound {
            return Truth::Unbound;
        }
        if shapes.iter().all(|s| *s == shapes[0]) {
            let (w, h, bits) = shapes.swap_remove(0);
            Truth::Deterministic(w, h, bits)
        } else {
            Truth::Steric
        }
    }
}

fn crop(cells: &[(usize, usize)]) -> (usize, usize, Vec<bool>) {
    let top = cells.iter().map(|p| p.0).min().unwrap();
    let bottom = cells.iter().map(|p| p.0).max().unwrap();
    let left = cells.iter().map(|p| p.1).min().unwrap();
    let right = cells.iter().map(|p| p.1).max().unwrap();
    let (w, h) = (right - left + 1, bottom - top + 1);
    let mut bits = vec![false; w * h];
    for &(r, c) in cells {
        bits[(r - top) * w + (c - left)] = true;
    }
    (w, h, bits)
}

/// Decodes tile `t` of a genome given as an integer, MSB-first, `bits` bits per
/// label, `tiles` tiles.
pub fn decode_index(index: u64, tiles: usize, bits: usize) -> Vec<[u8; 4]> {
    let total = tiles * 4 * bits;
    (0..tiles)
        .map(|t| {
            std::array::from_fn(|e| {
                let shift = total - (t * 4 + e + 1) * bits;
                ((index >> shift) & ((1 << bits) - 1)) as u8
            })
        })
        .collect()
}

/// Plain one-at-a-time hash, bytes taken as unsigned.
pub fn reference_oat(bytes: &[u8]) -> u32 {
    let mut h: u32 = 0;
    for &b in bytes {
        h = h.wrapping_add(b as u32);
        h = h.wrapping_add(h << 10);
        h ^= h >> 6;
    }
    h = h.wrapping_add(h << 3);
    h ^= h >> 11;
    h.wrapping_add(h << 15)
}
