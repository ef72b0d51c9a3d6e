//! Cropped shapes and their hashes.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::hash::{oat_hash, OneAtATime};
use crate::assembly::AssemblyGrid;
use crate::error::{invalid, Result};

/// 32-bit shape fingerprint.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ShapeHash(pub u32);

impl fmt::Display for ShapeHash {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#010x}", self.0)
    }
}

/// Occupancy inside the tight bounding box of a structure.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CroppedShape {
    width: usize,
    height: usize,
    /// Row-major, `true` = occupied.
    cells: Vec<bool>,
    /// `(row, col)` of the box's top-left corner in the source grid.
    origin: (usize, usize),
}

impl CroppedShape {
    /// Crops a set of `(row, col)` cells. Fails on an empty set.
    pub fn try_from_cells<I>(cells: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let cells: Vec<(usize, usize)> = cells.into_iter().collect();
        let Some(&(r0, c0)) = cells.first() else {
            return invalid("cannot crop an empty set of cells");
        };
        let (mut top, mut left, mut bottom, mut right) = (r0, c0, r0, c0);
        for &(r, c) in &cells {
            top = top.min(r);
            bottom = bottom.max(r);
            left = left.min(c);
            right = right.max(c);
        }
        let width = right - left + 1;
        let height = bottom - top + 1;
        let mut bitmap = vec![false; width * height];
        for &(r, c) in &cells {
            bitmap[(r - top) * width + (c - left)] = true;
        }
        Ok(CroppedShape {
            width,
            height,
            cells: bitmap,
            origin: (top, left),
        })
    }

    /// Like [`CroppedShape::try_from_cells`] for sets known to be non-empty.
    pub(crate) fn from_cells<I>(cells: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        Self::try_from_cells(cells).expect("structure contains the seed")
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn origin(&self) -> (usize, usize) {
        self.origin
    }

    pub fn cell_count(&self) -> usize {
        self.cells.iter().filter(|&&c| c).count()
    }

    pub fn is_occupied(&self, x: usize, y: usize) -> bool {
        x < self.width && y < self.height && self.cells[y * self.width + x]
    }

    pub fn bitmap(&self) -> &[bool] {
        &self.cells
    }

    /// Same occupancy, ignoring where the box sat in its grid.
    pub fn same_shape(&self, other: &CroppedShape) -> bool {
        self.width == other.width && self.height == other.height && self.cells == other.cells
    }

    /// Occupied `(x, y)` offsets in row-major order.
    pub fn occupied(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.cells
            .iter()
            .enumerate()
            .filter(|(_, &c)| c)
            .map(|(i, _)| (i % self.width, i / self.width))
    }

    /// Quarter turn clockwise.
    pub fn rotate_cw(&self) -> CroppedShape {
        let (w, h) = (self.height, self.width);
        let mut cells = vec![false; w * h];
        for (x, y) in self.occupied() {
            let (nx, ny) = (self.height - 1 - y, x);
            cells[ny * w + nx] = true;
        }
        CroppedShape {
            width: w,
            height: h,
            cells,
            origin: (0, 0),
        }
    }

    /// Mirror image across the vertical axis.
    pub fn mirror(&self) -> CroppedShape {
        let mut cells = vec![false; self.cells.len()];
        for (x, y) in self.occupied() {
            cells[y * self.width + (self.width - 1 - x)] = true;
        }
        CroppedShape {
            cells,
            origin: (0, 0),
            ..*self
        }
    }

    /// `#` for occupied, `.` for empty, one line per row.
    pub fn to_ascii(&self) -> String {
        let mut s = String::with_capacity((self.width + 1) * self.height);
        for y in 0..self.height {
            for x in 0..self.width {
                s.push(if self.is_occupied(x, y) { '#' } else { '.' });
            }
            s.push('\n');
        }
        s
    }

    /// Parses the [`CroppedShape::to_ascii`] format. Surrounding empty rows and
    /// columns are cropped away.
    pub fn parse_ascii(text: &str) -> Result<Self> {
        let mut cells = Vec::new();
        for (row, line) in text.lines().map(str::trim_end).enumerate() {
            for (col, ch) in line.chars().enumerate() {
                match ch {
                    '#' => cells.push((row, col)),
                    '.' | ' ' => {}
                    other => return invalid(format!("unexpected {other:?} in shape text")),
                }
            }
        }
        let mut shape = Self::try_from_cells(cells)?;
        shape.origin = (0, 0);
        Ok(shape)
    }
}

impl fmt::Display for CroppedShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_ascii())
    }
}

pub fn crop(grid: &AssemblyGrid) -> Result<CroppedShape> {
    CroppedShape::try_from_cells(grid.occupied().map(|(r, c, _)| (r, c)))
}

/// Hash of the occupancy pattern: width and height bytes, then the `(x, y)`
/// byte pair of every occupied cell in row-major order.
pub fn shape_hash(shape: &CroppedShape) -> Result<ShapeHash> {
    if shape.width > 255 || shape.height > 255 {
        return invalid(format!(
            "{}x{} shape does not fit byte coordinates",
            shape.width, shape.height
        ));
    }
    let mut h = OneAtATime::new();
    h.add(shape.width as u8);
    h.add(shape.height as u8);
    for (x, y) in shape.occupied() {
        h.add(x as u8);
        h.add(y as u8);
    }
    Ok(ShapeHash(h.finish()))
}

/// [`shape_hash`] straight from `(row, col)` cells, without building a bitmap.
/// Sorts `cells` in place.
pub fn hash_sorted_cells(cells: &mut [(u8, u8)]) -> ShapeHash {
    cells.sort_unstable();
    let top = cells[0].0;
    let bottom = cells[cells.len() - 1].0;
    let (mut left, mut right) = (u8::MAX, 0u8);
    for &(_, c) in cells.iter() {
        left = left.min(c);
        right = right.max(c);
    }
    let mut h = OneAtATime::new();
    h.add(right - left + 1);
    h.add(bottom - top + 1);
    for &(r, c) in cells.iter() {
        h.add(c - left);
        h.add(r - top);
    }
    ShapeHash(h.finish())
}

/// Hash shared by all four rotations of a shape: the four plain hashes,
/// sorted ascending, each fed little-endian into a fresh hash.
pub fn rotation_invariant_hash(shape: &CroppedShape) -> ShapeHash {
    let mut hashes = [0u32; 4];
    let mut current = shape.clone();
    for h in hashes.iter_mut() {
        *h = shape_hash(&current).expect("rotations keep the bounding box size").0;
        current = current.rotate_cw();
    }
    hashes.sort_unstable();
    let mut bytes = [0u8; 16];
    for (chunk, h) in bytes.chunks_exact_mut(4).zip(hashes) {
        chunk.copy_from_slice(&h.to_le_bytes());
    }
    ShapeHash(oat_hash(&bytes))
}

/// Number of grid positions whose empty/occupied status differs.
pub fn shapediff(a: &AssemblyGrid, b: &AssemblyGrid) -> Result<usize> {
    if a.dim() != b.dim() {
        return invalid(format!("grid dimensions differ: {} vs {}", a.dim(), b.dim()));
    }
    let d = a.dim();
    Ok((0..d * d)
        .filter(|&i| a.is_occupied(i / d, i % d) != b.is_occupied(i / d, i % d))
        .count())
}

/// `1 - shapediff / d^2`.
pub fn shapesim(a: &AssemblyGrid, b: &AssemblyGrid) -> Result<f64> {
    let diff = shapediff(a, b)?;
    let d = a.dim() as f64;
    Ok(1.0 - diff as f64 / (d * d))
}

/// Probability of at least one collision among 32-bit hashes:
/// `1 - prod_{i=0}^{n} (1 - i / 2^32)`.
pub fn collision_probability(n: u64) -> f64 {
    let inv = 2f64.powi(-32);
    let log: f64 = (1..=n).map(|i| (-(i as f64) * inv).ln_1p()).sum();
    -log.exp_m1()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::Cell;

    fn shape(text: &str) -> CroppedShape {
        CroppedShape::parse_ascii(text).unwrap()
    }

    fn grid_with(dim: usize, cells: &[(usize, usize)]) -> AssemblyGrid {
        let mut g = AssemblyGrid::empty(dim);
        for &(r, c) in cells {
            g.set(r, c, Some(Cell { tile: 0, orientation: 0 }));
        }
        g
    }

    #[test]
    fn crop_single_seed() {
        let g = grid_with(19, &[(9, 9)]);
        let s = crop(&g).unwrap();
        assert_eq!((s.width(), s.height(), s.cell_count()), (1, 1, 1));
        assert_eq!(s.origin(), (9, 9));
        assert!(crop(&AssemblyGrid::empty(19)).is_err());
    }

    #[test]
    fn crop_vertical_dimer() {
        let s = crop(&grid_with(19, &[(8, 9), (9, 9)])).unwrap();
        assert_eq!((s.width(), s.height()), (1, 2));
        assert_eq!(s.to_ascii(), "#\n#\n");
    }

    #[test]
    fn one_by_one_golden() {
        // bytes [1, 1, 0, 0] through the reference routine
        assert_eq!(shape_hash(&shape("#")).unwrap(), ShapeHash(0x3a9b_e4cf));
    }

    #[test]
    fn translation_invariant() {
        let a = crop(&grid_with(19, &[(3, 3), (3, 4), (4, 4)])).unwrap();
        let b = crop(&grid_with(19, &[(10, 1), (10, 2), (11, 2)])).unwrap();
        assert_eq!(shape_hash(&a).unwrap(), shape_hash(&b).unwrap());
    }

    #[test]
    fn plain_hash_sees_rotation() {
        let l = shape("#.\n##\n");
        assert_eq!(shape_hash(&l).unwrap(), ShapeHash(0x4fe2_c908));
        assert_ne!(shape_hash(&l).unwrap(), shape_hash(&l.rotate_cw()).unwrap());
    }

    #[test]
    fn sorted_cells_match_bitmap_hash() {
        let mut cells = vec![(5u8, 7u8), (4, 6), (5, 6), (6, 6)];
        let s = CroppedShape::from_cells(cells.iter().map(|&(r, c)| (r as usize, c as usize)));
        assert_eq!(hash_sorted_cells(&mut cells), shape_hash(&s).unwrap());
    }

    #[test]
    fn rotation_invariant_orbits() {
        let l = shape("#..\n###\n");
        let h = rotation_invariant_hash(&l);
        let mut r = l.clone();
        for _ in 0..3 {
            r = r.rotate_cw();
            assert_eq!(rotation_invariant_hash(&r), h);
        }
        assert_eq!(r.rotate_cw().bitmap(), l.bitmap());
    }

    #[test]
    fn square_rotation_invariant_is_hash_of_four_equal_subhashes() {
        let sq = shape("##\n##\n");
        let sub = shape_hash(&sq).unwrap().0.to_le_bytes();
        let bytes: Vec<u8> = sub.iter().copied().cycle().take(16).collect();
        assert_eq!(rotation_invariant_hash(&sq), ShapeHash(oat_hash(&bytes)));
    }

    #[test]
    fn reflections_are_distinguished() {
        // The L tetromino is chiral: its mirror image is no rotation of it.
        let l = shape("#.\n#.\n##\n");
        let j = l.mirror();
        assert_eq!(j.to_ascii(), ".#\n.#\n##\n");
        assert_ne!(rotation_invariant_hash(&l), rotation_invariant_hash(&j));
        // The L tromino is not chiral, so its mirror is one of its rotations.
        let tromino = shape("#.\n##\n");
        assert_eq!(
            rotation_invariant_hash(&tromino),
            rotation_invariant_hash(&tromino.mirror())
        );
    }

    #[test]
    fn oversized_shapes_rejected() {
        let wide = CroppedShape::try_from_cells([(0, 0), (0, 300)]).unwrap();
        assert!(shape_hash(&wide).is_err());
    }

    #[test]
    fn ascii_round_trip_and_errors() {
        let s = shape("..\n.#\n##\n\n");
        assert_eq!(s.to_ascii(), ".#\n##\n");
        assert_eq!(CroppedShape::parse_ascii(&s.to_ascii()).unwrap(), s);
        assert!(CroppedShape::parse_ascii("..\n..").is_err());
        assert!(CroppedShape::parse_ascii("#x").is_err());
    }

    #[test]
    fn shapediff_examples() {
        let a = grid_with(19, &[(9, 9)]);
        let b = grid_with(19, &[(9, 9), (8, 9)]);
        assert_eq!(shapediff(&a, &a).unwrap(), 0);
        assert_eq!(shapesim(&a, &a).unwrap(), 1.0);
        assert_eq!(shapediff(&a, &b).unwrap(), 1);
        assert!((shapesim(&a, &b).unwrap() - (1.0 - 1.0 / 361.0)).abs() < 1e-15);
        assert!(shapediff(&a, &grid_with(21, &[])).is_err());
    }

    #[test]
    fn collision_probability_values() {
        assert_eq!(collision_probability(0), 0.0);
        // Terms i = 1 and i = 2: 1 - (1 - 2^-32)(1 - 2^-31) = 3 * 2^-32 - 2^-63.
        let two = 3.0 * 2f64.powi(-32) - 2f64.powi(-63);
        assert!((collision_probability(2) - two).abs() < 1e-24);
        // Brute-force product in extended steps.
        let brute = 1.0 - (0..=1000u64).fold(1.0f64, |p, i| p * (1.0 - i as f64 * 2f64.powi(-32)));
        let p = collision_probability(1000);
        assert!((p - brute).abs() < 1e-12);
        assert!((p - 1.1653e-4).abs() < 1e-7);
    }
}
