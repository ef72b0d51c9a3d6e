use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::shape::{CroppedShape, ShapeHash};
use crate::assembly::{ClassKind, Classification};

/// Genome counts per outcome class.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassTallies {
    pub deterministic: u64,
    pub trivial_nondet: u64,
    pub steric_nondet: u64,
    pub unbound: u64,
}

impl ClassTallies {
    pub fn total(&self) -> u64 {
        self.deterministic + self.trivial_nondet + self.steric_nondet + self.unbound
    }

    pub fn get(&self, kind: ClassKind) -> u64 {
        match kind {
            ClassKind::Deterministic => self.deterministic,
            ClassKind::TrivialNondet => self.trivial_nondet,
            ClassKind::StericNondet => self.steric_nondet,
            ClassKind::Unbound => self.unbound,
        }
    }

    fn bump(&mut self, kind: ClassKind) {
        match kind {
            ClassKind::Deterministic => self.deterministic += 1,
            ClassKind::TrivialNondet => self.trivial_nondet += 1,
            ClassKind::StericNondet => self.steric_nondet += 1,
            ClassKind::Unbound => self.unbound += 1,
        }
    }

    fn add(&mut self, other: &ClassTallies) {
        self.deterministic += other.deterministic;
        self.trivial_nondet += other.trivial_nondet;
        self.steric_nondet += other.steric_nondet;
        self.unbound += other.unbound;
    }
}

/// Everything recorded for one shape hash.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShapeRecord {
    pub hash: ShapeHash,
    pub shape: CroppedShape,
    pub det_count: u64,
    pub steric_count: u64,
    /// Lowest enumeration index of a deterministic genome with this shape.
    pub first_deterministic: Option<u64>,
    /// Lowest enumeration index of a sterically non-deterministic genome
    /// whose predominant shape this is.
    pub first_steric: Option<u64>,
}

impl ShapeRecord {
    /// Representative genome index: deterministic genomes take priority.
    pub fn representative(&self) -> u64 {
        self.first_deterministic
            .or(self.first_steric)
            .expect("a record holds at least one genome")
    }

    fn absorb(&mut self, other: &ShapeRecord) -> bool {
        let collided = !self.shape.same_shape(&other.shape);
        self.det_count += other.det_count;
        self.steric_count += other.steric_count;
        self.first_deterministic = min_opt(self.first_deterministic, other.first_deterministic);
        self.first_steric = min_opt(self.first_steric, other.first_steric);
        collided
    }
}

fn min_opt(a: Option<u64>, b: Option<u64>) -> Option<u64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

/// Per-shape counts over a set of classified genomes.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Histogram {
    pub shapes: BTreeMap<ShapeHash, ShapeRecord>,
    pub tallies: ClassTallies,
    /// Inserts whose hash matched a stored record with a different bitmap.
    pub collisions: u64,
}

impl Histogram {
    pub fn new() -> Self {
        Self::default()
    }

    /// Files the classification of the genome at enumeration `index`.
    pub fn record(&mut self, index: u64, class: &Classification) {
        self.tallies.bump(class.kind());
        let (hash, shape) = match class {
            Classification::Deterministic { hash, shape } => (*hash, shape),
            Classification::StericNondet { predominant, shape } => (*predominant, shape),
            _ => return,
        };
        let det = class.is_deterministic();
        let incoming = ShapeRecord {
            hash,
            shape: shape.clone(),
            det_count: det as u64,
            steric_count: !det as u64,
            first_deterministic: det.then_some(index),
            first_steric: (!det).then_some(index),
        };
        self.insert(incoming);
    }

    fn insert(&mut self, incoming: ShapeRecord) {
        match self.shapes.get_mut(&incoming.hash) {
            Some(existing) => {
                // Keep the bitmap belonging to the lower representative so the
                // result does not depend on merge order.
                if incoming.representative() < existing.representative() {
                    let mut replacement = incoming;
                    if replacement.absorb(existing) {
                        self.collisions += 1;
                    }
                    *existing = replacement;
                } else if existing.absorb(&incoming) {
                    self.collisions += 1;
                }
            }
            None => {
                self.shapes.insert(incoming.hash, incoming);
            }
        }
    }

    /// Adds `other` into `self`. Merging is commutative and associative.
    pub fn merge(&mut self, other: &Histogram) {
        self.tallies.add(&other.tallies);
        self.collisions += other.collisions;
        for record in other.shapes.values() {
            self.insert(record.clone());
        }
    }

    pub fn total(&self) -> u64 {
        self.tallies.total()
    }

    /// Records with at least one deterministic genome.
    pub fn deterministic_shapes(&self) -> impl Iterator<Item = &ShapeRecord> + '_ {
        self.shapes.values().filter(|r| r.det_count > 0)
    }

    pub fn deterministic_shape_count(&self) -> usize {
        self.deterministic_shapes().count()
    }

    /// Records holding both deterministic and sterically non-deterministic genomes.
    pub fn mixed_shapes(&self) -> impl Iterator<Item = &ShapeRecord> + '_ {
        self.shapes
            .values()
            .filter(|r| r.det_count > 0 && r.steric_count > 0)
    }

    /// Deterministic shapes, most frequent first; ties by hash.
    pub fn by_frequency(&self) -> Vec<&ShapeRecord> {
        let mut v: Vec<_> = self.deterministic_shapes().collect();
        v.sort_by(|a, b| b.det_count.cmp(&a.det_count).then(a.hash.cmp(&b.hash)));
        v
    }

    /// Internal consistency: per-shape counts agree with the class tallies.
    pub fn is_consistent(&self) -> bool {
        let det: u64 = self.shapes.values().map(|r| r.det_count).sum();
        let steric: u64 = self.shapes.values().map(|r| r.steric_count).sum();
        det == self.tallies.deterministic && steric == self.tallies.steric_nondet
    }
}
