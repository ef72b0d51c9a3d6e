//! Variation and selection operators on bitstring genomes.

use rand::distributions::Distribution;
use rand::seq::index;
use rand::Rng;
use rand_distr::Poisson;

use crate::error::{invalid, Result};
use crate::genome::Genome;

/// One draw from a Poisson distribution with mean `lambda`.
pub fn poisson_sample<R: Rng + ?Sized>(lambda: f64, rng: &mut R) -> Result<u64> {
    Ok(FlipCount::new(lambda)?.sample(rng))
}

/// Reusable Poisson sampler for the number of flips per genome.
#[derive(Clone, Copy, Debug)]
pub struct FlipCount {
    lambda: f64,
    dist: Option<Poisson<f64>>,
}

impl FlipCount {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return invalid(format!("mutation mean must be finite and >= 0, got {lambda}"));
        }
        let dist = if lambda > 0.0 {
            Some(Poisson::new(lambda).expect("positive finite mean"))
        } else {
            None
        };
        Ok(FlipCount { lambda, dist })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        match &self.dist {
            Some(d) => d.sample(rng) as u64,
            None => 0,
        }
    }
}

/// Flips `min(k, len)` distinct uniformly chosen bits, `k ~ Poisson(lambda)`.
/// Returns the number of bits flipped.
pub fn mutate_in_place<R: Rng + ?Sized>(genome: &mut Genome, flips: &FlipCount, rng: &mut R) -> usize {
    let len = genome.len();
    let k = (flips.sample(rng) as usize).min(len);
    match k {
        0 => {}
        1 => genome.flip(rng.gen_range(0..len)),
        _ => {
            for i in index::sample(rng, len, k) {
                genome.flip(i);
            }
        }
    }
    k
}

pub fn mutate<R: Rng + ?Sized>(genome: &Genome, lambda: f64, rng: &mut R) -> Result<Genome> {
    let flips = FlipCount::new(lambda)?;
    let mut child = genome.clone();
    mutate_in_place(&mut child, &flips, rng);
    Ok(child)
}

/// Baseline mutation: every bit flips independently with probability
/// `lambda / len`.
pub fn mutate_bitwise<R: Rng + ?Sized>(genome: &mut Genome, lambda: f64, rng: &mut R) -> usize {
    let len = genome.len();
    if len == 0 {
        return 0;
    }
    let p = (lambda / len as f64).clamp(0.0, 1.0);
    let mut flipped = 0;
    for i in 0..len {
        if rng.gen_bool(p) {
            genome.flip(i);
            flipped += 1;
        }
    }
    flipped
}

fn same_length(a: &Genome, b: &Genome) -> Result<()> {
    if a.len() != b.len() {
        return invalid(format!("parent lengths differ: {} vs {}", a.len(), b.len()));
    }
    Ok(())
}

/// Child taking positions `< point` from `a` and the rest from `b`.
pub fn crossover_at(a: &Genome, b: &Genome, point: usize) -> Result<Genome> {
    same_length(a, b)?;
    if point > a.len() {
        return invalid(format!("crossover point {point} beyond length {}", a.len()));
    }
    let mut child = b.clone();
    let bytes = child.bytes_mut();
    let whole = point / 8;
    bytes[..whole].copy_from_slice(&a.as_bytes()[..whole]);
    let rem = point % 8;
    if rem != 0 {
        let mask = 0xFFu8 << (8 - rem);
        bytes[whole] = (a.as_bytes()[whole] & mask) | (bytes[whole] & !mask);
    }
    Ok(child)
}

/// Single-point crossover at a point drawn uniformly from `[0, len)`.
pub fn crossover_single_point<R: Rng + ?Sized>(a: &Genome, b: &Genome, rng: &mut R) -> Result<Genome> {
    same_length(a, b)?;
    if a.is_empty() {
        return Ok(a.clone());
    }
    crossover_at(a, b, rng.gen_range(0..a.len()))
}

/// Each bit from `a` or `b` with probability one half.
pub fn crossover_uniform<R: Rng + ?Sized>(a: &Genome, b: &Genome, rng: &mut R) -> Result<Genome> {
    same_length(a, b)?;
    let mut child = a.clone();
    let bytes = child.bytes_mut();
    for (i, byte) in bytes.iter_mut().enumerate() {
        let pick: u8 = rng.gen();
        *byte = (a.as_bytes()[i] & pick) | (b.as_bytes()[i] & !pick);
    }
    // Both parents have zero padding, so the child does too.
    Ok(child)
}

/// Cumulative fitness table for repeated roulette-wheel draws.
#[derive(Clone, Debug, Default)]
pub struct RouletteWheel {
    cumulative: Vec<f64>,
}

impl RouletteWheel {
    pub fn new(fitness: &[f64]) -> Result<Self> {
        let mut wheel = RouletteWheel::default();
        wheel.reset(fitness)?;
        Ok(wheel)
    }

    /// Rebuilds the table in place.
    pub fn reset(&mut self, fitness: &[f64]) -> Result<()> {
        if fitness.is_empty() {
            return invalid("cannot select from an empty population");
        }
        self.cumulative.clear();
        let mut sum = 0.0;
        for &f in fitness {
            if !(f >= 0.0 && f.is_finite()) {
                return invalid(format!("fitness must be finite and >= 0, got {f}"));
            }
            sum += f;
            self.cumulative.push(sum);
        }
        Ok(())
    }

    pub fn total(&self) -> f64 {
        *self.cumulative.last().unwrap_or(&0.0)
    }

    pub fn len(&self) -> usize {
        self.cumulative.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cumulative.is_empty()
    }

    /// First index whose partial sum reaches `cutoff`.
    #[inline]
    pub fn index_for(&self, cutoff: f64) -> usize {
        self.cumulative
            .partition_point(|&c| c < cutoff)
            .min(self.cumulative.len() - 1)
    }

    /// Draws an index with probability proportional to its fitness, or
    /// uniformly when all fitnesses are zero.
    #[inline]
    pub fn spin<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let total = self.total();
        if total > 0.0 {
            // Cutoff in (0, total]: a zero-width slot can never be hit.
            let u = total - rng.gen::<f64>() * total;
            self.index_for(u)
        } else {
            rng.gen_range(0..self.cumulative.len())
        }
    }
}

/// First index `i` with `f[0] + ... + f[i] >= cutoff`.
pub fn roulette_index(fitness: &[f64], cutoff: f64) -> Result<usize> {
    Ok(RouletteWheel::new(fitness)?.index_for(cutoff))
}

pub fn roulette_select<R: Rng + ?Sized>(fitness: &[f64], rng: &mut R) -> Result<usize> {
    Ok(RouletteWheel::new(fitness)?.spin(rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stream::rng_for;
    use proptest::prelude::*;

    #[test]
    fn zero_mean_never_flips() {
        let mut rng = rng_for(&[1]);
        let g = Genome::from_u64(0xDEAD_BEEF, 32).unwrap();
        for _ in 0..1000 {
            assert_eq!(poisson_sample(0.0, &mut rng).unwrap(), 0);
            assert_eq!(mutate(&g, 0.0, &mut rng).unwrap(), g);
        }
        assert!(poisson_sample(-1.0, &mut rng).is_err());
        assert!(poisson_sample(f64::NAN, &mut rng).is_err());
    }

    #[test]
    fn flip_count_is_clamped_to_length() {
        let mut rng = rng_for(&[2]);
        let flips = FlipCount::new(50.0).unwrap();
        let mut g = Genome::zeros(8);
        for _ in 0..100 {
            let before = g.clone();
            let k = mutate_in_place(&mut g, &flips, &mut rng);
            assert!(k <= 8);
            assert_eq!(before.hamming_distance(&g).unwrap(), k);
        }
    }

    #[test]
    fn appendix_roulette_example() {
        assert_eq!(roulette_index(&[2.0, 3.0, 4.0, 1.0], 10.0).unwrap(), 3);
        assert_eq!(roulette_index(&[2.0, 3.0, 4.0, 1.0], 2.0).unwrap(), 0);
        assert_eq!(roulette_index(&[2.0, 3.0, 4.0, 1.0], 2.5).unwrap(), 1);
        assert_eq!(roulette_index(&[0.0, 3.0], 0.0).unwrap(), 0);
    }

    #[test]
    fn roulette_skips_zero_fitness() {
        let mut rng = rng_for(&[3]);
        for _ in 0..10_000 {
            assert_eq!(roulette_select(&[1.0, 0.0, 0.0], &mut rng).unwrap(), 0);
            assert_ne!(roulette_select(&[0.0, 2.0, 0.0, 1.0], &mut rng).unwrap() % 2, 0);
        }
    }

    #[test]
    fn roulette_falls_back_to_uniform() {
        let mut rng = rng_for(&[4]);
        let mut seen = [0; 3];
        for _ in 0..3000 {
            seen[roulette_select(&[0.0; 3], &mut rng).unwrap()] += 1;
        }
        assert!(seen.iter().all(|&c| c > 800));
        assert!(roulette_select(&[], &mut rng).is_err());
        assert!(roulette_select(&[1.0, -1.0], &mut rng).is_err());
    }

    #[test]
    fn crossover_boundaries() {
        let a = Genome::zeros(13);
        let b = Genome::ones(13);
        assert_eq!(crossover_at(&a, &b, 0).unwrap(), b);
        assert_eq!(crossover_at(&a, &b, 13).unwrap(), a);
        let c = crossover_at(&a, &b, 10).unwrap();
        assert_eq!(c.to_u64(), Some(0b0000000000111));
        assert!(crossover_at(&a, &Genome::zeros(12), 3).is_err());
        let mut rng = rng_for(&[5]);
        assert!(crossover_uniform(&a, &Genome::zeros(12), &mut rng).is_err());
    }

    proptest! {
        #[test]
        fn mutation_distance_equals_flip_count(bits in proptest::collection::vec(any::<bool>(), 1..100), lambda in 0.0f64..20.0, seed: u64) {
            let mut rng = rng_for(&[seed]);
            let mut g = Genome::from_bits(&bits);
            let before = g.clone();
            let k = mutate_in_place(&mut g, &FlipCount::new(lambda).unwrap(), &mut rng);
            prop_assert_eq!(before.hamming_distance(&g).unwrap(), k);
            prop_assert_eq!(g.len(), bits.len());
        }

        #[test]
        fn crossover_children_keep_positions(a in proptest::collection::vec(any::<bool>(), 1..70), seed: u64) {
            let b: Vec<bool> = a.iter().enumerate().map(|(i, &x)| x ^ (i % 3 == 0)).collect();
            let (ga, gb) = (Genome::from_bits(&a), Genome::from_bits(&b));
            let mut rng = rng_for(&[seed]);
            for child in [
                crossover_single_point(&ga, &gb, &mut rng).unwrap(),
                crossover_uniform(&ga, &gb, &mut rng).unwrap(),
            ] {
                prop_assert_eq!(child.len(), a.len());
                for i in 0..a.len() {
                    prop_assert!(child.get(i) == a[i] || child.get(i) == b[i]);
                }
                prop_assert_eq!(child.as_bytes().len(), ga.as_bytes().len());
            }
            prop_assert_eq!(crossover_single_point(&ga, &ga, &mut rng).unwrap(), ga.clone());
            prop_assert_eq!(crossover_uniform(&ga, &ga, &mut rng).unwrap(), ga);
        }

        #[test]
        fn single_point_is_a_prefix_split(a in proptest::collection::vec(any::<bool>(), 1..70), p in 0usize..70) {
            let p = p.min(a.len());
            let ga = Genome::from_bits(&a);
            let gb = ga.complement();
            let c = crossover_at(&ga, &gb, p).unwrap();
            for i in 0..a.len() {
                prop_assert_eq!(c.get(i), if i < p { a[i] } else { !a[i] });
            }
        }
    }
}
