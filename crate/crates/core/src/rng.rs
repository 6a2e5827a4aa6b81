//! Reproducible randomness.
//!
//! Every random constraint is drawn from its own ChaCha8 stream: the key is
//! derived from the instance seed and the stream number is the constraint
//! index. Constraint `i` therefore looks the same no matter how many
//! constraints the instance has. Bounded integers use plain rejection
//! sampling on `next_u64` so the mapping from stream to values never changes
//! with library upgrades.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 finalizer (Stafford "Mix13").
#[inline]
pub fn fmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Combines words into one seed: `h ← fmix64(h + GOLDEN ⊕ w)` starting from
/// `h = 0`, applied left to right.
pub fn mix(words: &[u64]) -> u64 {
    words
        .iter()
        .fold(0u64, |h, &w| fmix64(h.wrapping_add(GOLDEN) ^ w))
}

/// Randomness for one item (constraint, trial) of a seeded family.
pub struct Stream {
    rng: ChaCha8Rng,
}

impl Stream {
    pub fn new(seed: u64, index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        Stream { rng }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform in `0..bound`.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0);
        let zone = u64::MAX - u64::MAX % bound;
        loop {
            let x = self.rng.next_u64();
            if x < zone {
                return x % bound;
            }
        }
    }

    pub fn coin(&mut self) -> bool {
        self.rng.next_u64() >> 63 == 1
    }

    /// Uniformly random ordered tuple of `k` distinct values from `0..n`.
    /// Equivalent to a uniform `k`-subset followed by a uniform ordering.
    pub fn distinct_tuple(&mut self, n: usize, k: usize) -> Vec<usize> {
        debug_assert!(k <= n);
        let mut chosen: Vec<usize> = Vec::with_capacity(k);
        let mut sorted: Vec<usize> = Vec::with_capacity(k);
        for i in 0..k {
            let mut r = self.below((n - i) as u64) as usize;
            // r-th value not yet taken
            for &s in &sorted {
                if r >= s {
                    r += 1;
                } else {
                    break;
                }
            }
            chosen.push(r);
            let pos = sorted.partition_point(|&s| s < r);
            sorted.insert(pos, r);
        }
        chosen
    }

    /// Index drawn with the given integer weights summing to `total`.
    pub fn weighted(&mut self, weights: &[u64], total: u64) -> usize {
        let mut u = self.below(total);
        for (i, &w) in weights.iter().enumerate() {
            if u < w {
                return i;
            }
            u -= w;
        }
        unreachable!("weights sum to total")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_deterministic_and_distinct() {
        let a: Vec<u64> = {
            let mut s = Stream::new(7, 3);
            (0..4).map(|_| s.next_u64()).collect()
        };
        let b: Vec<u64> = {
            let mut s = Stream::new(7, 3);
            (0..4).map(|_| s.next_u64()).collect()
        };
        let c: Vec<u64> = {
            let mut s = Stream::new(7, 4);
            (0..4).map(|_| s.next_u64()).collect()
        };
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn tuples_are_distinct_and_in_range() {
        let mut s = Stream::new(1, 0);
        for _ in 0..1000 {
            let t = s.distinct_tuple(6, 4);
            assert!(t.iter().all(|&v| v < 6));
            let mut u = t.clone();
            u.sort();
            u.dedup();
            assert_eq!(u.len(), 4);
        }
    }

    #[test]
    fn ordered_pairs_are_uniform() {
        // 3*2 = 6 ordered pairs from 0..3, 60000 draws
        let mut counts = [[0u32; 3]; 3];
        let mut s = Stream::new(99, 0);
        for _ in 0..60000 {
            let t = s.distinct_tuple(3, 2);
            counts[t[0]][t[1]] += 1;
        }
        for (i, row) in counts.iter().enumerate() {
            for (j, &c) in row.iter().enumerate() {
                if i != j {
                    assert!((9400..10600).contains(&c), "{} {} {}", i, j, c);
                }
            }
        }
    }

    #[test]
    fn mix_depends_on_every_word() {
        let base = mix(&[1, 2, 3]);
        assert_ne!(base, mix(&[1, 2, 4]));
        assert_ne!(base, mix(&[2, 2, 3]));
        assert_ne!(base, mix(&[1, 3, 2]));
        assert_eq!(base, mix(&[1, 2, 3]));
    }
}
