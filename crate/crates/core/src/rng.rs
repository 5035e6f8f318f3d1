//! Deterministic random streams.
//!
//! Every stream is a ChaCha8 generator keyed by SHA-256 over the master seed,
//! a purpose tag and a key (usually a template id). Streams never share state,
//! so per-template work can run in any order or in parallel.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

/// Opens the stream for `(master_seed, purpose, key)`.
pub fn stream(master_seed: u64, purpose: &str, key: &str) -> ChaCha8Rng {
    let mut h = Sha256::new();
    h.update(b"templex/v1");
    h.update(master_seed.to_le_bytes());
    for part in [purpose, key] {
        h.update((part.len() as u64).to_le_bytes());
        h.update(part.as_bytes());
    }
    let digest = h.finalize();
    let mut seed = [0u8; 32];
    seed.copy_from_slice(&digest);
    ChaCha8Rng::from_seed(seed)
}

/// Lazily shuffled `0..n`: yields the prefix of a Fisher-Yates permutation
/// without allocating the whole range.
pub struct ShuffledIndices<R> {
    n: u64,
    next: u64,
    swapped: HashMap<u64, u64>,
    rng: R,
}

impl<R: Rng> ShuffledIndices<R> {
    pub fn new(n: u64, rng: R) -> Self {
        ShuffledIndices {
            n,
            next: 0,
            swapped: HashMap::new(),
            rng,
        }
    }

    pub fn remaining(&self) -> u64 {
        self.n - self.next
    }
}

impl<R: Rng> Iterator for ShuffledIndices<R> {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        if self.next >= self.n {
            return None;
        }
        let i = self.next;
        let j = self.rng.random_range(i..self.n);
        let at_i = *self.swapped.get(&i).unwrap_or(&i);
        let at_j = *self.swapped.get(&j).unwrap_or(&j);
        self.swapped.insert(j, at_i);
        self.swapped.remove(&i);
        self.next += 1;
        Some(at_j)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let r = self.remaining() as usize;
        (r, Some(r))
    }
}

/// Full in-place shuffle of a slice.
pub fn shuffle<T, R: Rng>(items: &mut [T], rng: &mut R) {
    // Drawn as u64 so the sequence matches `ShuffledIndices` on every platform.
    let n = items.len() as u64;
    for i in 0..n {
        let j = rng.random_range(i..n);
        items.swap(i as usize, j as usize);
    }
}
