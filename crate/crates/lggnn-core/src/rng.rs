//! Splittable, counter-based randomness.
//!
//! Every operation that consumes randomness takes a `u64` seed and derives
//! independent ChaCha streams from it. Per-pair draws get their own stream so
//! results do not depend on iteration order and pair loops can be
//! parallelized without changing output.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// Stream domains. Pair streams start at a per-operation base so that two
/// operations handed the same seed still draw from disjoint streams.
pub mod domain {
    pub const LATENTS: u64 = 0;
    pub const FEATURES: u64 = 1;
    pub const GCN_INIT: u64 = 2;
    pub const GCN_WEIGHTS: u64 = 3;
    pub const SPLIT: u64 = 4;
    pub const MC_MOMENT: u64 = 5;
    pub const SUBSAMPLE: u64 = 6;

    pub const SAMPLE_PAIR_BASE: u64 = 1 << 40;
    pub const SPLIT_PAIR_BASE: u64 = 2 << 40;
}

/// Factory for named sub-streams of one seed.
#[derive(Debug, Clone, Copy)]
pub struct SeedStreams {
    seed: u64,
}

impl SeedStreams {
    pub fn new(seed: u64) -> Self {
        SeedStreams { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Generator for the given stream domain.
    pub fn stream(&self, domain: u64) -> ChaCha12Rng {
        let mut rng = ChaCha12Rng::seed_from_u64(self.seed);
        rng.set_stream(domain);
        rng
    }

    /// Generator dedicated to the unordered pair `{i, j}`, `i != j`.
    pub fn pair_stream(&self, base: u64, i: usize, j: usize) -> ChaCha12Rng {
        self.stream(base + pair_key(i, j))
    }
}

/// Order-free key for an unordered pair: the upper-triangular linear index
/// keyed by the larger vertex. Fits u64 for any graph this crate can hold.
fn pair_key(i: usize, j: usize) -> u64 {
    let (lo, hi) = if i < j { (i, j) } else { (j, i) };
    (hi as u64) * (hi as u64 - 1) / 2 + lo as u64
}

/// Row-major upper-triangular indexing for all unordered pairs of `[n]`.
#[derive(Debug, Clone, Copy)]
pub struct PairIndexer {
    n: usize,
}

impl PairIndexer {
    pub fn new(n: usize) -> Self {
        PairIndexer { n }
    }

    /// Number of unordered pairs `i < j`.
    pub fn len(&self) -> usize {
        self.n * (self.n - 1) / 2
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Linear index of the pair `(i, j)`, `i != j`; symmetric in its arguments.
    pub fn index(&self, i: usize, j: usize) -> usize {
        let (lo, hi) = if i < j { (i, j) } else { (j, i) };
        debug_assert!(hi < self.n && lo < hi);
        lo * self.n - lo * (lo + 1) / 2 + (hi - lo - 1)
    }

    /// Iterate pairs in linear-index order: `(0,1), (0,2), ..., (n-2,n-1)`.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.n;
        (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
    }
}
