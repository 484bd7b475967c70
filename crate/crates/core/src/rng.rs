//! Deterministic pseudo-random numbers.
//!
//! Everything stochastic in the crate — weight init, minibatch shuffling,
//! dropout masks, permutation importance, the synthetic generator — draws
//! from this hand-rolled SplitMix64 stream so that results are bit-identical
//! across platforms and across runs with the same seed. Normal deviates come
//! from the Box–Muller transform, one deviate per pair of uniforms.

/// Golden-ratio increment that drives the SplitMix64 state walk.
const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// A seeded SplitMix64 generator.
///
/// Cloning forks the stream at its current position; use [`Rng::labeled`] to
/// derive independent sub-streams that do not interleave.
#[derive(Debug, Clone)]
pub struct Rng {
    state: u64,
}

impl Rng {
    /// Creates a generator from the given seed.
    pub fn new(seed: u64) -> Self {
        Rng { state: seed }
    }

    /// Derives an independent sub-stream for a named purpose.
    ///
    /// The label is hashed with FNV-1a and xor-folded into the seed, so
    /// `labeled(seed, "shuffle")` and `labeled(seed, "dropout")` never share
    /// draws even though they start from the same user-facing seed.
    pub fn labeled(seed: u64, label: &str) -> Self {
        Rng::new(seed ^ fnv1a(label.as_bytes()))
    }

    /// Next raw 64-bit output.
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GAMMA);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform deviate in `[0, 1)` with 53 bits of precision.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal deviate via Box–Muller.
    ///
    /// Uses the cosine branch only (one normal per two uniforms), and maps
    /// the first uniform to `(0, 1]` so the logarithm is always finite.
    pub fn next_normal(&mut self) -> f64 {
        let u1 = 1.0 - self.next_f64();
        let u2 = self.next_f64();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    /// Uniform index in `[0, n)`. Panics if `n == 0`.
    pub fn next_below(&mut self, n: usize) -> usize {
        assert!(n > 0, "next_below requires a nonempty range");
        (self.next_u64() % n as u64) as usize
    }

    /// In-place Fisher–Yates shuffle.
    pub fn shuffle<T>(&mut self, xs: &mut [T]) {
        for i in (1..xs.len()).rev() {
            let j = self.next_below(i + 1);
            xs.swap(i, j);
        }
    }

    /// Bernoulli draw with success probability `p`.
    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.next_f64() < p
    }
}

/// FNV-1a 64-bit hash, used to decorrelate labeled sub-streams.
fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xCBF2_9CE4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    h
}
