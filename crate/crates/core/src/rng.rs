//! Counter-based pseudo-random streams.
//!
//! Every random quantity in the crate is addressed, not drawn: a
//! [`TrialRng`] is a pure function `(master_seed, trial_index, counter) ->
//! u64`, so matrix entry `(i, j)` of trial `k` has the same value no matter
//! how many threads are sampling, in what order, or on which platform.
//! Transcendental maps (`ln`, `cos`, `pow`) go through `libm` so the f64
//! outputs are bit-identical across platforms as well.
//!
//! The word function is SplitMix64 evaluated at an arbitrary stream
//! position: `mix64(key + counter * GOLDEN)` where `key` is derived from
//! `(master_seed, trial_index)` by the same finalizer. Distinct trials get
//! distinct Weyl phases, so streams never share state.

/// 2^64 / phi, the SplitMix64 Weyl increment.
const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 finalizer (Stafford variant 13).
#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed pair identifying one trial's random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct SeedSpec {
    pub master_seed: u64,
    pub trial_index: u64,
}

impl SeedSpec {
    pub fn new(master_seed: u64, trial_index: u64) -> Self {
        SeedSpec { master_seed, trial_index }
    }
}

/// Random-access generator for one trial's stream.
#[derive(Debug, Clone, Copy)]
pub struct TrialRng {
    key: u64,
}

impl TrialRng {
    pub fn new(seed: SeedSpec) -> Self {
        let phase = mix64(seed.master_seed ^ GOLDEN);
        let key = mix64(phase.wrapping_add(seed.trial_index.wrapping_mul(GOLDEN)));
        TrialRng { key }
    }

    pub fn from_parts(master_seed: u64, trial_index: u64) -> Self {
        TrialRng::new(SeedSpec::new(master_seed, trial_index))
    }

    /// The raw 64-bit word at stream position `counter`.
    #[inline]
    pub fn word(&self, counter: u64) -> u64 {
        mix64(self.key.wrapping_add(counter.wrapping_mul(GOLDEN)))
    }

    /// Uniform on [0, 1) with 53 bits of precision.
    #[inline]
    pub fn uniform(&self, counter: u64) -> f64 {
        (self.word(counter) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on (0, 1]; safe as a `ln`/`pow` argument.
    #[inline]
    pub fn uniform_open(&self, counter: u64) -> f64 {
        ((self.word(counter) >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Bernoulli(p) at stream position `counter`.
    #[inline]
    pub fn bernoulli(&self, counter: u64, p: f64) -> bool {
        self.uniform(counter) < p
    }

    /// ±1 with equal probability.
    #[inline]
    pub fn rademacher(&self, counter: u64) -> f64 {
        if self.word(counter) >> 63 == 1 {
            1.0
        } else {
            -1.0
        }
    }

    /// Standard normal via Box–Muller; consumes positions `counter` and
    /// `counter + 1`.
    #[inline]
    pub fn gaussian(&self, counter: u64) -> f64 {
        let u1 = self.uniform_open(counter);
        let u2 = self.uniform(counter + 1);
        let r = (-2.0 * libm::log(u1)).sqrt();
        r * libm::cos(2.0 * std::f64::consts::PI * u2)
    }

    /// Uniform on [-1, 1).
    #[inline]
    pub fn symmetric_uniform(&self, counter: u64) -> f64 {
        2.0 * self.uniform(counter) - 1.0
    }
}

/// Convenience stream for consumers that just want a sequence (test
/// vectors, start vectors); wraps a `TrialRng` with a running counter.
#[derive(Debug, Clone)]
pub struct SequentialRng {
    rng: TrialRng,
    next: u64,
}

impl SequentialRng {
    pub fn new(master_seed: u64, trial_index: u64) -> Self {
        SequentialRng { rng: TrialRng::from_parts(master_seed, trial_index), next: 0 }
    }

    #[inline]
    pub fn next_word(&mut self) -> u64 {
        let w = self.rng.word(self.next);
        self.next += 1;
        w
    }

    #[inline]
    pub fn next_uniform(&mut self) -> f64 {
        let u = self.rng.uniform(self.next);
        self.next += 1;
        u
    }

    #[inline]
    pub fn next_gaussian(&mut self) -> f64 {
        let g = self.rng.gaussian(self.next);
        self.next += 2;
        g
    }

    #[inline]
    pub fn next_symmetric_uniform(&mut self) -> f64 {
        let u = self.rng.symmetric_uniform(self.next);
        self.next += 1;
        u
    }
}
