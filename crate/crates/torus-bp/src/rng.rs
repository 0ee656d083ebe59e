//! Counter-based deterministic randomness.
//!
//! Every random draw in this crate is a pure function of a 64-bit key built
//! by folding indices (probe, trial, node, ...) into a seed with the
//! SplitMix64 finalizer. There is no generator state, so trials can run in
//! any order, on any number of threads, and on any platform while producing
//! bit-identical output.

/// Identifier recorded in result metadata so output files are self-describing.
pub const GENERATOR_ID: &str = "splitmix64-counter/v1";

/// SplitMix64 finalizer: a full-avalanche 64-bit mix.
#[inline]
pub fn mix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
    x ^ (x >> 31)
}

/// Fold `b` into `a`. Not commutative: `mix2(a, b) != mix2(b, a)` in general,
/// which is what keeps (probe, trial) keys distinct from (trial, probe).
#[inline]
pub fn mix2(a: u64, b: u64) -> u64 {
    mix64(mix64(a) ^ b)
}

#[inline]
pub fn mix3(a: u64, b: u64, c: u64) -> u64 {
    mix2(mix2(a, b), c)
}

/// Uniform u64 for counter `i` under `key`.
#[inline]
pub fn uniform(key: u64, i: u64) -> u64 {
    mix2(key, i)
}

/// Threshold for "uniform u64 < threshold ⟺ Bernoulli(p) success".
///
/// Exact at the endpoints: p ≤ 0 never fires, p ≥ 1 always fires.
#[inline]
pub fn bernoulli_threshold(p: f64) -> BernoulliThreshold {
    if p <= 0.0 {
        BernoulliThreshold::Never
    } else if p >= 1.0 {
        BernoulliThreshold::Always
    } else {
        BernoulliThreshold::Below((p * 18_446_744_073_709_551_616.0) as u64)
    }
}

#[derive(Clone, Copy, Debug)]
pub enum BernoulliThreshold {
    Never,
    Always,
    Below(u64),
}

impl BernoulliThreshold {
    #[inline]
    pub fn fires(self, u: u64) -> bool {
        match self {
            BernoulliThreshold::Never => false,
            BernoulliThreshold::Always => true,
            BernoulliThreshold::Below(t) => u < t,
        }
    }
}
