//! Deterministic local strategies: the classical reference for CHSH.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{chsh_combination, EngineError};

/// Fixed `±1` outcome for each of the two settings on each side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LocalStrategy {
    /// Outcomes at `A` for settings `A`, `A′`.
    pub alice: [i8; 2],
    /// Outcomes at `B` for settings `B`, `B′`.
    pub bob: [i8; 2],
}

impl LocalStrategy {
    pub const ALWAYS_PLUS: LocalStrategy = LocalStrategy {
        alice: [1, 1],
        bob: [1, 1],
    };

    /// Strategy number `bits` (0..16): bit `k` set means outcome `−1` for
    /// the `k`-th of (A, A′, B, B′).
    pub fn from_bits(bits: u8) -> Self {
        let o = |k: u8| if bits & (1 << k) != 0 { -1 } else { 1 };
        LocalStrategy {
            alice: [o(0), o(1)],
            bob: [o(2), o(3)],
        }
    }

    pub fn chsh(&self) -> f64 {
        let e = |i: usize, j: usize| f64::from(self.alice[i] * self.bob[j]);
        chsh_combination([e(0, 0), e(0, 1), e(1, 0), e(1, 1)])
    }
}

/// Largest `|S|` over every deterministic local strategy.
pub fn exhaustive_lhv_max() -> f64 {
    (0u8..16)
        .map(|b| LocalStrategy::from_bits(b).chsh().abs())
        .fold(0.0, f64::max)
}

/// Largest `|S|` over `samples` random deterministic strategies drawn with
/// a seeded generator.
pub fn lhv_reference_bound(samples: usize, seed: u64) -> Result<f64, EngineError> {
    if samples == 0 {
        return Err(EngineError::NoSamples);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: f64 = 0.0;
    for _ in 0..samples {
        let strategy = LocalStrategy::from_bits(rng.gen_range(0..16));
        best = best.max(strategy.chsh().abs());
    }
    Ok(best)
}
