//! Seeded randomness shared by every stochastic component.
//!
//! All sampling goes through ChaCha8 seeded with `seed_from_u64`. Index
//! draws use `u64` ranges only, so a given seed yields the same stream on
//! 32- and 64-bit targets.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub(crate) type SeededRng = ChaCha8Rng;

pub(crate) fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent seed for substream `stream` of `seed` (SplitMix64 finalizer).
pub(crate) fn derive(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Uniform index in `0..n`. `n` must be nonzero.
pub(crate) fn index(rng: &mut SeededRng, n: usize) -> usize {
    rng.gen_range(0..n as u64) as usize
}

pub(crate) fn shuffle<T>(rng: &mut SeededRng, items: &mut [T]) {
    for i in (1..items.len()).rev() {
        let j = index(rng, i + 1);
        items.swap(i, j);
    }
}

/// Draws an index proportionally to `weights`, whose sum is `total`.
pub(crate) fn weighted(rng: &mut SeededRng, weights: &[f64], total: f64) -> usize {
    let mut u = rng.gen::<f64>() * total;
    for (i, &w) in weights.iter().enumerate() {
        if u < w {
            return i;
        }
        u -= w;
    }
    // u landed in the rounding slack past the last bucket
    weights
        .iter()
        .rposition(|&w| w > 0.0)
        .unwrap_or(weights.len() - 1)
}
