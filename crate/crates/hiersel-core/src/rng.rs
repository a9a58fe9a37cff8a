//! Deterministic random streams.
//!
//! Every stochastic operation in this workspace takes a 64-bit seed and builds
//! its own [`ChaCha12Rng`] stream from it, so results are bit-identical across
//! platforms, runs, and worker counts. Parallel work units derive independent
//! seeds with [`mix_seed`] instead of sharing a stream.

pub use rand_chacha::ChaCha12Rng;
use rand_core::{RngCore, SeedableRng};

/// Builds the canonical random stream for a seed.
pub fn stream(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}

/// Derives an independent per-unit seed from a master seed and a unit index.
///
/// This is the SplitMix64 finalizer applied to `master + index·golden`, the
/// usual way to fan one seed out into decorrelated streams. It is a bijection
/// of the mixed state, so distinct `(master, index)` pairs collide no more
/// often than raw 64-bit values do.
pub fn mix_seed(master: u64, index: u64) -> u64 {
    let mut z = master.wrapping_add(index.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// One uniform variate in `[0, 1)` built from the top 53 bits of a `u64` draw.
///
/// Exactly one generator call per invocation; the sampling contract counts on
/// that for reproducibility.
pub fn unit_f64(rng: &mut impl RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}
