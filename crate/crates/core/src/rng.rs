//! Reproducible random streams.
//!
//! Every random draw in the crate comes from a ChaCha8 generator keyed by a
//! 64-bit seed and a stream index. Different purposes (Rabi disorder,
//! perturbation, two-body amplitudes) use fixed stream indices so that two
//! draws sharing a seed are still independent, and per-realization seeds are
//! derived from a master seed with a SplitMix64 mix.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Stream used for the off-diagonal Rabi disorder of the spin chain.
pub const DISORDER_STREAM: u64 = 0;
/// Stream used for the small perturbation Σ.
pub const PERTURBATION_STREAM: u64 = 1;
/// Stream used for the two-body amplitudes of the TBRI model.
pub const TWO_BODY_STREAM: u64 = 2;

pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// SplitMix64 finalizer.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for realization `index` of an ensemble run keyed by `master`.
pub fn realization_seed(master: u64, index: u64) -> u64 {
    splitmix64(splitmix64(master) ^ index.wrapping_mul(0xD1B5_4A32_D192_ED03))
}

/// Draws from N(0, std²).
pub fn gaussian<R: rand::Rng + ?Sized>(rng: &mut R, std: f64) -> f64 {
    let z: f64 = StandardNormal.sample(rng);
    std * z
}
