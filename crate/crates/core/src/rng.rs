//! Counter-based random streams: one independent ChaCha8 stream per sample.
//!
//! A stream is addressed by `(seed, index)`, so sample `i` of an ensemble is a pure
//! function of the seed and `i` no matter which thread produces it or in what order.

use std::f64::consts::PI;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// The stream for sample `index` under `seed`.
pub fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Uniform on `(0, 1]` from the top 53 bits.
fn open_unit(bits: u64) -> f64 {
    ((bits >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Two independent standard normals from exactly two 64-bit words (Box–Muller).
///
/// The fixed consumption keeps every mode at a known position in its stream.
pub fn normal_pair<R: RngCore>(rng: &mut R) -> (f64, f64) {
    let u1 = open_unit(rng.next_u64());
    let u2 = open_unit(rng.next_u64());
    let r = (-2.0 * u1.ln()).sqrt();
    let (s, c) = (2.0 * PI * u2).sin_cos();
    (r * c, r * s)
}
