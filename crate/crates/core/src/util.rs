//! Deterministic hashing and counter-based randomness.
//!
//! Every random draw in the crate is keyed by a chain of integers
//! (seed, restart index, draw index, ...) through [`mix64`], so results are
//! independent of worker count and scheduling order.

use rand_chacha::rand_core::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer; good avalanche for seed derivation.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Combine a running key with one more component.
pub fn mix64(key: u64, component: u64) -> u64 {
    splitmix64(key ^ splitmix64(component.wrapping_mul(0x9E37_79B9_7F4A_7C15)))
}

/// FNV-1a over bytes; used for config hashing and per-point seed strings.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Counter-based Gaussian source: a fresh ChaCha8 stream per key.
pub struct GaussianStream {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl GaussianStream {
    pub fn from_key(key: u64) -> Self {
        GaussianStream {
            rng: ChaCha8Rng::seed_from_u64(key),
            spare: None,
        }
    }

    fn uniform(&mut self) -> f64 {
        // 53-bit mantissa in [0, 1)
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal via Box–Muller.
    pub fn next_normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        // u1 in (0, 1] so the log is finite.
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * u2;
        self.spare = Some(r * theta.sin());
        r * theta.cos()
    }

    /// Complex standard Gaussian (independent real/imaginary parts).
    pub fn next_complex(&mut self) -> num_complex::Complex64 {
        num_complex::Complex64::new(self.next_normal(), self.next_normal())
    }
}
