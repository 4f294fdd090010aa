//! Seeded randomness: every randomized suite draws from ChaCha20 seeded by the
//! `GERBELAB_SEED` environment variable (default 0), so runs are reproducible.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;

pub const SEED_ENV: &str = "GERBELAB_SEED";

pub fn base_seed() -> u64 {
    std::env::var(SEED_ENV)
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(0)
}

/// A reproducible generator; `salt` decouples independent suites.
pub fn seeded_rng(salt: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(base_seed() ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// A random rational with small numerator/denominator, avoiding 0 denominators.
pub fn small_rational(rng: &mut ChaCha20Rng) -> crate::exterior::Rat {
    let num = rng.gen_range(-9i64..=9);
    let den = rng.gen_range(1i64..=4);
    crate::exterior::scalar::rat(num, den)
}
