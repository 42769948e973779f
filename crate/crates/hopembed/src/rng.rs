//! Seeded, splittable random streams.
//!
//! Every randomized component draws from its own ChaCha stream derived from
//! the user seed, so runs are replayable component by component.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream identifiers for the randomized components.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Component {
    Generator = 1,
    SparseCover = 2,
    OracleHomes = 3,
    ThorupZwick = 4,
    Sampling = 5,
    Workload = 6,
}

/// Generator for `component`, optionally further split by `index`.
pub fn stream(seed: u64, component: Component, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((component as u64) << 32) | (index & 0xffff_ffff));
    rng
}

/// Environment variable consulted for a default seed.
pub const SEED_ENV: &str = "HOPEMBED_SEED";

/// Seed from [`SEED_ENV`], or 0.
pub fn default_seed() -> u64 {
    std::env::var(SEED_ENV)
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(0)
}
