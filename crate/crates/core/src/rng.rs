//! Seeded random streams.
//!
//! All randomness is ChaCha8 keyed by `(seed, domain)` with a 64-bit stream id,
//! so that any piece of work can rebuild its generator from its own index and
//! results never depend on scheduling.
//!
//! Stream layout:
//!
//! | domain        | stream id          | use                                |
//! |---------------|--------------------|------------------------------------|
//! | [`SAMPLING`]  | `2 * row`          | scale draw `Z` of row `row`        |
//! | [`SAMPLING`]  | `2 * row + 1`      | standard normals `xi` of row `row` |
//! | [`RESTART`]   | restart index      | seeding of a Lloyd restart         |
//! | [`ROTATION`]  | 0                  | [`random_orthogonal`](crate::random_orthogonal) |
//! | [`CHECK`]     | check-specific     | auxiliary draws inside checks      |

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const SAMPLING: u64 = 0;
pub const RESTART: u64 = 1;
pub const ROTATION: u64 = 2;
pub const CHECK: u64 = 3;

const STREAM_SCALE: u64 = 0;
const STREAM_GAUSS: u64 = 1;

const DOMAIN_MIX: u64 = 0x9E37_79B9_7F4A_7C15;

/// Generator for `(seed, domain, stream)`.
pub fn stream(seed: u64, domain: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ domain.wrapping_mul(DOMAIN_MIX));
    rng.set_stream(stream);
    rng
}

/// Generator for the scale draw of sample row `row`.
pub fn scale_stream(seed: u64, row: u64) -> ChaCha8Rng {
    stream(seed, SAMPLING, 2 * row + STREAM_SCALE)
}

/// Generator for the Gaussian coordinates of sample row `row`.
pub fn gauss_stream(seed: u64, row: u64) -> ChaCha8Rng {
    stream(seed, SAMPLING, 2 * row + STREAM_GAUSS)
}
