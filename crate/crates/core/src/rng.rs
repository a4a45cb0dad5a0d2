//! Seeded random streams.
//!
//! A root seed fans out into independent ChaCha streams, one per
//! `(sweep point, pairing, class draw)` tuple, so trials can run in any
//! order or in parallel and still reproduce the sequential output.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type RandomStream = ChaCha8Rng;

/// Stream purpose tags, kept disjoint from each other.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Purpose {
    Pairing = 1,
    Trial = 2,
}

/// Stream derived from `root` for a purpose and up to three indices.
pub fn substream(root: u64, purpose: Purpose, a: u64, b: u64, c: u64) -> RandomStream {
    let mut rng = ChaCha8Rng::seed_from_u64(root);
    let mut h = splitmix64(purpose as u64);
    for x in [a, b, c] {
        h = splitmix64(h ^ x);
    }
    rng.set_stream(h);
    rng
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}
