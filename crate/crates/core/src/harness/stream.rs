//! Counter-based random substreams.
//!
//! Every `(seed, index)` pair names its own ChaCha8 keystream: the seed is the
//! key and the index selects the 64-bit stream id, so two indices never share
//! a block of output and each stream is reproducible without touching the others.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Substream = ChaCha8Rng;

pub fn derive_substream(seed: u64, index: u64) -> Substream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}
