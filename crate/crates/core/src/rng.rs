//! Seed expansion. Every random stage draws from its own ChaCha8 stream
//! keyed by `(root seed, stage, replicate)`, so results do not depend on
//! scheduling or on which other stages ran.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const RNG_ALGORITHM: &str =
    "chacha8 (rand_chacha 0.3); key = root seed via seed_from_u64; stream = (stage << 32) | replicate";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stage {
    ConfigurationModel = 1,
    ErdosRenyi = 2,
    ShuffledScores = 3,
    UniformScores = 4,
    Louvain = 5,
    CommunityControl = 6,
}

pub fn stage_rng(seed: u64, stage: Stage, replicate: u32) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((stage as u64) << 32) | u64::from(replicate));
    rng
}
