//! Keyed coin flips shared by the global and local executions.
//!
//! A coin is a pure function of `(seed, iteration, anchor)`, where the anchor is
//! the largest vertex id of the component flipping it. Two executions with the
//! same seed therefore see the same coins without communicating.

use serde::{Deserialize, Serialize};

use crate::graph::VertexId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CoinKey {
    pub seed: u64,
    pub iteration: u32,
    pub anchor: VertexId,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Coin {
    Heads,
    Tails,
}

impl Coin {
    pub fn is_heads(self) -> bool {
        self == Coin::Heads
    }
}

// splitmix64 finalizer
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// 64 pseudo-random bits keyed by `key`.
pub fn keyed_bits(key: CoinKey) -> u64 {
    const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;
    let mut h = mix(key.seed ^ GOLDEN);
    h = mix(h ^ u64::from(key.iteration).wrapping_mul(GOLDEN));
    mix(h ^ u64::from(key.anchor).wrapping_add(GOLDEN.rotate_left(17)))
}

pub fn coin(key: CoinKey) -> Coin {
    if keyed_bits(key) >> 63 == 1 {
        Coin::Heads
    } else {
        Coin::Tails
    }
}
