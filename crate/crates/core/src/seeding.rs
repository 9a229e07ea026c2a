//! Seed derivation for independent, individually replayable trials.
//!
//! `trial_seed(root, i) = splitmix64(root XOR splitmix64(i))`. Both steps are
//! bijections on `u64`, so distinct trial indices always get distinct seeds.
//! Each trial then splits into named streams (interaction dynamics and
//! measurement probes) so that changing the measurement cadence never alters
//! the trajectory of the simulation itself.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn trial_seed(root: u64, trial: u32) -> u64 {
    splitmix64(root ^ splitmix64(u64::from(trial)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    Dynamics,
    Measurement,
}

impl Stream {
    fn tag(self) -> u64 {
        match self {
            Stream::Dynamics => 0x6479_6E61_6D69_6373,
            Stream::Measurement => 0x6D65_6173_7572_6573,
        }
    }
}

pub fn stream_rng(root: u64, trial: u32, stream: Stream) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(splitmix64(trial_seed(root, trial) ^ stream.tag()))
}
