//! End-to-end learned beam probing and multi-user hybrid precoding for mmWave
//! base stations.
//!
//! The crate is organised bottom-up:
//!
//! - [`channel`]: array geometry, steering vectors, clustered geometric channel
//!   synthesis and the binary dataset format.
//! - [`beamforming`]: closed-form beamforming algebra (probing codebooks, RSSI,
//!   phase quantization, DFT baselines, zero-forcing baseband, SINR and rate).
//! - [`neuralnet`]: the probing-encoder / phase-decoder network with hand-written
//!   reverse-mode gradients, Adam and the training loop.
//! - [`infotheory`]: matrix-based Rényi entropy and mutual information.
//! - [`dimsearch`]: bisection search for the bottleneck (probing beam) count.
//! - [`harness`]: experiment configuration, online deployment, baselines and
//!   metric export used by the `autohp` command-line tool.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod beamforming;
pub mod channel;
pub mod dimsearch;
mod error;
pub mod harness;
pub mod infotheory;
pub mod neuralnet;

pub use error::{Error, Result};
pub use num_complex::Complex64;

pub use beamforming::{FeedbackCodebook, HybridPrecoder, PhaseQuantizer, ProbingCodebook};
pub use channel::{ArrayGeometry, ChannelSample, PathComponent, ScenarioConfig};
pub use dimsearch::{ProbeResult, SearchConfig};
pub use harness::{EvaluationReport, ExperimentConfig};
pub use infotheory::{GramState, InfoEstimate};
pub use neuralnet::{AutoHpNetwork, LossValue, TrainConfig};

/// Seedable generator used everywhere randomness is drawn.
///
/// ChaCha is counter-based and produces the same stream on every platform, so
/// datasets and training runs are reproducible from their seeds.
pub type SimRng = rand_chacha::ChaCha8Rng;

/// Builds a [`SimRng`] from a 64-bit seed.
pub fn rng_from_seed(seed: u64) -> SimRng {
    use rand::SeedableRng;
    SimRng::seed_from_u64(seed)
}

/// Mixes a salt into a seed (SplitMix64 finalizer) so derived streams are
/// decorrelated from their parent.
pub fn derive_seed(seed: u64, salt: u64) -> u64 {
    let mut z = seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
