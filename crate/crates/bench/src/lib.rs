//! Shared fixtures for the benchmarks.

use autohp::channel::{generate_dataset, ArrayGeometry, ChannelSample, GainModel, ScenarioConfig};
use autohp::neuralnet::{AutoHpNetwork, ChannelBatch, LossOptions};
use autohp::{rng_from_seed, PhaseQuantizer};
use nalgebra::DMatrix;

/// Four-cluster, two-path ULA scenario.
pub fn channels(n_antennas: usize, n_users: usize, seed: u64) -> Vec<ChannelSample> {
    generate_dataset(&ScenarioConfig {
        geometry: ArrayGeometry::ula(n_antennas),
        n_users,
        n_clusters: 4,
        cluster_centers: Vec::new(),
        angular_spread_rad: 0.1,
        paths_per_user: 2,
        gain_model: GainModel::ComplexGaussian,
        channel_snr_db: None,
        seed,
    })
    .expect("valid scenario")
}

pub fn batch(samples: &[ChannelSample]) -> ChannelBatch {
    ChannelBatch::from_samples(samples).expect("non-empty batch")
}

/// Network with batch-norm statistics initialized by one forward pass, so it
/// can run in eval mode.
pub fn warmed_network(n_antennas: usize, n_beams: usize, samples: &[ChannelSample]) -> AutoHpNetwork {
    let mut net = AutoHpNetwork::new(
        n_antennas,
        n_beams,
        PhaseQuantizer::new(3).unwrap(),
        &mut rng_from_seed(1),
    )
    .expect("valid dimensions");
    net.loss(&batch(samples), &LossOptions::default())
        .expect("batch of at least two");
    net.set_mode(autohp::neuralnet::Mode::Eval);
    net
}

/// Bottleneck-like samples for the information estimators.
pub fn activations(rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |i, j| ((i * 31 + j * 17) % 97) as f64 / 97.0)
}
