use autohp::beamforming::PhaseQuantizer;
use autohp::channel::{generate_dataset, load_dataset, save_dataset, ArrayGeometry, GainModel, ScenarioConfig};
use autohp::neuralnet::{fit, load_checkpoint, save_checkpoint, AutoHpNetwork, ChannelBatch, TrainConfig};
use autohp::{rng_from_seed, Error};

fn scenario() -> ScenarioConfig {
    ScenarioConfig {
        geometry: ArrayGeometry::ula(8),
        n_users: 64,
        n_clusters: 2,
        cluster_centers: Vec::new(),
        angular_spread_rad: 0.1,
        paths_per_user: 2,
        gain_model: GainModel::ComplexGaussian,
        channel_snr_db: Some(20.0),
        seed: 3,
    }
}

#[test]
fn dataset_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("channels.bin");
    let data = generate_dataset(&scenario()).unwrap();
    save_dataset(&data, &path).unwrap();
    assert_eq!(load_dataset(&path).unwrap(), data);
}

#[test]
fn truncated_dataset_file_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("channels.bin");
    save_dataset(&generate_dataset(&scenario()).unwrap(), &path).unwrap();
    let bytes = std::fs::read(&path).unwrap();
    std::fs::write(&path, &bytes[..bytes.len() - 5]).unwrap();
    assert!(matches!(load_dataset(&path), Err(Error::Truncated(_))));
}

#[test]
fn trained_checkpoint_reproduces_predictions() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("model.bin");
    let data = generate_dataset(&scenario()).unwrap();
    let mut net = AutoHpNetwork::new(8, 3, PhaseQuantizer::new(3).unwrap(), &mut rng_from_seed(1)).unwrap();
    let config = TrainConfig {
        epochs: 3,
        batch_size: 16,
        seed: 5,
        ..TrainConfig::default()
    };
    fit(&mut net, &data, &config).unwrap();
    save_checkpoint(&net, Some(&config), &path).unwrap();

    let (restored, echoed) = load_checkpoint(&path).unwrap();
    assert_eq!(echoed, Some(config));
    let batch = ChannelBatch::from_samples(&data).unwrap();
    let rssi = net.encoder_forward(&batch).unwrap().rssi;
    assert_eq!(
        restored.encoder_forward(&batch).unwrap().rssi,
        rssi,
        "encoder differs after reload"
    );
    assert_eq!(
        restored.predict_phases(&rssi).unwrap(),
        net.predict_phases(&rssi).unwrap()
    );
}

#[test]
fn missing_file_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    assert!(matches!(load_dataset(dir.path().join("absent.bin")), Err(Error::Io(_))));
}
