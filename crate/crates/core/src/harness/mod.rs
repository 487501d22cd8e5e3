//! Experiment orchestration: configuration, dataset generation, training,
//! dimension search, online deployment with baselines, and CSV export.

mod config;
mod deploy;
mod output;
mod overhead;
mod patterns;

pub use config::{apply_override, EvalConfig, ExperimentConfig, SystemConfig};
pub use deploy::{
    codebook_beams, deploy_and_evaluate, evaluate_all, evaluate_baselines, group_precoder, group_rates, learned_beams,
    user_groups, EvaluationReport, GainRow, SumRateRow, UserRate, UserRateRow, METHOD_DFT, METHOD_GENIE,
    METHOD_LEARNED, METHOD_ODFT,
};
pub use output::{write_csv, write_rows, CsvRow};
pub use overhead::{overhead_report, OverheadReport};
pub use patterns::{azimuth_grid, export_beam_patterns, PatternRow};

use crate::channel::{generate_dataset, ChannelSample, ScenarioConfig};
use crate::dimsearch::{bisection_search, train_reference, SearchOutcome, TrainingOracle};
use crate::neuralnet::{fit, AutoHpNetwork, EpochMetrics};
use crate::{derive_seed, rng_from_seed, Result};

const TEST_SET_SALT: u64 = 0x7e57;

/// Training and test channels from the scenario. The test set has
/// `eval.n_test` users drawn from a seed derived from the scenario seed.
pub fn generate_data(config: &ExperimentConfig) -> Result<(Vec<ChannelSample>, Vec<ChannelSample>)> {
    let train = generate_dataset(&config.scenario)?;
    let test = generate_dataset(&ScenarioConfig {
        n_users: config.eval.n_test,
        seed: derive_seed(config.scenario.seed, TEST_SET_SALT),
        ..config.scenario.clone()
    })?;
    Ok((train, test))
}

/// Fresh `N × M` network trained on `data` with the configured schedule.
pub fn train_model(config: &ExperimentConfig, data: &[ChannelSample]) -> Result<(AutoHpNetwork, Vec<EpochMetrics>)> {
    let mut net = AutoHpNetwork::new(
        config.system.n_bs,
        config.system.m_bs,
        config.quantizer(),
        &mut rng_from_seed(config.train.seed),
    )?;
    let history = fit(&mut net, data, &config.train)?;
    Ok((net, history))
}

/// Uncompressed reference model for the dimension search.
pub fn train_search_reference(config: &ExperimentConfig, data: &[ChannelSample]) -> Result<AutoHpNetwork> {
    train_reference(data, config.system.n_bs, config.quantizer(), &config.train)
}

/// Bisection over the bottleneck width with real training probes.
pub fn search_dimension(
    config: &ExperimentConfig,
    data: &[ChannelSample],
    reference: &AutoHpNetwork,
) -> Result<SearchOutcome> {
    let mut oracle = TrainingOracle {
        data,
        reference,
        search: config.search.clone(),
        train: config.train.clone(),
    };
    bisection_search(&mut oracle, config.search.n_antennas)
}

#[cfg(test)]
mod tests {
    use nalgebra::{DMatrix, DVector};
    use num_complex::Complex64;

    use super::*;
    use crate::beamforming::{dft_codebook, probing_from_phases, FeedbackCodebook};
    use crate::channel::{steering_vector, ArrayGeometry};
    use crate::neuralnet::TrainConfig;

    fn small_config() -> ExperimentConfig {
        let overrides = vec![
            ("scenario.n_users".to_string(), "120".to_string()),
            ("system.n_bs".to_string(), "8".to_string()),
            ("system.m_bs".to_string(), "4".to_string()),
            ("train.epochs".to_string(), "3".to_string()),
            ("train.batch_size".to_string(), "32".to_string()),
            ("eval.n_test".to_string(), "20".to_string()),
        ];
        ExperimentConfig::from_toml_str(config::tests::SAMPLE, &overrides).unwrap()
    }

    #[test]
    fn overhead_matches_published_ratios() {
        let r = overhead_report(8, 64, 128).unwrap();
        assert_eq!(r.reduction_vs_dft, 0.875);
        assert_eq!(r.reduction_vs_odft, 0.9375);
        assert_eq!(overhead_report(64, 64, 128).unwrap().reduction_vs_dft, 0.0);
        assert!(overhead_report(0, 64, 128).is_err());
    }

    #[test]
    fn steering_beam_pattern_peaks_at_its_angle() {
        let geometry = ArrayGeometry::ula(8);
        let theta0 = azimuth_grid(181)[120];
        let beam = DMatrix::from_columns(&[steering_vector(&geometry, theta0, 0.0)]);
        let rows = export_beam_patterns(&beam, &geometry, 181).unwrap();
        let peak = rows.iter().max_by(|a, b| a.gain.total_cmp(&b.gain)).unwrap();
        assert_eq!(peak.angle_rad, theta0);
        assert!((peak.gain - 1.0).abs() < 1e-12);
    }

    #[test]
    fn flat_beam_peaks_at_broadside() {
        let geometry = ArrayGeometry::ula(8);
        let codebook = probing_from_phases(&DMatrix::zeros(8, 1)).unwrap();
        let rows = export_beam_patterns(&codebook.beams, &geometry, 181).unwrap();
        let peak = rows.iter().max_by(|a, b| a.gain.total_cmp(&b.gain)).unwrap();
        assert!(peak.angle_rad.abs() < 1e-12);
    }

    #[test]
    fn single_grid_point_gives_single_row() {
        let geometry = ArrayGeometry::ula(4);
        let beams = dft_codebook(4, 1).unwrap().columns(0, 1).into_owned();
        let rows = export_beam_patterns(&beams, &geometry, 1).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].angle_rad, 0.0);
    }

    #[test]
    fn planar_arrays_are_rejected_for_patterns() {
        let geometry = ArrayGeometry::new(2, 2, 0.5).unwrap();
        assert!(export_beam_patterns(&DMatrix::zeros(4, 1), &geometry, 3).is_err());
    }

    #[test]
    fn groups_are_disjoint_and_deterministic() {
        let groups = user_groups(11, 2, 3).unwrap();
        assert_eq!(groups.len(), 5);
        let mut seen: Vec<usize> = groups.concat();
        seen.sort_unstable();
        seen.dedup();
        assert_eq!(seen.len(), 10);
        assert_eq!(groups, user_groups(11, 2, 3).unwrap());
        assert!(user_groups(1, 2, 0).is_err());
    }

    #[test]
    fn single_user_rate_has_no_interference_path() {
        let h = DVector::from_fn(4, |n, _| Complex64::from_polar(1.0, 0.4 * n as f64));
        let f = dft_codebook(4, 1).unwrap().column(1).into_owned();
        let (rates, fallback) =
            group_rates(&[&h], std::slice::from_ref(&f), &FeedbackCodebook::perfect(), 2.0, 0.5).unwrap();
        assert!(!fallback);
        let expected = (1.0 + 2.0 * h.dotc(&f).norm_sqr() / 0.5).log2();
        assert!((rates[0].rate - expected).abs() < 1e-12);
    }

    #[test]
    fn colliding_beams_fall_back_to_time_sharing() {
        let h1 = DVector::from_fn(4, |n, _| Complex64::from_polar(1.0, 0.1 * n as f64));
        let h2 = DVector::from_fn(4, |n, _| Complex64::from_polar(2.0, 0.1 * n as f64));
        let f = dft_codebook(4, 1).unwrap().column(0).into_owned();
        let (rates, fallback) = group_rates(
            &[&h1, &h2],
            &[f.clone(), f.clone()],
            &FeedbackCodebook::perfect(),
            1.0,
            0.1,
        )
        .unwrap();
        assert!(fallback);
        let expected = 0.5 * (1.0 + h1.dotc(&f).norm_sqr() / 0.1).log2();
        assert!((rates[0].rate - expected).abs() < 1e-12);
    }

    #[test]
    fn report_is_reproducible_and_genie_dominates() {
        let cfg = small_config();
        let (train, test) = generate_data(&cfg).unwrap();
        let (net, history) = train_model(&cfg, &train).unwrap();
        assert_eq!(history.len(), 3);
        let a = evaluate_all(&net, &test, &cfg).unwrap();
        let b = evaluate_all(&net, &test, &cfg).unwrap();
        assert_eq!(a, b);
        for &snr in &cfg.eval.snr_db {
            let genie = a.sum_rate(METHOD_GENIE, snr).unwrap();
            for method in [METHOD_LEARNED, METHOD_DFT, METHOD_ODFT] {
                assert!(
                    a.sum_rate(method, snr).unwrap() <= genie + 1e-12,
                    "{method} at {snr} dB"
                );
            }
        }
        for row in a.user_rates.iter().filter(|r| r.method != METHOD_GENIE) {
            let genie = a
                .user_rates
                .iter()
                .find(|g| g.method == METHOD_GENIE && g.snr_db == row.snr_db && g.user_id == row.user_id)
                .unwrap();
            assert!(row.rate <= genie.rate + 1e-12);
        }
        assert!(a.gain(METHOD_ODFT).unwrap() >= a.gain(METHOD_DFT).unwrap());
    }

    #[test]
    fn noiseless_probing_is_the_small_noise_limit() {
        let mut cfg = small_config();
        let (train, test) = generate_data(&cfg).unwrap();
        let (net, _) = train_model(&cfg, &train).unwrap();
        cfg.system.probe_noise_power = Some(0.0);
        let exact = deploy_and_evaluate(&net, &test, &cfg).unwrap();
        cfg.system.probe_noise_power = Some(1e-30);
        let tiny = deploy_and_evaluate(&net, &test, &cfg).unwrap();
        assert_eq!(exact.sum_rates, tiny.sum_rates);
    }

    #[test]
    fn test_set_differs_from_training_set() {
        let cfg = small_config();
        let (train, test) = generate_data(&cfg).unwrap();
        assert_eq!(train.len(), 120);
        assert_eq!(test.len(), 20);
        assert_ne!(train[0].vector, test[0].vector);
    }

    #[test]
    fn trained_model_defaults_match_config() {
        let cfg = small_config();
        assert_ne!(cfg.train, TrainConfig::default());
    }
}
