use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use crate::beamforming::{
    beam_gain, best_codebook_beam, dft_codebook, effective_channel, feedback_quantize, mrt_genie_rate,
    rf_beam_from_phases, rssi_measure, sinr_and_rate, zf_baseband, FeedbackCodebook, FeedbackMode, HybridPrecoder,
};
use crate::channel::ChannelSample;
use crate::neuralnet::AutoHpNetwork;
use crate::{derive_seed, rng_from_seed, Error, Result};

pub const METHOD_LEARNED: &str = "learned";
pub const METHOD_DFT: &str = "dft";
pub const METHOD_ODFT: &str = "odft";
pub const METHOD_GENIE: &str = "genie";

const FEEDBACK_SALT: u64 = 0xfeed;
const GROUPING_SALT: u64 = 0x6a0b;
const PROBE_NOISE_SALT: u64 = 0x9a5e;

/// Mean sum rate of one method at one SNR, over all user groups.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SumRateRow {
    pub method: String,
    pub snr_db: f64,
    pub sum_rate: f64,
    pub groups: usize,
    /// Groups whose effective channel was too ill-conditioned for ZF and
    /// were served by time sharing instead.
    pub fallback_groups: usize,
}

/// Rate of one user in one group (raw CDF samples).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserRateRow {
    pub method: String,
    pub snr_db: f64,
    pub group: usize,
    pub user_id: u64,
    pub sinr: f64,
    pub rate: f64,
}

/// Mean single-user beamforming gain `|hᴴ f|²` of a method's beams.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GainRow {
    pub method: String,
    pub mean_gain: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub sum_rates: Vec<SumRateRow>,
    pub user_rates: Vec<UserRateRow>,
    pub gains: Vec<GainRow>,
}

impl EvaluationReport {
    pub fn merge(mut self, other: EvaluationReport) -> Self {
        self.sum_rates.extend(other.sum_rates);
        self.user_rates.extend(other.user_rates);
        self.gains.extend(other.gains);
        self
    }

    pub fn sum_rate(&self, method: &str, snr_db: f64) -> Option<f64> {
        self.sum_rates
            .iter()
            .find(|r| r.method == method && r.snr_db == snr_db)
            .map(|r| r.sum_rate)
    }

    pub fn gain(&self, method: &str) -> Option<f64> {
        self.gains.iter().find(|g| g.method == method).map(|g| g.mean_gain)
    }
}

/// Per-user SINR and rate of one group.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UserRate {
    pub sinr: f64,
    pub rate: f64,
}

/// Disjoint consecutive groups of `n_users` from a seeded shuffle of the
/// test indices. Leftover channels are dropped.
pub fn user_groups(n_channels: usize, n_users: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if n_users == 0 {
        return Err(Error::invalid("groups need at least one user"));
    }
    if n_channels < n_users {
        return Err(Error::invalid(format!(
            "{n_channels} test channels cannot fill a group of {n_users}"
        )));
    }
    let mut order: Vec<usize> = (0..n_channels).collect();
    order.shuffle(&mut rng_from_seed(derive_seed(seed, GROUPING_SALT)));
    Ok(order.chunks_exact(n_users).map(<[usize]>::to_vec).collect())
}

/// Stages S1–S3: probe every user with the learned codebook, normalize the
/// powers by `P_t`, and decode one analog beam per user.
pub fn learned_beams<R: Rng + ?Sized>(
    net: &AutoHpNetwork,
    channels: &[&DVector<Complex64>],
    probe_power: f64,
    probe_noise_power: f64,
    rng: &mut R,
) -> Result<Vec<DVector<Complex64>>> {
    if channels.is_empty() {
        return Ok(Vec::new());
    }
    let codebook = net.extract_probing();
    let mut rssi = DMatrix::zeros(channels.len(), net.n_beams());
    for (i, h) in channels.iter().enumerate() {
        let meas = rssi_measure(h, &codebook, probe_power, probe_noise_power, rng)?;
        for (m, p) in meas.powers.iter().enumerate() {
            rssi[(i, m)] = p / probe_power;
        }
    }
    let phases = net.predict_phases(&rssi)?;
    Ok(phases
        .row_iter()
        .map(|row| rf_beam_from_phases(&row.iter().copied().collect::<Vec<_>>()))
        .collect())
}

/// Best beam per channel from an exhaustive codebook scan.
pub fn codebook_beams(
    channels: &[&DVector<Complex64>],
    codebook: &DMatrix<Complex64>,
) -> Result<Vec<DVector<Complex64>>> {
    channels
        .iter()
        .map(|h| best_codebook_beam(h, codebook).map(|(k, _)| codebook.column(k).into_owned()))
        .collect()
}

/// Analog beams as RF columns and the zero-forcing baseband built from the
/// fed-back effective channels of one group.
pub fn group_precoder(
    channels: &[&DVector<Complex64>],
    beams: &[DVector<Complex64>],
    feedback: &FeedbackCodebook,
) -> Result<HybridPrecoder> {
    if channels.len() != beams.len() || channels.is_empty() {
        return Err(Error::DimensionMismatch {
            context: "group beams per user",
            expected: channels.len(),
            actual: beams.len(),
        });
    }
    let n_users = channels.len();
    let rf = DMatrix::from_columns(beams);
    let mut h_hat = DMatrix::zeros(n_users, n_users);
    for (u, h) in channels.iter().enumerate() {
        let fed_back = feedback_quantize(&effective_channel(h, &rf)?, feedback)?;
        for k in 0..n_users {
            h_hat[(u, k)] = fed_back[k].conj();
        }
    }
    let bb = zf_baseband(&h_hat, &rf)?;
    HybridPrecoder::new(rf, bb)
}

/// Stage S4 for one group: effective channels, feedback, zero-forcing and
/// per-user rates.
///
/// When the fed-back effective channel matrix is too ill-conditioned to
/// invert (for example two users on the same analog beam), the group falls
/// back to time sharing: each user is served alone on its beam with the full
/// power for `1/N_U` of the time. The flag in the result reports this.
pub fn group_rates(
    channels: &[&DVector<Complex64>],
    beams: &[DVector<Complex64>],
    feedback: &FeedbackCodebook,
    total_power: f64,
    noise_power: f64,
) -> Result<(Vec<UserRate>, bool)> {
    match group_precoder(channels, beams, feedback) {
        Ok(precoder) => {
            let rates = channels
                .iter()
                .enumerate()
                .map(|(u, h)| {
                    sinr_and_rate(h, &precoder, u, total_power, noise_power).map(|(sinr, rate)| UserRate { sinr, rate })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok((rates, false))
        }
        Err(Error::RankDeficient { .. }) => {
            let share = channels.len() as f64;
            let rates = channels
                .iter()
                .zip(beams)
                .map(|(h, f)| {
                    let norm = f.norm();
                    let gain = if norm > 0.0 {
                        beam_gain(h, &f.unscale(norm))
                    } else {
                        0.0
                    };
                    let sinr = total_power * gain / noise_power;
                    UserRate {
                        sinr,
                        rate: (1.0 + sinr).log2() / share,
                    }
                })
                .collect();
            Ok((rates, true))
        }
        Err(e) => Err(e),
    }
}

fn feedback_codebook(config: &ExperimentConfig) -> Result<FeedbackCodebook> {
    match config.system.feedback_mode {
        FeedbackMode::Perfect => Ok(FeedbackCodebook::perfect()),
        FeedbackMode::Rvq => FeedbackCodebook::random(
            config.system.n_users,
            config.system.feedback_bits,
            derive_seed(config.eval.seed, FEEDBACK_SALT),
        ),
    }
}

struct RateContext<'a> {
    test: &'a [ChannelSample],
    groups: &'a [Vec<usize>],
    feedback: &'a FeedbackCodebook,
    config: &'a ExperimentConfig,
}

fn rate_rows(
    ctx: &RateContext<'_>,
    method: &str,
    snr_db: f64,
    beams: &[DVector<Complex64>],
    report: &mut EvaluationReport,
) -> Result<()> {
    let RateContext {
        test,
        groups,
        feedback,
        config,
    } = *ctx;
    let noise = config.noise_power(snr_db);
    let mut total = 0.0;
    let mut fallbacks = 0;
    for (g, group) in groups.iter().enumerate() {
        let channels: Vec<&DVector<Complex64>> = group.iter().map(|&i| &test[i].vector).collect();
        let group_beams: Vec<DVector<Complex64>> = group.iter().map(|&i| beams[i].clone()).collect();
        let (rates, fallback) = group_rates(&channels, &group_beams, feedback, config.system.total_power, noise)?;
        fallbacks += usize::from(fallback);
        for (&i, r) in group.iter().zip(&rates) {
            total += r.rate;
            report.user_rates.push(UserRateRow {
                method: method.to_string(),
                snr_db,
                group: g,
                user_id: test[i].user_id,
                sinr: r.sinr,
                rate: r.rate,
            });
        }
    }
    report.sum_rates.push(SumRateRow {
        method: method.to_string(),
        snr_db,
        sum_rate: total / groups.len() as f64,
        groups: groups.len(),
        fallback_groups: fallbacks,
    });
    Ok(())
}

fn mean_gain(test: &[ChannelSample], beams: &[DVector<Complex64>]) -> f64 {
    test.iter()
        .zip(beams)
        .map(|(s, f)| beam_gain(&s.vector, f))
        .sum::<f64>()
        / test.len() as f64
}

/// Online deployment of a trained network over the SNR grid.
///
/// Probing noise is drawn from a stream derived from `eval.seed` and the SNR
/// index, so the report is a pure function of its inputs. The gain row uses
/// noiseless probing.
pub fn deploy_and_evaluate(
    net: &AutoHpNetwork,
    test: &[ChannelSample],
    config: &ExperimentConfig,
) -> Result<EvaluationReport> {
    let groups = user_groups(test.len(), config.system.n_users, config.eval.seed)?;
    let feedback = feedback_codebook(config)?;
    let channels: Vec<&DVector<Complex64>> = test.iter().map(|s| &s.vector).collect();
    let ctx = RateContext {
        test,
        groups: &groups,
        feedback: &feedback,
        config,
    };
    let mut report = EvaluationReport::default();
    let clean = learned_beams(net, &channels, config.probe_power(), 0.0, &mut rng_from_seed(0))?;
    report.gains.push(GainRow {
        method: METHOD_LEARNED.into(),
        mean_gain: mean_gain(test, &clean),
    });
    for (idx, &snr_db) in config.eval.snr_db.iter().enumerate() {
        let mut rng = rng_from_seed(derive_seed(config.eval.seed, PROBE_NOISE_SALT + idx as u64));
        let beams = learned_beams(
            net,
            &channels,
            config.probe_power(),
            config.probe_noise_power(snr_db),
            &mut rng,
        )?;
        rate_rows(&ctx, METHOD_LEARNED, snr_db, &beams, &mut report)?;
    }
    Ok(report)
}

/// DFT (`N` beams) and oversampled DFT (`2N` beams) baselines plus the
/// interference-free genie bound.
pub fn evaluate_baselines(test: &[ChannelSample], config: &ExperimentConfig) -> Result<EvaluationReport> {
    let groups = user_groups(test.len(), config.system.n_users, config.eval.seed)?;
    let feedback = feedback_codebook(config)?;
    let channels: Vec<&DVector<Complex64>> = test.iter().map(|s| &s.vector).collect();
    let n = config.system.n_bs;
    let ctx = RateContext {
        test,
        groups: &groups,
        feedback: &feedback,
        config,
    };
    let mut report = EvaluationReport::default();
    let mut baselines = Vec::new();
    for (method, oversampling) in [(METHOD_DFT, 1), (METHOD_ODFT, 2)] {
        let beams = codebook_beams(&channels, &dft_codebook(n, oversampling)?)?;
        report.gains.push(GainRow {
            method: method.into(),
            mean_gain: mean_gain(test, &beams),
        });
        baselines.push((method, beams));
    }
    report.gains.push(GainRow {
        method: METHOD_GENIE.into(),
        mean_gain: test.iter().map(ChannelSample::norm_squared).sum::<f64>() / test.len() as f64,
    });
    for &snr_db in &config.eval.snr_db {
        for (method, beams) in &baselines {
            rate_rows(&ctx, method, snr_db, beams, &mut report)?;
        }
        let noise = config.noise_power(snr_db);
        let mut total = 0.0;
        for (g, group) in groups.iter().enumerate() {
            for &i in group {
                let rate = mrt_genie_rate(&test[i].vector, config.system.total_power, config.system.n_users, noise)?;
                let sinr = 2f64.powf(rate) - 1.0;
                total += rate;
                report.user_rates.push(UserRateRow {
                    method: METHOD_GENIE.into(),
                    snr_db,
                    group: g,
                    user_id: test[i].user_id,
                    sinr,
                    rate,
                });
            }
        }
        report.sum_rates.push(SumRateRow {
            method: METHOD_GENIE.into(),
            snr_db,
            sum_rate: total / groups.len() as f64,
            groups: groups.len(),
            fallback_groups: 0,
        });
    }
    Ok(report)
}

/// Learned, DFT, O-DFT and genie rows together.
pub fn evaluate_all(
    net: &AutoHpNetwork,
    test: &[ChannelSample],
    config: &ExperimentConfig,
) -> Result<EvaluationReport> {
    Ok(deploy_and_evaluate(net, test, config)?.merge(evaluate_baselines(test, config)?))
}
