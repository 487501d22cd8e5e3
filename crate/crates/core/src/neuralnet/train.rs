use std::ops::ControlFlow;

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::adam::{adam_step, AdamConfig, AdamState};
use super::batch::ChannelBatch;
use super::network::{AutoHpNetwork, DropoutMasks, LossOptions, Mode};
use crate::channel::ChannelSample;
use crate::infotheory::{batch_entropy, gram_matrix_auto, mutual_information, DIAGNOSTIC_ALPHA};
use crate::{rng_from_seed, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub batch_size: usize,
    pub learning_rate: f64,
    pub epochs: usize,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub dropout_rate: f64,
    pub entropy_weight: f64,
    pub validation_fraction: f64,
    /// Minibatches between information diagnostics.
    pub diagnostics_every: usize,
    pub diagnostic_alpha: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            batch_size: 128,
            learning_rate: 0.004,
            epochs: 100,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            dropout_rate: 0.1,
            entropy_weight: 1.0,
            validation_fraction: 0.1,
            diagnostics_every: 10,
            diagnostic_alpha: DIAGNOSTIC_ALPHA,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |key: &'static str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::config(key, format!("must be positive, got {v}")))
            }
        };
        let unit = |key: &'static str, v: f64| {
            if (0.0..1.0).contains(&v) {
                Ok(())
            } else {
                Err(Error::config(key, format!("must lie in [0, 1), got {v}")))
            }
        };
        if self.batch_size < 2 {
            return Err(Error::config("train.batch_size", "must be at least 2"));
        }
        if self.diagnostics_every == 0 {
            return Err(Error::config("train.diagnostics_every", "must be at least 1"));
        }
        positive("train.learning_rate", self.learning_rate)?;
        positive("train.epsilon", self.epsilon)?;
        positive("train.diagnostic_alpha", self.diagnostic_alpha)?;
        if self.diagnostic_alpha == 1.0 {
            return Err(Error::config("train.diagnostic_alpha", "must differ from 1"));
        }
        unit("train.beta1", self.beta1)?;
        unit("train.beta2", self.beta2)?;
        unit("train.dropout_rate", self.dropout_rate)?;
        unit("train.validation_fraction", self.validation_fraction)?;
        if !(self.entropy_weight >= 0.0 && self.entropy_weight.is_finite()) {
            return Err(Error::config(
                "train.entropy_weight",
                format!("must be non-negative, got {}", self.entropy_weight),
            ));
        }
        Ok(())
    }

    pub fn adam(&self) -> AdamConfig {
        AdamConfig {
            learning_rate: self.learning_rate,
            beta1: self.beta1,
            beta2: self.beta2,
            epsilon: self.epsilon,
        }
    }
}

/// Per-epoch training record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochMetrics {
    pub epoch: usize,
    pub train_loss: f64,
    pub val_loss: f64,
    /// Mean `|hᴴ f|²` on the validation split.
    pub val_gain: f64,
    /// Mean `‖h‖²` on the validation split (matched-filter gain).
    pub val_genie_gain: f64,
    /// Mean bottleneck entropy over the diagnostic minibatches.
    pub entropy_y: f64,
    /// Mean `I(θ_b; θ_b*)` against the reference model, when one is given.
    pub mi_reference: Option<f64>,
}

/// Trains with the default callback, which never stops early.
pub fn fit(net: &mut AutoHpNetwork, data: &[ChannelSample], config: &TrainConfig) -> Result<Vec<EpochMetrics>> {
    fit_with(net, data, config, None, |_| ControlFlow::Continue(()))
}

/// Minibatch Adam training.
///
/// The data is shuffled once and split into training and validation parts;
/// each epoch reshuffles the training part. After at least one epoch the
/// network is left in eval mode. `on_epoch` may end training early.
pub fn fit_with<F>(
    net: &mut AutoHpNetwork,
    data: &[ChannelSample],
    config: &TrainConfig,
    reference: Option<&AutoHpNetwork>,
    mut on_epoch: F,
) -> Result<Vec<EpochMetrics>>
where
    F: FnMut(&EpochMetrics) -> ControlFlow<()>,
{
    config.validate()?;
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if data.len() < 2 {
        return Err(Error::invalid("training needs at least 2 channels"));
    }
    if let Some(reference) = reference {
        if reference.n_antennas() != net.n_antennas() {
            return Err(Error::DimensionMismatch {
                context: "reference model antenna count",
                expected: net.n_antennas(),
                actual: reference.n_antennas(),
            });
        }
    }
    if config.epochs == 0 {
        return Ok(Vec::new());
    }

    let mut rng = rng_from_seed(config.seed);
    let mut order: Vec<usize> = (0..data.len()).collect();
    order.shuffle(&mut rng);
    let n_val = (data.len() as f64 * config.validation_fraction).round() as usize;
    let (val_idx, mut train_idx) = if n_val >= 2 && data.len() - n_val >= 2 {
        let (v, t) = order.split_at(n_val);
        (v.to_vec(), t.to_vec())
    } else {
        (order.clone(), order)
    };

    let adam = config.adam();
    let mut state = AdamState::for_params(net.params());
    let mut history = Vec::with_capacity(config.epochs);

    for epoch in 0..config.epochs {
        net.set_mode(Mode::Train);
        train_idx.shuffle(&mut rng);
        let mut loss_sum = 0.0;
        let mut batches = 0usize;
        let mut entropy_sum = 0.0;
        let mut mi_sum = 0.0;
        let mut diagnostics = 0usize;

        for chunk in minibatches(&train_idx, config.batch_size) {
            let batch = ChannelBatch::from_samples(chunk.iter().map(|&i| &data[i]))?;
            let dropout = (config.dropout_rate > 0.0)
                .then(|| DropoutMasks::sample(config.dropout_rate, batch.len(), net.n_antennas(), &mut rng));
            let options = LossOptions {
                entropy_weight: config.entropy_weight,
                bandwidth: None,
                dropout,
                bypass_quantizer: false,
            };
            let loss = net.loss(&batch, &options)?;
            let grads = net.backward()?;
            adam_step(&mut state, net.params_mut(), &grads, &adam)?;
            loss_sum += loss.total;

            if batches.is_multiple_of(config.diagnostics_every) {
                let pass = net.recorded_pass().ok_or(Error::NoForwardPass)?;
                entropy_sum += batch_entropy(&pass.encoder().rssi, config.diagnostic_alpha)?;
                if let Some(reference) = reference {
                    let target = reference_phases(reference, &batch)?;
                    let ours = gram_matrix_auto(&pass.decoder().quantized)?;
                    let theirs = gram_matrix_auto(&target)?;
                    mi_sum += mutual_information(&ours, &theirs, config.diagnostic_alpha)?.mi;
                }
                diagnostics += 1;
            }
            batches += 1;
        }

        net.set_mode(Mode::Eval);
        let (val_loss, val_gain, val_genie_gain) = validate(net, data, &val_idx, config)?;
        let metrics = EpochMetrics {
            epoch,
            train_loss: loss_sum / batches as f64,
            val_loss,
            val_gain,
            val_genie_gain,
            entropy_y: entropy_sum / diagnostics as f64,
            mi_reference: reference.map(|_| mi_sum / diagnostics as f64),
        };
        let flow = on_epoch(&metrics);
        history.push(metrics);
        if flow.is_break() {
            break;
        }
    }
    net.set_mode(Mode::Eval);
    Ok(history)
}

/// Quantized phases of a reference model on the same channels.
pub fn reference_phases(reference: &AutoHpNetwork, batch: &ChannelBatch) -> Result<DMatrix<f64>> {
    let rssi = reference.encoder_forward(batch)?.rssi;
    reference.predict_phases(&rssi)
}

fn validate(
    net: &AutoHpNetwork,
    data: &[ChannelSample],
    indices: &[usize],
    config: &TrainConfig,
) -> Result<(f64, f64, f64)> {
    let options = LossOptions {
        entropy_weight: config.entropy_weight,
        ..LossOptions::default()
    };
    let (mut loss, mut gain, mut genie) = (0.0, 0.0, 0.0);
    let mut batches = 0usize;
    for chunk in minibatches(indices, config.batch_size) {
        let batch = ChannelBatch::from_samples(chunk.iter().map(|&i| &data[i]))?;
        let pass = net.forward_pass(&batch, &options)?;
        loss += pass.loss().total;
        gain += pass.gains().sum();
        genie += batch.norms_squared().sum();
        batches += 1;
    }
    let n = indices.len() as f64;
    Ok((loss / batches as f64, gain / n, genie / n))
}

/// Consecutive chunks of at most `size`; a trailing singleton joins the
/// previous chunk so every batch has at least two rows.
pub(crate) fn minibatches(indices: &[usize], size: usize) -> Vec<&[usize]> {
    let mut chunks: Vec<&[usize]> = indices.chunks(size).collect();
    if chunks.len() >= 2 && chunks.last().is_some_and(|c| c.len() == 1) {
        chunks.pop();
        let start = (chunks.len() - 1) * size;
        *chunks.last_mut().expect("at least one chunk") = &indices[start..];
    }
    chunks
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minibatches_absorb_singletons() {
        let idx: Vec<usize> = (0..9).collect();
        let chunks = minibatches(&idx, 4);
        assert_eq!(chunks.iter().map(|c| c.len()).collect::<Vec<_>>(), vec![4, 5]);
        let chunks = minibatches(&idx, 3);
        assert_eq!(chunks.len(), 3);
        assert_eq!(minibatches(&idx[..1], 4).len(), 1);
    }

    #[test]
    fn config_validation_names_keys() {
        let cfg = TrainConfig {
            batch_size: 1,
            ..TrainConfig::default()
        };
        assert!(cfg.validate().unwrap_err().to_string().contains("train.batch_size"));
        let cfg = TrainConfig {
            learning_rate: 0.0,
            ..TrainConfig::default()
        };
        assert!(cfg.validate().unwrap_err().to_string().contains("train.learning_rate"));
    }
}
