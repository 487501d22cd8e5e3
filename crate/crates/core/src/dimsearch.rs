//! Bisection over the bottleneck width, driven by an entropy condition
//! that compares bottleneck entropy with mutual information against an
//! uncompressed reference model.

use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use crate::beamforming::PhaseQuantizer;
use crate::channel::ChannelSample;
use crate::neuralnet::{fit, fit_with, AutoHpNetwork, TrainConfig};
use crate::{derive_seed, rng_from_seed, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchConfig {
    pub n_antennas: usize,
    /// Target ratio `k` of bottleneck entropy to reference information.
    pub approximation_level: f64,
    /// Relative tolerance `δ` on the condition.
    pub condition_tolerance: f64,
    /// Compare values rounded to two decimals instead of using `δ`.
    pub round_to_two_decimals: bool,
    pub max_epochs_per_probe: usize,
    pub early_stop_patience: usize,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            n_antennas: 64,
            approximation_level: 1.0,
            condition_tolerance: 0.02,
            round_to_two_decimals: false,
            max_epochs_per_probe: 100,
            early_stop_patience: 10,
            seed: 0,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_antennas < 2 {
            return Err(Error::config("search.n_antennas", "must be at least 2"));
        }
        if !(self.approximation_level > 0.0 && self.approximation_level <= 1.0) {
            return Err(Error::config(
                "search.approximation_level",
                format!("must lie in (0, 1], got {}", self.approximation_level),
            ));
        }
        if !(self.condition_tolerance > 0.0 && self.condition_tolerance.is_finite()) {
            return Err(Error::config(
                "search.condition_tolerance",
                format!("must be positive, got {}", self.condition_tolerance),
            ));
        }
        if self.max_epochs_per_probe == 0 {
            return Err(Error::config("search.max_epochs_per_probe", "must be at least 1"));
        }
        if self.early_stop_patience == 0 {
            return Err(Error::config("search.early_stop_patience", "must be at least 1"));
        }
        Ok(())
    }

    /// `S̄_Y ≈ k·Ī_Θ`, either within relative tolerance or after rounding.
    pub fn condition_holds(&self, entropy_y: f64, mi_reference: f64) -> bool {
        let target = self.approximation_level * mi_reference;
        if self.round_to_two_decimals {
            let round = |v: f64| (v * 100.0).round();
            round(entropy_y) == round(target)
        } else {
            let lo = target * (1.0 - self.condition_tolerance);
            let hi = target * (1.0 + self.condition_tolerance);
            entropy_y >= lo.min(hi) && entropy_y <= lo.max(hi)
        }
    }
}

/// One probe of the search log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeResult {
    pub m_candidate: usize,
    pub condition_held: bool,
    pub epochs_used: usize,
    /// `S̄_Y` at the deciding epoch.
    pub entropy_y: f64,
    /// `Ī_Θ` at the deciding epoch.
    pub mi_reference: f64,
}

pub trait ConditionOracle {
    fn probe(&mut self, m: usize) -> Result<ProbeResult>;
}

/// Deterministic oracle that holds exactly for `m ≥ threshold`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ThresholdOracle {
    pub threshold: usize,
}

impl ConditionOracle for ThresholdOracle {
    fn probe(&mut self, m: usize) -> Result<ProbeResult> {
        Ok(ProbeResult {
            m_candidate: m,
            condition_held: m >= self.threshold,
            epochs_used: 0,
            entropy_y: m as f64,
            mi_reference: self.threshold as f64,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchOutcome {
    /// Smallest width that satisfied the condition, or `n_antennas` if none did.
    pub dimension: usize,
    pub probes: Vec<ProbeResult>,
}

/// Bisection on `[1, n - 1]` with upper midpoints.
pub fn bisection_search<O: ConditionOracle + ?Sized>(oracle: &mut O, n_antennas: usize) -> Result<SearchOutcome> {
    if n_antennas < 2 {
        return Err(Error::invalid("bisection needs at least 2 antennas"));
    }
    let (mut lo, mut hi) = (1usize, n_antennas - 1);
    let mut probes = Vec::new();
    while lo <= hi {
        let mid = (lo + hi).div_ceil(2);
        let result = oracle.probe(mid)?;
        let held = result.condition_held;
        probes.push(result);
        if held {
            hi = mid - 1;
        } else {
            lo = mid + 1;
        }
    }
    Ok(SearchOutcome { dimension: lo, probes })
}

/// Distinct, reproducible seed per probed width.
pub fn probe_seed(seed: u64, m: usize) -> u64 {
    derive_seed(seed, m as u64)
}

/// Trains the uncompressed (`M = N`) model used as `θ*`.
pub fn train_reference(
    data: &[ChannelSample],
    n_antennas: usize,
    quantizer: PhaseQuantizer,
    train: &TrainConfig,
) -> Result<AutoHpNetwork> {
    let mut net = AutoHpNetwork::new(n_antennas, n_antennas, quantizer, &mut rng_from_seed(train.seed))?;
    fit(&mut net, data, train)?;
    Ok(net)
}

/// Trains a fresh network with `m` probing beams and reports whether the
/// entropy condition held at some epoch before early stopping.
pub fn entropy_condition_check(
    data: &[ChannelSample],
    m: usize,
    reference: Option<&AutoHpNetwork>,
    search: &SearchConfig,
    train: &TrainConfig,
) -> Result<ProbeResult> {
    let reference = reference.ok_or(Error::MissingReference)?;
    if m == 0 || m > search.n_antennas {
        return Err(Error::invalid(format!(
            "probe width must lie in [1, {}], got {m}",
            search.n_antennas
        )));
    }
    let seed = probe_seed(search.seed, m);
    let mut net = AutoHpNetwork::new(search.n_antennas, m, reference.quantizer(), &mut rng_from_seed(seed))?;
    let probe_train = TrainConfig {
        epochs: search.max_epochs_per_probe,
        seed,
        ..train.clone()
    };
    let mut best = f64::INFINITY;
    let mut stale = 0usize;
    let mut result = ProbeResult {
        m_candidate: m,
        condition_held: false,
        epochs_used: 0,
        entropy_y: f64::NAN,
        mi_reference: f64::NAN,
    };
    fit_with(&mut net, data, &probe_train, Some(reference), |metrics| {
        let mi = metrics.mi_reference.unwrap_or(f64::NAN);
        result.epochs_used = metrics.epoch + 1;
        result.entropy_y = metrics.entropy_y;
        result.mi_reference = mi;
        if search.condition_holds(metrics.entropy_y, mi) {
            result.condition_held = true;
            return ControlFlow::Break(());
        }
        if metrics.val_loss < best {
            best = metrics.val_loss;
            stale = 0;
        } else {
            stale += 1;
        }
        if stale >= search.early_stop_patience {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    })?;
    Ok(result)
}

/// Oracle backed by real training against a cached reference model.
pub struct TrainingOracle<'a> {
    pub data: &'a [ChannelSample],
    pub reference: &'a AutoHpNetwork,
    pub search: SearchConfig,
    pub train: TrainConfig,
}

impl ConditionOracle for TrainingOracle<'_> {
    fn probe(&mut self, m: usize) -> Result<ProbeResult> {
        entropy_condition_check(self.data, m, Some(self.reference), &self.search, &self.train)
    }
}
