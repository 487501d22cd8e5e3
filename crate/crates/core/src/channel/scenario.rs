use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{synthesize_user, wrap_angle, ArrayGeometry, ChannelSample, PathComponent};
use crate::{Error, Result, SimRng};

/// Distribution of per-path complex gains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GainModel {
    /// Circularly-symmetric complex Gaussian with unit variance.
    #[default]
    ComplexGaussian,
    /// Every path gain equals `1 + 0j`.
    Unit,
}

/// Clustered synthetic scenario standing in for a ray-traced site.
///
/// Users are assigned to clusters round-robin. Each of a user's paths departs
/// at its cluster centre plus an independent uniform offset in
/// `[-angular_spread_rad, angular_spread_rad]` on both angles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub geometry: ArrayGeometry,
    pub n_users: usize,
    pub n_clusters: usize,
    /// `(azimuth, elevation)` pairs in radians. When empty, `n_clusters`
    /// centres are spread evenly in azimuth over `[-π/3, π/3]` at zero
    /// elevation.
    #[serde(default)]
    pub cluster_centers: Vec<(f64, f64)>,
    pub angular_spread_rad: f64,
    pub paths_per_user: usize,
    #[serde(default)]
    pub gain_model: GainModel,
    /// Per-sample SNR of additive channel noise; `None` generates clean channels.
    #[serde(default)]
    pub channel_snr_db: Option<f64>,
    pub seed: u64,
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        self.geometry.validate()?;
        if self.n_clusters == 0 {
            return Err(Error::config("scenario.n_clusters", "must be at least 1"));
        }
        if !self.cluster_centers.is_empty() && self.cluster_centers.len() != self.n_clusters {
            return Err(Error::config(
                "scenario.cluster_centers",
                format!(
                    "expected {} centres, got {}",
                    self.n_clusters,
                    self.cluster_centers.len()
                ),
            ));
        }
        if !(self.angular_spread_rad >= 0.0 && self.angular_spread_rad.is_finite()) {
            return Err(Error::config(
                "scenario.angular_spread_rad",
                "must be a finite value >= 0",
            ));
        }
        if self.paths_per_user == 0 {
            return Err(Error::config("scenario.paths_per_user", "must be at least 1"));
        }
        if let Some(snr) = self.channel_snr_db {
            if !snr.is_finite() {
                return Err(Error::config("scenario.channel_snr_db", "must be finite"));
            }
        }
        Ok(())
    }

    /// Cluster centres actually used for generation.
    pub fn centers(&self) -> Vec<(f64, f64)> {
        if !self.cluster_centers.is_empty() {
            return self.cluster_centers.clone();
        }
        let k = self.n_clusters as f64;
        (0..self.n_clusters)
            .map(|i| (-PI / 3.0 + (2.0 * PI / 3.0) * (i as f64 + 0.5) / k, 0.0))
            .collect()
    }
}

/// Generates `config.n_users` channels.
///
/// Each user draws from its own ChaCha stream (seed = `config.seed`, stream =
/// user index), so the output does not depend on generation order.
pub fn generate_dataset(config: &ScenarioConfig) -> Result<Vec<ChannelSample>> {
    config.validate()?;
    let centers = config.centers();
    (0..config.n_users)
        .map(|user| {
            let mut rng = SimRng::seed_from_u64(config.seed);
            rng.set_stream(user as u64);
            generate_user(config, &centers, user, &mut rng)
        })
        .collect()
}

fn generate_user(
    config: &ScenarioConfig,
    centers: &[(f64, f64)],
    user: usize,
    rng: &mut SimRng,
) -> Result<ChannelSample> {
    let (center_az, center_el) = centers[user % centers.len()];
    let spread = config.angular_spread_rad;
    let paths: Vec<PathComponent> = (0..config.paths_per_user)
        .map(|_| {
            let gain = match config.gain_model {
                GainModel::ComplexGaussian => complex_gaussian(rng, 1.0),
                GainModel::Unit => Complex64::new(1.0, 0.0),
            };
            let az_offset = if spread > 0.0 {
                rng.random_range(-spread..=spread)
            } else {
                0.0
            };
            let el_offset = if spread > 0.0 {
                rng.random_range(-spread..=spread)
            } else {
                0.0
            };
            PathComponent::new(
                gain,
                wrap_angle(center_az + az_offset),
                (center_el + el_offset).clamp(-FRAC_PI_2, FRAC_PI_2),
            )
        })
        .collect();
    let mut sample = synthesize_user(&paths, &config.geometry, user as u64)?;
    if let Some(snr_db) = config.channel_snr_db {
        let n = sample.vector.len() as f64;
        let signal_power = sample.norm_squared() / n;
        let noise_var = signal_power / 10f64.powf(snr_db / 10.0);
        for entry in sample.vector.iter_mut() {
            *entry += complex_gaussian(rng, noise_var);
        }
    }
    Ok(sample)
}

/// Draws from `CN(0, variance)`.
pub(crate) fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> Complex64 {
    let scale = (variance / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(scale * re, scale * im)
}
