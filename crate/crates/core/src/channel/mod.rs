//! Geometric mmWave channel model.
//!
//! A user channel is a weighted sum of `L` plane-wave paths, each described by
//! a complex gain and an angle of departure pair. The array response of a
//! uniform planar array (a ULA is the `n_vertical = 1` case) is the Kronecker
//! product of the horizontal and vertical phase progressions.

mod io;
mod scenario;

pub(crate) use io::Cursor;
pub use io::{load_dataset, read_dataset, save_dataset, write_dataset, DATASET_MAGIC, DATASET_VERSION};
pub(crate) use scenario::complex_gaussian;
pub use scenario::{generate_dataset, GainModel, ScenarioConfig};

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Uniform planar array with `n_horizontal × n_vertical` elements.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArrayGeometry {
    pub n_horizontal: usize,
    pub n_vertical: usize,
    /// Element spacing in wavelengths (`d / λ`).
    pub element_spacing_wavelengths: f64,
}

impl ArrayGeometry {
    pub fn new(n_horizontal: usize, n_vertical: usize, element_spacing_wavelengths: f64) -> Result<Self> {
        let geometry = Self {
            n_horizontal,
            n_vertical,
            element_spacing_wavelengths,
        };
        geometry.validate()?;
        Ok(geometry)
    }

    /// Half-wavelength uniform linear array.
    pub fn ula(n_antennas: usize) -> Self {
        Self {
            n_horizontal: n_antennas,
            n_vertical: 1,
            element_spacing_wavelengths: 0.5,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_horizontal == 0 || self.n_vertical == 0 {
            return Err(Error::invalid("array needs at least one element per axis"));
        }
        if !(self.element_spacing_wavelengths > 0.0 && self.element_spacing_wavelengths.is_finite()) {
            return Err(Error::invalid("element spacing must be positive"));
        }
        Ok(())
    }

    pub fn n_antennas(&self) -> usize {
        self.n_horizontal * self.n_vertical
    }

    pub fn is_ula(&self) -> bool {
        self.n_vertical == 1
    }
}

/// One propagation path: complex gain and angles of departure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathComponent {
    pub gain: Complex64,
    /// Azimuth in `(-π, π]`.
    pub azimuth_rad: f64,
    /// Elevation in `[-π/2, π/2]`.
    pub elevation_rad: f64,
}

impl PathComponent {
    pub fn new(gain: Complex64, azimuth_rad: f64, elevation_rad: f64) -> Self {
        Self {
            gain,
            azimuth_rad,
            elevation_rad,
        }
    }

    fn validate(&self) -> Result<()> {
        let az_ok = self.azimuth_rad > -PI && self.azimuth_rad <= PI;
        let el_ok = (-FRAC_PI_2..=FRAC_PI_2).contains(&self.elevation_rad);
        if !(az_ok && el_ok) {
            return Err(Error::invalid(format!(
                "path angles out of range (azimuth {}, elevation {})",
                self.azimuth_rad, self.elevation_rad
            )));
        }
        if !(self.gain.re.is_finite() && self.gain.im.is_finite()) {
            return Err(Error::invalid("path gain must be finite"));
        }
        Ok(())
    }
}

/// A single user's channel vector together with the paths that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSample {
    pub vector: DVector<Complex64>,
    pub paths: Vec<PathComponent>,
    pub user_id: u64,
}

impl ChannelSample {
    pub fn n_antennas(&self) -> usize {
        self.vector.len()
    }

    /// Squared norm `‖h‖²`, the interference-free matched-beam gain.
    pub fn norm_squared(&self) -> f64 {
        self.vector.norm_squared()
    }
}

/// Array response `a(θ, φ)` with unit L2 norm.
pub fn steering_vector(geometry: &ArrayGeometry, azimuth: f64, elevation: f64) -> DVector<Complex64> {
    let spacing = geometry.element_spacing_wavelengths;
    let d1 = spacing * azimuth.sin() * elevation.cos();
    let d2 = spacing * elevation.sin();
    let scale = 1.0 / (geometry.n_antennas() as f64).sqrt();
    DVector::from_fn(geometry.n_antennas(), |idx, _| {
        let n1 = (idx / geometry.n_vertical) as f64;
        let n2 = (idx % geometry.n_vertical) as f64;
        Complex64::from_polar(scale, -2.0 * PI * (d1 * n1 + d2 * n2))
    })
}

/// Channel `h = √(N/L) Σ_ℓ α_ℓ a(θ_ℓ, φ_ℓ)`.
pub fn synthesize_channel(paths: &[PathComponent], geometry: &ArrayGeometry) -> Result<ChannelSample> {
    synthesize_user(paths, geometry, 0)
}

pub(crate) fn synthesize_user(
    paths: &[PathComponent],
    geometry: &ArrayGeometry,
    user_id: u64,
) -> Result<ChannelSample> {
    if paths.is_empty() {
        return Err(Error::EmptyPaths);
    }
    geometry.validate()?;
    for path in paths {
        path.validate()?;
    }
    let n = geometry.n_antennas();
    let scale = (n as f64 / paths.len() as f64).sqrt();
    let mut vector = DVector::<Complex64>::zeros(n);
    for path in paths {
        let a = steering_vector(geometry, path.azimuth_rad, path.elevation_rad);
        vector.axpy(path.gain * scale, &a, Complex64::new(1.0, 0.0));
    }
    Ok(ChannelSample {
        vector,
        paths: paths.to_vec(),
        user_id,
    })
}

/// Wraps an angle into `(-π, π]`.
pub fn wrap_angle(angle: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let mut wrapped = angle.rem_euclid(two_pi);
    if wrapped > PI {
        wrapped -= two_pi;
    }
    if wrapped <= -PI {
        wrapped += two_pi;
    }
    wrapped
}
