use std::f64::consts::FRAC_PI_2;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::{steering_vector, ArrayGeometry};
use crate::error::check_dim;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternRow {
    pub beam: usize,
    pub angle_rad: f64,
    pub gain: f64,
}

/// Azimuth grid over `[-π/2, π/2]`; a single point sits at broadside.
pub fn azimuth_grid(resolution: usize) -> Vec<f64> {
    match resolution {
        0 => Vec::new(),
        1 => vec![0.0],
        r => (0..r)
            .map(|i| -FRAC_PI_2 + std::f64::consts::PI * i as f64 / (r - 1) as f64)
            .collect(),
    }
}

/// `|a(θ)ᴴ p_m|²` for every beam column and grid angle, beam-major.
pub fn export_beam_patterns(
    beams: &DMatrix<Complex64>,
    geometry: &ArrayGeometry,
    resolution: usize,
) -> Result<Vec<PatternRow>> {
    if !geometry.is_ula() {
        return Err(Error::invalid(
            "beam patterns are swept in azimuth and need a linear array",
        ));
    }
    check_dim("pattern beam length", geometry.n_antennas(), beams.nrows())?;
    let grid = azimuth_grid(resolution);
    let steering: Vec<_> = grid.iter().map(|&az| steering_vector(geometry, az, 0.0)).collect();
    let mut rows = Vec::with_capacity(beams.ncols() * grid.len());
    for (m, beam) in beams.column_iter().enumerate() {
        for (&angle, a) in grid.iter().zip(&steering) {
            rows.push(PatternRow {
                beam: m,
                angle_rad: angle,
                gain: a.dotc(&beam).norm_sqr(),
            });
        }
    }
    Ok(rows)
}
