//! Closed-form beamforming algebra shared by training, deployment and the
//! baselines.

mod codebook;
mod measurement;
mod precoding;
mod quantizer;

pub use codebook::{best_codebook_beam, dft_codebook, feedback_quantize, FeedbackCodebook, FeedbackMode};
pub use measurement::{rssi_measure, ProbingMeasurement};
pub use precoding::{
    effective_channel, mrt_genie_rate, sinr_and_rate, zf_baseband, zf_unnormalized, HybridPrecoder, ZF_RCOND_THRESHOLD,
};
pub use quantizer::{circular_distance, quantize_phases, PhaseQuantizer};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::{Error, Result};

/// Probing matrix `P = (cos Φ + j sin Φ) / √N` and the phases it came from.
///
/// Rows index antennas, columns index probing beams.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbingCodebook {
    pub phases: DMatrix<f64>,
    pub beams: DMatrix<Complex64>,
}

impl ProbingCodebook {
    pub fn n_antennas(&self) -> usize {
        self.beams.nrows()
    }

    pub fn n_beams(&self) -> usize {
        self.beams.ncols()
    }
}

pub fn probing_from_phases(phases: &DMatrix<f64>) -> Result<ProbingCodebook> {
    if phases.iter().any(|p| !p.is_finite()) {
        return Err(Error::invalid("probing phases must be finite"));
    }
    if phases.nrows() == 0 {
        return Err(Error::invalid("probing matrix needs at least one antenna"));
    }
    let scale = 1.0 / (phases.nrows() as f64).sqrt();
    Ok(ProbingCodebook {
        phases: phases.clone(),
        beams: phases.map(|p| Complex64::from_polar(scale, p)),
    })
}

/// Analog beam `f = e^{jθ} / √N` from per-antenna phases.
pub fn rf_beam_from_phases(phases: &[f64]) -> DVector<Complex64> {
    let scale = 1.0 / (phases.len() as f64).sqrt();
    DVector::from_iterator(phases.len(), phases.iter().map(|&p| Complex64::from_polar(scale, p)))
}

/// Single-user beamforming gain `|hᴴ f|²`.
pub fn beam_gain(h: &DVector<Complex64>, beam: &DVector<Complex64>) -> f64 {
    h.dotc(beam).norm_sqr()
}
