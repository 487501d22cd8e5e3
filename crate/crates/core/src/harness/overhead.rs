use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Beam-training overhead saved by probing `m_learned` beams instead of
/// sweeping a DFT or oversampled DFT codebook.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OverheadReport {
    pub m_learned: usize,
    pub n_dft: usize,
    pub n_odft: usize,
    pub reduction_vs_dft: f64,
    pub reduction_vs_odft: f64,
}

pub fn overhead_report(m_learned: usize, n_dft: usize, n_odft: usize) -> Result<OverheadReport> {
    if m_learned == 0 || n_dft == 0 || n_odft == 0 {
        return Err(Error::invalid("beam counts must be positive"));
    }
    Ok(OverheadReport {
        m_learned,
        n_dft,
        n_odft,
        reduction_vs_dft: 1.0 - m_learned as f64 / n_dft as f64,
        reduction_vs_odft: 1.0 - m_learned as f64 / n_odft as f64,
    })
}
