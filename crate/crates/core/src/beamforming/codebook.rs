use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::complex_gaussian;
use crate::error::check_dim;
use crate::{rng_from_seed, Error, Result};

/// `N × (O·N)` DFT codebook; column `k` is `e^{-j2πkn/(O·N)} / √N`.
///
/// Only `O ∈ {1, 2}` is supported (plain and 2× oversampled grids).
pub fn dft_codebook(n_antennas: usize, oversampling: usize) -> Result<DMatrix<Complex64>> {
    if n_antennas == 0 {
        return Err(Error::invalid("DFT codebook needs at least one antenna"));
    }
    if !matches!(oversampling, 1 | 2) {
        return Err(Error::invalid(format!(
            "DFT oversampling must be 1 or 2, got {oversampling}"
        )));
    }
    let n_beams = oversampling * n_antennas;
    let scale = 1.0 / (n_antennas as f64).sqrt();
    Ok(DMatrix::from_fn(n_antennas, n_beams, |n, k| {
        Complex64::from_polar(scale, -2.0 * PI * (k * n) as f64 / n_beams as f64)
    }))
}

/// Exhaustive beam selection: `argmax_m |hᴴ p_m|²`, lowest index on ties.
pub fn best_codebook_beam(h: &DVector<Complex64>, codebook: &DMatrix<Complex64>) -> Result<(usize, f64)> {
    check_dim("best_codebook_beam channel length", codebook.nrows(), h.len())?;
    if codebook.ncols() == 0 {
        return Err(Error::invalid("codebook has no beams"));
    }
    let mut best = (0, f64::NEG_INFINITY);
    for (m, column) in codebook.column_iter().enumerate() {
        let gain = h.dotc(&column).norm_sqr();
        if gain > best.1 {
            best = (m, gain);
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeedbackMode {
    /// Effective channels are fed back without distortion.
    Perfect,
    /// Random vector quantization of the channel direction.
    Rvq,
}

/// Limited-feedback codebook for effective channels.
#[derive(Debug, Clone, PartialEq)]
pub struct FeedbackCodebook {
    pub bits: u32,
    pub entries: Vec<DVector<Complex64>>,
    pub mode: FeedbackMode,
}

impl FeedbackCodebook {
    pub fn perfect() -> Self {
        Self {
            bits: 0,
            entries: Vec::new(),
            mode: FeedbackMode::Perfect,
        }
    }

    /// `2^bits` isotropic unit vectors of length `dim`, drawn from `seed`.
    pub fn random(dim: usize, bits: u32, seed: u64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("feedback codebook dimension must be positive"));
        }
        if bits > 20 {
            return Err(Error::invalid(format!("feedback bits {bits} exceeds the supported 20")));
        }
        let mut rng = rng_from_seed(seed);
        let entries = (0..1usize << bits)
            .map(|_| loop {
                let v = DVector::from_fn(dim, |_, _| complex_gaussian(&mut rng, 1.0));
                let norm = v.norm();
                if norm > 1e-12 {
                    break v.unscale(norm);
                }
            })
            .collect();
        Ok(Self {
            bits,
            entries,
            mode: FeedbackMode::Rvq,
        })
    }

    /// Quantizing codebook over explicit entries; each is normalized to unit norm.
    pub fn from_entries(entries: Vec<DVector<Complex64>>) -> Result<Self> {
        let len = entries.len();
        if len == 0 {
            return Err(Error::invalid("feedback codebook needs at least one entry"));
        }
        let dim = entries[0].len();
        let entries = entries
            .into_iter()
            .map(|e| {
                check_dim("feedback codebook entry", dim, e.len())?;
                let norm = e.norm();
                if norm <= 1e-12 {
                    return Err(Error::invalid("feedback codebook entries must be non-zero"));
                }
                Ok(e.unscale(norm))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            bits: len.next_power_of_two().trailing_zeros(),
            entries,
            mode: FeedbackMode::Rvq,
        })
    }
}

/// Quantizes the direction of `h_eff`, keeping its magnitude.
pub fn feedback_quantize(h_eff: &DVector<Complex64>, codebook: &FeedbackCodebook) -> Result<DVector<Complex64>> {
    if h_eff.is_empty() {
        return Err(Error::invalid("cannot quantize an empty effective channel"));
    }
    match codebook.mode {
        FeedbackMode::Perfect => Ok(h_eff.clone()),
        FeedbackMode::Rvq => {
            let first = codebook
                .entries
                .first()
                .ok_or_else(|| Error::invalid("quantizing feedback codebook is empty"))?;
            check_dim("feedback codebook entry", h_eff.len(), first.len())?;
            let mut best = (first, f64::NEG_INFINITY);
            for entry in &codebook.entries {
                let score = h_eff.dotc(entry).norm();
                if score > best.1 {
                    best = (entry, score);
                }
            }
            let norm = h_eff.norm();
            // Align the entry's phase with h_eff so a matching entry reproduces it.
            let inner = best.0.dotc(h_eff);
            let phase = if inner.norm() > 0.0 {
                inner / inner.norm()
            } else {
                Complex64::new(1.0, 0.0)
            };
            Ok(best.0.map(|x| x * phase * norm))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{synthesize_channel, ArrayGeometry, PathComponent};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn first_dft_column_is_flat() {
        let p = dft_codebook(4, 1).unwrap();
        assert!(p.column(0).iter().all(|x| (x - c(0.5, 0.0)).norm() < 1e-15));
    }

    #[test]
    fn dft_is_unitary() {
        let p = dft_codebook(4, 1).unwrap();
        let gram = p.adjoint() * &p;
        assert!((gram - DMatrix::<Complex64>::identity(4, 4)).norm() < 1e-12);
    }

    #[test]
    fn oversampled_dft_gram_by_hand() {
        // N=2, O=2: columns (1/√2)[1, e^{-jπk/2}], k=0..3.
        // Adjacent columns: pᴴ_k p_{k+1} = (1 + e^{-jπ/2}) / 2 = (1 - j) / 2, modulus 1/√2.
        let p = dft_codebook(2, 2).unwrap();
        assert_eq!(p.ncols(), 4);
        let gram = p.adjoint() * &p;
        for k in 0..3 {
            assert!((gram[(k, k + 1)] - c(0.5, -0.5)).norm() < 1e-12);
        }
        assert!(gram[(0, 2)].norm() < 1e-12);
    }

    #[test]
    fn unsupported_oversampling() {
        assert!(dft_codebook(4, 3).is_err());
    }

    #[test]
    fn on_grid_channel_selects_its_dft_beam() {
        // DFT column k matches a half-wavelength ULA at sin θ = 2k/N (mod 2).
        let n = 8;
        let k = 3;
        let mut sin_theta = 2.0 * k as f64 / n as f64;
        if sin_theta > 1.0 {
            sin_theta -= 2.0;
        }
        let alpha = c(0.3, 1.1);
        let h = synthesize_channel(
            &[PathComponent::new(alpha, sin_theta.asin(), 0.0)],
            &ArrayGeometry::ula(n),
        )
        .unwrap();
        let (idx, gain) = best_codebook_beam(&h.vector, &dft_codebook(n, 1).unwrap()).unwrap();
        assert_eq!(idx, k);
        assert!((gain - n as f64 * alpha.norm_sqr()).abs() < 1e-10);
    }

    #[test]
    fn zero_channel_ties_to_first_beam() {
        let (idx, gain) = best_codebook_beam(&DVector::zeros(4), &dft_codebook(4, 2).unwrap()).unwrap();
        assert_eq!((idx, gain), (0, 0.0));
    }

    #[test]
    fn single_column_codebook() {
        let h = DVector::from_element(4, c(1.0, 0.0));
        let (idx, _) = best_codebook_beam(&h, &DMatrix::from_element(4, 1, c(0.5, 0.0))).unwrap();
        assert_eq!(idx, 0);
    }

    #[test]
    fn perfect_feedback_is_identity() {
        let h = DVector::from_vec(vec![c(1.0, 2.0), c(-0.5, 0.1)]);
        assert_eq!(feedback_quantize(&h, &FeedbackCodebook::perfect()).unwrap(), h);
    }

    #[test]
    fn codebook_containing_the_direction_reproduces_it() {
        let h = DVector::from_vec(vec![c(1.0, 2.0), c(-0.5, 0.1), c(0.0, -1.0)]);
        let mut book = FeedbackCodebook::random(3, 3, 11).unwrap();
        book.entries.push(h.unscale(h.norm()));
        let q = feedback_quantize(&h, &book).unwrap();
        assert!((q - h).norm() < 1e-12);
    }

    #[test]
    fn two_entry_codebook_picks_dominant_axis() {
        let e1 = DVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]);
        let e2 = DVector::from_vec(vec![c(0.0, 0.0), c(1.0, 0.0)]);
        let book = FeedbackCodebook::from_entries(vec![e1.clone(), e2]).unwrap();
        let h = DVector::from_vec(vec![c(1.0, 0.0), c(0.1, 0.0)]);
        let q = feedback_quantize(&h, &book).unwrap();
        assert!((q - e1 * c(h.norm(), 0.0)).norm() < 1e-12);
    }

    #[test]
    fn random_codebook_entries_are_unit_norm() {
        let book = FeedbackCodebook::random(4, 6, 5).unwrap();
        assert_eq!(book.entries.len(), 64);
        assert!(book.entries.iter().all(|e| (e.norm() - 1.0).abs() < 1e-12));
    }

    #[test]
    fn empty_effective_channel_rejected() {
        assert!(feedback_quantize(&DVector::zeros(0), &FeedbackCodebook::perfect()).is_err());
    }
}
