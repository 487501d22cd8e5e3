use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;

use super::ProbingCodebook;
use crate::channel::complex_gaussian;
use crate::error::check_dim;
use crate::{Error, Result};

/// What a user reports after a probing sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbingMeasurement {
    /// `r = √P_t hᴴ P + n`, one entry per probing beam.
    pub complex_received: DVector<Complex64>,
    /// Element-wise `|r_m|²`.
    pub powers: DVector<f64>,
    pub tx_power: f64,
    pub noise_power: f64,
}

/// Sweeps `codebook` against `h` with a unit pilot.
///
/// Every measurement gets independent `CN(0, noise_power)` noise; with
/// `noise_power == 0` no random numbers are drawn.
pub fn rssi_measure<R: Rng + ?Sized>(
    h: &DVector<Complex64>,
    codebook: &ProbingCodebook,
    tx_power: f64,
    noise_power: f64,
    rng: &mut R,
) -> Result<ProbingMeasurement> {
    check_dim("rssi_measure channel length", codebook.n_antennas(), h.len())?;
    if !(tx_power >= 0.0) || !(noise_power >= 0.0) {
        return Err(Error::invalid("transmit and noise powers must be non-negative"));
    }
    let amplitude = tx_power.sqrt();
    let mut received = codebook.beams.tr_mul(&h.map(|x| x.conj())).map(|x| x * amplitude);
    if noise_power > 0.0 {
        for r in received.iter_mut() {
            *r += complex_gaussian(rng, noise_power);
        }
    }
    let powers = received.map(|r| r.norm_sqr());
    Ok(ProbingMeasurement {
        complex_received: received,
        powers,
        tx_power,
        noise_power,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beamforming::probing_from_phases;
    use crate::channel::{steering_vector, synthesize_channel, ArrayGeometry, PathComponent};
    use crate::rng_from_seed;
    use nalgebra::DMatrix;

    fn codebook_from_columns(cols: &[DVector<Complex64>]) -> ProbingCodebook {
        let beams = DMatrix::from_columns(cols);
        ProbingCodebook {
            phases: beams.map(|b| b.arg()),
            beams,
        }
    }

    #[test]
    fn matched_probe_collects_full_gain() {
        let geometry = ArrayGeometry::ula(8);
        let h = synthesize_channel(&[PathComponent::new(Complex64::new(1.0, 0.0), 0.3, 0.0)], &geometry).unwrap();
        let p = codebook_from_columns(&[steering_vector(&geometry, 0.3, 0.0)]);
        let m = rssi_measure(&h.vector, &p, 1.0, 0.0, &mut rng_from_seed(0)).unwrap();
        assert!((m.powers[0] - 8.0).abs() < 1e-12);
    }

    #[test]
    fn zero_channel_measures_nothing() {
        let p = probing_from_phases(&DMatrix::from_fn(4, 3, |i, j| (i + 2 * j) as f64)).unwrap();
        let m = rssi_measure(&DVector::zeros(4), &p, 1.0, 0.0, &mut rng_from_seed(0)).unwrap();
        assert!(m.powers.iter().all(|&y| y == 0.0));
    }

    #[test]
    fn orthogonal_probe_measures_nothing() {
        let s = 1.0 / 2f64.sqrt();
        let h = DVector::from_vec(vec![Complex64::new(1.0, 0.0); 2]);
        let p = codebook_from_columns(&[DVector::from_vec(vec![Complex64::new(s, 0.0), Complex64::new(-s, 0.0)])]);
        let m = rssi_measure(&h, &p, 1.0, 0.0, &mut rng_from_seed(0)).unwrap();
        assert!(m.powers[0].abs() < 1e-30);
    }

    #[test]
    fn powers_are_squared_magnitudes_under_noise() {
        let p = probing_from_phases(&DMatrix::from_fn(4, 3, |i, j| 0.1 * (i * j) as f64)).unwrap();
        let h = DVector::from_fn(4, |i, _| Complex64::new(i as f64, 1.0));
        let m = rssi_measure(&h, &p, 2.0, 0.5, &mut rng_from_seed(9)).unwrap();
        for (r, y) in m.complex_received.iter().zip(m.powers.iter()) {
            assert_eq!(r.norm_sqr(), *y);
        }
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let p = probing_from_phases(&DMatrix::zeros(4, 2)).unwrap();
        let err = rssi_measure(&DVector::zeros(3), &p, 1.0, 0.0, &mut rng_from_seed(0));
        assert!(matches!(err, Err(Error::DimensionMismatch { .. })));
    }
}
