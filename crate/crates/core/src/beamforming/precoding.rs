use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::check_dim;
use crate::{Error, Result};

/// Reciprocal condition number of `ĤĤᴴ` below which ZF is refused.
pub const ZF_RCOND_THRESHOLD: f64 = 1e-10;

/// Analog beams (`N × N_RF`) plus digital precoder (`N_RF × N_U`).
#[derive(Debug, Clone, PartialEq)]
pub struct HybridPrecoder {
    pub rf: DMatrix<Complex64>,
    pub bb: DMatrix<Complex64>,
}

impl HybridPrecoder {
    pub fn new(rf: DMatrix<Complex64>, bb: DMatrix<Complex64>) -> Result<Self> {
        check_dim("hybrid precoder inner dimension", rf.ncols(), bb.nrows())?;
        Ok(Self { rf, bb })
    }

    pub fn n_users(&self) -> usize {
        self.bb.ncols()
    }

    /// Composite precoder `F_RF F_BB`.
    pub fn combined(&self) -> DMatrix<Complex64> {
        &self.rf * &self.bb
    }
}

/// Effective channel `F_RFᴴ h` seen through the analog beams.
pub fn effective_channel(h: &DVector<Complex64>, rf: &DMatrix<Complex64>) -> Result<DVector<Complex64>> {
    check_dim("effective_channel channel length", rf.nrows(), h.len())?;
    Ok(rf.ad_mul(h))
}

/// `F_BB = Ĥᴴ (Ĥ Ĥᴴ)⁻¹` without power normalization, so `Ĥ F_BB = I`.
pub fn zf_unnormalized(h_hat: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    if h_hat.nrows() == 0 {
        return Err(Error::invalid("ZF needs at least one user"));
    }
    let gram = h_hat * h_hat.adjoint();
    let singular = gram.singular_values();
    let max = singular.max();
    let min = singular.min();
    let rcond = if max > 0.0 { min / max } else { 0.0 };
    if !(rcond >= ZF_RCOND_THRESHOLD) {
        return Err(Error::RankDeficient { rcond });
    }
    let inverse = gram.try_inverse().ok_or(Error::RankDeficient { rcond })?;
    Ok(h_hat.adjoint() * inverse)
}

/// Zero-forcing baseband precoder with every user column scaled so that
/// `‖F_RF f_BB,u‖ = 1`.
///
/// `h_hat` holds one (fed-back) effective channel per row, i.e. row `u` is
/// `ĥ_uᴴ`.
pub fn zf_baseband(h_hat: &DMatrix<Complex64>, rf: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    check_dim("zf_baseband RF chain count", rf.ncols(), h_hat.ncols())?;
    let mut bb = zf_unnormalized(h_hat)?;
    for mut column in bb.column_iter_mut() {
        let norm = (rf * &column).norm();
        if !(norm > 0.0) {
            return Err(Error::RankDeficient { rcond: 0.0 });
        }
        column.unscale_mut(norm);
    }
    Ok(bb)
}

/// SINR and rate of user `user` under `precoder`, with total power `P` split
/// evenly across the `N_U` streams.
pub fn sinr_and_rate(
    h: &DVector<Complex64>,
    precoder: &HybridPrecoder,
    user: usize,
    total_power: f64,
    noise_power: f64,
) -> Result<(f64, f64)> {
    if !(noise_power > 0.0) {
        return Err(Error::invalid("noise power must be positive"));
    }
    check_dim("sinr_and_rate channel length", precoder.rf.nrows(), h.len())?;
    let n_users = precoder.n_users();
    if user >= n_users {
        return Err(Error::invalid(format!(
            "user {user} out of range for {n_users} streams"
        )));
    }
    let stream_power = total_power / n_users as f64;
    let h_rf = precoder.rf.ad_mul(h).map(|x| x.conj()).transpose();
    let received = &h_rf * &precoder.bb;
    let desired = stream_power * received[(0, user)].norm_sqr();
    let interference: f64 = (0..n_users)
        .filter(|&n| n != user)
        .map(|n| stream_power * received[(0, n)].norm_sqr())
        .sum();
    let sinr = desired / (interference + noise_power);
    Ok((sinr, (1.0 + sinr).log2()))
}

/// Interference-free matched-beam (MRT) rate `log₂(1 + (P/N_U)‖h‖²/σ²)`.
pub fn mrt_genie_rate(h: &DVector<Complex64>, total_power: f64, n_users: usize, noise_power: f64) -> Result<f64> {
    if !(noise_power > 0.0) {
        return Err(Error::invalid("noise power must be positive"));
    }
    if n_users == 0 {
        return Err(Error::invalid("genie rate needs at least one user"));
    }
    let snr = total_power / n_users as f64 * h.norm_squared() / noise_power;
    Ok((1.0 + snr).log2())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beamforming::rf_beam_from_phases;
    use crate::channel::{synthesize_channel, ArrayGeometry, PathComponent};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn orthogonal_rf_gives_zero_effective_channel() {
        let s = 0.5f64.sqrt();
        let h = DVector::from_vec(vec![c(1.0, 0.0), c(1.0, 0.0)]);
        let rf = DMatrix::from_column_slice(2, 1, &[c(s, 0.0), c(-s, 0.0)]);
        assert!(effective_channel(&h, &rf).unwrap().norm() < 1e-15);
    }

    #[test]
    fn matched_rf_effective_channel_carries_the_array_gain() {
        let geometry = ArrayGeometry::ula(4);
        let alpha = c(0.0, 1.0);
        let h = synthesize_channel(&[PathComponent::new(alpha, -0.4, 0.0)], &geometry).unwrap();
        let phases: Vec<f64> = h.vector.iter().map(|x| x.arg()).collect();
        let rf = DMatrix::from_columns(&[rf_beam_from_phases(&phases)]);
        let eff = effective_channel(&h.vector, &rf).unwrap();
        assert!((eff[0].norm_sqr() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn two_antenna_effective_channel_by_hand() {
        // F_RF = [[1, 1], [1, -1]] / √2, h = [1, j]:
        // F_RFᴴ h = [(1 + j), (1 - j)] / √2.
        let s = 0.5f64.sqrt();
        let rf = DMatrix::from_row_slice(2, 2, &[c(s, 0.0), c(s, 0.0), c(s, 0.0), c(-s, 0.0)]);
        let h = DVector::from_vec(vec![c(1.0, 0.0), c(0.0, 1.0)]);
        let eff = effective_channel(&h, &rf).unwrap();
        assert!((eff[0] - c(s, s)).norm() < 1e-15);
        assert!((eff[1] - c(s, -s)).norm() < 1e-15);
    }

    #[test]
    fn zf_of_identity_is_identity() {
        let bb = zf_unnormalized(&DMatrix::identity(2, 2)).unwrap();
        assert!((bb - DMatrix::<Complex64>::identity(2, 2)).norm() < 1e-12);
    }

    #[test]
    fn zf_of_lower_triangular_by_hand() {
        let h_hat = DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)]);
        let bb = zf_unnormalized(&h_hat).unwrap();
        let expected = DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0), c(1.0, 0.0)]);
        assert!((bb - expected).norm() < 1e-12);
    }

    #[test]
    fn duplicated_users_are_rank_deficient() {
        let h_hat = DMatrix::from_row_slice(2, 2, &[c(1.0, 0.5), c(0.2, 0.0), c(1.0, 0.5), c(0.2, 0.0)]);
        assert!(matches!(zf_unnormalized(&h_hat), Err(Error::RankDeficient { .. })));
    }

    #[test]
    fn normalized_columns_have_unit_composite_norm() {
        let rf = DMatrix::from_fn(4, 2, |i, j| Complex64::from_polar(0.5, (i * (j + 1)) as f64));
        let h_hat = DMatrix::from_row_slice(2, 2, &[c(1.0, 0.3), c(0.2, -0.1), c(-0.4, 0.0), c(0.9, 0.5)]);
        let bb = zf_baseband(&h_hat, &rf).unwrap();
        for column in bb.column_iter() {
            assert!(((&rf * column).norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn single_user_unit_gain_rate_is_one_bit() {
        let rf = DMatrix::from_element(1, 1, c(1.0, 0.0));
        let precoder = HybridPrecoder::new(rf, DMatrix::from_element(1, 1, c(1.0, 0.0))).unwrap();
        let h = DVector::from_element(1, c(0.0, 1.0));
        let (sinr, rate) = sinr_and_rate(&h, &precoder, 0, 1.0, 1.0).unwrap();
        assert!((sinr - 1.0).abs() < 1e-15);
        assert!((rate - 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_desired_gain_is_zero_rate() {
        let precoder = HybridPrecoder::new(
            DMatrix::from_element(2, 1, c(0.5f64.sqrt(), 0.0)),
            DMatrix::from_element(1, 1, c(1.0, 0.0)),
        )
        .unwrap();
        let h = DVector::from_vec(vec![c(1.0, 0.0), c(-1.0, 0.0)]);
        let (_, rate) = sinr_and_rate(&h, &precoder, 0, 1.0, 1.0).unwrap();
        assert_eq!(rate, 0.0);
    }

    #[test]
    fn two_user_zf_cancels_interference() {
        // Effective channels g_1 = [2, 0], g_2 = [1, 1] with F_RF = I:
        // unnormalized F_BB = Ĥ⁻¹ = [[0.5, 0], [-0.5, 1]], columns normalized to
        // [1, -1]/√2 and [0, 1]; desired gains |h_uᴴ F_RF f_u|² = 2 and 1.
        let rf = DMatrix::<Complex64>::identity(2, 2);
        let h1 = DVector::from_vec(vec![c(2.0, 0.0), c(0.0, 0.0)]);
        let h2 = DVector::from_vec(vec![c(1.0, 0.0), c(1.0, 0.0)]);
        let h_hat = DMatrix::from_rows(&[h1.adjoint(), h2.adjoint()]);
        let bb = zf_baseband(&h_hat, &rf).unwrap();
        let precoder = HybridPrecoder::new(rf, bb).unwrap();
        let (p, noise) = (4.0, 0.5);
        let (_, r1) = sinr_and_rate(&h1, &precoder, 0, p, noise).unwrap();
        let (_, r2) = sinr_and_rate(&h2, &precoder, 1, p, noise).unwrap();
        assert!((r1 - (1.0 + 2.0 * 2.0 / noise).log2()).abs() < 1e-12);
        assert!((r2 - (1.0 + 2.0 * 1.0 / noise).log2()).abs() < 1e-12);
    }

    #[test]
    fn non_positive_noise_rejected() {
        let precoder = HybridPrecoder::new(DMatrix::identity(1, 1), DMatrix::identity(1, 1)).unwrap();
        assert!(sinr_and_rate(&DVector::zeros(1), &precoder, 0, 1.0, 0.0).is_err());
        assert!(mrt_genie_rate(&DVector::zeros(1), 1.0, 1, -1.0).is_err());
    }

    #[test]
    fn genie_rates() {
        let h = DVector::from_element(1, c(1.0, 0.0));
        assert!((mrt_genie_rate(&h, 1.0, 1, 1.0).unwrap() - 1.0).abs() < 1e-15);
        let geometry = ArrayGeometry::ula(4);
        let h = synthesize_channel(&[PathComponent::new(c(1.0, 0.0), 0.2, 0.0)], &geometry).unwrap();
        let expected = (1.0 + 4.0 * 2.0 / 0.5f64).log2();
        assert!((mrt_genie_rate(&h.vector, 2.0, 1, 0.5).unwrap() - expected).abs() < 1e-12);
        assert_eq!(mrt_genie_rate(&DVector::zeros(4), 1.0, 1, 1.0).unwrap(), 0.0);
    }
}
