//! Matrix-based Rényi entropy and mutual information over minibatches.
//!
//! Samples are embedded through a Gaussian (RBF) kernel into a Gram matrix
//! `K`, normalized to unit trace as `A_ij = K_ij / (n √(K_ii K_jj))`. The
//! eigenvalues of `A` play the role of a probability distribution, so
//! `S_α(A) = log(Σ λ_i^α) / (1 - α)` lies in `[0, log n]` (nats). Joint
//! entropy uses the trace-normalized Hadamard product of two Gram matrices.

mod plane;

pub use plane::{information_plane, InformationPlane};

use nalgebra::{DMatrix, SymmetricEigen};

use crate::{Error, Result};

/// Floor returned by [`silverman_bandwidth`] for degenerate (constant) samples.
pub const BANDWIDTH_FLOOR: f64 = 1e-6;
/// Eigenvalues below this are dropped from the power sum when `α < 1`.
pub const EIGENVALUE_FLOOR: f64 = 1e-12;
/// Order used for diagnostics; close to Shannon entropy.
pub const DIAGNOSTIC_ALPHA: f64 = 1.01;

/// Kernel Gram matrix of one batch together with its spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct GramState {
    pub kernel: DMatrix<f64>,
    pub normalized: DMatrix<f64>,
    pub eigenvalues: Vec<f64>,
    pub bandwidth: f64,
}

impl GramState {
    pub fn len(&self) -> usize {
        self.normalized.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InfoEstimate {
    pub entropy_a: f64,
    pub entropy_b: f64,
    pub joint: f64,
    pub mi: f64,
    pub alpha: f64,
}

/// Silverman's rule `σ = h n^{-1/(4+d)}`, with `h` the mean per-dimension
/// sample standard deviation.
pub fn silverman_bandwidth(samples: &DMatrix<f64>) -> Result<f64> {
    let (n, d) = samples.shape();
    if n < 2 {
        return Err(Error::invalid(format!("bandwidth needs at least 2 samples, got {n}")));
    }
    if d == 0 {
        return Ok(BANDWIDTH_FLOOR);
    }
    let spread = mean_std(samples);
    if !spread.is_finite() {
        return Err(Error::invalid("samples must be finite"));
    }
    Ok(silverman_from_spread(spread, n, d))
}

/// Silverman's rule for a known spread `h`.
pub fn silverman_from_spread(spread: f64, n: usize, d: usize) -> f64 {
    let sigma = spread * (n as f64).powf(-1.0 / (4.0 + d as f64));
    if sigma > BANDWIDTH_FLOOR {
        sigma
    } else {
        BANDWIDTH_FLOOR
    }
}

fn mean_std(samples: &DMatrix<f64>) -> f64 {
    let n = samples.nrows() as f64;
    let total: f64 = samples
        .column_iter()
        .map(|col| {
            let mean = col.sum() / n;
            (col.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        })
        .sum();
    total / samples.ncols() as f64
}

/// Squared Euclidean distances between the rows of `samples`.
pub(crate) fn pairwise_sq_distances(samples: &DMatrix<f64>) -> DMatrix<f64> {
    let n = samples.nrows();
    let mut dist = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let d = (samples.row(i) - samples.row(j)).norm_squared();
            dist[(i, j)] = d;
            dist[(j, i)] = d;
        }
    }
    dist
}

/// RBF kernel `exp(-‖x_i - x_j‖² / (2σ²))` of the rows of `samples`.
pub fn rbf_kernel(samples: &DMatrix<f64>, bandwidth: f64) -> DMatrix<f64> {
    let scale = -1.0 / (2.0 * bandwidth * bandwidth);
    pairwise_sq_distances(samples).map(|d| (d * scale).exp())
}

pub fn gram_matrix(samples: &DMatrix<f64>, bandwidth: f64) -> Result<GramState> {
    let n = samples.nrows();
    if n < 2 {
        return Err(Error::invalid(format!("Gram matrix needs at least 2 samples, got {n}")));
    }
    if !(bandwidth > 0.0 && bandwidth.is_finite()) {
        return Err(Error::invalid(format!("bandwidth must be positive, got {bandwidth}")));
    }
    if samples.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid("samples must be finite"));
    }
    let kernel = rbf_kernel(samples, bandwidth);
    let normalized = normalize_kernel(&kernel);
    let eigenvalues = spectrum(&normalized);
    Ok(GramState {
        kernel,
        normalized,
        eigenvalues,
        bandwidth,
    })
}

/// Gram state with a Silverman bandwidth.
pub fn gram_matrix_auto(samples: &DMatrix<f64>) -> Result<GramState> {
    gram_matrix(samples, silverman_bandwidth(samples)?)
}

fn normalize_kernel(kernel: &DMatrix<f64>) -> DMatrix<f64> {
    let n = kernel.nrows();
    let diag: Vec<f64> = (0..n).map(|i| kernel[(i, i)]).collect();
    DMatrix::from_fn(n, n, |i, j| kernel[(i, j)] / (n as f64 * (diag[i] * diag[j]).sqrt()))
}

/// Eigenvalues of the symmetrized matrix, negatives clamped to zero.
fn spectrum(matrix: &DMatrix<f64>) -> Vec<f64> {
    let symmetric = (matrix + matrix.transpose()) * 0.5;
    SymmetricEigen::new(symmetric)
        .eigenvalues
        .iter()
        .map(|&l| l.max(0.0))
        .collect()
}

fn validate_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha.is_finite()) || alpha == 1.0 {
        return Err(Error::invalid(format!(
            "Rényi order must be positive and not 1, got {alpha}"
        )));
    }
    Ok(())
}

fn entropy_from_spectrum(eigenvalues: &[f64], alpha: f64) -> f64 {
    let sum: f64 = eigenvalues
        .iter()
        .filter(|&&l| alpha >= 1.0 || l > EIGENVALUE_FLOOR)
        .map(|l| l.powf(alpha))
        .sum();
    sum.ln() / (1.0 - alpha)
}

pub fn renyi_entropy(state: &GramState, alpha: f64) -> Result<f64> {
    validate_alpha(alpha)?;
    Ok(entropy_from_spectrum(&state.eigenvalues, alpha))
}

/// Entropy of a batch with Silverman bandwidth.
pub fn batch_entropy(samples: &DMatrix<f64>, alpha: f64) -> Result<f64> {
    renyi_entropy(&gram_matrix_auto(samples)?, alpha)
}

pub fn joint_entropy(a: &GramState, b: &GramState, alpha: f64) -> Result<f64> {
    validate_alpha(alpha)?;
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            context: "joint entropy batch size",
            expected: a.len(),
            actual: b.len(),
        });
    }
    let product = a.normalized.component_mul(&b.normalized);
    let trace = product.trace();
    if !(trace > 0.0) {
        return Err(Error::invalid("Hadamard product has zero trace"));
    }
    Ok(entropy_from_spectrum(&spectrum(&(product / trace)), alpha))
}

pub fn mutual_information(a: &GramState, b: &GramState, alpha: f64) -> Result<InfoEstimate> {
    let joint = joint_entropy(a, b, alpha)?;
    let entropy_a = renyi_entropy(a, alpha)?;
    let entropy_b = renyi_entropy(b, alpha)?;
    Ok(InfoEstimate {
        entropy_a,
        entropy_b,
        joint,
        mi: entropy_a + entropy_b - joint,
        alpha,
    })
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Gram state of `n` samples so far apart that `K = I` to machine precision.
    pub(crate) fn orthogonal_state(n: usize) -> GramState {
        let samples = DMatrix::from_fn(n, 1, |i, _| 1e3 * i as f64);
        gram_matrix(&samples, 1.0).unwrap()
    }

    pub(crate) fn constant_state(n: usize) -> GramState {
        gram_matrix(&DMatrix::from_element(n, 3, 0.7), 1.0).unwrap()
    }

    #[test]
    fn silverman_values() {
        assert!((silverman_from_spread(1.0, 100, 1) - 0.39811).abs() < 1e-5);
        assert!((silverman_from_spread(1.0, 128, 8) - 0.66742).abs() < 1e-5);
    }

    #[test]
    fn silverman_uses_sample_std() {
        // Column [0, 2]: sample std √2; n = 2, d = 1.
        let samples = DMatrix::from_column_slice(2, 1, &[0.0, 2.0]);
        let expected = 2f64.sqrt() * 2f64.powf(-0.2);
        assert!((silverman_bandwidth(&samples).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn silverman_constant_samples_hit_floor() {
        assert_eq!(
            silverman_bandwidth(&DMatrix::from_element(10, 2, 3.0)).unwrap(),
            BANDWIDTH_FLOOR
        );
    }

    #[test]
    fn silverman_needs_two_samples() {
        assert!(silverman_bandwidth(&DMatrix::zeros(1, 3)).is_err());
    }

    #[test]
    fn identical_samples_give_uniform_normalized_gram() {
        let state = constant_state(5);
        assert!(state.kernel.iter().all(|&k| k == 1.0));
        assert!(state.normalized.iter().all(|&a| (a - 0.2).abs() < 1e-15));
    }

    #[test]
    fn distant_pair_is_nearly_diagonal() {
        let samples = DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 10.0, 10.0]);
        let state = gram_matrix(&samples, 0.5).unwrap();
        assert!((state.normalized.clone() - DMatrix::identity(2, 2) * 0.5).norm() < 1e-12);
    }

    #[test]
    fn non_finite_samples_rejected() {
        let samples = DMatrix::from_row_slice(2, 1, &[0.0, f64::INFINITY]);
        assert!(gram_matrix(&samples, 1.0).is_err());
    }

    #[test]
    fn constant_batch_has_zero_entropy() {
        let state = constant_state(16);
        for alpha in [0.5, 1.01, 2.0, 3.0] {
            assert!(renyi_entropy(&state, alpha).unwrap().abs() < 1e-9);
        }
    }

    #[test]
    fn orthogonal_batch_has_log_n_entropy() {
        let n = 16;
        let state = orthogonal_state(n);
        for alpha in [0.5, 1.01, 2.0, 3.0] {
            assert!((renyi_entropy(&state, alpha).unwrap() - (n as f64).ln()).abs() < 1e-6);
        }
    }

    #[test]
    fn second_order_entropy_is_minus_log_trace_of_square() {
        let samples = DMatrix::from_fn(12, 3, |i, j| ((i * 7 + j * 3) % 5) as f64 * 0.3);
        let state = gram_matrix_auto(&samples).unwrap();
        let direct = -(&state.normalized * &state.normalized).trace().ln();
        assert!((renyi_entropy(&state, 2.0).unwrap() - direct).abs() < 1e-10);
    }

    #[test]
    fn invalid_orders_rejected() {
        let state = orthogonal_state(4);
        for alpha in [0.0, -1.0, 1.0, f64::NAN] {
            assert!(renyi_entropy(&state, alpha).is_err());
        }
    }

    #[test]
    fn joint_with_constant_is_marginal() {
        let samples = DMatrix::from_fn(10, 2, |i, j| (i as f64).sin() * (j + 1) as f64);
        let a = gram_matrix_auto(&samples).unwrap();
        let b = constant_state(10);
        let joint = joint_entropy(&a, &b, 1.01).unwrap();
        assert!((joint - renyi_entropy(&a, 1.01).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn joint_of_orthogonal_with_itself_is_log_n() {
        let a = orthogonal_state(8);
        assert!((joint_entropy(&a, &a, 2.0).unwrap() - 8f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn joint_is_exactly_symmetric() {
        let a = gram_matrix_auto(&DMatrix::from_fn(9, 2, |i, j| (i * j) as f64 * 0.1)).unwrap();
        let b = gram_matrix_auto(&DMatrix::from_fn(9, 1, |i, _| (i as f64).cos())).unwrap();
        assert_eq!(
            joint_entropy(&a, &b, 1.01).unwrap(),
            joint_entropy(&b, &a, 1.01).unwrap()
        );
    }

    #[test]
    fn size_mismatch_rejected() {
        assert!(joint_entropy(&orthogonal_state(4), &orthogonal_state(5), 2.0).is_err());
    }

    #[test]
    fn self_information_of_orthogonal_batch() {
        let a = orthogonal_state(8);
        let est = mutual_information(&a, &a, 1.01).unwrap();
        assert!((est.mi - 8f64.ln()).abs() < 1e-6);
        assert_eq!(est.mi, est.entropy_a + est.entropy_b - est.joint);
    }

    #[test]
    fn information_with_constant_vanishes() {
        let a = gram_matrix_auto(&DMatrix::from_fn(10, 3, |i, j| ((i + 1) * (j + 2)) as f64 % 7.0)).unwrap();
        let est = mutual_information(&a, &constant_state(10), 1.01).unwrap();
        assert!(est.mi.abs() < 1e-9);
    }

    fn batch(n: usize, d: usize, values: &[f64]) -> DMatrix<f64> {
        DMatrix::from_fn(n, d, |i, j| values[(i * d + j) % values.len()])
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn entropy_is_bounded_by_log_n(
            n in 2usize..20,
            d in 1usize..4,
            values in proptest::collection::vec(-5.0f64..5.0, 80),
            alpha in prop_oneof![Just(0.5), Just(1.01), Just(2.0), Just(3.0)],
        ) {
            let state = gram_matrix_auto(&batch(n, d, &values)).unwrap();
            let trace = state.normalized.trace();
            prop_assert!((trace - 1.0).abs() < 1e-10);
            prop_assert!((state.eigenvalues.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            let s = renyi_entropy(&state, alpha).unwrap();
            prop_assert!(s >= -1e-9 && s <= (n as f64).ln() + 1e-9);
        }

        #[test]
        fn entropy_is_permutation_invariant(
            n in 3usize..16,
            values in proptest::collection::vec(-5.0f64..5.0, 64),
            shift in 1usize..15,
        ) {
            let x = batch(n, 2, &values);
            let permuted = DMatrix::from_fn(n, 2, |i, j| x[((i + shift) % n, j)]);
            let s1 = batch_entropy(&x, 1.01).unwrap();
            let s2 = batch_entropy(&permuted, 1.01).unwrap();
            prop_assert!((s1 - s2).abs() < 1e-9);
        }

        #[test]
        fn mi_is_symmetric_and_nonnegative(
            n in 3usize..16,
            xs in proptest::collection::vec(-5.0f64..5.0, 64),
            ys in proptest::collection::vec(-5.0f64..5.0, 64),
        ) {
            let a = gram_matrix_auto(&batch(n, 2, &xs)).unwrap();
            let b = gram_matrix_auto(&batch(n, 3, &ys)).unwrap();
            let ab = mutual_information(&a, &b, 1.01).unwrap();
            let ba = mutual_information(&b, &a, 1.01).unwrap();
            prop_assert_eq!(ab.mi, ba.mi);
            prop_assert!(ab.mi >= -1e-9);
        }
    }
}
