use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::channel::ChannelSample;
use crate::{Error, Result};

/// A minibatch of complex channels split into real and imaginary parts,
/// one sample per row.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelBatch {
    pub re: DMatrix<f64>,
    pub im: DMatrix<f64>,
}

impl ChannelBatch {
    pub fn from_vectors<'a, I>(vectors: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a DVector<Complex64>>,
    {
        let vectors: Vec<&DVector<Complex64>> = vectors.into_iter().collect();
        let Some(first) = vectors.first() else {
            return Err(Error::EmptyDataset);
        };
        let n = first.len();
        if let Some(bad) = vectors.iter().find(|v| v.len() != n) {
            return Err(Error::DimensionMismatch {
                context: "channel batch antenna count",
                expected: n,
                actual: bad.len(),
            });
        }
        let rows = vectors.len();
        Ok(Self {
            re: DMatrix::from_fn(rows, n, |i, j| vectors[i][j].re),
            im: DMatrix::from_fn(rows, n, |i, j| vectors[i][j].im),
        })
    }

    pub fn from_samples<'a, I>(samples: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a ChannelSample>,
    {
        Self::from_vectors(samples.into_iter().map(|s| &s.vector))
    }

    pub fn len(&self) -> usize {
        self.re.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn n_antennas(&self) -> usize {
        self.re.ncols()
    }

    pub fn channel(&self, row: usize) -> DVector<Complex64> {
        DVector::from_fn(self.n_antennas(), |j, _| {
            Complex64::new(self.re[(row, j)], self.im[(row, j)])
        })
    }

    /// Real embedding with `(re, im)` interleaved per antenna.
    pub fn embedded(&self) -> DMatrix<f64> {
        interleave(&self.re, &self.im)
    }

    /// `‖h‖²` per sample.
    pub fn norms_squared(&self) -> DVector<f64> {
        DVector::from_fn(self.len(), |i, _| {
            self.re.row(i).norm_squared() + self.im.row(i).norm_squared()
        })
    }
}

pub(crate) fn interleave(re: &DMatrix<f64>, im: &DMatrix<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(re.nrows(), 2 * re.ncols(), |i, j| {
        if j % 2 == 0 {
            re[(i, j / 2)]
        } else {
            im[(i, j / 2)]
        }
    })
}
