//! Floating-point scalar abstraction.
//!
//! Transition operators, distributions and spectra are generic over
//! [`Scalar`], which is implemented for `f32` and `f64`. The dense symmetric
//! eigensolver is the only place that needs a concrete type, so it lives on
//! the trait and each implementation forwards to nalgebra.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use nalgebra::{DMatrix, SymmetricEigen};
use num_traits::{Float, FromPrimitive, ToPrimitive};

use crate::error::{Error, Result};

/// Eigenvalues (descending) with optional matching eigenvectors, one per
/// column of a row-major `n x n` buffer.
#[derive(Clone, Debug)]
pub struct SymmetricEigenpairs<S> {
    pub values: Vec<S>,
    pub vectors: Option<Vec<S>>,
}

pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + Sum + 'static
{
    /// Tolerance for row sums and probability normalisation.
    const STOCHASTIC_TOL: f64;
    /// Tolerance for eigenvalue comparisons.
    const EIGEN_TOL: f64;

    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 converts to every Scalar")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Eigen-decomposition of a symmetric matrix stored row-major.
    fn symmetric_eigen(n: usize, data: &[Self], with_vectors: bool) -> Result<SymmetricEigenpairs<Self>>;
}

macro_rules! impl_scalar {
    ($t:ty, $stoch:expr, $eig:expr) => {
        impl Scalar for $t {
            const STOCHASTIC_TOL: f64 = $stoch;
            const EIGEN_TOL: f64 = $eig;

            fn symmetric_eigen(
                n: usize,
                data: &[Self],
                with_vectors: bool,
            ) -> Result<SymmetricEigenpairs<Self>> {
                if data.len() != n * n {
                    return Err(Error::DimensionMismatch { expected: n * n, found: data.len() });
                }
                if n == 0 {
                    return Ok(SymmetricEigenpairs { values: Vec::new(), vectors: with_vectors.then(Vec::new) });
                }
                let m = DMatrix::<$t>::from_row_slice(n, n, data);
                if !with_vectors {
                    let mut values: Vec<$t> = m.symmetric_eigenvalues().iter().copied().collect();
                    if values.iter().any(|v| !v.is_finite()) {
                        return Err(Error::Convergence { n });
                    }
                    values.sort_by(|a, b| b.total_cmp(a));
                    return Ok(SymmetricEigenpairs { values, vectors: None });
                }
                let eig = SymmetricEigen::try_new(m, <$t>::EPSILON, 10_000 * n.max(1))
                    .ok_or(Error::Convergence { n })?;
                let mut order: Vec<usize> = (0..n).collect();
                order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
                let values = order.iter().map(|&j| eig.eigenvalues[j]).collect();
                let mut vectors = vec![0.0 as $t; n * n];
                for (col, &j) in order.iter().enumerate() {
                    for row in 0..n {
                        vectors[row * n + col] = eig.eigenvectors[(row, j)];
                    }
                }
                Ok(SymmetricEigenpairs { values, vectors: Some(vectors) })
            }
        }
    };
}

impl_scalar!(f64, 1e-12, 1e-8);
impl_scalar!(f32, 1e-5, 1e-4);

/// Row-major dense square matrix used for transition operators.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix<S> {
    n: usize,
    data: Vec<S>,
}

impl<S: Scalar> DenseMatrix<S> {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![S::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, S::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: row.len() });
            }
            data.extend(row);
        }
        Ok(Self { n, data })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> S {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: S) {
        self.data[i * self.n + j] = value;
    }

    #[inline]
    pub fn add_to(&mut self, i: usize, j: usize, value: S) {
        self.data[i * self.n + j] = self.data[i * self.n + j] + value;
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[S] {
        &self.data
    }

    pub fn row_sums(&self) -> Vec<S> {
        (0..self.n).map(|i| self.row(i).iter().copied().sum()).collect()
    }

    /// Row vector times matrix: `(x M)_j = sum_i x_i M_ij`.
    pub fn left_mul(&self, x: &[S]) -> Vec<S> {
        let mut out = vec![S::zero(); self.n];
        for (i, &xi) in x.iter().enumerate() {
            if xi == S::zero() {
                continue;
            }
            for (o, &mij) in out.iter_mut().zip(self.row(i)) {
                *o = *o + xi * mij;
            }
        }
        out
    }

    /// Matrix times column vector.
    pub fn mul_vec(&self, x: &[S]) -> Vec<S> {
        (0..self.n)
            .map(|i| self.row(i).iter().zip(x).map(|(&a, &b)| a * b).sum())
            .collect()
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == S::zero() {
                    continue;
                }
                for j in 0..n {
                    out.add_to(i, j, a * other.get(k, j));
                }
            }
        }
        out
    }

    pub fn trace(&self) -> S {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }
}
