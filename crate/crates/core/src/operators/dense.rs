use faer::{c64, Mat};
use num_complex::Complex64;

use crate::error::Result;
use crate::linalg;

/// Dense complex square matrix used as the verification oracle.
#[derive(Clone, Debug)]
pub struct DenseOperator {
    mat: Mat<c64>,
    hermitian: bool,
}

impl DenseOperator {
    pub fn zeros(dim: usize) -> Self {
        DenseOperator { mat: Mat::zeros(dim, dim), hermitian: true }
    }

    pub fn identity(dim: usize) -> Self {
        DenseOperator { mat: Mat::identity(dim, dim), hermitian: true }
    }

    pub fn from_mat(mat: Mat<c64>) -> Self {
        assert_eq!(mat.nrows(), mat.ncols(), "dense operator must be square");
        DenseOperator { mat, hermitian: false }
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut f = f;
        Self::from_mat(Mat::from_fn(dim, dim, |i, j| f(i, j)))
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn mat(&self) -> &Mat<c64> {
        &self.mat
    }

    pub fn into_mat(self) -> Mat<c64> {
        self.mat
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.mat[(i, j)]
    }

    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut Complex64 {
        self.hermitian = false;
        &mut self.mat[(i, j)]
    }

    pub fn is_hermitian_flagged(&self) -> bool {
        self.hermitian
    }

    /// max |M − M†| over entries.
    pub fn hermitian_deviation(&self) -> f64 {
        let n = self.dim();
        let mut d = 0.0f64;
        for j in 0..n {
            for i in 0..=j {
                d = d.max((self.mat[(i, j)] - self.mat[(j, i)].conj()).norm());
            }
        }
        d
    }

    /// Sets the Hermitian flag after checking the deviation is within `tol`.
    pub fn assert_hermitian(&mut self, tol: f64) {
        let d = self.hermitian_deviation();
        assert!(d <= tol, "matrix not Hermitian: deviation {d:e}");
        self.hermitian = true;
    }

    pub fn adjoint(&self) -> Self {
        DenseOperator { mat: self.mat.adjoint().to_owned(), hermitian: self.hermitian }
    }

    pub fn matmul(&self, other: &DenseOperator) -> Self {
        Self::from_mat(&self.mat * &other.mat)
    }

    pub fn add(&self, other: &DenseOperator) -> Self {
        DenseOperator { mat: &self.mat + &other.mat, hermitian: self.hermitian && other.hermitian }
    }

    pub fn sub(&self, other: &DenseOperator) -> Self {
        DenseOperator { mat: &self.mat - &other.mat, hermitian: self.hermitian && other.hermitian }
    }

    pub fn scale(&self, s: f64) -> Self {
        DenseOperator { mat: Mat::from_fn(self.dim(), self.dim(), |i, j| self.mat[(i, j)] * s), hermitian: self.hermitian }
    }

    pub fn add_identity(&self, s: f64) -> Self {
        let mut m = self.mat.clone();
        for i in 0..self.dim() {
            m[(i, i)] += c64::new(s, 0.0);
        }
        DenseOperator { mat: m, hermitian: self.hermitian }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.mat.norm_l2()
    }

    pub fn max_abs(&self) -> f64 {
        self.mat.norm_max()
    }

    pub fn spectral_norm(&self) -> Result<f64> {
        linalg::spectral_norm_c(self.mat.as_ref())
    }

    /// Eigenvalues in ascending order, assuming Hermiticity.
    pub fn eigenvalues_hermitian(&self) -> Result<Vec<f64>> {
        linalg::herm_eigenvalues(self.mat.as_ref())
    }

    pub fn kron(&self, other: &DenseOperator) -> Self {
        let (a, b) = (self.dim(), other.dim());
        DenseOperator {
            mat: Mat::from_fn(a * b, a * b, |i, j| self.mat[(i / b, j / b)] * other.mat[(i % b, j % b)]),
            hermitian: self.hermitian && other.hermitian,
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim()).map(|i| self.mat[(i, i)]).sum()
    }
}
