use crate::error::{Error, Result};
use nalgebra::DMatrix;

/// Small dense symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix(DMatrix<f64>);

pub const MAX_DIM: usize = 8;

impl SymMatrix {
    /// Validates symmetry (1e-12 relative to the largest entry) and symmetrizes.
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if !m.is_square() || m.nrows() == 0 || m.nrows() > MAX_DIM {
            return Err(Error::InvalidInput(format!(
                "{}×{} is not a square matrix of dimension 1..={MAX_DIM}",
                m.nrows(),
                m.ncols()
            )));
        }
        let scale = m.amax().max(f64::MIN_POSITIVE);
        let asym = (&m - m.transpose()).amax();
        if !m.iter().all(|v| v.is_finite()) || asym > 1e-12 * scale {
            return Err(Error::InvalidInput(format!(
                "matrix not symmetric (|M−Mᵀ| = {asym:.3e})"
            )));
        }
        Ok(SymMatrix((&m + m.transpose()) * 0.5))
    }

    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidInput("ragged rows".into()));
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn identity(n: usize) -> Self {
        SymMatrix(DMatrix::identity(n, n))
    }

    pub fn zeros(n: usize) -> Self {
        SymMatrix(DMatrix::zeros(n, n))
    }

    pub fn diag(d: &[f64]) -> Self {
        SymMatrix(DMatrix::from_diagonal(
            &nalgebra::DVector::from_column_slice(d),
        ))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }

    pub fn eig_extremes(&self) -> (f64, f64) {
        let ev = self.0.clone().symmetric_eigen().eigenvalues;
        (ev.min(), ev.max())
    }

    pub fn is_positive_definite(&self) -> bool {
        self.0.clone().cholesky().is_some()
    }
}

/// Extreme eigenvalues (λ_min, λ_max) of a symmetric matrix.
pub fn sym_eig_extremes(m: &DMatrix<f64>) -> Result<(f64, f64)> {
    Ok(SymMatrix::new(m.clone())?.eig_extremes())
}
