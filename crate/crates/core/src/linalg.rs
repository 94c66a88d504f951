//! Dense linear algebra helpers around `nalgebra`'s Cholesky factorization.
//!
//! Kernel matrices built from smooth covariances are frequently on the edge
//! of positive definiteness, so factorization goes through an escalating
//! jitter policy: try the matrix as given, then add `1e-10·scale` to the
//! diagonal, multiplying by 10 per retry up to `1e-4·scale`, and report a
//! conditioning failure beyond that.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{Error, Result};

/// Initial relative jitter.
pub const JITTER_START: f64 = 1e-10;
/// Largest relative jitter tried before giving up.
pub const JITTER_MAX: f64 = 1e-4;

/// A successful factorization together with the jitter that was required.
#[derive(Clone)]
pub struct CholFactor {
    pub chol: Cholesky<f64, Dyn>,
    pub jitter: f64,
}

impl CholFactor {
    /// Solve `A x = b` using the factorization.
    pub fn solve_vec(&self, b: &DVector<f64>) -> DVector<f64> {
        self.chol.solve(b)
    }

    /// Solve `A X = B` column-wise.
    pub fn solve_mat(&self, b: &DMatrix<f64>) -> DMatrix<f64> {
        self.chol.solve(b)
    }

    /// log |A| from the factor diagonal.
    pub fn log_det(&self) -> f64 {
        self.chol.l_dirty().diagonal().iter().map(|d| 2.0 * d.ln()).sum()
    }

    /// Lower-triangular factor L with A = L Lᵀ.
    pub fn lower(&self) -> DMatrix<f64> {
        self.chol.l()
    }

    /// Solve `L v = b` (forward substitution only).
    pub fn forward_solve(&self, b: &DMatrix<f64>) -> DMatrix<f64> {
        let l = self.chol.l_dirty();
        let mut x = b.clone();
        l.solve_lower_triangular_mut(&mut x);
        x
    }
}

/// Factor a symmetric matrix with jitter escalation.
///
/// `scale` sets the jitter unit (typically the process variance σ²);
/// `context` labels the matrix in the error report.
pub fn cholesky_with_jitter(
    matrix: &DMatrix<f64>,
    scale: f64,
    context: &'static str,
) -> Result<CholFactor> {
    let scale = if scale > 0.0 { scale } else { 1.0 };
    if let Some(chol) = Cholesky::new(matrix.clone()) {
        return Ok(CholFactor { chol, jitter: 0.0 });
    }
    let mut rel = JITTER_START;
    while rel <= JITTER_MAX {
        let jitter = rel * scale;
        let mut jittered = matrix.clone();
        for i in 0..jittered.nrows() {
            jittered[(i, i)] += jitter;
        }
        if let Some(chol) = Cholesky::new(jittered) {
            return Ok(CholFactor { chol, jitter });
        }
        rel *= 10.0;
    }
    Err(Error::Conditioning {
        context,
        max_jitter: JITTER_MAX * scale,
    })
}

/// Symmetrize in place: A ← (A + Aᵀ)/2.
pub fn symmetrize(a: &mut DMatrix<f64>) {
    let at = a.transpose();
    *a += at;
    *a *= 0.5;
}

/// Check that a matrix is square and symmetric to a tolerance.
pub fn check_symmetric(a: &DMatrix<f64>, tol: f64, context: &'static str) -> Result<()> {
    if a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch {
            context,
            expected: a.nrows(),
            actual: a.ncols(),
        });
    }
    for i in 0..a.nrows() {
        for j in (i + 1)..a.ncols() {
            let scale = a[(i, i)].abs().max(a[(j, j)].abs()).max(1.0);
            if (a[(i, j)] - a[(j, i)]).abs() > tol * scale {
                return Err(Error::InvalidArgument(format!(
                    "{context}: matrix not symmetric at ({i}, {j})"
                )));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn factor_and_solve() {
        let a = DMatrix::from_row_slice(2, 2, &[4.0, 1.0, 1.0, 3.0]);
        let f = cholesky_with_jitter(&a, 1.0, "test").unwrap();
        assert_eq!(f.jitter, 0.0);
        let b = DVector::from_vec(vec![1.0, 2.0]);
        let x = f.solve_vec(&b);
        let r = &a * &x - &b;
        assert!(r.amax() < 1e-12);
        assert_relative_eq!(f.log_det(), (4.0f64 * 3.0 - 1.0).ln(), epsilon = 1e-12);
    }

    #[test]
    fn jitter_rescues_semi_definite() {
        // Rank-one matrix: needs jitter, factors afterwards.
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        let f = cholesky_with_jitter(&a, 1.0, "test").unwrap();
        assert!(f.jitter > 0.0);
    }

    #[test]
    fn hopeless_matrix_errors() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -5.0]);
        assert!(cholesky_with_jitter(&a, 1.0, "test").is_err());
    }
}
