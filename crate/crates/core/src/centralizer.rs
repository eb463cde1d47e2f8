//! Monomial centralizers of the first `n` cluster variables.
//!
//! `X^a` commutes with `X_i` exactly when `Σ_j λ_ij a_j = 0`, so the joint
//! centralizer of `X_1, …, X_n` at the monomial level is the integer kernel
//! of the top `n` rows of `Λ`.

use serde::Serialize;

use crate::lattice::integer_kernel;
use crate::matrix::{IntMatrix, MatrixError};
use crate::torus::ExponentVector;

/// Lattice basis (in Hermite normal form) of
/// `{a ∈ Z^m : Σ_j λ_ij a_j = 0 for all i < n}`.
pub fn joint_centralizer_basis(lambda: &IntMatrix, n: usize) -> Result<Vec<ExponentVector>, MatrixError> {
    let m = lambda.cols();
    if n > lambda.rows() {
        return Err(MatrixError::DimensionMismatch(format!("n = {n} exceeds {} rows", lambda.rows())));
    }
    let top = lambda.block(0, n, 0, m);
    Ok(integer_kernel(&top)?.into_iter().map(ExponentVector::new).collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CentralizerReport {
    pub basis: Vec<Vec<i64>>,
    /// The centralizer is spanned by `e_1, …, e_n`, i.e. the Laurent
    /// polynomials in the first `n` variables are maximal commutative.
    pub maximal: bool,
}

pub fn centralizer_report(lambda: &IntMatrix, n: usize) -> Result<CentralizerReport, MatrixError> {
    let basis = joint_centralizer_basis(lambda, n)?;
    let m = lambda.cols();
    let expected: Vec<ExponentVector> = (0..n).map(|i| ExponentVector::unit(m, i)).collect();
    Ok(CentralizerReport {
        maximal: basis == expected,
        basis: basis.into_iter().map(ExponentVector::into_vec).collect(),
    })
}
