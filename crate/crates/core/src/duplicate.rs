//! Duplication of a seed into a principal integrable one.
//!
//! The ambient torus is doubled to `Z^m ⊕ Z^m` with
//! `Λ⁽²⁾ = [[Λ, 0], [0, -Λ]]`. For `i < n` the new seed has
//!
//! ```text
//! X•_i     = X^{(e_i, e_i)}
//! X•_{i+n} = X^{(b_i^{>n}, -b_i^{≤n})}
//! B̃•       = (B; I_n)
//! ```
//!
//! where `b_i^{≤n}` keeps the mutable rows of the column `b_i` and
//! `b_i^{>n}` the frozen ones. The old torus embeds via `X^e ↦ X^{(e, 0)}`.
//! The coefficient subalgebra generated by `X^{(e_i, 0)}` (`i ≥ n`) and
//! `X^{(0, e_j)}` is not computed with.

use crate::matrix::{is_principal, IntMatrix};
use crate::seed::{recover_lambda, ExchangeData, QuantumSeed, SeedError};
use crate::torus::{ExponentVector, QuantumLaurent, Torus};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DuplicatedSeed {
    seed: QuantumSeed,
    original_rank: usize,
}

impl DuplicatedSeed {
    pub fn seed(&self) -> &QuantumSeed {
        &self.seed
    }

    pub fn into_seed(self) -> QuantumSeed {
        self.seed
    }

    /// Rank `m` of the torus that was duplicated.
    pub fn original_rank(&self) -> usize {
        self.original_rank
    }

    /// `e ↦ (e, 0)`.
    pub fn embed(&self, e: &ExponentVector) -> ExponentVector {
        e.concat(&ExponentVector::zeros(self.original_rank))
    }
}

/// `Λ⁽²⁾ = [[Λ, 0], [0, -Λ]]`.
pub fn doubled_lambda(lambda: &IntMatrix) -> IntMatrix {
    let m = lambda.rows();
    let mut out = IntMatrix::zeros(2 * m, 2 * m);
    for i in 0..m {
        for j in 0..m {
            out.set(i, j, lambda.get(i, j));
            out.set(m + i, m + j, -lambda.get(i, j));
        }
    }
    out
}

/// Builds `Σ•` over the duplicated torus of `seed`'s own cluster.
pub fn duplicate_seed(seed: &QuantumSeed) -> Result<DuplicatedSeed, SeedError> {
    let (m, n) = (seed.m(), seed.n());
    let torus = Torus::new(doubled_lambda(seed.lambda()))?;
    let b = seed.b();

    let mut vars = Vec::with_capacity(2 * n);
    for i in 0..n {
        let e = ExponentVector::unit(m, i);
        vars.push(QuantumLaurent::monomial(&torus, e.concat(&e))?);
    }
    for i in 0..n {
        let col = b.column(i);
        let high: Vec<i64> = (0..m).map(|r| if r >= n { col[r] } else { 0 }).collect();
        let low: Vec<i64> = (0..m).map(|r| if r < n { -col[r] } else { 0 }).collect();
        vars.push(QuantumLaurent::monomial(&torus, ExponentVector::new(high).concat(&ExponentVector::new(low)))?);
    }

    let lambda = recover_lambda(&vars)?;
    let b_dup = b.block(0, n, 0, n).vstack(&IntMatrix::identity(n))?;
    let exchange = ExchangeData::new(b_dup, lambda).map_err(|e| SeedError::Integrity(format!("duplicated seed is not compatible: {e}")))?;
    let dup = QuantumSeed::from_parts(exchange, vars, torus)?;
    if !is_principal(dup.b()) || !dup.is_integrable() {
        return Err(SeedError::Integrity("duplicated seed is not principal and integrable".into()));
    }
    Ok(DuplicatedSeed { seed: dup, original_rank: m })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn rank_one() {
        let s = QuantumSeed::from_matrices(m(&[&[0], &[1]]), m(&[&[0, -1], &[1, 0]])).unwrap();
        let dup = duplicate_seed(&s).unwrap();
        let t = dup.seed().initial_torus().clone();
        assert_eq!(dup.seed().vars()[0], QuantumLaurent::monomial(&t, ExponentVector::new(vec![1, 0, 1, 0])).unwrap());
        assert_eq!(dup.seed().vars()[1], QuantumLaurent::monomial(&t, ExponentVector::new(vec![0, 1, 0, 0])).unwrap());
        assert_eq!(dup.seed().b(), &m(&[&[0], &[1]]));
        assert_eq!(dup.seed().d(), s.d());
        assert_eq!(dup.embed(&ExponentVector::new(vec![2, -1])), ExponentVector::new(vec![2, -1, 0, 0]));
    }

    #[test]
    fn coefficient_free_seed() {
        let s = QuantumSeed::from_matrices(m(&[&[0, 1], &[-1, 0]]), m(&[&[0, 1], &[-1, 0]])).unwrap();
        assert!(!s.is_integrable());
        let dup = duplicate_seed(&s).unwrap();
        assert!(is_principal(dup.seed().b()));
        assert!(dup.seed().is_integrable_checked().unwrap());
        assert_eq!(dup.seed().d(), s.d());
    }

    #[test]
    fn zero_lambda_doubles_to_zero() {
        // Λ = 0 admits no compatible B̃ (D must be positive), so only the
        // torus level is exercised.
        let z = doubled_lambda(&IntMatrix::zeros(2, 2));
        assert_eq!(z, IntMatrix::zeros(4, 4));
        let t = Torus::new(z).unwrap();
        let a = QuantumLaurent::monomial(&t, ExponentVector::new(vec![1, 0, 1, 0])).unwrap();
        let b = QuantumLaurent::monomial(&t, ExponentVector::new(vec![0, 1, 0, -1])).unwrap();
        assert_eq!(&a * &b, &b * &a);
    }
}
