//! Quantum seeds and their mutations.
//!
//! A [`QuantumSeed`] carries its current exchange data together with its
//! cluster variables written in the coordinates of the *initial* quantum
//! torus. Mutation builds the new variable as
//!
//! ```text
//! X'_j = X^{[b_j]_+ - e_j} + X^{[-b_j]_+ - e_j}
//! ```
//!
//! where the normalized monomials are formed from the current variables, and
//! the new `Λ` is read back off the q-commutators of the new variables.

use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::matrix::{check_compatible, is_sign_coherent, mutate_matrix, Diagonal, IntMatrix, MatrixError, NotCoherent, Sign};
use crate::qcoeff::HalfInteger;
use crate::torus::{ExponentVector, QuantumLaurent, Torus, TorusError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SeedError {
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Torus(#[from] TorusError),
    #[error("mutation index {index} out of range (0..{n})")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("seed has {found} variables, expected {expected}")]
    VariableCount { expected: usize, found: usize },
    #[error("mutation in direction {index} left the quantum torus (no exact quotient)")]
    NotDivisible { index: usize },
    #[error("cluster variables {i} and {j} do not q-commute")]
    NotQCommuting { i: usize, j: usize },
    #[error("q-commutation exponent of variables {i} and {j} is {value}, not an integer")]
    NonIntegerExponent { i: usize, j: usize, value: String },
    #[error("stored Lambda does not match the q-commutators of the variables")]
    LambdaMismatch,
    #[error("symmetrizer changed under mutation: {before} -> {after}")]
    SymmetrizerChanged { before: Diagonal, after: Diagonal },
    #[error("integrity check failed: {0}")]
    Integrity(String),
}

impl SeedError {
    /// Errors that indicate broken internal invariants rather than bad input.
    pub fn is_integrity(&self) -> bool {
        matches!(
            self,
            SeedError::NotDivisible { .. }
                | SeedError::NotQCommuting { .. }
                | SeedError::NonIntegerExponent { .. }
                | SeedError::LambdaMismatch
                | SeedError::SymmetrizerChanged { .. }
                | SeedError::Integrity(_)
        )
    }
}

/// A compatible pair `(B̃, Λ)` with its cached symmetrizer `D`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExchangeData {
    b: IntMatrix,
    lambda: IntMatrix,
    d: Diagonal,
}

impl ExchangeData {
    /// Validates `Λ` skew-symmetric and `B̃ᵀΛ = (D 0)` with `D > 0`.
    pub fn new(b: IntMatrix, lambda: IntMatrix) -> Result<Self, MatrixError> {
        let d = check_compatible(&b, &lambda)?;
        let n = b.cols();
        if !crate::matrix::skew_symmetrizer_check(&b.block(0, n, 0, n), &d) {
            return Err(MatrixError::NotSkewSymmetrizable);
        }
        Ok(ExchangeData { b, lambda, d })
    }

    pub fn b(&self) -> &IntMatrix {
        &self.b
    }

    pub fn lambda(&self) -> &IntMatrix {
        &self.lambda
    }

    pub fn d(&self) -> &Diagonal {
        &self.d
    }

    /// Number of cluster variables (rows of `B̃`).
    pub fn m(&self) -> usize {
        self.b.rows()
    }

    /// `μ_k` on the matrices alone: `B̃' = μ_k(B̃)` and `Λ' = EᵀΛE` where `E`
    /// is the identity except in column `k`, with `E_kk = -1` and
    /// `E_ik = [-b_ik]_+`.
    pub fn mutate(&self, k: usize) -> Result<ExchangeData, MatrixError> {
        let b = mutate_matrix(&self.b, k)?;
        let m = self.m();
        let mut e = IntMatrix::identity(m);
        for i in 0..m {
            e.set(i, k, if i == k { -1 } else { (-self.b.get(i, k)).max(0) });
        }
        let lambda = e.transpose().checked_mul(&self.lambda)?.checked_mul(&e)?;
        ExchangeData::new(b, lambda)
    }

    /// Number of mutable directions (columns of `B̃`).
    pub fn n(&self) -> usize {
        self.b.cols()
    }
}

/// A quantum seed: exchange data plus cluster variables over the initial torus.
#[derive(Clone, Debug)]
pub struct QuantumSeed {
    exchange: ExchangeData,
    vars: Vec<QuantumLaurent>,
    initial: Arc<Torus>,
}

impl PartialEq for QuantumSeed {
    fn eq(&self, other: &Self) -> bool {
        self.exchange == other.exchange && self.vars == other.vars
    }
}

impl Eq for QuantumSeed {}

impl Hash for QuantumSeed {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.exchange.hash(state);
        self.vars.hash(state);
    }
}

impl QuantumSeed {
    /// The initial seed of `exchange`: `X_i` are the torus generators.
    pub fn initial(exchange: ExchangeData) -> Self {
        let initial = Torus::new(exchange.lambda.clone()).expect("ExchangeData holds a skew-symmetric Lambda");
        let vars = (0..exchange.m()).map(|i| QuantumLaurent::generator(&initial, i)).collect();
        QuantumSeed { exchange, vars, initial }
    }

    /// Initial seed of a compatible pair.
    pub fn from_matrices(b: IntMatrix, lambda: IntMatrix) -> Result<Self, SeedError> {
        Ok(Self::initial(ExchangeData::new(b, lambda)?))
    }

    /// Seed with explicit variables; their q-commutators must reproduce `Λ`.
    pub fn from_parts(exchange: ExchangeData, vars: Vec<QuantumLaurent>, initial: Arc<Torus>) -> Result<Self, SeedError> {
        if vars.len() != exchange.m() {
            return Err(SeedError::VariableCount { expected: exchange.m(), found: vars.len() });
        }
        if vars.iter().any(|v| **v.torus() != *initial) {
            return Err(TorusError::TorusMismatch.into());
        }
        if recover_lambda(&vars)? != exchange.lambda {
            return Err(SeedError::LambdaMismatch);
        }
        Ok(QuantumSeed { exchange, vars, initial })
    }

    pub fn exchange(&self) -> &ExchangeData {
        &self.exchange
    }

    pub fn b(&self) -> &IntMatrix {
        &self.exchange.b
    }

    pub fn lambda(&self) -> &IntMatrix {
        &self.exchange.lambda
    }

    pub fn d(&self) -> &Diagonal {
        &self.exchange.d
    }

    pub fn m(&self) -> usize {
        self.exchange.m()
    }

    pub fn n(&self) -> usize {
        self.exchange.n()
    }

    pub fn vars(&self) -> &[QuantumLaurent] {
        &self.vars
    }

    pub fn initial_torus(&self) -> &Arc<Torus> {
        &self.initial
    }

    /// True when every variable is the corresponding initial generator.
    pub fn has_initial_vars(&self) -> bool {
        self.initial.rank() == self.m()
            && self.vars.iter().enumerate().all(|(i, v)| *v == QuantumLaurent::generator(&self.initial, i))
    }

    /// Normalized monomial `Y^c` in the current variables, `c >= 0`.
    fn cluster_monomial(&self, c: &ExponentVector) -> QuantumLaurent {
        let lambda = &self.exchange.lambda;
        let m = self.m();
        let mut norm = 0;
        for i in 0..m {
            for k in (i + 1)..m {
                norm += lambda.get(k, i) * c[i] * c[k];
            }
        }
        let mut acc = QuantumLaurent::one(&self.initial);
        for (i, v) in self.vars.iter().enumerate() {
            if c[i] > 0 {
                acc = &acc * &v.pow(c[i] as u32);
            }
        }
        acc.scale_q(HalfInteger::from_doubled(norm))
    }

    /// The exchange binomial `X'_j` in initial coordinates.
    pub fn exchange_binomial(&self, j: usize) -> Result<QuantumLaurent, SeedError> {
        let n = self.n();
        if j >= n {
            return Err(SeedError::IndexOutOfRange { index: j, n });
        }
        let m = self.m();
        let col = ExponentVector::new(self.exchange.b.column(j));
        let lambda = &self.exchange.lambda;
        // Y^{c - e_j} = q^{½ cᵀΛe_j} Y^c Y_j^{-1}
        let half_pairing = |c: &ExponentVector| HalfInteger::from_doubled((0..m).map(|i| c[i] * lambda.get(i, j)).sum());
        let plus = col.plus_trunc();
        let minus = (-&col).plus_trunc();
        debug_assert_eq!(plus[j], 0);
        let numerator = &self.cluster_monomial(&plus).scale_q(half_pairing(&plus))
            + &self.cluster_monomial(&minus).scale_q(half_pairing(&minus));
        numerator.exact_div(&self.vars[j]).map_err(|e| match e {
            TorusError::NotDivisible => SeedError::NotDivisible { index: j },
            other => other.into(),
        })
    }

    /// Mutation `μ_j` (0-based `j < n`).
    pub fn mutate(&self, j: usize) -> Result<QuantumSeed, SeedError> {
        let new_var = self.exchange_binomial(j)?;
        let b = mutate_matrix(&self.exchange.b, j)?;
        let mut vars = self.vars.clone();
        vars[j] = new_var;

        // Only row/column j of Λ can change; the other pairs are untouched variables.
        let mut lambda = self.exchange.lambda.clone();
        for i in 0..self.m() {
            if i == j {
                continue;
            }
            let t = commutation_entry(&vars, j, i)?;
            lambda.set(j, i, t);
            lambda.set(i, j, -t);
        }
        let d = check_compatible(&b, &lambda)?;
        if d != self.exchange.d {
            return Err(SeedError::SymmetrizerChanged { before: self.exchange.d.clone(), after: d });
        }
        Ok(QuantumSeed { exchange: ExchangeData { b, lambda, d }, vars, initial: self.initial.clone() })
    }

    /// Applies mutations left to right.
    pub fn mutate_word(&self, word: &[usize]) -> Result<QuantumSeed, SeedError> {
        let mut s = self.clone();
        for &j in word {
            s = s.mutate(j)?;
        }
        Ok(s)
    }

    /// `λ_ij = 0` for all `i, j < n`.
    pub fn is_integrable(&self) -> bool {
        let n = self.n();
        (0..n).all(|i| (0..n).all(|j| self.exchange.lambda.get(i, j) == 0))
    }

    /// [`Self::is_integrable`], cross-checked against the commutators of the
    /// first `n` variables.
    pub fn is_integrable_checked(&self) -> Result<bool, SeedError> {
        let n = self.n();
        let mut commuting = true;
        for i in 0..n {
            for j in (i + 1)..n {
                commuting &= commutation_entry(&self.vars, i, j)? == 0;
            }
        }
        if commuting != self.is_integrable() {
            return Err(SeedError::LambdaMismatch);
        }
        Ok(commuting)
    }

    pub fn sign_coherence(&self) -> Result<Vec<Sign>, NotCoherent> {
        is_sign_coherent(&self.exchange.b)
    }

    /// `σ` with `other.vars[i] == self.vars[σ[i]]` and `B̃`, `Λ` permuted
    /// accordingly; mutable indices map to mutable indices.
    pub fn permutation_to(&self, other: &QuantumSeed) -> Option<Vec<usize>> {
        let (m, n) = (self.m(), self.n());
        if other.m() != m || other.n() != n {
            return None;
        }
        let mut sigma = Vec::with_capacity(m);
        for v in &other.vars {
            let k = self.vars.iter().position(|w| w == v)?;
            if sigma.contains(&k) {
                return None;
            }
            sigma.push(k);
        }
        if (0..n).any(|i| sigma[i] >= n) {
            return None;
        }
        let b_ok = (0..m).all(|i| (0..n).all(|j| other.b().get(i, j) == self.b().get(sigma[i], sigma[j])));
        let l_ok = (0..m).all(|i| (0..m).all(|j| other.lambda().get(i, j) == self.lambda().get(sigma[i], sigma[j])));
        (b_ok && l_ok).then_some(sigma)
    }

    /// Equality up to relabeling.
    pub fn equivalent_up_to_permutation(&self, other: &QuantumSeed) -> bool {
        self.permutation_to(other).is_some()
    }
}

fn commutation_entry(vars: &[QuantumLaurent], i: usize, j: usize) -> Result<i64, SeedError> {
    let t = vars[i].q_commutation_exponent(&vars[j]).map_err(|e| match e {
        TorusError::NotQCommuting | TorusError::ZeroOperand => SeedError::NotQCommuting { i, j },
        other => other.into(),
    })?;
    t.to_integer().ok_or_else(|| SeedError::NonIntegerExponent { i, j, value: t.to_string() })
}

/// `Λ'_ij` = q-commutation exponent of `vars_i` and `vars_j`.
pub fn recover_lambda(vars: &[QuantumLaurent]) -> Result<IntMatrix, SeedError> {
    let m = vars.len();
    let mut lambda = IntMatrix::zeros(m, m);
    for i in 0..m {
        for j in (i + 1)..m {
            let t = commutation_entry(vars, i, j)?;
            lambda.set(i, j, t);
            lambda.set(j, i, -t);
        }
    }
    Ok(lambda)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::matrix::{lambda_from_bcd, RationalMatrix};
    use crate::qcoeff::QCoefficient;
    use num_rational::BigRational;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_rows(rows).unwrap()
    }

    fn rank_one() -> QuantumSeed {
        QuantumSeed::from_matrices(m(&[&[0], &[1]]), m(&[&[0, -1], &[1, 0]])).unwrap()
    }

    pub(crate) fn principal(b: &[&[i64]], d: &[i64]) -> QuantumSeed {
        let b = m(b);
        let n = b.rows();
        let dr: Vec<BigRational> = d.iter().map(|&x| BigRational::from_integer(x.into())).collect();
        let lam = lambda_from_bcd(&b.to_rational(), &RationalMatrix::identity(n), &dr).unwrap();
        QuantumSeed::from_matrices(b.vstack(&IntMatrix::identity(n)).unwrap(), lam.to_integer().unwrap()).unwrap()
    }

    fn ev(v: &[i64]) -> ExponentVector {
        ExponentVector::new(v.to_vec())
    }

    #[test]
    fn rank_one_mutation() {
        let s = rank_one();
        let t = s.initial_torus().clone();
        let mu = s.mutate(0).unwrap();
        let expected = QuantumLaurent::from_ordered_terms(
            &t,
            [
                (ev(&[-1, 1]), QCoefficient::q_power(HalfInteger::from_doubled(-1))),
                (ev(&[-1, 0]), QCoefficient::one()),
            ],
        )
        .unwrap();
        assert_eq!(mu.vars()[0], expected);
        assert_eq!(mu.vars()[1], s.vars()[1]);
        assert_eq!(mu.b(), &m(&[&[0], &[-1]]));
        assert_eq!(mu.lambda().get(0, 1), 1);
        assert_eq!(mu.d(), s.d());
        assert_eq!(mu.mutate(0).unwrap(), s);
    }

    #[test]
    fn index_out_of_range() {
        assert_eq!(rank_one().mutate(1), Err(SeedError::IndexOutOfRange { index: 1, n: 1 }));
    }

    #[test]
    fn integrability_examples() {
        let p = principal(&[&[0, 1], &[-1, 0]], &[1, 1]);
        assert!(p.is_integrable());
        assert!(p.is_integrable_checked().unwrap());
        let mu = p.mutate(0).unwrap();
        assert!(mu.is_integrable_checked().unwrap());
        assert_eq!(mu.lambda().block(0, 2, 0, 2), IntMatrix::zeros(2, 2));

        let free = QuantumSeed::from_matrices(m(&[&[0, 1], &[-1, 0]]), m(&[&[0, 1], &[-1, 0]])).unwrap();
        assert!(!free.is_integrable());
        assert!(!free.is_integrable_checked().unwrap());
    }

    #[test]
    fn recover_lambda_examples() {
        let p = principal(&[&[0, 1], &[-1, 0]], &[1, 1]);
        assert_eq!(&recover_lambda(p.vars()).unwrap(), p.lambda());
        let mu = p.mutate(0).unwrap();
        assert_eq!(&recover_lambda(mu.vars()).unwrap(), mu.lambda());
        let r1 = rank_one().mutate(0).unwrap();
        assert_eq!(recover_lambda(r1.vars()).unwrap().get(0, 1), 1);
    }

    #[test]
    fn non_q_commuting_vars_rejected() {
        let s = QuantumSeed::from_matrices(m(&[&[0, 1], &[-1, 0]]), m(&[&[0, 1], &[-1, 0]])).unwrap();
        let t = s.initial_torus().clone();
        let x1 = QuantumLaurent::generator(&t, 0);
        let x2 = QuantumLaurent::generator(&t, 1);
        let bad = vec![&x1 + &x2, x2.clone()];
        assert_eq!(recover_lambda(&bad), Err(SeedError::NotQCommuting { i: 0, j: 1 }));
        let swapped = QuantumSeed::from_parts(s.exchange().clone(), vec![x2, x1], t);
        assert_eq!(swapped.unwrap_err(), SeedError::LambdaMismatch);
    }

    /// `Λ' = EᵀΛE` with `E_ik = -δ_ik + max(0, -b_ik)` in column k.
    fn transported_lambda(s: &QuantumSeed, k: usize) -> IntMatrix {
        let mm = s.m();
        let mut e = IntMatrix::identity(mm);
        for i in 0..mm {
            let v = if i == k { -1 } else { (-s.b().get(i, k)).max(0) };
            e.set(i, k, v);
        }
        e.transpose().checked_mul(s.lambda()).unwrap().checked_mul(&e).unwrap()
    }

    #[test]
    fn recovered_lambda_matches_transport() {
        for s in [
            principal(&[&[0, 1], &[-1, 0]], &[1, 1]),
            principal(&[&[0, 1], &[-2, 0]], &[2, 1]),
            principal(&[&[0, 1], &[-3, 0]], &[3, 1]),
            principal(&[&[0, 1, 0], &[-1, 0, 1], &[0, -1, 0]], &[1, 1, 1]),
        ] {
            let mut cur = s;
            for &k in &[0usize, 1, 0, 1, 1, 0] {
                let k = k % cur.n();
                let next = cur.mutate(k).unwrap();
                assert_eq!(next.lambda(), &transported_lambda(&cur, k));
                cur = next;
            }
        }
    }

    #[test]
    fn exchange_mutation_matches_seed_mutation() {
        let s = principal(&[&[0, 1], &[-2, 0]], &[2, 1]);
        let mut cur = s;
        for k in [0, 1, 1, 0, 1] {
            let next = cur.mutate(k).unwrap();
            assert_eq!(cur.exchange().mutate(k).unwrap(), *next.exchange());
            cur = next;
        }
        assert!(cur.exchange().mutate(2).is_err());
    }

    #[test]
    fn involution_on_full_seeds() {
        let s = principal(&[&[0, 1], &[-3, 0]], &[3, 1]);
        let mut cur = s.clone();
        for k in [0, 1, 0, 1] {
            cur = cur.mutate(k).unwrap();
            assert_eq!(cur.mutate(k).unwrap().mutate(k).unwrap(), cur);
        }
    }

    #[test]
    fn frozen_variables_stay_put() {
        let s = principal(&[&[0, 1], &[-2, 0]], &[2, 1]);
        let mu = s.mutate_word(&[0, 1, 0]).unwrap();
        assert_eq!(&mu.vars()[2..], &s.vars()[2..]);
    }

    #[test]
    fn pentagon_up_to_permutation() {
        let s = QuantumSeed::from_matrices(m(&[&[0, 1], &[-1, 0]]), m(&[&[0, 1], &[-1, 0]])).unwrap();
        let out = s.mutate_word(&[0, 1, 0, 1, 0]).unwrap();
        assert_ne!(out, s);
        assert_eq!(s.permutation_to(&out), Some(vec![1, 0]));
        assert_eq!(s.mutate_word(&[0, 1, 0, 1, 0, 1, 0, 1, 0, 1]).unwrap(), s);
    }
}
