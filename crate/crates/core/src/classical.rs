//! Commutative Laurent polynomials and the log-canonical Poisson bracket
//! `{x_i, x_j} = λ_ij x_i x_j`.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::matrix::RationalMatrix;
use crate::torus::{ExponentVector, TorusError};

/// `Σ c_a x^a` over a commutative coefficient ring `R`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Laurent<R> {
    terms: BTreeMap<ExponentVector, R>,
}

impl<R> Default for Laurent<R> {
    fn default() -> Self {
        Laurent { terms: BTreeMap::new() }
    }
}

impl<R> Laurent<R>
where
    R: Clone + Zero,
{
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn monomial(a: ExponentVector, c: R) -> Self {
        let mut out = Self::zero();
        out.add_term(a, c);
        out
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (ExponentVector, R)>) -> Self {
        let mut out = Self::zero();
        for (a, c) in terms {
            out.add_term(a, c);
        }
        out
    }

    pub fn add_term(&mut self, a: ExponentVector, c: R) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(a.clone()).or_insert_with(R::zero);
        *slot = slot.clone() + c;
        if slot.is_zero() {
            self.terms.remove(&a);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, a: &ExponentVector) -> Option<&R> {
        self.terms.get(a)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ExponentVector, &R)> {
        self.terms.iter()
    }

    pub fn map_coefficients<S: Clone + Zero>(&self, f: impl Fn(&R) -> S) -> Laurent<S> {
        Laurent::from_terms(self.terms.iter().map(|(a, c)| (a.clone(), f(c))))
    }
}

impl Laurent<BigInt> {
    pub fn to_rational(&self) -> Laurent<BigRational> {
        self.map_coefficients(|c| BigRational::from_integer(c.clone()))
    }
}

impl<R: Clone + Zero> Add for &Laurent<R> {
    type Output = Laurent<R>;
    fn add(self, rhs: &Laurent<R>) -> Laurent<R> {
        let mut out = self.clone();
        for (a, c) in &rhs.terms {
            out.add_term(a.clone(), c.clone());
        }
        out
    }
}

impl<R: Clone + Zero + Neg<Output = R>> Neg for &Laurent<R> {
    type Output = Laurent<R>;
    fn neg(self) -> Laurent<R> {
        Laurent { terms: self.terms.iter().map(|(a, c)| (a.clone(), -c.clone())).collect() }
    }
}

impl<R: Clone + Zero + Mul<Output = R>> Mul for &Laurent<R> {
    type Output = Laurent<R>;
    fn mul(self, rhs: &Laurent<R>) -> Laurent<R> {
        let mut out = Laurent::zero();
        for (a, x) in &self.terms {
            for (b, y) in &rhs.terms {
                out.add_term(a + b, x.clone() * y.clone());
            }
        }
        out
    }
}

/// `{f, g}_Λ`, the bilinear extension of `{x^a, x^b} = (aᵀΛb) x^{a+b}`.
pub fn poisson_bracket<R>(f: &Laurent<R>, g: &Laurent<R>, lambda: &RationalMatrix) -> Result<Laurent<BigRational>, TorusError>
where
    R: Clone + Zero + Into<BigRational>,
{
    let m = lambda.rows();
    let mut out = Laurent::zero();
    for (a, x) in f.terms() {
        if a.len() != m {
            return Err(TorusError::DimensionMismatch { expected: m, found: a.len() });
        }
        for (b, y) in g.terms() {
            if b.len() != m {
                return Err(TorusError::DimensionMismatch { expected: m, found: b.len() });
            }
            let mut pairing = BigRational::zero();
            for i in 0..m {
                if a[i] == 0 {
                    continue;
                }
                for j in 0..m {
                    if b[j] != 0 {
                        pairing += lambda.get(i, j) * BigRational::from_integer((a[i] * b[j]).into());
                    }
                }
            }
            if pairing.is_zero() {
                continue;
            }
            let c: BigRational = x.clone().into() * y.clone().into();
            out.add_term(a + b, pairing * c);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::IntMatrix;
    use proptest::prelude::*;

    fn ev(v: &[i64]) -> ExponentVector {
        ExponentVector::new(v.to_vec())
    }

    fn int(a: &[i64], c: i64) -> Laurent<BigInt> {
        Laurent::monomial(ev(a), BigInt::from(c))
    }

    fn rat(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    /// Brute force on monomial pairs: `{x^a, x^b} = Σ_ij a_i b_j λ_ij x^{a+b}`.
    fn bracket_oracle(a: &[i64], b: &[i64], lambda: &[[i64; 2]; 2]) -> i64 {
        let mut s = 0;
        for i in 0..2 {
            for j in 0..2 {
                s += a[i] * b[j] * lambda[i][j];
            }
        }
        s
    }

    #[test]
    fn generator_brackets() {
        let lam = IntMatrix::from_rows(&[[0, 3, -1], [-3, 0, 2], [1, -2, 0]]).unwrap();
        let lr = lam.to_rational();
        for i in 0..3 {
            for j in 0..3 {
                let xi = int(ExponentVector::unit(3, i).as_slice(), 1);
                let xj = int(ExponentVector::unit(3, j).as_slice(), 1);
                let expected = (&xi * &xj).to_rational().map_coefficients(|c| c * rat(lam.get(i, j)));
                assert_eq!(poisson_bracket(&xi, &xj, &lr).unwrap(), expected);
            }
        }
    }

    #[test]
    fn worked_bracket() {
        let lambda = [[0, -1], [1, 0]];
        let lr = IntMatrix::from_rows(&lambda).unwrap().to_rational();
        let f = &int(&[-1, 1], 1) + &int(&[-1, 0], 1);
        let g = int(&[1, 0], 1);
        let out = poisson_bracket(&f, &g, &lr).unwrap();
        // {x1^-1 x2, x1} = x1^-1 {x2, x1} = λ_21 x2
        assert_eq!(bracket_oracle(&[-1, 1], &[1, 0], &lambda), 1);
        assert_eq!(bracket_oracle(&[-1, 0], &[1, 0], &lambda), 0);
        assert_eq!(out, Laurent::monomial(ev(&[0, 1]), rat(1)));
        assert!(poisson_bracket(&f, &f, &lr).unwrap().is_zero());
    }

    #[test]
    fn dimension_mismatch() {
        let lr = IntMatrix::zeros(2, 2).to_rational();
        assert!(poisson_bracket(&int(&[1, 0, 0], 1), &int(&[1, 0], 1), &lr).is_err());
    }

    fn lam3() -> RationalMatrix {
        IntMatrix::from_rows(&[[0, 2, -1], [-2, 0, 1], [1, -1, 0]]).unwrap().to_rational()
    }

    fn mono() -> impl Strategy<Value = Laurent<BigRational>> {
        (proptest::collection::vec(-2i64..=2, 3), -3i64..=3)
            .prop_map(|(a, c)| Laurent::monomial(ExponentVector::new(a), rat(c)))
    }

    proptest! {
        #[test]
        fn jacobi_on_monomials(f in mono(), g in mono(), h in mono()) {
            let l = lam3();
            let pb = |x: &Laurent<BigRational>, y: &Laurent<BigRational>| poisson_bracket(x, y, &l).unwrap();
            let s = &(&pb(&f, &pb(&g, &h)) + &pb(&g, &pb(&h, &f))) + &pb(&h, &pb(&f, &g));
            prop_assert!(s.is_zero());
        }

        #[test]
        fn antisymmetry_and_leibniz(f in mono(), g in mono(), h in mono()) {
            let l = lam3();
            let pb = |x: &Laurent<BigRational>, y: &Laurent<BigRational>| poisson_bracket(x, y, &l).unwrap();
            prop_assert_eq!(pb(&f, &g), -&pb(&g, &f));
            let lhs = pb(&f, &(&g * &h));
            let rhs = &(&pb(&f, &g) * &h) + &(&g * &pb(&f, &h));
            prop_assert_eq!(lhs, rhs);
        }
    }
}
