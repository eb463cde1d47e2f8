//! The based quantum torus `L_X` over `Z[q^{±1/2}]`.
//!
//! Generators satisfy `X_i X_j = q^{λ_ij} X_j X_i`. Elements are stored in
//! the ordered-product basis `X_1^{a_1} ⋯ X_m^{a_m}`, in which
//!
//! ```text
//! (X_1^{a_1}⋯X_m^{a_m}) (X_1^{b_1}⋯X_m^{b_m})
//!     = q^{Σ_{i<j} λ_ji a_j b_i} X_1^{a_1+b_1}⋯X_m^{a_m+b_m}
//! ```
//!
//! The normalized monomial `X^a` is `q^{½ Σ_{i<j} λ_ji a_i a_j}` times the
//! ordered product, so that `X^a X^b = q^{½ aᵀΛb} X^{a+b}`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Index, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::classical::Laurent;
use crate::matrix::{IntMatrix, MatrixError};
use crate::qcoeff::{HalfInteger, QCoefficient};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TorusError {
    #[error("exponent vector has length {found}, torus has rank {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("operands live in different quantum tori")]
    TorusMismatch,
    #[error("not divisible: no exact quotient exists in the quantum torus")]
    NotDivisible,
    #[error("division by zero")]
    DivisionByZero,
    #[error("elements do not q-commute")]
    NotQCommuting,
    #[error("q-commutation of the zero element is undefined")]
    ZeroOperand,
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

/// An element of `Z^m`; ordered lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ExponentVector(Vec<i64>);

impl ExponentVector {
    pub fn new(entries: Vec<i64>) -> Self {
        ExponentVector(entries)
    }

    pub fn zeros(m: usize) -> Self {
        ExponentVector(vec![0; m])
    }

    /// Standard basis vector `e_i`.
    pub fn unit(m: usize, i: usize) -> Self {
        let mut v = vec![0; m];
        v[i] = 1;
        ExponentVector(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<i64> {
        self.0
    }

    /// `[a]_+`: coordinatewise `max(a_i, 0)`.
    pub fn plus_trunc(&self) -> Self {
        ExponentVector(self.0.iter().map(|&x| x.max(0)).collect())
    }

    /// Concatenation `(self, other)`.
    pub fn concat(&self, other: &ExponentVector) -> Self {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        ExponentVector(v)
    }
}

impl From<Vec<i64>> for ExponentVector {
    fn from(v: Vec<i64>) -> Self {
        ExponentVector(v)
    }
}

impl Index<usize> for ExponentVector {
    type Output = i64;
    fn index(&self, i: usize) -> &i64 {
        &self.0[i]
    }
}

impl Add for &ExponentVector {
    type Output = ExponentVector;
    fn add(self, rhs: &ExponentVector) -> ExponentVector {
        ExponentVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &ExponentVector {
    type Output = ExponentVector;
    fn sub(self, rhs: &ExponentVector) -> ExponentVector {
        ExponentVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &ExponentVector {
    type Output = ExponentVector;
    fn neg(self) -> ExponentVector {
        ExponentVector(self.0.iter().map(|a| -a).collect())
    }
}

/// The commutation data of a quantum torus: an integer skew-symmetric `Λ`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Torus {
    lambda: IntMatrix,
}

impl Torus {
    pub fn new(lambda: IntMatrix) -> Result<Arc<Self>, TorusError> {
        if let Some((row, col)) = lambda.skew_symmetry_defect() {
            return Err(MatrixError::NotSkewSymmetric { row, col }.into());
        }
        Ok(Arc::new(Torus { lambda }))
    }

    pub fn rank(&self) -> usize {
        self.lambda.rows()
    }

    pub fn lambda(&self) -> &IntMatrix {
        &self.lambda
    }

    /// `aᵀ Λ b`.
    pub fn bilinear(&self, a: &ExponentVector, b: &ExponentVector) -> i64 {
        let m = self.rank();
        let mut acc = 0;
        for i in 0..m {
            if a[i] == 0 {
                continue;
            }
            for j in 0..m {
                acc += a[i] * self.lambda.get(i, j) * b[j];
            }
        }
        acc
    }

    /// Doubled q-exponent picked up when reordering `O(a) O(b)` into `O(a+b)`.
    fn reorder_twist(&self, a: &ExponentVector, b: &ExponentVector) -> i64 {
        let m = self.rank();
        let mut acc = 0;
        for i in 0..m {
            if b[i] == 0 {
                continue;
            }
            for j in (i + 1)..m {
                acc += self.lambda.get(j, i) * a[j] * b[i];
            }
        }
        2 * acc
    }

    /// Doubled exponent of the normalization factor of `X^a`.
    pub fn normalization(&self, a: &ExponentVector) -> HalfInteger {
        let m = self.rank();
        let mut acc = 0;
        for i in 0..m {
            for j in (i + 1)..m {
                acc += self.lambda.get(j, i) * a[i] * a[j];
            }
        }
        HalfInteger::from_doubled(acc)
    }

    fn check_len(&self, a: &ExponentVector) -> Result<(), TorusError> {
        if a.len() != self.rank() {
            return Err(TorusError::DimensionMismatch { expected: self.rank(), found: a.len() });
        }
        Ok(())
    }
}

/// A finite sum `Σ c_a X_1^{a_1}⋯X_m^{a_m}` in a quantum torus.
#[derive(Clone, Debug)]
pub struct QuantumLaurent {
    torus: Arc<Torus>,
    terms: BTreeMap<ExponentVector, QCoefficient>,
}

impl PartialEq for QuantumLaurent {
    fn eq(&self, other: &Self) -> bool {
        same_torus(&self.torus, &other.torus) && self.terms == other.terms
    }
}

impl Eq for QuantumLaurent {}

impl std::hash::Hash for QuantumLaurent {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.terms.hash(state);
    }
}

fn same_torus(a: &Arc<Torus>, b: &Arc<Torus>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

impl QuantumLaurent {
    pub fn zero(torus: &Arc<Torus>) -> Self {
        QuantumLaurent { torus: torus.clone(), terms: BTreeMap::new() }
    }

    pub fn one(torus: &Arc<Torus>) -> Self {
        Self::from_ordered_term(torus, ExponentVector::zeros(torus.rank()), QCoefficient::one())
    }

    /// The normalized monomial `X^a`.
    pub fn monomial(torus: &Arc<Torus>, a: ExponentVector) -> Result<Self, TorusError> {
        torus.check_len(&a)?;
        let c = QCoefficient::q_power(torus.normalization(&a));
        Ok(Self::from_ordered_term(torus, a, c))
    }

    /// The generator `X_i`.
    pub fn generator(torus: &Arc<Torus>, i: usize) -> Self {
        Self::from_ordered_term(torus, ExponentVector::unit(torus.rank(), i), QCoefficient::one())
    }

    /// `c · X_1^{a_1}⋯X_m^{a_m}` (no normalization applied).
    pub fn from_ordered_term(torus: &Arc<Torus>, a: ExponentVector, c: QCoefficient) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(a, c);
        }
        QuantumLaurent { torus: torus.clone(), terms }
    }

    /// Sums ordered-basis terms; repeated exponents are merged.
    pub fn from_ordered_terms(
        torus: &Arc<Torus>,
        terms: impl IntoIterator<Item = (ExponentVector, QCoefficient)>,
    ) -> Result<Self, TorusError> {
        let mut out = Self::zero(torus);
        for (a, c) in terms {
            torus.check_len(&a)?;
            out.add_term(a, c);
        }
        Ok(out)
    }

    pub fn torus(&self) -> &Arc<Torus> {
        &self.torus
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

    /// Ordered-basis terms in increasing lexicographic order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&ExponentVector, &QCoefficient)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, a: &ExponentVector) -> Option<&QCoefficient> {
        self.terms.get(a)
    }

    /// Lexicographically largest term.
    pub fn leading_term(&self) -> Option<(&ExponentVector, &QCoefficient)> {
        self.terms.last_key_value()
    }

    /// `Some(a)` when `self` is a single term.
    pub fn as_single_term(&self) -> Option<(&ExponentVector, &QCoefficient)> {
        (self.terms.len() == 1).then(|| self.terms.iter().next().unwrap())
    }

    fn add_term(&mut self, a: ExponentVector, c: QCoefficient) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(a) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get() + &c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    fn check_same(&self, other: &QuantumLaurent) -> Result<(), TorusError> {
        if same_torus(&self.torus, &other.torus) {
            Ok(())
        } else {
            Err(TorusError::TorusMismatch)
        }
    }

    pub fn checked_add(&self, rhs: &QuantumLaurent) -> Result<Self, TorusError> {
        self.check_same(rhs)?;
        let mut out = self.clone();
        for (a, c) in &rhs.terms {
            out.add_term(a.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, rhs: &QuantumLaurent) -> Result<Self, TorusError> {
        self.checked_add(&-rhs)
    }

    pub fn checked_mul(&self, rhs: &QuantumLaurent) -> Result<Self, TorusError> {
        self.check_same(rhs)?;
        let mut out = Self::zero(&self.torus);
        for (a, x) in &self.terms {
            for (b, y) in &rhs.terms {
                let twist = HalfInteger::from_doubled(self.torus.reorder_twist(a, b));
                out.add_term(a + b, (x * y).shift(twist));
            }
        }
        Ok(out)
    }

    /// Multiplies every coefficient by `q^e`.
    pub fn scale_q(&self, e: HalfInteger) -> Self {
        QuantumLaurent {
            torus: self.torus.clone(),
            terms: self.terms.iter().map(|(a, c)| (a.clone(), c.shift(e))).collect(),
        }
    }

    /// `self^k` for `k >= 0`.
    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(&self.torus);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Right division: the `h` with `h · divisor = self`.
    ///
    /// Leading terms under lexicographic order are eliminated one at a time.
    /// Since the torus is a domain, the quotient's exponents in each
    /// coordinate lie between the differences of the operands' extreme
    /// exponents; leaving that box means no quotient exists.
    pub fn exact_div(&self, divisor: &QuantumLaurent) -> Result<Self, TorusError> {
        self.check_same(divisor)?;
        let (lead_exp, lead_coeff) = divisor.leading_term().ok_or(TorusError::DivisionByZero)?;
        if self.is_zero() {
            return Ok(Self::zero(&self.torus));
        }
        let m = self.torus.rank();
        let (f_lo, f_hi) = coordinate_bounds(self, m);
        let (g_lo, g_hi) = coordinate_bounds(divisor, m);
        let lo: Vec<i64> = (0..m).map(|i| f_lo[i] - g_lo[i]).collect();
        let hi: Vec<i64> = (0..m).map(|i| f_hi[i] - g_hi[i]).collect();

        let mut rem = self.clone();
        let mut quot = Self::zero(&self.torus);
        while let Some((top, top_coeff)) = rem.leading_term() {
            let e = top - lead_exp;
            if (0..m).any(|i| e[i] < lo[i] || e[i] > hi[i]) {
                return Err(TorusError::NotDivisible);
            }
            let twist = HalfInteger::from_doubled(self.torus.reorder_twist(&e, lead_exp));
            let c = top_coeff
                .exact_div(lead_coeff)
                .ok_or(TorusError::NotDivisible)?
                .shift(HalfInteger::from_doubled(-twist.doubled()));
            let term = Self::from_ordered_term(&self.torus, e.clone(), c.clone());
            rem = rem.checked_sub(&term.checked_mul(divisor)?)?;
            quot.add_term(e, c);
        }
        Ok(quot)
    }

    /// The `t` with `self · other = q^t · other · self`.
    pub fn q_commutation_exponent(&self, other: &QuantumLaurent) -> Result<HalfInteger, TorusError> {
        if self.is_zero() || other.is_zero() {
            return Err(TorusError::ZeroOperand);
        }
        let fg = self.checked_mul(other)?;
        let gf = other.checked_mul(self)?;
        let (_, a) = fg.leading_term().ok_or(TorusError::NotQCommuting)?;
        let (_, b) = gf.leading_term().ok_or(TorusError::NotQCommuting)?;
        let t = a.q_power_ratio(b).ok_or(TorusError::NotQCommuting)?;
        if gf.scale_q(t) == fg {
            Ok(t)
        } else {
            Err(TorusError::NotQCommuting)
        }
    }

    /// Evaluates every coefficient at `q^{1/2} = 1`.
    pub fn specialize_q1(&self) -> Laurent<BigInt> {
        Laurent::from_terms(self.terms.iter().map(|(a, c)| (a.clone(), c.eval_at_one())))
    }

    /// Structural sanity: all exponent vectors have the torus rank and no
    /// coefficient is zero.
    pub fn is_well_formed(&self) -> bool {
        self.terms.iter().all(|(a, c)| a.len() == self.torus.rank() && !c.is_zero())
    }
}

fn coordinate_bounds(f: &QuantumLaurent, m: usize) -> (Vec<i64>, Vec<i64>) {
    let mut lo = vec![i64::MAX; m];
    let mut hi = vec![i64::MIN; m];
    for a in f.terms.keys() {
        for i in 0..m {
            lo[i] = lo[i].min(a[i]);
            hi[i] = hi[i].max(a[i]);
        }
    }
    (lo, hi)
}

impl Neg for &QuantumLaurent {
    type Output = QuantumLaurent;
    fn neg(self) -> QuantumLaurent {
        QuantumLaurent {
            torus: self.torus.clone(),
            terms: self.terms.iter().map(|(a, c)| (a.clone(), -c)).collect(),
        }
    }
}

/// Panics if the operands live in different tori; see [`QuantumLaurent::checked_add`].
impl Add for &QuantumLaurent {
    type Output = QuantumLaurent;
    fn add(self, rhs: &QuantumLaurent) -> QuantumLaurent {
        self.checked_add(rhs).expect("quantum torus mismatch")
    }
}

/// Panics if the operands live in different tori; see [`QuantumLaurent::checked_sub`].
impl Sub for &QuantumLaurent {
    type Output = QuantumLaurent;
    fn sub(self, rhs: &QuantumLaurent) -> QuantumLaurent {
        self.checked_sub(rhs).expect("quantum torus mismatch")
    }
}

/// Panics if the operands live in different tori; see [`QuantumLaurent::checked_mul`].
impl Mul for &QuantumLaurent {
    type Output = QuantumLaurent;
    fn mul(self, rhs: &QuantumLaurent) -> QuantumLaurent {
        self.checked_mul(rhs).expect("quantum torus mismatch")
    }
}

impl fmt::Display for QuantumLaurent {
    /// Terms in decreasing lexicographic order, e.g. `q^(-1/2)*X1^(-1)*X2 + X1^(-1)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (a, c)) in self.terms.iter().rev().enumerate() {
            let mut c = c.clone();
            if k > 0 {
                let negative = c.len() == 1 && c.terms().next().is_some_and(|(_, x)| x.is_negative());
                if negative {
                    write!(f, " - ")?;
                    c = -&c;
                } else {
                    write!(f, " + ")?;
                }
            }
            let vars: Vec<String> = a
                .as_slice()
                .iter()
                .enumerate()
                .filter(|(_, &e)| e != 0)
                .map(|(i, &e)| if e == 1 { format!("X{}", i + 1) } else { format!("X{}^({e})", i + 1) })
                .collect();
            match (c.is_one(), vars.is_empty()) {
                (true, true) => write!(f, "1")?,
                (true, false) => write!(f, "{}", vars.join("*"))?,
                (false, true) => write!(f, "{c}")?,
                (false, false) => write!(f, "{c}*{}", vars.join("*"))?,
            }
        }
        Ok(())
    }
}
