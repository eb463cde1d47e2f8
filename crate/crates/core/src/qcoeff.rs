//! Laurent polynomials in `q^{1/2}` with integer coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// A half-integer stored as twice its value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfInteger(i64);

impl HalfInteger {
    pub const ZERO: HalfInteger = HalfInteger(0);

    pub fn from_doubled(doubled: i64) -> Self {
        HalfInteger(doubled)
    }

    pub fn from_integer(v: i64) -> Self {
        HalfInteger(2 * v)
    }

    pub fn doubled(self) -> i64 {
        self.0
    }

    pub fn to_integer(self) -> Option<i64> {
        (self.0 % 2 == 0).then_some(self.0 / 2)
    }
}

impl fmt::Display for HalfInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.to_integer() {
            Some(v) => write!(f, "{v}"),
            None => write!(f, "{}/2", self.0),
        }
    }
}

/// An element of `Z[q^{1/2}, q^{-1/2}]`.
///
/// Keys are doubled q-exponents (`2e` for `q^e`); zero coefficients are
/// never stored, so equality is structural.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QCoefficient {
    terms: BTreeMap<i64, BigInt>,
}

impl QCoefficient {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::q_power(HalfInteger::ZERO)
    }

    pub fn q_power(e: HalfInteger) -> Self {
        Self::term(e, BigInt::one())
    }

    pub fn term(e: HalfInteger, c: BigInt) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(e.doubled(), c);
        }
        QCoefficient { terms }
    }

    pub fn from_int(c: impl Into<BigInt>) -> Self {
        Self::term(HalfInteger::ZERO, c.into())
    }

    /// Builds from `(doubled exponent, coefficient)` pairs, merging repeats.
    pub fn from_terms(pairs: impl IntoIterator<Item = (i64, BigInt)>) -> Self {
        let mut out = Self::zero();
        for (e, c) in pairs {
            out.add_term(e, c);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&0).is_some_and(|c| c.is_one())
    }

    /// `(doubled exponent, coefficient)` in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigInt)> {
        self.terms.iter().map(|(&e, c)| (e, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, e: i64, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(e).or_insert_with(BigInt::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    /// Multiplies by `q^e`.
    pub fn shift(&self, e: HalfInteger) -> Self {
        QCoefficient { terms: self.terms.iter().map(|(&k, c)| (k + e.doubled(), c.clone())).collect() }
    }

    /// Value at `q^{1/2} = 1`.
    pub fn eval_at_one(&self) -> BigInt {
        self.terms.values().sum()
    }

    /// `Some(h)` with `h * divisor = self` when such `h` exists in the ring.
    pub fn exact_div(&self, divisor: &QCoefficient) -> Option<QCoefficient> {
        let (&top_d, lead_d) = divisor.terms.last_key_value()?;
        let &low_d = divisor.terms.keys().next()?;
        let Some(&low_n) = self.terms.keys().next() else {
            return Some(Self::zero());
        };
        let floor = low_n - low_d;
        let mut rem = self.clone();
        let mut quot = Self::zero();
        while let Some((&top, lead)) = rem.terms.last_key_value() {
            let e = top - top_d;
            if e < floor {
                return None;
            }
            let (c, r) = lead.div_rem(lead_d);
            if !r.is_zero() {
                return None;
            }
            for (&k, v) in &divisor.terms {
                rem.add_term(k + e, -(&c * v));
            }
            quot.add_term(e, c);
        }
        Some(quot)
    }

    /// `Some(e)` with `self = q^e * other`; both must be nonzero.
    pub fn q_power_ratio(&self, other: &QCoefficient) -> Option<HalfInteger> {
        let (&a, _) = self.terms.last_key_value()?;
        let (&b, _) = other.terms.last_key_value()?;
        let e = HalfInteger::from_doubled(a - b);
        (other.shift(e) == *self).then_some(e)
    }
}

impl Add for &QCoefficient {
    type Output = QCoefficient;
    fn add(self, rhs: &QCoefficient) -> QCoefficient {
        let mut out = self.clone();
        for (&e, c) in &rhs.terms {
            out.add_term(e, c.clone());
        }
        out
    }
}

impl Sub for &QCoefficient {
    type Output = QCoefficient;
    fn sub(self, rhs: &QCoefficient) -> QCoefficient {
        self + &(-rhs)
    }
}

impl Neg for &QCoefficient {
    type Output = QCoefficient;
    fn neg(self) -> QCoefficient {
        QCoefficient { terms: self.terms.iter().map(|(&e, c)| (e, -c)).collect() }
    }
}

impl Mul for &QCoefficient {
    type Output = QCoefficient;
    fn mul(self, rhs: &QCoefficient) -> QCoefficient {
        let mut out = QCoefficient::zero();
        for (&a, x) in &self.terms {
            for (&b, y) in &rhs.terms {
                out.add_term(a + b, x * y);
            }
        }
        out
    }
}

impl fmt::Display for QCoefficient {
    /// Writes e.g. `q^(-1/2)`, `2`, `(1 + q)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let wrap = self.terms.len() > 1;
        if wrap {
            write!(f, "(")?;
        }
        for (i, (&e, c)) in self.terms.iter().enumerate() {
            let mag = c.abs();
            if i == 0 {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if c.is_negative() { '-' } else { '+' })?;
            }
            let exp = HalfInteger::from_doubled(e);
            match (mag.is_one(), e == 0) {
                (_, true) => write!(f, "{mag}")?,
                (true, false) => write!(f, "q^({exp})")?,
                (false, false) => write!(f, "{mag}*q^({exp})")?,
            }
        }
        if wrap {
            write!(f, ")")?;
        }
        Ok(())
    }
}
