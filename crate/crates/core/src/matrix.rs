//! Exact integer and rational matrices for exchange data.
//!
//! Everything here is exact: integer matrices use checked `i64` arithmetic
//! (overflow is reported, never wrapped) and the classical side uses
//! arbitrary-precision rationals.
//!
//! Indices are 0-based throughout the library. Mutation words shown to
//! users (CLI, reports) are 1-based; see [`crate::explore::MutationWord`].

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MatrixError {
    #[error("ragged matrix: row {row} has {found} entries, expected {expected}")]
    Ragged { row: usize, expected: usize, found: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("mutation index {index} out of range (0..{bound})")]
    IndexOutOfRange { index: usize, bound: usize },
    #[error("integer overflow in exact matrix arithmetic")]
    Overflow,
    #[error("Lambda is not skew-symmetric at ({row}, {col})")]
    NotSkewSymmetric { row: usize, col: usize },
    #[error("B^T Lambda is not of the form (D 0): entry ({row}, {col}) is {value}")]
    NotBlockDiagonal { row: usize, col: usize, value: String },
    #[error("D has non-positive diagonal entry {value} at index {index}")]
    NonPositiveD { index: usize, value: String },
    #[error("D is singular at index {index}")]
    SingularD { index: usize },
    #[error("C is singular")]
    SingularC,
    #[error("DB is not skew-symmetric")]
    NotSkewSymmetrizable,
    #[error("postcondition failed: {0}")]
    Postcondition(String),
}

/// Dense integer matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "Vec<Vec<i64>>", try_from = "Vec<Vec<i64>>")]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// Builds a matrix from rows. All rows must have equal length.
    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R]) -> Result<Self, MatrixError> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(MatrixError::Ragged { row: i, expected: cols, found: r.len() });
            }
            data.extend_from_slice(r);
        }
        Ok(IntMatrix { rows: rows.len(), cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: i64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<i64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    /// Rows `r0..r1`, columns `c0..c1`.
    pub fn block(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Self {
        let mut out = Self::zeros(r1 - r0, c1 - c0);
        for i in r0..r1 {
            for j in c0..c1 {
                out.set(i - r0, j - c0, self.get(i, j));
            }
        }
        out
    }

    /// Stacks `self` on top of `other`.
    pub fn vstack(&self, other: &IntMatrix) -> Result<Self, MatrixError> {
        if self.cols != other.cols {
            return Err(MatrixError::DimensionMismatch(format!(
                "cannot stack {} columns on {} columns",
                self.cols, other.cols
            )));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(IntMatrix { rows: self.rows + other.rows, cols: self.cols, data })
    }

    pub fn checked_mul(&self, rhs: &IntMatrix) -> Result<Self, MatrixError> {
        if self.cols != rhs.rows {
            return Err(MatrixError::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for j in 0..rhs.cols {
                let mut acc: i128 = 0;
                for k in 0..self.cols {
                    acc += self.get(i, k) as i128 * rhs.get(k, j) as i128;
                }
                out.set(i, j, i64::try_from(acc).map_err(|_| MatrixError::Overflow)?);
            }
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        IntMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| -x).collect() }
    }

    /// First offending position, if any.
    pub fn skew_symmetry_defect(&self) -> Option<(usize, usize)> {
        if !self.is_square() {
            return Some((0, 0));
        }
        for i in 0..self.rows {
            for j in i..self.cols {
                if self.get(i, j) != -self.get(j, i) {
                    return Some((i, j));
                }
            }
        }
        None
    }

    pub fn is_skew_symmetric(&self) -> bool {
        self.skew_symmetry_defect().is_none()
    }

    pub fn to_rational(&self) -> RationalMatrix {
        RationalMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| BigRational::from_integer(x.into())).collect(),
        }
    }
}

impl From<IntMatrix> for Vec<Vec<i64>> {
    fn from(m: IntMatrix) -> Self {
        m.to_rows()
    }
}

impl TryFrom<Vec<Vec<i64>>> for IntMatrix {
    type Error = MatrixError;
    fn try_from(rows: Vec<Vec<i64>>) -> Result<Self, Self::Error> {
        IntMatrix::from_rows(&rows)
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for (j, x) in self.row(i).iter().enumerate() {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// Positive integer diagonal matrix, stored as its diagonal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Diagonal(pub Vec<i64>);

impl Diagonal {
    pub fn identity(n: usize) -> Self {
        Diagonal(vec![1; n])
    }

    pub fn entries(&self) -> &[i64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn to_rational(&self) -> Vec<BigRational> {
        self.0.iter().map(|&d| BigRational::from_integer(d.into())).collect()
    }
}

impl fmt::Display for Diagonal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "diag(")?;
        for (i, d) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{d}")?;
        }
        write!(f, ")")
    }
}

/// Fomin-Zelevinsky mutation of an `m x n` exchange matrix in direction `k`.
///
/// `b'_{ij} = -b_{ij}` if `i = k` or `j = k`, and otherwise
/// `b'_{ij} = b_{ij} + sgn(b_{ik}) max(b_{ik} b_{kj}, 0)`.
pub fn mutate_matrix(b: &IntMatrix, k: usize) -> Result<IntMatrix, MatrixError> {
    let n = b.cols();
    if k >= n || k >= b.rows() {
        return Err(MatrixError::IndexOutOfRange { index: k, bound: n });
    }
    let mut out = b.clone();
    for i in 0..b.rows() {
        for j in 0..n {
            let v = if i == k || j == k {
                -b.get(i, j)
            } else {
                let bik = b.get(i, k) as i128;
                let bkj = b.get(k, j) as i128;
                let v = b.get(i, j) as i128 + bik.signum() * (bik * bkj).max(0);
                i64::try_from(v).map_err(|_| MatrixError::Overflow)?
            };
            out.set(i, j, v);
        }
    }
    Ok(out)
}

/// Checks `B^T Lambda = (D 0)` with `D` diagonal and positive, returning `D`.
pub fn check_compatible(b: &IntMatrix, lambda: &IntMatrix) -> Result<Diagonal, MatrixError> {
    let m = b.rows();
    let n = b.cols();
    if n > m {
        return Err(MatrixError::DimensionMismatch(format!("B is {m}x{n} with n > m")));
    }
    if lambda.rows() != m || lambda.cols() != m {
        return Err(MatrixError::DimensionMismatch(format!(
            "Lambda is {}x{}, expected {m}x{m}",
            lambda.rows(),
            lambda.cols()
        )));
    }
    if let Some((row, col)) = lambda.skew_symmetry_defect() {
        return Err(MatrixError::NotSkewSymmetric { row, col });
    }
    let p = b.transpose().checked_mul(lambda)?;
    for j in 0..n {
        for l in 0..m {
            if l != j && p.get(j, l) != 0 {
                return Err(MatrixError::NotBlockDiagonal { row: j, col: l, value: p.get(j, l).to_string() });
            }
        }
    }
    let mut d = Vec::with_capacity(n);
    for j in 0..n {
        let v = p.get(j, j);
        if v <= 0 {
            return Err(MatrixError::NonPositiveD { index: j, value: v.to_string() });
        }
        d.push(v);
    }
    Ok(Diagonal(d))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

/// A column whose frozen part carries entries of both signs.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("column {column} is not sign-coherent: row {positive_row} > 0, row {negative_row} < 0")]
pub struct NotCoherent {
    pub column: usize,
    pub positive_row: usize,
    pub negative_row: usize,
}

/// Returns the sign vector of the frozen part (rows `n..m`) of `b`.
///
/// All-zero frozen columns get `+1`. With no frozen rows every sign is `+1`.
pub fn is_sign_coherent(b: &IntMatrix) -> Result<Vec<Sign>, NotCoherent> {
    let n = b.cols();
    let mut signs = Vec::with_capacity(n);
    for j in 0..n {
        let mut pos = None;
        let mut neg = None;
        for i in n..b.rows() {
            match b.get(i, j).signum() {
                1 if pos.is_none() => pos = Some(i),
                -1 if neg.is_none() => neg = Some(i),
                _ => {}
            }
        }
        match (pos, neg) {
            (Some(p), Some(q)) => return Err(NotCoherent { column: j, positive_row: p, negative_row: q }),
            (None, Some(_)) => signs.push(Sign::Minus),
            _ => signs.push(Sign::Plus),
        }
    }
    Ok(signs)
}

/// `(DB)^T = -DB`.
pub fn skew_symmetrizer_check(b: &IntMatrix, d: &Diagonal) -> bool {
    let n = b.rows();
    if !b.is_square() || d.len() != n {
        return false;
    }
    (0..n).all(|i| {
        (0..n).all(|j| d.0[i] as i128 * b.get(i, j) as i128 == -(d.0[j] as i128 * b.get(j, i) as i128))
    })
}

/// Smallest positive integer skew-symmetrizer of a square matrix, if any.
///
/// On each connected component of the support graph the ratios `d_j / d_i`
/// are forced to `-b_ij / b_ji`; they are propagated as rationals and then
/// cleared to coprime integers.
pub fn skew_symmetrizer(b: &IntMatrix) -> Option<Diagonal> {
    if !b.is_square() {
        return None;
    }
    let n = b.rows();
    let mut ratio: Vec<Option<BigRational>> = vec![None; n];
    let mut component = vec![usize::MAX; n];
    for root in 0..n {
        if ratio[root].is_some() {
            continue;
        }
        ratio[root] = Some(BigRational::one());
        component[root] = root;
        let mut stack = vec![root];
        while let Some(i) = stack.pop() {
            let di = ratio[i].clone().unwrap();
            for j in 0..n {
                let (bij, bji) = (b.get(i, j), b.get(j, i));
                if bij == 0 && bji == 0 {
                    continue;
                }
                if i == j || bij == 0 || bji == 0 || bij.signum() == bji.signum() {
                    return None;
                }
                // d_i b_ij = -d_j b_ji
                let dj = &di * BigRational::new(BigInt::from(-bij), BigInt::from(bji));
                match &ratio[j] {
                    Some(existing) if *existing != dj => return None,
                    Some(_) => {}
                    None => {
                        ratio[j] = Some(dj);
                        component[j] = root;
                        stack.push(j);
                    }
                }
            }
        }
    }
    let mut d = vec![0i64; n];
    for root in 0..n {
        let members: Vec<usize> = (0..n).filter(|&i| component[i] == root).collect();
        if members.is_empty() {
            continue;
        }
        let lcm = members.iter().fold(BigInt::one(), |acc, &i| acc.lcm(ratio[i].as_ref().unwrap().denom()));
        let ints: Vec<BigInt> = members.iter().map(|&i| (ratio[i].as_ref().unwrap() * &lcm).to_integer()).collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
        for (&i, v) in members.iter().zip(ints) {
            d[i] = i64::try_from(v / &g).ok()?;
        }
    }
    let d = Diagonal(d);
    skew_symmetrizer_check(b, &d).then_some(d)
}

/// Symmetrizer of the principal part when `b = (B; I_n)`.
pub fn principal_symmetrizer(b: &IntMatrix) -> Option<Diagonal> {
    let n = b.cols();
    if b.rows() != 2 * n || b.block(n, 2 * n, 0, n) != IntMatrix::identity(n) {
        return None;
    }
    skew_symmetrizer(&b.block(0, n, 0, n))
}

pub fn is_principal(b: &IntMatrix) -> bool {
    principal_symmetrizer(b).is_some()
}

/// Dense matrix of arbitrary-precision rationals.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigRational>,
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RationalMatrix { rows, cols, data: vec![BigRational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigRational::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BigRational>>) -> Result<Self, MatrixError> {
        let cols = rows.first().map_or(0, Vec::len);
        let nrows = rows.len();
        let mut data = Vec::with_capacity(nrows * cols);
        for (i, r) in rows.into_iter().enumerate() {
            if r.len() != cols {
                return Err(MatrixError::Ragged { row: i, expected: cols, found: r.len() });
            }
            data.extend(r);
        }
        Ok(RationalMatrix { rows: nrows, cols, data })
    }

    pub fn diagonal(d: &[BigRational]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, x) in d.iter().enumerate() {
            m.set(i, i, x.clone());
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigRational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn to_rows(&self) -> Vec<Vec<BigRational>> {
        (0..self.rows).map(|i| (0..self.cols).map(|j| self.get(i, j).clone()).collect()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn neg(&self) -> Self {
        RationalMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| -x).collect() }
    }

    pub fn mul(&self, rhs: &RationalMatrix) -> Result<Self, MatrixError> {
        if self.cols != rhs.rows {
            return Err(MatrixError::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for j in 0..rhs.cols {
                let mut acc = BigRational::zero();
                for k in 0..self.cols {
                    let a = self.get(i, k);
                    if !a.is_zero() {
                        acc += a * rhs.get(k, j);
                    }
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    pub fn block(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Self {
        let mut out = Self::zeros(r1 - r0, c1 - c0);
        for i in r0..r1 {
            for j in c0..c1 {
                out.set(i - r0, j - c0, self.get(i, j).clone());
            }
        }
        out
    }

    /// Gauss-Jordan inverse; `None` if singular or not square.
    pub fn inverse(&self) -> Option<Self> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let pivot = (col..n).find(|&r| !a.get(r, col).is_zero())?;
            if pivot != col {
                for j in 0..n {
                    a.data.swap(pivot * n + j, col * n + j);
                    inv.data.swap(pivot * n + j, col * n + j);
                }
            }
            let p = a.get(col, col).clone();
            for j in 0..n {
                let x = a.get(col, j) / &p;
                a.set(col, j, x);
                let y = inv.get(col, j) / &p;
                inv.set(col, j, y);
            }
            for r in 0..n {
                if r == col || a.get(r, col).is_zero() {
                    continue;
                }
                let f = a.get(r, col).clone();
                for j in 0..n {
                    let x = a.get(r, j) - &f * a.get(col, j);
                    a.set(r, j, x);
                    let y = inv.get(r, j) - &f * inv.get(col, j);
                    inv.set(r, j, y);
                }
            }
        }
        Some(inv)
    }

    pub fn is_skew_symmetric(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (i..self.cols).all(|j| *self.get(i, j) == -self.get(j, i)))
    }

    /// `Some` when every entry is an integer fitting in `i64`.
    pub fn to_integer(&self) -> Option<IntMatrix> {
        let data = self
            .data
            .iter()
            .map(|x| if x.is_integer() { i64::try_from(x.to_integer()).ok() } else { None })
            .collect::<Option<Vec<_>>>()?;
        Some(IntMatrix { rows: self.rows, cols: self.cols, data })
    }
}

impl fmt::Display for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// Rational form of [`check_compatible`]: `D` need only be invertible.
pub fn check_compatible_rational(b: &RationalMatrix, lambda: &RationalMatrix) -> Result<Vec<BigRational>, MatrixError> {
    let m = b.rows();
    let n = b.cols();
    if n > m || lambda.rows() != m || lambda.cols() != m {
        return Err(MatrixError::DimensionMismatch(format!(
            "B is {m}x{n}, Lambda is {}x{}",
            lambda.rows(),
            lambda.cols()
        )));
    }
    if !lambda.is_skew_symmetric() {
        return Err(MatrixError::NotSkewSymmetric { row: 0, col: 0 });
    }
    let p = b.transpose().mul(lambda)?;
    for j in 0..n {
        for l in 0..m {
            if l != j && !p.get(j, l).is_zero() {
                return Err(MatrixError::NotBlockDiagonal { row: j, col: l, value: p.get(j, l).to_string() });
            }
        }
    }
    (0..n)
        .map(|j| {
            let v = p.get(j, j).clone();
            if v.is_zero() {
                Err(MatrixError::SingularD { index: j })
            } else {
                Ok(v)
            }
        })
        .collect()
}

/// The unique block-form `Lambda = [[0, L1], [-L1^T, L2]]` compatible with
/// `(B; C)` for the symmetrizer `D`: `L1 = -D C^{-1}` and
/// `L2 = -(C^{-1})^T D B C^{-1}`.
pub fn lambda_from_bcd(b: &RationalMatrix, c: &RationalMatrix, d: &[BigRational]) -> Result<RationalMatrix, MatrixError> {
    let n = b.rows();
    if b.cols() != n || c.rows() != n || c.cols() != n || d.len() != n {
        return Err(MatrixError::DimensionMismatch(format!(
            "B is {}x{}, C is {}x{}, D has {} entries",
            b.rows(),
            b.cols(),
            c.rows(),
            c.cols(),
            d.len()
        )));
    }
    if let Some((i, x)) = d.iter().enumerate().find(|(_, x)| !x.is_positive()) {
        return Err(MatrixError::NonPositiveD { index: i, value: x.to_string() });
    }
    let dm = RationalMatrix::diagonal(d);
    let db = dm.mul(b)?;
    if db.transpose() != db.neg() {
        return Err(MatrixError::NotSkewSymmetrizable);
    }
    let c_inv = c.inverse().ok_or(MatrixError::SingularC)?;
    let l1 = dm.mul(&c_inv)?.neg();
    let l2 = c_inv.transpose().mul(&db)?.mul(&c_inv)?.neg();

    let mut lambda = RationalMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            lambda.set(i, n + j, l1.get(i, j).clone());
            lambda.set(n + j, i, -l1.get(i, j));
            lambda.set(n + i, n + j, l2.get(i, j).clone());
        }
    }

    let mut bt = RationalMatrix::zeros(2 * n, n);
    for i in 0..n {
        for j in 0..n {
            bt.set(i, j, b.get(i, j).clone());
            bt.set(n + i, j, c.get(i, j).clone());
        }
    }
    let recovered = check_compatible_rational(&bt, &lambda)?;
    if recovered != d {
        return Err(MatrixError::Postcondition("B^T Lambda does not reproduce D".into()));
    }
    Ok(lambda)
}
