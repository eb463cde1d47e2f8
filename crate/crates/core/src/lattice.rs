//! Integer kernels and Hermite normal form.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::matrix::{IntMatrix, MatrixError};

type Row = Vec<BigInt>;

/// Basis of `{a in Z^m : A a = 0}` in row Hermite normal form.
///
/// The basis is canonical: two matrices with the same integer kernel get
/// identical output.
pub fn integer_kernel(a: &IntMatrix) -> Result<Vec<Vec<i64>>, MatrixError> {
    let m = a.cols();
    // Column operations on A are mirrored on U; columns of U past the
    // pivot count span the kernel.
    let mut cols: Vec<Row> = (0..m).map(|j| a.column(j).into_iter().map(BigInt::from).collect()).collect();
    let mut u: Vec<Row> = (0..m)
        .map(|j| (0..m).map(|i| BigInt::from((i == j) as i64)).collect())
        .collect();
    let mut k = 0;
    for r in 0..a.rows() {
        if k == m {
            break;
        }
        loop {
            let Some(p) = (k..m)
                .filter(|&c| !cols[c][r].is_zero())
                .min_by(|&x, &y| cols[x][r].abs().cmp(&cols[y][r].abs()))
            else {
                break;
            };
            cols.swap(k, p);
            u.swap(k, p);
            let mut done = true;
            for c in (k + 1)..m {
                if cols[c][r].is_zero() {
                    continue;
                }
                let f = cols[c][r].div_floor(&cols[k][r]);
                axpy(&mut cols, c, k, &f);
                axpy(&mut u, c, k, &f);
                if !cols[c][r].is_zero() {
                    done = false;
                }
            }
            if done {
                k += 1;
                break;
            }
        }
    }
    let basis: Vec<Row> = u.into_iter().skip(k).collect();
    hermite_rows(basis)
        .into_iter()
        .map(|row| row.iter().map(|x| x.to_i64().ok_or(MatrixError::Overflow)).collect())
        .collect()
}

// v[dst] -= f * v[src]
fn axpy(v: &mut [Row], dst: usize, src: usize, f: &BigInt) {
    let s = v[src].clone();
    for (x, y) in v[dst].iter_mut().zip(s) {
        *x -= f * y;
    }
}

/// Row-style Hermite normal form; zero rows are dropped.
pub(crate) fn hermite_rows(mut rows: Vec<Row>) -> Vec<Row> {
    let width = rows.first().map_or(0, Vec::len);
    let mut pivot_row = 0;
    for c in 0..width {
        if pivot_row == rows.len() {
            break;
        }
        loop {
            let Some(p) = (pivot_row..rows.len())
                .filter(|&r| !rows[r][c].is_zero())
                .min_by(|&x, &y| rows[x][c].abs().cmp(&rows[y][c].abs()))
            else {
                break;
            };
            rows.swap(pivot_row, p);
            let mut done = true;
            for r in (pivot_row + 1)..rows.len() {
                if rows[r][c].is_zero() {
                    continue;
                }
                let f = rows[r][c].div_floor(&rows[pivot_row][c]);
                axpy(&mut rows, r, pivot_row, &f);
                if !rows[r][c].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if pivot_row < rows.len() && !rows[pivot_row][c].is_zero() {
            if rows[pivot_row][c].is_negative() {
                for x in rows[pivot_row].iter_mut() {
                    *x = -&*x;
                }
            }
            for r in 0..pivot_row {
                let f = rows[r][c].div_floor(&rows[pivot_row][c]);
                if !f.is_zero() {
                    axpy(&mut rows, r, pivot_row, &f);
                }
            }
            pivot_row += 1;
        }
    }
    rows.truncate(pivot_row);
    rows
}
