//! Exact rank of integer-valued matrices over the rationals, used to decide
//! singularity without floating-point thresholds for discrete ensembles.

use num_bigint::BigInt;

use crate::matrix::Matrix;

/// Largest dimension the exact path accepts.
pub const MAX_EXACT_DIM: usize = 64;

/// Rank over the rationals via fraction-free (Bareiss) elimination.
/// Returns `None` when the matrix is not integer-valued or too large.
pub fn integer_rank(m: &Matrix) -> Option<usize> {
    let n = m.rows();
    if n != m.cols() || n > MAX_EXACT_DIM {
        return None;
    }
    let mut a: Vec<Vec<BigInt>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut row = Vec::with_capacity(n);
        for &v in m.row(i) {
            if v.fract() != 0.0 || v.abs() > 2f64.powi(52) {
                return None;
            }
            row.push(BigInt::from(v as i64));
        }
        a.push(row);
    }

    let zero = BigInt::from(0);
    let mut prev = BigInt::from(1);
    let mut rank = 0usize;
    let mut pivot_row = 0usize;
    for col in 0..n {
        if pivot_row == n {
            break;
        }
        let Some(r) = (pivot_row..n).find(|&r| a[r][col] != zero) else {
            continue;
        };
        a.swap(pivot_row, r);
        for i in pivot_row + 1..n {
            for j in col + 1..n {
                let num = &a[pivot_row][col] * &a[i][j] - &a[i][col] * &a[pivot_row][j];
                a[i][j] = num / &prev;
            }
            a[i][col] = zero.clone();
        }
        prev = a[pivot_row][col].clone();
        pivot_row += 1;
        rank += 1;
    }
    Some(rank)
}

/// Exact singularity for integer-valued square matrices.
pub fn is_exactly_singular(m: &Matrix) -> Option<bool> {
    integer_rank(m).map(|r| r < m.rows())
}
