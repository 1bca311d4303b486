//! One-sided Jacobi SVD.
//!
//! Columns are orthogonalized in place by plane rotations; singular values
//! are the final column norms. Chosen as the reference path because it
//! computes small singular values to high relative accuracy, which the
//! smallest-singular-value experiments depend on.

use crate::error::Error;
use crate::matrix::Matrix;
use crate::Result;

/// Pairwise relative-orthogonality target; rotation stops below this.
const ORTH_EPS: f64 = 1e-15;
const MAX_SWEEPS: usize = 60;

pub struct JacobiSvd {
    /// Singular values, non-increasing.
    pub values: Vec<f64>,
    /// Right singular vectors as rows (vector `k` pairs with `values[k]`).
    /// Only produced on request and only for square or tall inputs.
    pub right_vectors: Option<Vec<Vec<f64>>>,
    /// Final sweep's largest relative off-diagonal Gram entry.
    pub residual: f64,
    pub sweeps: usize,
}

/// Singular values of `m`, non-increasing.
pub fn singular_values(m: &Matrix) -> Result<Vec<f64>> {
    svd(m, false).map(|s| s.values)
}

pub fn svd(m: &Matrix, want_v: bool) -> Result<JacobiSvd> {
    if !m.is_finite() {
        return Err(Error::data("matrix has non-finite entries"));
    }
    // Work on the transpose so each column of the (possibly transposed)
    // input is a contiguous row of the work array.
    let tall = m.rows() >= m.cols();
    let (rows, cols) = if tall { (m.rows(), m.cols()) } else { (m.cols(), m.rows()) };
    let mut work: Vec<Vec<f64>> = if tall {
        (0..cols).map(|j| (0..rows).map(|i| m[(i, j)]).collect()).collect()
    } else {
        (0..cols).map(|j| m.row(j).to_vec()).collect()
    };

    let mut v: Option<Vec<Vec<f64>>> = if want_v && tall {
        Some((0..cols).map(|k| (0..cols).map(|l| f64::from(u8::from(k == l))).collect()).collect())
    } else {
        None
    };

    let mut residual = 0.0;
    let mut sweeps = 0;
    if cols > 1 {
        // Columns ground this far below the matrix scale are roundoff
        // artifacts of exact rank deficiency; their squared norms underflow
        // and poison the rotations, so they deflate to exact zeros.
        let fro_sq: f64 = work.iter().flatten().map(|x| x * x).sum();
        let deflate_below = fro_sq * 1e-280;
        let mut converged = false;
        for sweep in 0..MAX_SWEEPS {
            sweeps = sweep + 1;
            let mut off_max = 0.0f64;
            let mut rotated = false;
            for i in 0..cols - 1 {
                for j in i + 1..cols {
                    let mut a = 0.0;
                    let mut c = 0.0;
                    let mut b = 0.0;
                    for (x, y) in work[i].iter().zip(&work[j]) {
                        a += x * x;
                        c += y * y;
                        b += x * y;
                    }
                    if a <= deflate_below {
                        work[i].fill(0.0);
                        continue;
                    }
                    if c <= deflate_below {
                        work[j].fill(0.0);
                        continue;
                    }
                    let rel = b.abs() / (a.sqrt() * c.sqrt());
                    off_max = off_max.max(rel);
                    if rel <= ORTH_EPS {
                        continue;
                    }
                    rotated = true;
                    let zeta = (c - a) / (2.0 * b);
                    // Small-angle branch keeps zeta^2 from overflowing.
                    let t = if zeta.abs() > 1e150 {
                        0.5 / zeta
                    } else {
                        zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt())
                    };
                    let cs = 1.0 / (1.0 + t * t).sqrt();
                    let sn = cs * t;
                    rotate_pair(&mut work, i, j, cs, sn);
                    if let Some(v) = v.as_mut() {
                        rotate_pair(v, i, j, cs, sn);
                    }
                }
            }
            residual = off_max;
            if !rotated {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NonConvergence(format!(
                "one-sided Jacobi did not converge in {MAX_SWEEPS} sweeps (off = {residual:.3e})"
            )));
        }
    }

    let mut order: Vec<usize> = (0..cols).collect();
    let norms: Vec<f64> =
        work.iter().map(|c| c.iter().map(|x| x * x).sum::<f64>().sqrt()).collect();
    order.sort_by(|&a, &b| norms[b].partial_cmp(&norms[a]).unwrap());
    let values: Vec<f64> = order.iter().map(|&k| norms[k]).collect();
    let right_vectors = v.map(|rows| order.iter().map(|&k| rows[k].clone()).collect());

    Ok(JacobiSvd { values, right_vectors, residual, sweeps })
}

fn rotate_pair(rows: &mut [Vec<f64>], i: usize, j: usize, cs: f64, sn: f64) {
    let (lo, hi) = rows.split_at_mut(j);
    let (ri, rj) = (&mut lo[i], &mut hi[0]);
    for (x, y) in ri.iter_mut().zip(rj.iter_mut()) {
        let xi = *x;
        let yj = *y;
        *x = cs * xi - sn * yj;
        *y = sn * xi + cs * yj;
    }
}
