//! Extreme singular values, condition numbers, and auxiliary norm
//! statistics.
//!
//! The dense one-sided Jacobi SVD is the reference path; power iteration
//! (largest) and QR-backed inverse iteration (smallest) are the fast paths,
//! with automatic fallback to the full SVD when an iteration stalls.

pub mod iterative;
pub mod jacobi;
pub mod qr;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::matrix::{CsrMatrix, Matrix};
use crate::Result;

pub use iterative::{power_sigma_max, LinearOp};
pub use jacobi::JacobiSvd;

/// Relative threshold below which a smallest singular value is declared
/// numerically zero: `s_min <= SINGULAR_RTOL * max(1, s_max)`.
pub const SINGULAR_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    FullSvd,
    Iterative,
}

/// Extreme singular values of one matrix with method metadata.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SpectralSummary {
    pub s_min: f64,
    pub s_max: f64,
    /// `s_max / s_min`, `+inf` when the matrix is numerically singular.
    pub cond: f64,
    pub method: Method,
    /// Error estimate of the dominant computation: on the iterative path
    /// the larger of the two stopping-rule estimates (at most the requested
    /// tolerance), on the SVD path the final relative Gram off-diagonal.
    pub residual: f64,
}

impl SpectralSummary {
    /// Computes both extreme singular values with the iterative fast paths,
    /// falling back to the full SVD when either iteration stalls.
    pub fn compute(m: &Matrix, tol: f64) -> Result<SpectralSummary> {
        if !m.is_finite() {
            return Err(Error::data("matrix has non-finite entries"));
        }
        let power = iterative::power_sigma_max(m, tol);
        if power.converged {
            if let Some(inv) = iterative::inverse_sigma_min(m, tol) {
                let s_max = power.sigma;
                let s_min = inv.sigma.min(s_max);
                return Ok(SpectralSummary {
                    s_min,
                    s_max,
                    cond: cond_from(s_min, s_max),
                    method: Method::Iterative,
                    residual: power.residual.max(inv.residual),
                });
            }
        }
        Self::compute_full_svd(m)
    }

    /// Computes the summary from the full Jacobi SVD.
    pub fn compute_full_svd(m: &Matrix) -> Result<SpectralSummary> {
        let svd = jacobi::svd(m, false)?;
        let s_max = svd.values[0];
        let s_min = *svd.values.last().unwrap();
        Ok(SpectralSummary {
            s_min,
            s_max,
            cond: cond_from(s_min, s_max),
            method: Method::FullSvd,
            residual: svd.residual,
        })
    }

    pub fn is_numerically_singular(&self) -> bool {
        self.s_min <= SINGULAR_RTOL * self.s_max.max(1.0)
    }
}

fn cond_from(s_min: f64, s_max: f64) -> f64 {
    if s_max == 0.0 {
        // The zero matrix; conventionally singular.
        return f64::INFINITY;
    }
    if s_min <= SINGULAR_RTOL * s_max.max(1.0) {
        f64::INFINITY
    } else {
        (s_max / s_min).max(1.0)
    }
}

/// All singular values, non-increasing (one-sided Jacobi).
pub fn full_svd_singular_values(m: &Matrix) -> Result<Vec<f64>> {
    jacobi::singular_values(m)
}

/// Smallest singular value estimate.
#[derive(Debug, Clone, Copy)]
pub struct SminEstimate {
    pub value: f64,
    /// Set when `value <= SINGULAR_RTOL * max(1, s_max_bound)`; such inputs
    /// report 0-compatible values rather than erroring.
    pub numerically_singular: bool,
    pub method: Method,
}

/// Smallest singular value of `m` (the smallest of the `min(rows, cols)`
/// singular values), within `tol * s_max` of the truth.
pub fn smallest_singular_value(m: &Matrix, tol: f64) -> Result<SminEstimate> {
    if !m.is_finite() {
        return Err(Error::data("matrix has non-finite entries"));
    }
    let (value, method) = match iterative::inverse_sigma_min(m, tol) {
        Some(out) => (out.sigma, Method::Iterative),
        None => {
            let values = jacobi::singular_values(m)?;
            (*values.last().unwrap(), Method::FullSvd)
        }
    };
    // Cheap operator-norm proxy for the singularity flag.
    let s_max_bound = m.frobenius_norm();
    let numerically_singular = value <= SINGULAR_RTOL * s_max_bound.max(1.0);
    Ok(SminEstimate { value, numerically_singular, method })
}

/// Smallest singular value together with an (approximate) unit minimizer of
/// `||M x||`. Only meaningful for square inputs; falls back to the Jacobi
/// right vectors when the iteration breaks on an exact zero pivot.
pub fn smallest_singular_pair(m: &Matrix, tol: f64) -> Result<(SminEstimate, Vec<f64>)> {
    if !m.is_square() {
        return Err(Error::shape("minimizer pair needs a square matrix"));
    }
    if let Some(out) = iterative::inverse_sigma_min(m, tol) {
        if !out.vector.is_empty() {
            let s_max_bound = m.frobenius_norm();
            let est = SminEstimate {
                value: out.sigma,
                numerically_singular: out.sigma <= SINGULAR_RTOL * s_max_bound.max(1.0),
                method: Method::Iterative,
            };
            return Ok((est, out.vector));
        }
    }
    let svd = jacobi::svd(m, true)?;
    let value = *svd.values.last().unwrap();
    let est = SminEstimate {
        value,
        numerically_singular: value <= SINGULAR_RTOL * svd.values[0].max(1.0),
        method: Method::FullSvd,
    };
    let vector = svd.right_vectors.unwrap().last().unwrap().clone();
    Ok((est, vector))
}

/// Largest singular value of `m` within relative `tol`.
pub fn largest_singular_value(m: &Matrix, tol: f64) -> Result<f64> {
    if !m.is_finite() {
        return Err(Error::data("matrix has non-finite entries"));
    }
    let out = iterative::power_sigma_max(m, tol);
    if out.converged {
        return Ok(out.sigma);
    }
    Ok(jacobi::singular_values(m)?[0])
}

/// Largest singular value of a sparse view (no dense fallback; the power
/// iteration's extrapolated estimate is returned even on a stall).
pub fn largest_singular_value_csr(m: &CsrMatrix, tol: f64) -> f64 {
    iterative::power_sigma_max(m, tol).sigma
}

/// Condition number `s_max / s_min` with a `+inf` sentinel for numerically
/// singular matrices.
pub fn condition_number(m: &Matrix) -> Result<f64> {
    if !m.is_square() {
        return Err(Error::shape("condition number needs a square matrix"));
    }
    Ok(SpectralSummary::compute(m, 1e-10)?.cond)
}

/// Euclidean distance from column `j` to the span of the remaining columns,
/// via the least-squares residual of a Householder QR. Rank-deficient
/// remaining columns fall back to an explicit projection onto their range
/// (the plain QR residual is only valid at full column rank).
pub fn column_span_distance(m: &Matrix, j: usize) -> Result<f64> {
    if !m.is_square() || m.rows() < 2 {
        return Err(Error::shape("column distance needs a square matrix with n >= 2"));
    }
    if j >= m.cols() {
        return Err(Error::parameter(format!("column {j} out of range")));
    }
    let n = m.rows();
    let mut rest = Matrix::zeros(n, n - 1);
    let mut target = vec![0.0; n];
    for i in 0..n {
        let row = m.row(i);
        target[i] = row[j];
        let mut c = 0;
        for (k, &v) in row.iter().enumerate() {
            if k != j {
                rest[(i, c)] = v;
                c += 1;
            }
        }
    }
    let qr = qr::QrFactor::new(&rest);
    if qr.min_abs_r_diag() > 1e-13 * qr.max_abs_r_diag().max(f64::MIN_POSITIVE) {
        return Ok(qr.least_squares_residual(&target));
    }
    range_projection_residual(&rest, &target)
}

/// `|| b - proj_range(B) b ||` via the SVD of `B`.
fn range_projection_residual(b_mat: &Matrix, b: &[f64]) -> Result<f64> {
    let svd = jacobi::svd(b_mat, true)?;
    let v = svd.right_vectors.as_ref().expect("tall input keeps right vectors");
    let s_max = svd.values[0];
    let mut resid_sq: f64 = b.iter().map(|x| x * x).sum();
    let mut image = vec![0.0; b_mat.rows()];
    for (k, &s) in svd.values.iter().enumerate() {
        if s <= 1e-13 * s_max.max(f64::MIN_POSITIVE) {
            break;
        }
        b_mat.matvec(&v[k], &mut image);
        let coeff: f64 = image.iter().zip(b).map(|(u, x)| u * x).sum::<f64>() / s;
        resid_sq -= coeff * coeff;
    }
    Ok(resid_sq.max(0.0).sqrt())
}

/// Distances from every column to the span of the others.
///
/// Fast path: the rows of `A^{-1}` have norms `1 / dist_j`, so one QR
/// factorization serves all columns. Falls back to per-column least squares
/// when `R` is rank-deficient to working precision.
pub fn all_column_span_distances(m: &Matrix) -> Result<Vec<f64>> {
    if !m.is_square() || m.rows() < 2 {
        return Err(Error::shape("column distances need a square matrix with n >= 2"));
    }
    let n = m.rows();
    let qr = qr::QrFactor::new(m);
    if qr.min_abs_r_diag() > 1e-13 * qr.max_abs_r_diag().max(f64::MIN_POSITIVE) {
        // row_j(A^{-1}) norms, column by column of A^{-1}.
        let mut row_norm_sq = vec![0.0; n];
        let mut e = vec![0.0; n];
        for j in 0..n {
            e.fill(0.0);
            e[j] = 1.0;
            qr.apply_qt(&mut e);
            if let Some(x) = qr.solve_r(&e) {
                for (i, xi) in x.iter().enumerate() {
                    row_norm_sq[i] += xi * xi;
                }
            } else {
                return per_column_distances(m);
            }
        }
        return Ok(row_norm_sq.into_iter().map(|s| 1.0 / s.sqrt()).collect());
    }
    per_column_distances(m)
}

fn per_column_distances(m: &Matrix) -> Result<Vec<f64>> {
    (0..m.cols()).map(|j| column_span_distance(m, j)).collect()
}

/// Largest column Euclidean norm.
pub fn seginer_column_stat(m: &Matrix) -> f64 {
    let mut best = 0.0f64;
    for j in 0..m.cols() {
        let mut sq = 0.0;
        for i in 0..m.rows() {
            let v = m[(i, j)];
            sq += v * v;
        }
        best = best.max(sq.sqrt());
    }
    best
}

/// `(sigma_1, sigma_2, sigma_*)`: largest row norm, largest column norm,
/// largest absolute entry.
pub fn bvh_sigmas(m: &Matrix) -> (f64, f64, f64) {
    let mut sigma1 = 0.0f64;
    let mut col_sq = vec![0.0; m.cols()];
    let mut sigma_star = 0.0f64;
    for i in 0..m.rows() {
        let mut row_sq = 0.0;
        for (j, &v) in m.row(i).iter().enumerate() {
            row_sq += v * v;
            col_sq[j] += v * v;
            sigma_star = sigma_star.max(v.abs());
        }
        sigma1 = sigma1.max(row_sq.sqrt());
    }
    let sigma2 = col_sq.into_iter().fold(0.0f64, |m, s| m.max(s.sqrt()));
    (sigma1, sigma2, sigma_star)
}
