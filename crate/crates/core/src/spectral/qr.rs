//! Householder QR with the pieces the spectral estimators need: transposed
//! products `Q^T b`, triangular solves against `R` and `R^T`, and
//! least-squares residuals.

use crate::matrix::Matrix;

/// Packed Householder QR of an m x n matrix with m >= n.
pub struct QrFactor {
    /// Row-major m x n: `R` on and above the diagonal, reflector tails below.
    qr: Vec<f64>,
    /// Reflector head coefficients.
    tau: Vec<f64>,
    m: usize,
    n: usize,
}

impl QrFactor {
    pub fn new(a: &Matrix) -> QrFactor {
        let (m, n) = (a.rows(), a.cols());
        assert!(m >= n, "QR requires rows >= cols");
        let mut qr = a.data().to_vec();
        let mut tau = vec![0.0; n];
        for k in 0..n {
            // Householder vector for column k, rows k..m.
            let mut norm_sq = 0.0;
            for i in k..m {
                let v = qr[i * n + k];
                norm_sq += v * v;
            }
            if norm_sq == 0.0 {
                tau[k] = 0.0;
                continue;
            }
            let alpha = qr[k * n + k];
            let norm = norm_sq.sqrt();
            let beta = if alpha >= 0.0 { -norm } else { norm };
            let v0 = alpha - beta;
            for i in k + 1..m {
                qr[i * n + k] /= v0;
            }
            tau[k] = -v0 / beta;
            qr[k * n + k] = beta;
            // Apply (I - tau v v^T) to the trailing columns.
            for j in k + 1..n {
                let mut dot = qr[k * n + j];
                for i in k + 1..m {
                    dot += qr[i * n + k] * qr[i * n + j];
                }
                dot *= tau[k];
                qr[k * n + j] -= dot;
                for i in k + 1..m {
                    qr[i * n + j] -= dot * qr[i * n + k];
                }
            }
        }
        QrFactor { qr, tau, m, n }
    }

    #[inline]
    pub fn r(&self, i: usize, j: usize) -> f64 {
        debug_assert!(i <= j);
        self.qr[i * self.n + j]
    }

    pub fn min_abs_r_diag(&self) -> f64 {
        (0..self.n).map(|k| self.r(k, k).abs()).fold(f64::INFINITY, f64::min)
    }

    pub fn max_abs_r_diag(&self) -> f64 {
        (0..self.n).map(|k| self.r(k, k).abs()).fold(0.0, f64::max)
    }

    /// `x := Q^T x` in place; `x` has length m.
    pub fn apply_qt(&self, x: &mut [f64]) {
        debug_assert_eq!(x.len(), self.m);
        for k in 0..self.n {
            if self.tau[k] == 0.0 {
                continue;
            }
            let mut dot = x[k];
            for i in k + 1..self.m {
                dot += self.qr[i * self.n + k] * x[i];
            }
            dot *= self.tau[k];
            x[k] -= dot;
            for i in k + 1..self.m {
                x[i] -= dot * self.qr[i * self.n + k];
            }
        }
    }

    /// Solves `R y = b`; returns None when a pivot is exactly zero.
    pub fn solve_r(&self, b: &[f64]) -> Option<Vec<f64>> {
        let n = self.n;
        let mut y = b.to_vec();
        for k in (0..n).rev() {
            let d = self.r(k, k);
            if d == 0.0 {
                return None;
            }
            let mut acc = y[k];
            for j in k + 1..n {
                acc -= self.r(k, j) * y[j];
            }
            y[k] = acc / d;
        }
        Some(y)
    }

    /// Solves `R^T y = b`; returns None when a pivot is exactly zero.
    pub fn solve_rt(&self, b: &[f64]) -> Option<Vec<f64>> {
        let n = self.n;
        let mut y = vec![0.0; n];
        for k in 0..n {
            let d = self.r(k, k);
            if d == 0.0 {
                return None;
            }
            let mut acc = b[k];
            for j in 0..k {
                acc -= self.r(j, k) * y[j];
            }
            y[k] = acc / d;
        }
        Some(y)
    }

    /// Residual norm of the least-squares problem `min ||A c - b||`.
    pub fn least_squares_residual(&self, b: &[f64]) -> f64 {
        let mut work = b.to_vec();
        self.apply_qt(&mut work);
        work[self.n..].iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}
