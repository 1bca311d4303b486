//! Shared test oracles, all independent of the library's production paths:
//! a Golub–Kahan SVD (bidiagonalization + implicit-shift QR on the
//! bidiagonal), an LU determinant, exact binomial quantiles, and Householder
//! orthogonal factors.

#![allow(dead_code)]

use rmtlab_core::matrix::Matrix;
use rmtlab_core::rng::SequentialRng;

/// Singular values by Householder bidiagonalization followed by implicit
/// shifted QR on the bidiagonal — a fully separate route from the library's
/// one-sided Jacobi.
pub fn golub_kahan_singular_values(m: &Matrix) -> Vec<f64> {
    let tall;
    let a = if m.rows() >= m.cols() {
        m.clone()
    } else {
        tall = m.transpose();
        tall
    };
    let (rows, cols) = (a.rows(), a.cols());
    let mut w = a.data().to_vec();
    let at = |w: &Vec<f64>, i: usize, j: usize| w[i * cols + j];

    let mut diag = vec![0.0; cols];
    let mut off = vec![0.0; cols.saturating_sub(1)];

    for k in 0..cols {
        // Left reflector annihilates below-diagonal of column k.
        let norm_sq: f64 = (k..rows).map(|i| at(&w, i, k) * at(&w, i, k)).sum();
        if norm_sq > 0.0 {
            let norm = norm_sq.sqrt();
            let alpha = at(&w, k, k);
            let beta = if alpha >= 0.0 { -norm } else { norm };
            let v0 = alpha - beta;
            if v0 != 0.0 {
                let mut v = vec![0.0; rows - k];
                v[0] = 1.0;
                for i in k + 1..rows {
                    v[i - k] = at(&w, i, k) / v0;
                }
                let tau = -v0 / beta;
                for j in k..cols {
                    let mut dot = 0.0;
                    for i in k..rows {
                        dot += v[i - k] * at(&w, i, j);
                    }
                    dot *= tau;
                    for i in k..rows {
                        w[i * cols + j] -= dot * v[i - k];
                    }
                }
            }
        }
        diag[k] = at(&w, k, k);

        // Right reflector annihilates the row tail beyond the superdiagonal.
        if k + 2 < cols {
            let norm_sq: f64 = (k + 1..cols).map(|j| at(&w, k, j) * at(&w, k, j)).sum();
            if norm_sq > 0.0 {
                let norm = norm_sq.sqrt();
                let alpha = at(&w, k, k + 1);
                let beta = if alpha >= 0.0 { -norm } else { norm };
                let v0 = alpha - beta;
                if v0 != 0.0 {
                    let mut v = vec![0.0; cols - k - 1];
                    v[0] = 1.0;
                    for j in k + 2..cols {
                        v[j - k - 1] = at(&w, k, j) / v0;
                    }
                    let tau = -v0 / beta;
                    for i in k..rows {
                        let mut dot = 0.0;
                        for j in k + 1..cols {
                            dot += v[j - k - 1] * at(&w, i, j);
                        }
                        dot *= tau;
                        for j in k + 1..cols {
                            w[i * cols + j] -= dot * v[j - k - 1];
                        }
                    }
                }
            }
        }
        if k + 1 < cols {
            off[k] = at(&w, k, k + 1);
        }
    }

    bidiagonal_qr_values(&mut diag, &mut off);
    diag.sort_by(|a, b| b.partial_cmp(a).unwrap());
    diag
}

/// Implicit-shift QR on a bidiagonal (values only), Golub–Kahan style.
fn bidiagonal_qr_values(diag: &mut [f64], off: &mut [f64]) {
    let n = diag.len();
    if n == 0 {
        return;
    }
    let eps = f64::EPSILON;
    let mut hi = n - 1;
    let mut iter = 0usize;
    let max_iter = 60 * n * n + 200;
    while hi > 0 {
        iter += 1;
        assert!(iter < max_iter, "bidiagonal QR stalled");
        let thresh = eps * (diag[hi - 1].abs() + diag[hi].abs());
        if off[hi - 1].abs() <= thresh {
            off[hi - 1] = 0.0;
            hi -= 1;
            continue;
        }
        let mut lo = hi - 1;
        while lo > 0 {
            let t = eps * (diag[lo - 1].abs() + diag[lo].abs());
            if off[lo - 1].abs() <= t {
                off[lo - 1] = 0.0;
                break;
            }
            lo -= 1;
        }

        // Zero diagonal inside the block: chase the off-diagonal away with
        // left rotations.
        let mut chased = false;
        for idx in lo..hi {
            if diag[idx].abs() <= eps * (diag[idx].abs() + off[idx].abs() + 1e-300) {
                diag[idx] = 0.0;
                let mut z = off[idx];
                off[idx] = 0.0;
                for j in idx + 1..=hi {
                    let (c, s) = givens(diag[j], z);
                    diag[j] = c * diag[j] + s * z;
                    if j < hi {
                        z = -s * off[j];
                        off[j] *= c;
                    }
                }
                chased = true;
                break;
            }
        }
        if chased {
            continue;
        }

        // Wilkinson shift from the trailing 2x2 of B^T B.
        let d_hi = diag[hi];
        let d_h1 = diag[hi - 1];
        let e_h1 = off[hi - 1];
        let e_h2 = if hi >= 2 && hi - 2 >= lo { off[hi - 2] } else { 0.0 };
        let t11 = d_h1 * d_h1 + e_h2 * e_h2;
        let t12 = d_h1 * e_h1;
        let t22 = d_hi * d_hi + e_h1 * e_h1;
        let d = (t11 - t22) / 2.0;
        let sgn = if d >= 0.0 { 1.0 } else { -1.0 };
        let mu = t22 - t12 * t12 / (d + sgn * (d * d + t12 * t12).sqrt());

        let mut x = diag[lo] * diag[lo] - mu;
        let mut z = diag[lo] * off[lo];
        for k in lo..hi {
            let (c, s) = givens(x, z);
            if k > lo {
                off[k - 1] = c * x + s * z;
            }
            let dk = diag[k];
            let ek = off[k];
            let dk1 = diag[k + 1];
            diag[k] = c * dk + s * ek;
            off[k] = c * ek - s * dk;
            let bulge = s * dk1;
            diag[k + 1] = c * dk1;

            let (c2, s2) = givens(diag[k], bulge);
            diag[k] = c2 * diag[k] + s2 * bulge;
            let old_ek = off[k];
            let old_dk1 = diag[k + 1];
            off[k] = c2 * old_ek + s2 * old_dk1;
            diag[k + 1] = c2 * old_dk1 - s2 * old_ek;
            if k + 1 < hi {
                let old_ek1 = off[k + 1];
                x = off[k];
                z = s2 * old_ek1;
                off[k + 1] = c2 * old_ek1;
            }
        }
    }
    for d in diag.iter_mut() {
        *d = d.abs();
    }
}

fn givens(a: f64, b: f64) -> (f64, f64) {
    if b == 0.0 {
        (1.0, 0.0)
    } else if a.abs() > b.abs() {
        let t = b / a;
        let c = 1.0 / (1.0 + t * t).sqrt() * a.signum();
        (c, c * t)
    } else {
        let t = a / b;
        let s = 1.0 / (1.0 + t * t).sqrt() * b.signum();
        (s * t, s)
    }
}

/// Determinant by LU with partial pivoting.
pub fn lu_determinant(m: &Matrix) -> f64 {
    let n = m.rows();
    assert_eq!(n, m.cols());
    let mut a = m.data().to_vec();
    let mut det = 1.0;
    for k in 0..n {
        let mut piv = k;
        for i in k + 1..n {
            if a[i * n + k].abs() > a[piv * n + k].abs() {
                piv = i;
            }
        }
        if a[piv * n + k] == 0.0 {
            return 0.0;
        }
        if piv != k {
            for j in 0..n {
                a.swap(k * n + j, piv * n + j);
            }
            det = -det;
        }
        det *= a[k * n + k];
        for i in k + 1..n {
            let f = a[i * n + k] / a[k * n + k];
            for j in k..n {
                a[i * n + j] -= f * a[k * n + j];
            }
        }
    }
    det
}

/// Two-sided exact binomial quantile band at total tail mass `alpha`.
pub fn binomial_band(n: u64, p: f64, alpha: f64) -> (u64, u64) {
    use statrs::distribution::{Binomial, DiscreteCDF};
    let b = Binomial::new(p, n).unwrap();
    (b.inverse_cdf(alpha / 2.0), b.inverse_cdf(1.0 - alpha / 2.0))
}

/// Dense Gaussian test matrix (deterministic).
pub fn random_gaussian_matrix(n: usize, rows: usize, cols: usize, seed: u64) -> Matrix {
    let mut rng = SequentialRng::new(seed, n as u64);
    let data: Vec<f64> = (0..rows * cols).map(|_| rng.next_gaussian()).collect();
    Matrix::from_data(rows, cols, data)
}

/// Random Householder reflector `I - 2 v v^T`: exactly orthogonal.
pub fn random_householder(n: usize, seed: u64) -> Matrix {
    let mut rng = SequentialRng::new(seed, 0);
    let v: Vec<f64> = (0..n).map(|_| rng.next_gaussian()).collect();
    let norm_sq: f64 = v.iter().map(|x| x * x).sum();
    let mut q = Matrix::identity(n);
    for i in 0..n {
        for j in 0..n {
            q[(i, j)] -= 2.0 * v[i] * v[j] / norm_sq;
        }
    }
    q
}

/// `A * B`.
pub fn matmul(a: &Matrix, b: &Matrix) -> Matrix {
    assert_eq!(a.cols(), b.rows());
    let mut out = Matrix::zeros(a.rows(), b.cols());
    for i in 0..a.rows() {
        for k in 0..a.cols() {
            let f = a[(i, k)];
            if f == 0.0 {
                continue;
            }
            for j in 0..b.cols() {
                out[(i, j)] += f * b[(k, j)];
            }
        }
    }
    out
}
