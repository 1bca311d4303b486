//! Power iteration for the largest singular value and inverse iteration for
//! the smallest, both on `A^T A`.

use crate::matrix::{CsrMatrix, Matrix};
use crate::rng::SequentialRng;
use crate::spectral::qr::QrFactor;

pub const MAX_POWER_ITERS: usize = 20_000;
/// Inverse-iteration budget before falling back to the full SVD.
pub const MAX_INVERSE_ITERS: usize = 500;

/// Anything that can apply itself and its transpose.
pub trait LinearOp {
    fn op_rows(&self) -> usize;
    fn op_cols(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]);
    fn apply_transpose(&self, x: &[f64], y: &mut [f64]);
}

impl LinearOp for Matrix {
    fn op_rows(&self) -> usize {
        self.rows()
    }
    fn op_cols(&self) -> usize {
        self.cols()
    }
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.matvec(x, y);
    }
    fn apply_transpose(&self, x: &[f64], y: &mut [f64]) {
        self.matvec_transpose(x, y);
    }
}

impl LinearOp for CsrMatrix {
    fn op_rows(&self) -> usize {
        self.rows
    }
    fn op_cols(&self) -> usize {
        self.cols
    }
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.matvec(x, y);
    }
    fn apply_transpose(&self, x: &[f64], y: &mut [f64]) {
        self.matvec_transpose(x, y);
    }
}

pub struct PowerOutcome {
    pub sigma: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Extrapolated remaining relative error of `sigma` at the stop; at
    /// most `tol` when `converged`.
    pub residual: f64,
}

/// Largest singular value via power iteration on `A^T A`.
///
/// The Rayleigh quotient `||A x_k||^2` increases monotonically; the stopping
/// rule extrapolates its geometric tail (Aitken) so the returned value is
/// within `tol * sigma` of the limit rather than merely "changing slowly".
pub fn power_sigma_max<O: LinearOp>(op: &O, tol: f64) -> PowerOutcome {
    let (rows, cols) = (op.op_rows(), op.op_cols());
    let tol = tol.max(1e-15);
    let mut x = seeded_unit_vector(cols, rows as u64 ^ 0x9e3779b9);
    let mut y = vec![0.0; rows];
    let mut z = vec![0.0; cols];

    let mut rho_prev = 0.0;
    let mut delta_prev = f64::NAN;
    let mut rho = 0.0;
    for iter in 1..=MAX_POWER_ITERS {
        op.apply(&x, &mut y);
        rho = y.iter().map(|v| v * v).sum::<f64>();
        if rho == 0.0 {
            // x in the kernel; for the zero matrix this is exact.
            return PowerOutcome { sigma: 0.0, iterations: iter, converged: true, residual: 0.0 };
        }
        op.apply_transpose(&y, &mut z);
        let zn = z.iter().map(|v| v * v).sum::<f64>().sqrt();
        if zn == 0.0 {
            break;
        }
        for (xi, zi) in x.iter_mut().zip(&z) {
            *xi = zi / zn;
        }

        let delta = rho - rho_prev;
        if iter > 2 && delta <= f64::EPSILON * rho {
            return PowerOutcome {
                sigma: refreshed_sigma(op, &x, &mut y),
                iterations: iter,
                converged: true,
                residual: f64::EPSILON,
            };
        }
        if iter > 2 && delta_prev > 0.0 {
            let q = delta / delta_prev;
            if q < 1.0 {
                // Remaining error of the geometric tail; the sqrt halves
                // the relative error of sigma vs the Rayleigh quotient, and
                // x is already one step fresher than rho.
                let err = delta * q / (1.0 - q);
                if err <= 0.25 * tol * rho {
                    return PowerOutcome {
                        sigma: refreshed_sigma(op, &x, &mut y),
                        iterations: iter,
                        converged: true,
                        residual: (0.5 * err / rho).max(f64::EPSILON),
                    };
                }
            }
        }
        delta_prev = delta;
        rho_prev = rho;
    }
    PowerOutcome {
        sigma: rho.sqrt(),
        iterations: MAX_POWER_ITERS,
        converged: false,
        residual: f64::INFINITY,
    }
}

/// Rayleigh quotient at the current (post-update) iterate.
fn refreshed_sigma<O: LinearOp>(op: &O, x: &[f64], y: &mut [f64]) -> f64 {
    op.apply(x, y);
    y.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub struct InverseOutcome {
    pub sigma: f64,
    pub iterations: usize,
    pub converged: bool,
    /// True when a pivot of `R` vanished exactly (rank-deficient to working
    /// precision); `sigma` is then 0 and `vector` is empty.
    pub exact_break: bool,
    /// Final unit iterate: the approximate minimizer of `||M x||` over the
    /// unit sphere (in the column space of the factored side).
    pub vector: Vec<f64>,
    /// Relative change of `sigma` at the stop; at most `tol`.
    pub residual: f64,
}

/// Smallest singular value via inverse iteration on `A^T A`, solved through
/// a Householder QR of `A` (so `A^T A = R^T R` without forming the product).
///
/// Returns `None` when the iteration exhausts its budget without settling;
/// callers fall back to the full SVD.
pub fn inverse_sigma_min(a: &Matrix, tol: f64) -> Option<InverseOutcome> {
    let work;
    let m = if a.rows() >= a.cols() {
        a
    } else {
        work = a.transpose();
        &work
    };
    let n = m.cols();
    let qr = QrFactor::new(m);
    if qr.min_abs_r_diag() == 0.0 {
        return Some(InverseOutcome {
            sigma: 0.0,
            iterations: 0,
            converged: true,
            exact_break: true,
            vector: Vec::new(),
            residual: 0.0,
        });
    }

    let tol = tol.max(1e-15);
    let mut x = seeded_unit_vector(n, n as u64 ^ 0x0051_aced);
    let mut ax = vec![0.0; m.rows()];
    let mut sigma_prev = f64::INFINITY;
    let mut steady = 0;
    for iter in 1..=MAX_INVERSE_ITERS {
        let w = qr.solve_rt(&x)?;
        let z = qr.solve_r(&w)?;
        let zn = z.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !zn.is_finite() || zn == 0.0 {
            return None;
        }
        for (xi, zi) in x.iter_mut().zip(&z) {
            *xi = zi / zn;
        }
        m.matvec(&x, &mut ax);
        let sigma = ax.iter().map(|v| v * v).sum::<f64>().sqrt();
        let rel_change = (sigma_prev - sigma).abs() / sigma.max(f64::MIN_POSITIVE);
        if rel_change <= 0.25 * tol {
            steady += 1;
            if steady >= 2 {
                return Some(InverseOutcome {
                    sigma,
                    iterations: iter,
                    converged: true,
                    exact_break: false,
                    vector: x,
                    residual: rel_change.max(f64::EPSILON),
                });
            }
        } else {
            steady = 0;
        }
        sigma_prev = sigma;
    }
    None
}

/// Deterministic pseudo-random unit start vector.
fn seeded_unit_vector(len: usize, salt: u64) -> Vec<f64> {
    let mut rng = SequentialRng::new(0x7070_7070 ^ salt, len as u64);
    loop {
        let v: Vec<f64> = (0..len).map(|_| rng.next_symmetric_uniform()).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-3 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}
