//! Sphere-decomposition toolkit: magnitude rearrangements, compressible and
//! dominated vector classification, least-common-denominator (LCD) search,
//! Lévy concentration estimation, and the sparsity-threshold parameters.

use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use crate::error::Error;
use crate::Result;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Unit vector with a cached non-increasing magnitude rearrangement.
#[derive(Debug, Clone)]
pub struct UnitVector {
    coords: Vec<f64>,
    /// `perm[k]` = index of the coordinate with magnitude rank `k` (0-based,
    /// largest first); ties broken by index so the permutation is unique.
    perm: Vec<usize>,
}

const UNIT_NORM_TOL: f64 = 1e-12;

impl UnitVector {
    /// Wraps coordinates that already have unit norm (within 1e-12).
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        let norm = coords.iter().map(|x| x * x).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > UNIT_NORM_TOL {
            return Err(Error::parameter(format!(
                "coordinates have norm {norm}, expected 1 within {UNIT_NORM_TOL:e}"
            )));
        }
        Ok(Self::build(coords))
    }

    /// Normalizes arbitrary coordinates to the unit sphere.
    pub fn normalized(coords: Vec<f64>) -> Result<Self> {
        let norm = coords.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::data("cannot normalize a zero or non-finite vector"));
        }
        Ok(Self::build(coords.into_iter().map(|x| x / norm).collect()))
    }

    fn build(coords: Vec<f64>) -> Self {
        let mut perm: Vec<usize> = (0..coords.len()).collect();
        perm.sort_by(|&a, &b| {
            coords[b].abs().partial_cmp(&coords[a].abs()).unwrap().then(a.cmp(&b))
        });
        UnitVector { coords, perm }
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn inf_norm(&self) -> f64 {
        self.coords[self.perm[0]].abs()
    }

    /// The coordinate holding magnitude rank `k` (1-based).
    pub fn coord_at_rank(&self, k: usize) -> f64 {
        self.coords[self.perm[k - 1]]
    }
}

/// The vector that keeps the coordinates of `x` occupying magnitude ranks
/// `m..=m_prime` (1-based) and zeroes the rest.
pub fn rearranged_segment(x: &UnitVector, m: usize, m_prime: usize) -> Result<Vec<f64>> {
    let n = x.len();
    if m < 1 || m > m_prime || m_prime > n {
        return Err(Error::parameter(format!(
            "rank range [{m}:{m_prime}] invalid for dimension {n}"
        )));
    }
    let mut out = vec![0.0; n];
    for k in m - 1..m_prime {
        let j = x.perm[k];
        out[j] = x.coords[j];
    }
    Ok(out)
}

/// Exact Euclidean distance from `x` to the set of `m`-sparse vectors:
/// the norm of the magnitude tail beyond rank `m`.
pub fn dist_to_sparse(x: &UnitVector, m: usize) -> Result<f64> {
    let n = x.len();
    if m < 1 || m > n {
        return Err(Error::parameter(format!("sparsity level {m} invalid for dimension {n}")));
    }
    let sq: f64 = x.perm[m..].iter().map(|&j| x.coords[j] * x.coords[j]).sum();
    Ok(sq.sqrt())
}

/// Compressibility: within distance `delta` of an `m`-sparse vector.
pub fn is_compressible(x: &UnitVector, m: usize, delta: f64) -> Result<bool> {
    Ok(dist_to_sparse(x, m)? <= delta)
}

/// Dominated tail: `||tail||_2 <= alpha sqrt(m) ||tail||_inf` where the tail
/// is the part of `x` beyond magnitude rank `m`. Sparse vectors (empty or
/// zero tail) are dominated for every `alpha`.
pub fn is_dominated(x: &UnitVector, m: usize, alpha: f64) -> Result<bool> {
    let n = x.len();
    if m < 1 || m > n {
        return Err(Error::parameter(format!("rank {m} invalid for dimension {n}")));
    }
    if !(alpha > 0.0) {
        return Err(Error::parameter("alpha must be positive"));
    }
    let tail_norm = dist_to_sparse(x, m)?;
    let tail_inf = if m < n { x.coords[x.perm[m]].abs() } else { 0.0 };
    Ok(tail_norm <= alpha * (m as f64).sqrt() * tail_inf || tail_norm == 0.0)
}

/// Parameters of the LCD search.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct LcdParams {
    /// Sparsity probability entering the detection threshold.
    pub p: f64,
    /// Threshold constant `delta_0`; 0.1 unless stressed.
    pub delta0: f64,
    /// Search cap; the infimum search reports an infinity sentinel beyond it.
    pub theta_max: f64,
    /// Coarse scan step, also the certification granularity.
    pub grid_step: f64,
}

impl LcdParams {
    /// Defaults scaled to the universal lower bound `(delta0 p)^{-1/2}`.
    pub fn for_sparsity(p: f64) -> LcdParams {
        let delta0 = 0.1;
        let theta_min = 1.0 / (delta0 * p).sqrt();
        LcdParams { p, delta0, theta_max: 400.0 * theta_min, grid_step: 1e-4 * theta_min }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p > 0.0 && self.p <= 1.0) {
            return Err(Error::parameter(format!("p must be in (0, 1], got {}", self.p)));
        }
        if !(self.delta0 > 0.0 && self.delta0 < 1.0) {
            return Err(Error::parameter(format!("delta0 must be in (0, 1), got {}", self.delta0)));
        }
        if !(self.theta_max > 0.0) {
            return Err(Error::parameter(format!("theta_max must be > 0, got {}", self.theta_max)));
        }
        if !(self.grid_step > 0.0 && self.grid_step <= 1e-3 * self.theta_max) {
            return Err(Error::parameter(format!(
                "grid_step must be in (0, 1e-3 * theta_max], got {}",
                self.grid_step
            )));
        }
        Ok(())
    }

    /// `(delta0 p)^{-1/2}`: below this the detection threshold vanishes, so
    /// no theta qualifies.
    pub fn universal_lower_bound(&self) -> f64 {
        1.0 / (self.delta0 * self.p).sqrt()
    }

    /// Detection threshold at scale `theta`.
    #[inline]
    pub fn threshold(&self, theta: f64) -> f64 {
        let logp = libm::log((self.delta0 * self.p).sqrt() * theta).max(0.0);
        logp.sqrt() / (self.delta0 * self.p).sqrt()
    }
}

/// Distance from `theta x` to the integer lattice.
pub fn dist_to_lattice(coords: &[f64], theta: f64) -> f64 {
    coords
        .iter()
        .map(|&x| {
            let t = theta * x;
            let d = t - t.round();
            d * d
        })
        .sum::<f64>()
        .sqrt()
}

/// Comparison slack stabilizing the strict inequality under rounding.
const LCD_SLACK: f64 = 1e-12;

#[inline]
fn lcd_predicate_holds(coords: &[f64], theta: f64, params: &LcdParams) -> bool {
    dist_to_lattice(coords, theta) < params.threshold(theta) - LCD_SLACK
}

/// Result of an LCD search.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct LcdOutcome {
    /// Certified upper bound on the LCD, or `+inf` when no scale at or below
    /// `theta_max` qualifies.
    pub value: f64,
    /// `(delta0 p)^{-1/2}`.
    pub universal_lower: f64,
    /// `1 / (2 ||x||_inf)`.
    pub inf_norm_lower: f64,
}

/// Least common denominator of `x`: the smallest `theta` on the refined grid
/// in `(0, theta_max]` with `dist(theta x, Z^n) < (delta0 p)^{-1/2}
/// sqrt(log_+(sqrt(delta0 p) theta))`.
///
/// Both analytic lower bounds make every `theta` below them unsatisfiable,
/// so the scan starts at their maximum. On the first qualifying grid point
/// the crossing is refined by bisection; the returned value satisfies the
/// defining inequality (re-verified directly) and no grid point more than
/// `grid_step` below it does.
pub fn lcd(x: &UnitVector, params: &LcdParams) -> Result<LcdOutcome> {
    params.validate()?;
    let universal_lower = params.universal_lower_bound();
    let inf_norm_lower = 1.0 / (2.0 * x.inf_norm());
    let start = universal_lower.max(inf_norm_lower);

    let mut outcome =
        LcdOutcome { value: f64::INFINITY, universal_lower, inf_norm_lower };
    if params.theta_max < start {
        return Ok(outcome);
    }

    let coords = x.coords();
    let g = params.grid_step;
    let steps = ((params.theta_max - start) / g).floor() as u64;
    let mut hit = None;
    for k in 0..=steps {
        let theta = start + k as f64 * g;
        if lcd_predicate_holds(coords, theta, params) {
            hit = Some((if k == 0 { start } else { start + (k - 1) as f64 * g }, theta));
            break;
        }
    }
    let Some((mut lo, mut hi)) = hit else {
        return Ok(outcome);
    };

    // Bisect down to the left edge of the qualifying window.
    for _ in 0..80 {
        if hi - lo <= 1e-12 * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if lcd_predicate_holds(coords, mid, params) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    debug_assert!(lcd_predicate_holds(coords, hi, params));
    outcome.value = hi;
    Ok(outcome)
}

/// Lévy concentration estimator: the largest fraction of samples within
/// `eps` of any sample point (the sample-centered relaxation of the true
/// supremum over all centers, which it underestimates by at most the
/// eps-packing slack).
pub fn levy_concentration(samples: &[Vec<f64>], eps: f64) -> Result<f64> {
    if samples.len() < 100 {
        return Err(Error::parameter(format!(
            "need at least 100 samples, got {}",
            samples.len()
        )));
    }
    if !(eps > 0.0) {
        return Err(Error::parameter("eps must be positive"));
    }
    let dim = samples[0].len();
    if samples.iter().any(|s| s.len() != dim) {
        return Err(Error::data("samples have inconsistent dimensions"));
    }
    let n = samples.len();
    let best = if dim == 1 {
        let mut xs: Vec<f64> = samples.iter().map(|s| s[0]).collect();
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut best = 0usize;
        let mut lo = 0usize;
        let mut hi = 0usize;
        for i in 0..n {
            while xs[i] - xs[lo] > eps {
                lo += 1;
            }
            while hi < n && xs[hi] - xs[i] <= eps {
                hi += 1;
            }
            best = best.max(hi - lo);
        }
        best
    } else {
        let eps_sq = eps * eps;
        let count_at = |i: usize| -> usize {
            let center = &samples[i];
            samples
                .iter()
                .filter(|s| {
                    s.iter().zip(center).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() <= eps_sq
                })
                .count()
        };
        #[cfg(feature = "parallel")]
        {
            (0..n).into_par_iter().map(count_at).max().unwrap()
        }
        #[cfg(not(feature = "parallel"))]
        {
            (0..n).map(count_at).max().unwrap()
        }
    };
    Ok(best as f64 / n as f64)
}

/// Scalar convenience wrapper for [`levy_concentration`].
pub fn levy_concentration_scalar(samples: &[f64], eps: f64) -> Result<f64> {
    let vecs: Vec<Vec<f64>> = samples.iter().map(|&x| vec![x]).collect();
    levy_concentration(&vecs, eps)
}

/// Sparsity-threshold parameters of the compressible/dominated decomposition.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ThresholdParams {
    pub k: f64,
    pub r: f64,
    pub p: f64,
    pub n: usize,
    /// `ceil(log(1/(8p)) / log(sqrt(pn)))`, clamped to at least 1.
    pub ell0: u32,
    /// `(c_tilde (K + R))^{-(ell0 + 6)}`.
    pub rho: f64,
}

/// Computes `ell_0` and `rho` (natural logarithms; `c_tilde` is the
/// unpinned absolute constant, exposed as a knob).
pub fn threshold_params(k: f64, r: f64, p: f64, n: usize, c_tilde: f64) -> Result<ThresholdParams> {
    if !(k >= 1.0 && r >= 1.0) {
        return Err(Error::parameter("K and R must be >= 1"));
    }
    if !(p > 0.0 && p < 0.125) {
        return Err(Error::domain(format!("p must be in (0, 1/8), got {p}")));
    }
    let pn = p * n as f64;
    if pn <= 1.0 {
        return Err(Error::domain(format!("pn must exceed 1, got {pn}")));
    }
    if !(c_tilde * (k + r) > 1.0) {
        return Err(Error::parameter("c_tilde (K + R) must exceed 1 for rho in (0, 1)"));
    }
    let ratio = libm::log(1.0 / (8.0 * p)) / libm::log(pn.sqrt());
    let ell0 = ratio.ceil().max(1.0) as u32;
    let rho = libm::pow(c_tilde * (k + r), -(f64::from(ell0) + 6.0));
    Ok(ThresholdParams { k, r, p, n, ell0, rho })
}

/// Moment threshold `q(alpha) = 2 (2 - alpha) / (1 - alpha)`: the exact
/// integrability making `s_max = O(sqrt(np))` at sparsity `p ~ n^-alpha`.
pub fn moment_threshold_q(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain(format!("alpha must be in (0, 1), got {alpha}")));
    }
    Ok(2.0 * (2.0 - alpha) / (1.0 - alpha))
}

/// Writes one coordinate per line with 17 significant digits.
pub fn write_vector<W: Write>(mut w: W, coords: &[f64]) -> Result<()> {
    let mut buf = String::new();
    for &x in coords {
        buf.push_str(&format!("{x:.16e}\n"));
    }
    w.write_all(buf.as_bytes())?;
    Ok(())
}

pub fn write_vector_file(path: &Path, coords: &[f64]) -> Result<()> {
    let f = std::fs::File::create(path)?;
    write_vector(std::io::BufWriter::new(f), coords)
}

/// Reads a one-value-per-line vector; blank and `%`-comment lines skipped.
pub fn read_vector<R: Read>(r: R) -> Result<Vec<f64>> {
    let reader = BufReader::new(r);
    let mut out = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(Error::Io)?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        let v: f64 = t.parse().map_err(|_| Error::Parse {
            line: idx + 1,
            msg: format!("bad value '{t}'"),
        })?;
        out.push(v);
    }
    if out.is_empty() {
        return Err(Error::Parse { line: 1, msg: "empty vector file".into() });
    }
    Ok(out)
}

pub fn read_vector_file(path: &Path) -> Result<Vec<f64>> {
    let f = std::fs::File::open(path)?;
    read_vector(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(coords: Vec<f64>) -> UnitVector {
        UnitVector::normalized(coords).unwrap()
    }

    #[test]
    fn segment_of_basis_vector() {
        let x = UnitVector::new(vec![1.0, 0.0, 0.0]).unwrap();
        let seg = rearranged_segment(&x, 2, 3).unwrap();
        assert_eq!(seg, vec![0.0; 3]);
    }

    #[test]
    fn segment_top_rank() {
        let x = UnitVector::new(vec![0.8, 0.6, 0.0]).unwrap();
        let seg = rearranged_segment(&x, 1, 1).unwrap();
        assert_eq!(seg, vec![0.8, 0.0, 0.0]);
    }

    #[test]
    fn segments_partition_norm() {
        let x = unit(vec![0.3, -1.2, 0.05, 0.7, -0.1, 2.0]);
        for m in 1..6 {
            let head = rearranged_segment(&x, 1, m).unwrap();
            let tail = rearranged_segment(&x, m + 1, 6).unwrap();
            let total: f64 = head.iter().chain(&tail).map(|v| v * v).sum();
            assert!((total - 1.0).abs() < 1e-12);
            // Disjoint supports.
            assert!(head.iter().zip(&tail).all(|(a, b)| *a == 0.0 || *b == 0.0));
        }
    }

    #[test]
    fn segment_range_checked() {
        let x = UnitVector::new(vec![1.0, 0.0]).unwrap();
        assert!(rearranged_segment(&x, 0, 1).is_err());
        assert!(rearranged_segment(&x, 2, 1).is_err());
        assert!(rearranged_segment(&x, 1, 3).is_err());
    }

    #[test]
    fn dist_to_sparse_examples() {
        let e1 = UnitVector::new(vec![1.0, 0.0, 0.0]).unwrap();
        assert_eq!(dist_to_sparse(&e1, 1).unwrap(), 0.0);

        let u = unit(vec![1.0; 4]);
        assert!((dist_to_sparse(&u, 2).unwrap() - (0.5f64).sqrt()).abs() < 1e-12);

        let x = unit(vec![0.2, 0.9, -0.4]);
        assert_eq!(dist_to_sparse(&x, 3).unwrap(), 0.0);
    }

    #[test]
    fn compressible_partition() {
        let x = unit(vec![1.0, 0.1, 0.1, 0.1]);
        for m in 1..=4 {
            for rho in [0.01, 0.2, 0.9] {
                let comp = is_compressible(&x, m, rho).unwrap();
                let incomp = dist_to_sparse(&x, m).unwrap() > rho;
                assert_ne!(comp, incomp);
            }
        }
    }

    #[test]
    fn dominated_examples() {
        let e1 = UnitVector::new(vec![1.0, 0.0, 0.0]).unwrap();
        assert!(is_dominated(&e1, 1, 0.001).unwrap());

        let n = 8;
        let u = unit(vec![1.0; n]);
        assert!(!is_dominated(&u, n / 2, 0.5).unwrap());
        assert!(is_dominated(&u, n / 2, 1.5).unwrap());
    }

    #[test]
    fn sparse_vectors_always_dominated() {
        let x = unit(vec![0.0, 3.0, 0.0, -4.0, 0.0, 0.0]);
        for alpha in [0.01, 0.5, 10.0] {
            assert!(is_dominated(&x, 2, alpha).unwrap());
        }
    }

    #[test]
    fn lcd_respects_lower_bounds() {
        let x = unit(vec![1.0, 1.0, 0.0, 0.0]);
        let params = LcdParams::for_sparsity(0.01);
        let out = lcd(&x, &params).unwrap();
        assert!(out.value >= out.universal_lower);
        assert!(out.value >= out.inf_norm_lower);
        assert!(out.value.is_finite());
    }

    #[test]
    fn lcd_infinite_when_cap_below_bounds() {
        let x = unit(vec![1.0, 1.0]);
        let mut params = LcdParams::for_sparsity(0.01);
        params.theta_max = params.universal_lower_bound() / 2.0;
        params.grid_step = 1e-4 * params.theta_max;
        let out = lcd(&x, &params).unwrap();
        assert!(out.value.is_infinite());
    }

    #[test]
    fn lcd_rejects_bad_params() {
        let x = unit(vec![1.0, 1.0]);
        let mut params = LcdParams::for_sparsity(0.01);
        params.theta_max = -1.0;
        assert!(lcd(&x, &params).is_err());
    }

    #[test]
    fn levy_point_mass_is_one() {
        let samples = vec![vec![2.5]; 150];
        assert_eq!(levy_concentration(&samples, 0.1).unwrap(), 1.0);
    }

    #[test]
    fn levy_monotone_in_eps() {
        let samples: Vec<Vec<f64>> =
            (0..500).map(|i| vec![(i as f64 * 0.618).fract() * 10.0]).collect();
        let a = levy_concentration(&samples, 0.5).unwrap();
        let b = levy_concentration(&samples, 1.0).unwrap();
        assert!(b >= a);
        assert!(a >= 1.0 / 500.0);
    }

    #[test]
    fn levy_needs_samples() {
        assert!(levy_concentration(&[], 1.0).is_err());
        assert!(levy_concentration(&vec![vec![0.0]; 50], 1.0).is_err());
    }

    #[test]
    fn threshold_params_examples() {
        let t = threshold_params(1.0, 1.0, 0.01, 10_000, 2.0).unwrap();
        assert_eq!(t.ell0, 2);
        assert!((t.rho - 4.0f64.powi(-8)).abs() < 1e-18);
        assert!(t.rho > 0.0 && t.rho < 1.0);

        // 1/(8p) <= sqrt(pn) puts the ratio in (0, 1], so ell0 = 1.
        let t = threshold_params(1.0, 1.0, 0.1, 10_000, 2.0).unwrap();
        assert_eq!(t.ell0, 1);

        assert!(threshold_params(1.0, 1.0, 0.01, 50, 2.0).is_err());
    }

    #[test]
    fn moment_threshold_examples() {
        assert!((moment_threshold_q(0.5).unwrap() - 6.0).abs() < 1e-15);
        assert!((moment_threshold_q(0.75).unwrap() - 10.0).abs() < 1e-14);
        assert!((moment_threshold_q(1e-9).unwrap() - 4.0).abs() < 1e-7);
        assert!(moment_threshold_q(0.0).is_err());
        assert!(moment_threshold_q(1.0).is_err());
    }

    #[test]
    fn vector_io_round_trip() {
        let v = vec![0.1234567890123456, -7.5e-3, 1.0];
        let mut buf = Vec::new();
        write_vector(&mut buf, &v).unwrap();
        let back = read_vector(buf.as_slice()).unwrap();
        assert_eq!(v, back);
    }
}
