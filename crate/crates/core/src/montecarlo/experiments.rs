//! The prebuilt empirical checks: smallest-singular-value tail curves,
//! zero-row phase transition, norm and condition-number scaling scans, the
//! distance-lemma consistency report, and the tensorization sanity check.

use serde::Serialize;

use crate::ensemble::{sample_matrix, DiagonalPolicy, EnsembleSpec, EntryDistribution};
use crate::error::Error;
use crate::geometry::{dist_to_sparse, UnitVector};
use crate::montecarlo::stats::{mean_with_normal_ci, wilson_interval, SummaryStats};
use crate::montecarlo::{mask_has_zero_row, ExperimentSpec, Statistic, TRIAL_TOL};
use crate::rng::{SeedSpec, TrialRng};
use crate::spectral;
use crate::Result;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Maps trial indices through `f`, in parallel when enabled; results are
/// always in trial order.
pub(crate) fn map_trials<T, F>(trials: u64, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..trials).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..trials).map(f).collect()
    }
}

/// One point of the tail curve `eps -> P(s_min <= eps sqrt(p/n))`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CurvePoint {
    pub eps: f64,
    pub probability: f64,
    pub ci: (f64, f64),
}

/// Linear-dominance fit of a tail curve: the smallest `(c, delta)` with
/// `P(eps) <= c * eps + delta` pointwise, taking `delta` = singularity
/// frequency.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TailCurveFit {
    pub c: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct TailCurveReport {
    pub points: Vec<CurvePoint>,
    pub fit: TailCurveFit,
    /// Empirical frequency of numerically singular trials.
    pub singular_frequency: f64,
    pub retained_trials: u64,
}

/// Empirical CDF of `s_min / sqrt(p/n)` at the grid thresholds, with Wilson
/// intervals. Numerically singular trials count toward every threshold, so
/// `eps = 0` reproduces the singularity frequency exactly.
pub fn smin_tail_curve(spec: &ExperimentSpec, eps_grid: &[f64]) -> Result<TailCurveReport> {
    if eps_grid.is_empty() {
        return Err(Error::parameter("eps grid must not be empty"));
    }
    spec.validate()?;
    let ens = &spec.ensemble;
    let scale = (ens.p / ens.n as f64).sqrt();
    let np_scale = (ens.n as f64 * ens.p).sqrt();

    struct Trial {
        s_min: f64,
        singular: bool,
        conditioned: bool,
    }
    let trials = map_trials(spec.trials, |t| {
        let m = sample_matrix(ens, SeedSpec::new(spec.master_seed, t))?;
        let est = spectral::smallest_singular_value(&m, TRIAL_TOL)?;
        let conditioned = match spec.condition_k {
            Some(k) if k.is_finite() => {
                spectral::largest_singular_value_csr(&offdiag_zeroed(&m), TRIAL_TOL)
                    <= k * np_scale
            }
            _ => true,
        };
        Ok(Trial { s_min: est.value, singular: est.numerically_singular, conditioned })
    })?;

    let retained: Vec<&Trial> = trials.iter().filter(|t| t.conditioned).collect();
    let n_ret = retained.len() as u64;
    if n_ret == 0 {
        return Err(Error::Data("no trials satisfied the conditioning event".into()));
    }
    let singular_count = retained.iter().filter(|t| t.singular).count() as u64;
    let singular_frequency = singular_count as f64 / n_ret as f64;

    let mut points = Vec::with_capacity(eps_grid.len());
    for &eps in eps_grid {
        let hits = retained
            .iter()
            .filter(|t| t.singular || t.s_min <= eps * scale)
            .count() as u64;
        points.push(CurvePoint {
            eps,
            probability: hits as f64 / n_ret as f64,
            ci: wilson_interval(hits, n_ret),
        });
    }

    let c = points
        .iter()
        .filter(|pt| pt.eps > 0.0 && pt.eps.is_finite())
        .map(|pt| (pt.probability - singular_frequency).max(0.0) / pt.eps)
        .fold(0.0f64, f64::max);
    Ok(TailCurveReport {
        points,
        fit: TailCurveFit { c, delta: singular_frequency },
        singular_frequency,
        retained_trials: n_ret,
    })
}

fn offdiag_zeroed(m: &crate::matrix::Matrix) -> crate::matrix::CsrMatrix {
    let mut bar = m.clone();
    for i in 0..bar.rows().min(bar.cols()) {
        bar[(i, i)] = 0.0;
    }
    bar.csr().clone()
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ZeroRowReport {
    pub n: usize,
    pub p: f64,
    pub trials: u64,
    pub empirical: f64,
    /// `1 - (1 - (1-p)^n)^n` for the full i.i.d. mask.
    pub analytic: f64,
    pub ci: (f64, f64),
}

/// Frequency of an all-zero row in the n x n Bernoulli(p) mask, against the
/// closed form from row independence.
pub fn zero_row_probability(
    n: usize,
    p: f64,
    trials: u64,
    master_seed: u64,
) -> Result<ZeroRowReport> {
    let ens = EnsembleSpec::new(
        n,
        p,
        EntryDistribution::Constant { value: 1.0 },
        DiagonalPolicy::Iid,
    );
    ens.validate()?;
    if trials < 1 {
        return Err(Error::parameter("trials must be >= 1"));
    }
    let hits: u64 = map_trials(trials, |t| {
        Ok(u64::from(mask_has_zero_row(&ens, SeedSpec::new(master_seed, t))))
    })?
    .into_iter()
    .sum();
    let empirical = hits as f64 / trials as f64;
    let q_row = (1.0 - p).powi(n as i32);
    let analytic = 1.0 - (1.0 - q_row).powi(n as i32);
    Ok(ZeroRowReport { n, p, trials, empirical, analytic, ci: wilson_interval(hits, trials) })
}

/// Per-grid-point summary of a scaling scan.
#[derive(Debug, Clone, Serialize)]
pub struct ScanPoint {
    pub n: usize,
    pub p: f64,
    pub stats: SummaryStats,
}

fn sweep_seed(master_seed: u64, point: usize) -> u64 {
    master_seed.wrapping_add((point as u64) << 32)
}

/// Distribution of the normalized operator norm `s_max / sqrt(np)` along the
/// sparsity trajectory `p = n^-alpha`.
pub fn norm_scaling_scan(
    dist: EntryDistribution,
    alpha: f64,
    n_grid: &[usize],
    trials: u64,
    master_seed: u64,
) -> Result<Vec<ScanPoint>> {
    if n_grid.is_empty() {
        return Err(Error::parameter("n grid must not be empty"));
    }
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::domain(format!("alpha must be in [0, 1), got {alpha}")));
    }
    let mut out = Vec::with_capacity(n_grid.len());
    for (i, &n) in n_grid.iter().enumerate() {
        let p = libm::pow(n as f64, -alpha).min(1.0);
        let spec = ExperimentSpec::new(
            format!("norm_scan[n={n}]"),
            EnsembleSpec::new(n, p, dist, DiagonalPolicy::Iid),
            trials,
            sweep_seed(master_seed, i),
            Statistic::SMax,
        );
        let result = crate::montecarlo::run_experiment(&spec)?;
        let scale = (n as f64 * p).sqrt();
        let normalized: Vec<f64> =
            result.records.iter().map(|r| r.value / scale).collect();
        out.push(ScanPoint { n, p, stats: SummaryStats::from_values(&normalized) });
    }
    Ok(out)
}

/// Distribution of `cond / n` along the trajectory `p = n^-alpha`.
pub fn condition_growth_scan(
    dist: EntryDistribution,
    alpha: f64,
    n_grid: &[usize],
    trials: u64,
    master_seed: u64,
) -> Result<Vec<ScanPoint>> {
    if n_grid.is_empty() {
        return Err(Error::parameter("n grid must not be empty"));
    }
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::domain(format!("alpha must be in [0, 1), got {alpha}")));
    }
    let mut out = Vec::with_capacity(n_grid.len());
    for (i, &n) in n_grid.iter().enumerate() {
        let p = libm::pow(n as f64, -alpha).min(1.0);
        let spec = ExperimentSpec::new(
            format!("cond_scan[n={n}]"),
            EnsembleSpec::new(n, p, dist, DiagonalPolicy::Iid),
            trials,
            sweep_seed(master_seed, i),
            Statistic::Cond,
        );
        let result = crate::montecarlo::run_experiment(&spec)?;
        let normalized: Vec<f64> =
            result.records.iter().map(|r| r.value / n as f64).collect();
        out.push(ScanPoint { n, p, stats: SummaryStats::from_values(&normalized) });
    }
    Ok(out)
}

/// Parameters of the distance-lemma consistency report.
#[derive(Debug, Clone, Serialize)]
pub struct DistanceLemmaConfig {
    pub eps_grid: Vec<f64>,
    /// Incompressibility radius.
    pub rho: f64,
    /// Sparsity level defining `Incomp(m, rho)`; must be < n.
    pub m: usize,
}

impl DistanceLemmaConfig {
    pub fn defaults(n: usize) -> DistanceLemmaConfig {
        DistanceLemmaConfig {
            eps_grid: vec![0.25, 0.5, 1.0, 2.0],
            rho: 0.1,
            m: (n / 2).max(1),
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct DistanceLemmaPoint {
    pub eps: f64,
    /// Frequency of `s_min <= eps rho^2 sqrt(p/n)` (upper surrogate for the
    /// incompressible infimum event).
    pub lhs: f64,
    pub lhs_ci: (f64, f64),
    /// Frequency where additionally the minimizing vector is certified
    /// incompressible; the event is then exact.
    pub lhs_certified: f64,
    /// Mean of `(1/m) #\{j : dist_j <= rho sqrt(p) eps\}` (can exceed 1).
    pub rhs: f64,
    pub rhs_ci: (f64, f64),
    /// Lemma direction at this eps within joint 95% intervals.
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct DistanceLemmaReport {
    pub config: DistanceLemmaConfig,
    pub trials: u64,
    pub points: Vec<DistanceLemmaPoint>,
    /// Trials where the minimizer was compressible, leaving the LHS event
    /// ambiguous (counted toward `lhs` anyway).
    pub ambiguous_trials: u64,
}

/// Empirically compares both sides of the invertibility-via-distance bound
/// at the configured `(eps, rho, m)`.
pub fn distance_lemma_check(
    ens: &EnsembleSpec,
    trials: u64,
    config: DistanceLemmaConfig,
    master_seed: u64,
) -> Result<DistanceLemmaReport> {
    ens.validate()?;
    if ens.n < 2 {
        return Err(Error::parameter("distance lemma needs n >= 2"));
    }
    if config.m >= ens.n || config.m < 1 {
        return Err(Error::parameter("m must be in [1, n)"));
    }
    if !(config.rho > 0.0 && config.rho < 1.0) {
        return Err(Error::parameter("rho must be in (0, 1)"));
    }
    if config.eps_grid.is_empty() {
        return Err(Error::parameter("eps grid must not be empty"));
    }

    struct Trial {
        s_min: f64,
        incompressible_min: bool,
        dist_fracs: Vec<f64>,
    }
    let n = ens.n;
    let rho = config.rho;
    let trials_out = map_trials(trials, |t| {
        let m = sample_matrix(ens, SeedSpec::new(master_seed, t))?;
        let (est, v) = spectral::smallest_singular_pair(&m, TRIAL_TOL)?;
        let incompressible_min = match UnitVector::normalized(v) {
            Ok(unit) => dist_to_sparse(&unit, config.m)? > rho,
            Err(_) => false,
        };
        let dists = spectral::all_column_span_distances(&m)?;
        let dist_fracs = config
            .eps_grid
            .iter()
            .map(|&eps| {
                let thr = rho * ens.p.sqrt() * eps;
                dists.iter().filter(|&&d| d <= thr).count() as f64 / config.m as f64
            })
            .collect();
        Ok(Trial { s_min: est.value, incompressible_min, dist_fracs })
    })?;

    let total = trials_out.len() as u64;
    let ambiguous_trials =
        trials_out.iter().filter(|t| !t.incompressible_min).count() as u64;
    let scale = (ens.p / n as f64).sqrt();
    let mut points = Vec::with_capacity(config.eps_grid.len());
    for (k, &eps) in config.eps_grid.iter().enumerate() {
        let thr = eps * rho * rho * scale;
        let lhs_hits = trials_out.iter().filter(|t| t.s_min <= thr).count() as u64;
        let lhs_cert = trials_out
            .iter()
            .filter(|t| t.s_min <= thr && t.incompressible_min)
            .count() as u64;
        let rhs_values: Vec<f64> = trials_out.iter().map(|t| t.dist_fracs[k]).collect();
        let (rhs, rhs_ci) = mean_with_normal_ci(&rhs_values);
        let lhs_ci = wilson_interval(lhs_hits, total);
        points.push(DistanceLemmaPoint {
            eps,
            lhs: lhs_hits as f64 / total as f64,
            lhs_ci,
            lhs_certified: lhs_cert as f64 / total as f64,
            rhs,
            rhs_ci,
            holds: lhs_ci.0 <= rhs_ci.1,
        });
    }
    Ok(DistanceLemmaReport { config, trials: total, points, ambiguous_trials })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct TensorizationReport {
    pub n: usize,
    pub q: f64,
    pub c: f64,
    pub threshold: f64,
    pub empirical: f64,
    /// Exact probability for the two-point law `V = 1.5 Bernoulli(q)`.
    pub analytic: f64,
}

/// Sanity check of the sum-of-nonnegatives lower-tail bound: draws
/// `V_j = 1.5 Bernoulli(q)` (so `P(V_j > 1) = q`) and estimates
/// `P(sum V_j <= c q n / log(1/q))`, alongside the exact binomial value.
pub fn tensorization_check(
    n: usize,
    q: f64,
    c: f64,
    trials: u64,
    master_seed: u64,
) -> Result<TensorizationReport> {
    if !(q > 0.0 && q < 0.5) {
        return Err(Error::parameter("q must be in (0, 1/2)"));
    }
    if !(c > 0.0) || n < 1 || trials < 1 {
        return Err(Error::parameter("need c > 0, n >= 1, trials >= 1"));
    }
    let threshold = c * q * n as f64 / libm::log(1.0 / q);
    let k_max = (threshold / 1.5).floor();
    let hits: u64 = map_trials(trials, |t| {
        let rng = TrialRng::new(SeedSpec::new(master_seed, t));
        let successes = (0..n as u64).filter(|&j| rng.bernoulli(j, q)).count();
        Ok(u64::from(1.5 * successes as f64 <= threshold))
    })?
    .into_iter()
    .sum();
    let analytic = if k_max < 0.0 { 0.0 } else { binomial_cdf(k_max as u64, n as u64, q) };
    Ok(TensorizationReport {
        n,
        q,
        c,
        threshold,
        empirical: hits as f64 / trials as f64,
        analytic,
    })
}

/// `P(Binomial(n, q) <= k)` via log-space pmf summation.
pub fn binomial_cdf(k: u64, n: u64, q: f64) -> f64 {
    let k = k.min(n);
    let (ln_q, ln_1q) = (libm::log(q), libm::log(1.0 - q));
    let mut acc = 0.0;
    for i in 0..=k {
        let ln_pmf = ln_choose(n, i) + i as f64 * ln_q + (n - i) as f64 * ln_1q;
        acc += libm::exp(ln_pmf);
    }
    acc.min(1.0)
}

fn ln_choose(n: u64, k: u64) -> f64 {
    libm::lgamma((n + 1) as f64) - libm::lgamma((k + 1) as f64) - libm::lgamma((n - k + 1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::montecarlo::ExperimentSpec;

    #[test]
    fn zero_row_p_one_is_never() {
        let r = zero_row_probability(5, 1.0, 50, 1).unwrap();
        assert_eq!(r.empirical, 0.0);
        assert_eq!(r.analytic, 0.0);
    }

    #[test]
    fn zero_row_small_case_matches_closed_form() {
        let r = zero_row_probability(2, 0.5, 20_000, 2).unwrap();
        assert!((r.analytic - 0.4375).abs() < 1e-15);
        assert!(r.ci.0 <= r.analytic && r.analytic <= r.ci.1, "{r:?}");
    }

    #[test]
    fn zero_row_subthreshold_regime_is_obstructed() {
        let n = 200.0_f64;
        let p = n.ln() / (2.0 * n);
        let r = zero_row_probability(200, p, 10, 3).unwrap();
        assert!(r.analytic >= 0.2, "analytic = {}", r.analytic);
    }

    #[test]
    fn tail_curve_sentinel_and_monotonicity() {
        let spec = ExperimentSpec::new(
            "curve",
            EnsembleSpec::new(8, 0.9, EntryDistribution::Rademacher, DiagonalPolicy::Iid),
            200,
            11,
            Statistic::SMin,
        );
        let grid = [0.0, 0.1, 0.5, 1.0, f64::INFINITY];
        let report = smin_tail_curve(&spec, &grid).unwrap();
        assert_eq!(report.points.last().unwrap().probability, 1.0);
        assert_eq!(report.points[0].probability, report.singular_frequency);
        for w in report.points.windows(2) {
            assert!(w[0].probability <= w[1].probability);
        }
    }

    #[test]
    fn tail_curve_rejects_empty_grid() {
        let spec = ExperimentSpec::new(
            "curve",
            EnsembleSpec::new(4, 0.5, EntryDistribution::Rademacher, DiagonalPolicy::Iid),
            10,
            1,
            Statistic::SMin,
        );
        assert!(smin_tail_curve(&spec, &[]).is_err());
    }

    #[test]
    fn scan_all_ones_norm_is_sqrt_n() {
        // Constant(1) at p = 1: s_max = n exactly, so s_max / sqrt(np) =
        // sqrt(n) exactly (equivalently s_max / n = 1 per trial).
        let pts = norm_scaling_scan(
            EntryDistribution::Constant { value: 1.0 },
            0.0,
            &[4, 9],
            5,
            17,
        )
        .unwrap();
        assert_eq!(pts[0].stats.median, 2.0);
        assert_eq!(pts[1].stats.median, 3.0);
    }

    #[test]
    fn binomial_cdf_matches_direct_enumeration() {
        // n = 4, q = 0.5: CDF at 2 = (1 + 4 + 6) / 16.
        let v = binomial_cdf(2, 4, 0.5);
        assert!((v - 11.0 / 16.0).abs() < 1e-12);
        assert!((binomial_cdf(4, 4, 0.3) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tensorization_analytic_decays_in_n() {
        let a = tensorization_check(100, 0.2, 0.1, 100, 5).unwrap();
        let b = tensorization_check(1000, 0.2, 0.1, 100, 5).unwrap();
        assert!(b.analytic < a.analytic);
        assert!(b.empirical <= a.empirical + 1e-12);
    }

    #[test]
    fn distance_lemma_identity_trivially_holds() {
        // Empty mask + unit shift = the identity matrix: s_min = 1, far
        // above every threshold, so the LHS frequency is 0 at small eps.
        let ens = EnsembleSpec::new(
            6,
            0.0,
            EntryDistribution::Constant { value: 1.0 },
            DiagonalPolicy::Zero,
        )
        .with_shift(crate::ensemble::DiagonalShift::Scalar(1.0));
        let cfg = DistanceLemmaConfig { eps_grid: vec![0.5, 1.0], rho: 0.1, m: 3 };
        let report = distance_lemma_check(&ens, 20, cfg, 3).unwrap();
        for pt in &report.points {
            assert_eq!(pt.lhs, 0.0);
            assert!(pt.lhs_certified <= pt.lhs);
            assert!(pt.holds);
        }
    }
}
