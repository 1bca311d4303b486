//! Declarative, reproducible Monte-Carlo campaigns.
//!
//! Trials are the unit of parallel work: each touches only its own
//! counter-based PRNG stream and record, and results are merged in
//! trial-index order, so parallel and serial runs emit identical output.

pub mod exact;
pub mod experiments;
pub mod io;
pub mod stats;

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::ensemble::{sample_csr, sample_matrix, EnsembleSpec};
use crate::error::Error;
use crate::matrix::{CsrMatrix, Matrix};
use crate::rng::{SeedSpec, TrialRng};
use crate::spectral;
use crate::Result;

pub use stats::{wilson_interval, SummaryStats};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Per-trial scalar recorded by a campaign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Statistic {
    #[serde(rename = "smin")]
    SMin,
    #[serde(rename = "smax")]
    SMax,
    Cond,
    Singular,
    ZeroRow,
    MaxEntry,
    SeginerStat,
    ColumnDistance,
    PatternCount,
}

impl Statistic {
    pub fn name(&self) -> &'static str {
        match self {
            Statistic::SMin => "smin",
            Statistic::SMax => "smax",
            Statistic::Cond => "cond",
            Statistic::Singular => "singular",
            Statistic::ZeroRow => "zero_row",
            Statistic::MaxEntry => "max_entry",
            Statistic::SeginerStat => "seginer_stat",
            Statistic::ColumnDistance => "column_distance",
            Statistic::PatternCount => "pattern_count",
        }
    }

    /// Statistics that need the dense carrier; the rest run off the sparse
    /// view (or the bare mask) and scale to much larger n.
    fn needs_dense(&self) -> bool {
        matches!(
            self,
            Statistic::SMin
                | Statistic::Cond
                | Statistic::Singular
                | Statistic::ColumnDistance
                | Statistic::PatternCount
        )
    }
}

/// Column sets and threshold for the row-pattern statistic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternParams {
    pub j_cols: Vec<usize>,
    pub jprime_cols: Vec<usize>,
    pub threshold: f64,
}

impl PatternParams {
    /// `J = {0}`, `J' = {1, .., floor(sqrt(pn))}`, threshold 1.
    pub fn defaults(n: usize, p: f64) -> PatternParams {
        let gamma = ((p * n as f64).sqrt().floor() as usize).clamp(1, n.saturating_sub(1));
        PatternParams {
            j_cols: vec![0],
            jprime_cols: (1..=gamma).collect(),
            threshold: 1.0,
        }
    }
}

/// Declarative Monte-Carlo campaign.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub name: String,
    pub ensemble: EnsembleSpec,
    pub trials: u64,
    pub master_seed: u64,
    pub statistic: Statistic,
    /// Restrict aggregation to the event `||A_offdiag|| <= K sqrt(np)`.
    #[serde(default)]
    pub condition_k: Option<f64>,
    /// Optional (n, p) grid; scans re-run the campaign per grid point.
    #[serde(default)]
    pub sweep: Option<Vec<(usize, f64)>>,
    /// Thresholds for the smallest-singular-value tail curve.
    #[serde(default)]
    pub eps_grid: Option<Vec<f64>>,
    #[serde(default)]
    pub pattern: Option<PatternParams>,
    /// Declared bound `R` on the diagonal shift: validation checks
    /// `||D|| <= R sqrt(np)`.
    #[serde(default)]
    pub shift_r: Option<f64>,
}

impl ExperimentSpec {
    pub fn new(
        name: impl Into<String>,
        ensemble: EnsembleSpec,
        trials: u64,
        master_seed: u64,
        statistic: Statistic,
    ) -> Self {
        ExperimentSpec {
            name: name.into(),
            ensemble,
            trials,
            master_seed,
            statistic,
            condition_k: None,
            sweep: None,
            eps_grid: None,
            pattern: None,
            shift_r: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials < 1 {
            return Err(Error::parameter("trials must be >= 1"));
        }
        self.ensemble.validate()?;
        if let Some(k) = self.condition_k {
            if !(k > 0.0) {
                return Err(Error::parameter("condition_k must be positive"));
            }
        }
        if let Some(r) = self.shift_r {
            let bound = r * (self.ensemble.n as f64 * self.ensemble.p).sqrt();
            let d = self.ensemble.shift.inf_norm();
            if d > bound {
                return Err(Error::parameter(format!(
                    "shift norm {d} exceeds declared R sqrt(np) = {bound}"
                )));
            }
        }
        if let Some(sweep) = &self.sweep {
            if sweep.is_empty() {
                return Err(Error::parameter("sweep grid must not be empty"));
            }
            for &(n, p) in sweep {
                if n < 1 || !(p > 0.0 && p <= 1.0) {
                    return Err(Error::parameter(format!("invalid sweep point ({n}, {p})")));
                }
            }
            if matches!(self.ensemble.shift, crate::ensemble::DiagonalShift::Vector(_)) {
                return Err(Error::parameter(
                    "per-index shift vectors cannot follow a sweep across dimensions",
                ));
            }
        }
        if let Some(pat) = &self.pattern {
            if pat.j_cols.is_empty() {
                return Err(Error::parameter("pattern J must not be empty"));
            }
        }
        Ok(())
    }

    /// The campaign with its ensemble re-dimensioned to one sweep point.
    /// Scalar diagonal shifts carry over; adjacency mode re-derives its
    /// entry law from the new p.
    pub fn at_sweep_point(&self, n: usize, p: f64) -> ExperimentSpec {
        let mut spec = self.clone();
        if spec.ensemble.adjacency_mode {
            spec.ensemble =
                EnsembleSpec::adjacency(n, p).with_shift(self.ensemble.shift.clone());
        } else {
            spec.ensemble.n = n;
            spec.ensemble.p = p;
        }
        spec.sweep = None;
        spec
    }
}

/// One trial's outputs. The statistic value and conditioning flag are pure
/// functions of `(spec, trial_index)`; the wall time is measured.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TrialRecord {
    pub trial_index: u64,
    pub value: f64,
    pub conditioned: bool,
    pub wall_ms: f64,
}

/// Conditioning-event bookkeeping reported alongside the summary.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ConditioningReport {
    pub k: f64,
    /// Empirical frequency of the event.
    pub frequency: f64,
    pub retained: u64,
}

/// Full campaign output.
#[derive(Debug, Clone)]
pub struct CampaignResult {
    pub records: Vec<TrialRecord>,
    pub summary: SummaryStats,
    pub conditioning: Option<ConditioningReport>,
}

/// Iteration tolerance used by campaign statistics.
pub const TRIAL_TOL: f64 = 1e-10;

fn trial_value(spec: &ExperimentSpec, trial_index: u64) -> Result<(f64, bool)> {
    let seed = SeedSpec::new(spec.master_seed, trial_index);
    let ens = &spec.ensemble;
    let np_scale = (ens.n as f64 * ens.p).sqrt();

    if spec.statistic.needs_dense() {
        let m = sample_matrix(ens, seed)?;
        let conditioned = match spec.condition_k {
            Some(k) if k.is_finite() => offdiag_norm_dense(&m) <= k * np_scale,
            _ => true,
        };
        let value = match spec.statistic {
            Statistic::SMin => spectral::smallest_singular_value(&m, TRIAL_TOL)?.value,
            Statistic::Cond => spectral::SpectralSummary::compute(&m, TRIAL_TOL)?.cond,
            Statistic::Singular => {
                let singular = if ens.is_integer_valued() && ens.n <= exact::MAX_EXACT_DIM {
                    exact::is_exactly_singular(&m).expect("integer-valued ensemble")
                } else {
                    let s = spectral::SpectralSummary::compute(&m, TRIAL_TOL)?;
                    s.is_numerically_singular()
                };
                f64::from(u8::from(singular))
            }
            Statistic::ColumnDistance => {
                let d = spectral::all_column_span_distances(&m)?;
                d.into_iter().fold(f64::INFINITY, f64::min)
            }
            Statistic::PatternCount => {
                let pat = spec
                    .pattern
                    .clone()
                    .unwrap_or_else(|| PatternParams::defaults(ens.n, ens.p));
                crate::ensemble::pattern_count(&m, &pat.j_cols, &pat.jprime_cols, pat.threshold)?
                    as f64
            }
            _ => unreachable!(),
        };
        return Ok((value, conditioned));
    }

    // Sparse-view path.
    if spec.statistic == Statistic::ZeroRow {
        let exists = mask_has_zero_row(ens, seed);
        let conditioned = conditioned_csr(spec, seed, np_scale)?;
        return Ok((f64::from(u8::from(exists)), conditioned));
    }
    let csr = sample_csr(ens, seed)?;
    let conditioned = match spec.condition_k {
        Some(k) if k.is_finite() => offdiag_norm_csr(&csr) <= k * np_scale,
        _ => true,
    };
    let value = match spec.statistic {
        Statistic::SMax => spectral::largest_singular_value_csr(&csr, TRIAL_TOL),
        Statistic::MaxEntry => csr.max_abs_entry(),
        Statistic::SeginerStat => {
            csr.column_norms().into_iter().fold(0.0f64, f64::max)
        }
        _ => unreachable!(),
    };
    Ok((value, conditioned))
}

fn conditioned_csr(spec: &ExperimentSpec, seed: SeedSpec, np_scale: f64) -> Result<bool> {
    match spec.condition_k {
        Some(k) if k.is_finite() => {
            let csr = sample_csr(&spec.ensemble, seed)?;
            Ok(offdiag_norm_csr(&csr) <= k * np_scale)
        }
        _ => Ok(true),
    }
}

/// `||A - diag(A)||` via power iteration on a diagonal-zeroed copy.
fn offdiag_norm_dense(m: &Matrix) -> f64 {
    let mut bar = m.clone();
    for i in 0..bar.rows().min(bar.cols()) {
        bar[(i, i)] = 0.0;
    }
    spectral::largest_singular_value_csr(bar.csr(), TRIAL_TOL)
}

fn offdiag_norm_csr(m: &CsrMatrix) -> f64 {
    let mut bar = m.clone();
    for i in 0..bar.rows {
        for k in bar.row_ptr[i]..bar.row_ptr[i + 1] {
            if bar.col_idx[k] == i {
                bar.values[k] = 0.0;
            }
        }
    }
    spectral::largest_singular_value_csr(&bar, TRIAL_TOL)
}

/// Whether the Bernoulli mask of this trial has an all-zero row (the
/// diagonal participates only under the IID diagonal policy).
pub fn mask_has_zero_row(ens: &EnsembleSpec, seed: SeedSpec) -> bool {
    let rng = TrialRng::new(seed);
    let n = ens.n;
    let zero_diag = ens.diagonal == crate::ensemble::DiagonalPolicy::Zero;
    'rows: for i in 0..n {
        for j in 0..n {
            if zero_diag && i == j {
                continue;
            }
            let base = (i as u64 * n as u64 + j as u64) * 4;
            if rng.bernoulli(base, ens.p) {
                continue 'rows;
            }
        }
        return true;
    }
    false
}

fn run_trial(spec: &ExperimentSpec, trial_index: u64) -> Result<TrialRecord> {
    let t0 = Instant::now();
    let (value, conditioned) = trial_value(spec, trial_index)?;
    Ok(TrialRecord {
        trial_index,
        value,
        conditioned,
        wall_ms: t0.elapsed().as_secs_f64() * 1e3,
    })
}

fn collect_trials_seq(spec: &ExperimentSpec) -> Result<Vec<TrialRecord>> {
    (0..spec.trials).map(|t| run_trial(spec, t)).collect()
}

#[cfg(feature = "parallel")]
fn collect_trials_par(spec: &ExperimentSpec) -> Result<Vec<TrialRecord>> {
    (0..spec.trials).into_par_iter().map(|t| run_trial(spec, t)).collect()
}

fn summarize(spec: &ExperimentSpec, records: Vec<TrialRecord>) -> CampaignResult {
    let retained: Vec<f64> =
        records.iter().filter(|r| r.conditioned).map(|r| r.value).collect();
    let summary = SummaryStats::from_values(&retained);
    let conditioning = spec.condition_k.map(|k| ConditioningReport {
        k,
        frequency: retained.len() as f64 / records.len() as f64,
        retained: retained.len() as u64,
    });
    CampaignResult { records, summary, conditioning }
}

/// Runs the campaign, on the rayon pool when the `parallel` feature is
/// enabled. Output is identical to [`run_experiment_sequential`].
pub fn run_experiment(spec: &ExperimentSpec) -> Result<CampaignResult> {
    spec.validate()?;
    #[cfg(feature = "parallel")]
    let records = collect_trials_par(spec)?;
    #[cfg(not(feature = "parallel"))]
    let records = collect_trials_seq(spec)?;
    Ok(summarize(spec, records))
}

/// Single-threaded reference runner (bench baseline and determinism check).
pub fn run_experiment_sequential(spec: &ExperimentSpec) -> Result<CampaignResult> {
    spec.validate()?;
    let records = collect_trials_seq(spec)?;
    Ok(summarize(spec, records))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::{DiagonalPolicy, EntryDistribution};

    fn rademacher_spec(n: usize, p: f64, trials: u64, stat: Statistic) -> ExperimentSpec {
        ExperimentSpec::new(
            "test",
            EnsembleSpec::new(n, p, EntryDistribution::Rademacher, DiagonalPolicy::Iid),
            trials,
            0xfeed,
            stat,
        )
    }

    #[test]
    fn campaign_is_deterministic() {
        let spec = rademacher_spec(2, 1.0, 10, Statistic::SMin);
        let a = run_experiment(&spec).unwrap();
        let b = run_experiment(&spec).unwrap();
        assert_eq!(a.summary, b.summary);
        for (x, y) in a.records.iter().zip(&b.records) {
            assert_eq!(x.value.to_bits(), y.value.to_bits());
            assert_eq!(x.conditioned, y.conditioned);
        }
    }

    #[test]
    fn parallel_and_sequential_agree() {
        let spec = rademacher_spec(12, 0.4, 24, Statistic::Cond);
        let par = run_experiment(&spec).unwrap();
        let seq = run_experiment_sequential(&spec).unwrap();
        assert_eq!(par.summary, seq.summary);
        for (x, y) in par.records.iter().zip(&seq.records) {
            assert_eq!(x.value.to_bits(), y.value.to_bits());
        }
    }

    #[test]
    fn constant_identity_like_cond_is_one() {
        let spec = ExperimentSpec::new(
            "cond1",
            EnsembleSpec::new(
                1,
                1.0,
                EntryDistribution::Constant { value: 1.0 },
                DiagonalPolicy::Iid,
            ),
            10,
            7,
            Statistic::Cond,
        );
        let out = run_experiment(&spec).unwrap();
        for r in &out.records {
            assert_eq!(r.value, 1.0);
        }
    }

    #[test]
    fn infinite_condition_k_matches_unconditioned() {
        let mut spec = rademacher_spec(10, 0.3, 16, Statistic::SMax);
        let plain = run_experiment(&spec).unwrap();
        spec.condition_k = Some(f64::INFINITY);
        let cond = run_experiment(&spec).unwrap();
        assert_eq!(plain.summary, cond.summary);
        let report = cond.conditioning.unwrap();
        assert_eq!(report.frequency, 1.0);
        assert_eq!(report.retained, 16);
    }

    #[test]
    fn zero_trials_rejected() {
        let spec = rademacher_spec(4, 0.5, 0, Statistic::SMin);
        assert!(run_experiment(&spec).is_err());
    }

    #[test]
    fn singular_statistic_is_binary_and_wilsoned() {
        let spec = ExperimentSpec::new(
            "sing",
            EnsembleSpec::new(
                2,
                1.0,
                EntryDistribution::ShiftedBernoulli { mu: 0.5 },
                DiagonalPolicy::Iid,
            ),
            200,
            3,
            Statistic::Singular,
        );
        let out = run_experiment(&spec).unwrap();
        assert!(out.records.iter().all(|r| r.value == 0.0 || r.value == 1.0));
        assert!(out.summary.wilson_ci.is_some());
    }

    #[test]
    fn sparse_and_dense_smax_paths_agree() {
        // The CSR statistic path must match what the dense path would say.
        let spec = rademacher_spec(20, 0.3, 8, Statistic::SMax);
        let out = run_experiment(&spec).unwrap();
        for r in &out.records {
            let m = sample_matrix(&spec.ensemble, SeedSpec::new(spec.master_seed, r.trial_index))
                .unwrap();
            let dense = spectral::largest_singular_value(&m, TRIAL_TOL).unwrap();
            assert!((dense - r.value).abs() <= 1e-9 * dense.max(1.0));
        }
    }

    #[test]
    fn shift_r_declaration_enforced() {
        let mut spec = rademacher_spec(10, 0.5, 4, Statistic::SMin);
        spec.ensemble.shift = crate::ensemble::DiagonalShift::Scalar(100.0);
        spec.shift_r = Some(1.0);
        assert!(matches!(run_experiment(&spec), Err(Error::Parameter(_))));
    }
}
