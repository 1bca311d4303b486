//! Built-in campaign presets.

use rmtlab_core::ensemble::{DiagonalPolicy, EnsembleSpec, EntryDistribution};
use rmtlab_core::montecarlo::{ExperimentSpec, Statistic};

use crate::CliError;

pub const PRESET_NAMES: [&str; 5] = ["thm1.1", "thm1.2ii", "thm1.4", "thm1.7", "zero-row"];

pub fn preset(name: &str) -> Result<ExperimentSpec, CliError> {
    let spec = match name {
        // Smallest singular value of the centered sparse ensemble at fixed
        // (n, p), with the tail curve over eps.
        "thm1.1" => {
            let mut s = ExperimentSpec::new(
                "thm1.1",
                EnsembleSpec::new(200, 0.2, EntryDistribution::Rademacher, DiagonalPolicy::Zero),
                5000,
                11,
                Statistic::SMin,
            );
            s.eps_grid = Some(vec![0.05, 0.1, 0.2, 0.4]);
            s
        }
        // Heavy-tail operator norm along p = n^{-1/2}: the normalized
        // median grows with n when the tail exponent is below q(alpha).
        "thm1.2ii" => {
            let mut s = ExperimentSpec::new(
                "thm1.2ii",
                EnsembleSpec::new(
                    100,
                    0.1,
                    EntryDistribution::SymmetricPareto { rho: 4.5 },
                    DiagonalPolicy::Iid,
                ),
                100,
                12,
                Statistic::SMax,
            );
            s.sweep = Some(vec![(100, 0.1), (400, 0.05), (1600, 0.025)]);
            s
        }
        // Light-tail operator norm along the same trajectory: flat medians.
        "thm1.4" => {
            let mut s = ExperimentSpec::new(
                "thm1.4",
                EnsembleSpec::new(100, 0.1, EntryDistribution::Rademacher, DiagonalPolicy::Iid),
                100,
                14,
                Statistic::SMax,
            );
            s.sweep = Some(vec![(100, 0.1), (400, 0.05), (1600, 0.025)]);
            s
        }
        // Directed Erdős–Rényi adjacency at p = 2 log n / n.
        "thm1.7" => {
            let n = 300usize;
            let p = 2.0 * (n as f64).ln() / n as f64;
            let mut s = ExperimentSpec::new(
                "thm1.7",
                EnsembleSpec::adjacency(n, p),
                400,
                17,
                Statistic::SMin,
            );
            s.eps_grid = Some(vec![0.05, 0.1, 0.2, 0.4]);
            s
        }
        // Zero-row obstruction below the log n / n connectivity threshold.
        "zero-row" => {
            let n = 200usize;
            let p = (n as f64).ln() / (2.0 * n as f64);
            ExperimentSpec::new(
                "zero-row",
                EnsembleSpec::new(
                    n,
                    p,
                    EntryDistribution::Constant { value: 1.0 },
                    DiagonalPolicy::Iid,
                ),
                10_000,
                20,
                Statistic::ZeroRow,
            )
        }
        other => {
            return Err(CliError::Validation(format!(
                "unknown preset \"{other}\" (available: {})",
                PRESET_NAMES.join(", ")
            )))
        }
    };
    Ok(spec)
}
