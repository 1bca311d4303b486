//! CSV and JSON artifact encoding for campaigns.
//!
//! Numeric fields use Rust's shortest-round-trip float formatting, so equal
//! values always produce equal bytes.

use std::fmt::Write as _;

use serde::Serialize;

use crate::montecarlo::experiments::{ScanPoint, TailCurveReport};
use crate::montecarlo::{ConditioningReport, ExperimentSpec, TrialRecord};
use crate::montecarlo::stats::SummaryStats;

pub const CSV_HEADER: &str = "experiment,n,p,trial_index,statistic,value,conditioned,wall_ms";

/// Appends one CSV row per record (in trial order).
pub fn append_records_csv(
    out: &mut String,
    experiment: &str,
    n: usize,
    p: f64,
    statistic: &str,
    records: &[TrialRecord],
) {
    for r in records {
        writeln!(
            out,
            "{experiment},{n},{p},{},{statistic},{},{},{}",
            r.trial_index, r.value, r.conditioned, r.wall_ms
        )
        .unwrap();
    }
}

/// Renders a complete single-campaign CSV document.
pub fn records_csv(spec: &ExperimentSpec, records: &[TrialRecord]) -> String {
    let mut out = String::with_capacity(64 * records.len() + 64);
    out.push_str(CSV_HEADER);
    out.push('\n');
    append_records_csv(
        &mut out,
        &spec.name,
        spec.ensemble.n,
        spec.ensemble.p,
        spec.statistic.name(),
        records,
    );
    out
}

/// JSON summary document: aggregate statistics plus the fully resolved spec
/// for provenance.
#[derive(Serialize)]
pub struct CampaignArtifact<'a> {
    pub version: &'a str,
    pub experiment: &'a ExperimentSpec,
    pub summary: &'a SummaryStats,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conditioning: Option<&'a ConditioningReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub smin_tail_curve: Option<&'a TailCurveReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep_points: Option<&'a [ScanPoint]>,
    /// Closed-form zero-row probability, alongside zero-row campaigns.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub zero_row_analytic: Option<f64>,
}

impl<'a> CampaignArtifact<'a> {
    pub fn new(
        version: &'a str,
        experiment: &'a ExperimentSpec,
        summary: &'a SummaryStats,
    ) -> Self {
        CampaignArtifact {
            version,
            experiment,
            summary,
            conditioning: None,
            smin_tail_curve: None,
            sweep_points: None,
            zero_row_analytic: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("campaign artifact serializes")
    }
}
