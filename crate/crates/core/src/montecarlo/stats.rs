//! Trial-level summary statistics: moments, quantiles, Wilson intervals.

use serde::Serialize;

/// z for a two-sided 95% interval.
const Z95: f64 = 1.959_963_984_540_054;

/// Wilson score interval for `successes` out of `n` Bernoulli trials.
/// Always a subset of [0, 1].
pub fn wilson_interval(successes: u64, n: u64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let total = n as f64;
    let p_hat = successes as f64 / total;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / total;
    let center = p_hat + z2 / (2.0 * total);
    let half = Z95 * (p_hat * (1.0 - p_hat) / total + z2 / (4.0 * total * total)).sqrt();
    let lo = if successes == 0 { 0.0 } else { ((center - half) / denom).max(0.0) };
    let hi = if successes == n { 1.0 } else { ((center + half) / denom).min(1.0) };
    (lo, hi)
}

/// Serializes possibly non-finite floats as the strings "inf"/"-inf"/"nan"
/// so JSON artifacts stay lossless.
fn json_f64<S: serde::Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else if v.is_nan() {
        s.serialize_str("nan")
    } else if *v > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_str("-inf")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Quantiles {
    #[serde(serialize_with = "json_f64")]
    pub q01: f64,
    #[serde(serialize_with = "json_f64")]
    pub q05: f64,
    #[serde(serialize_with = "json_f64")]
    pub q25: f64,
    #[serde(serialize_with = "json_f64")]
    pub q75: f64,
    #[serde(serialize_with = "json_f64")]
    pub q95: f64,
    #[serde(serialize_with = "json_f64")]
    pub q99: f64,
}

/// Aggregate over one campaign's (conditioned) trial values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryStats {
    pub count: u64,
    #[serde(serialize_with = "json_f64")]
    pub mean: f64,
    #[serde(serialize_with = "json_f64")]
    pub median: f64,
    pub quantiles: Quantiles,
    /// Present when every value is 0 or 1 (probability statistics).
    pub wilson_ci: Option<(f64, f64)>,
}

impl SummaryStats {
    pub fn from_values(values: &[f64]) -> SummaryStats {
        let count = values.len() as u64;
        if values.is_empty() {
            return SummaryStats {
                count: 0,
                mean: f64::NAN,
                median: f64::NAN,
                quantiles: Quantiles {
                    q01: f64::NAN,
                    q05: f64::NAN,
                    q25: f64::NAN,
                    q75: f64::NAN,
                    q95: f64::NAN,
                    q99: f64::NAN,
                },
                wilson_ci: None,
            };
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        let mean = values.iter().sum::<f64>() / count as f64;
        let q = |frac: f64| quantile_sorted(&sorted, frac);
        let wilson_ci = if values.iter().all(|&v| v == 0.0 || v == 1.0) {
            let successes = values.iter().filter(|&&v| v == 1.0).count() as u64;
            Some(wilson_interval(successes, count))
        } else {
            None
        };
        SummaryStats {
            count,
            mean,
            median: q(0.5),
            quantiles: Quantiles {
                q01: q(0.01),
                q05: q(0.05),
                q25: q(0.25),
                q75: q(0.75),
                q95: q(0.95),
                q99: q(0.99),
            },
            wilson_ci,
        }
    }
}

/// Linear-interpolation quantile of a sorted slice.
fn quantile_sorted(sorted: &[f64], frac: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let pos = frac * (n - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        let w = pos - lo as f64;
        sorted[lo] * (1.0 - w) + sorted[hi] * w
    }
}

/// Mean with a normal-approximation 95% CI; for bounded non-binary values.
pub fn mean_with_normal_ci(values: &[f64]) -> (f64, (f64, f64)) {
    let n = values.len() as f64;
    if values.is_empty() {
        return (f64::NAN, (f64::NAN, f64::NAN));
    }
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0).max(1.0);
    let half = Z95 * (var / n).sqrt();
    (mean, (mean - half, mean + half))
}
