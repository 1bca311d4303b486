//! Subcommand implementations.

use std::path::Path;

use rmtlab_core::geometry::{self, LcdParams, UnitVector};
use rmtlab_core::matrix::Matrix;
use rmtlab_core::montecarlo::experiments::{smin_tail_curve, ScanPoint, TailCurveReport};
use rmtlab_core::montecarlo::io::{records_csv, CampaignArtifact, CSV_HEADER};
use rmtlab_core::montecarlo::{
    run_experiment, CampaignResult, ExperimentSpec, Statistic, SummaryStats,
};
use rmtlab_core::rng::SeedSpec;
use rmtlab_core::spectral::SpectralSummary;

use crate::config::ConfigDocument;
use crate::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Non-finite floats become strings so the JSON stays lossless.
fn json_number(v: f64) -> serde_json::Value {
    match serde_json::Number::from_f64(v) {
        Some(num) => serde_json::Value::Number(num),
        None => serde_json::Value::String(
            if v.is_nan() {
                "nan".to_string()
            } else if v > 0.0 {
                "inf".to_string()
            } else {
                "-inf".to_string()
            },
        ),
    }
}

pub fn cmd_gen(config: &Path, out: &Path, seed: Option<u64>) -> Result<(), CliError> {
    let doc = ConfigDocument::load(config)?;
    let ensemble = doc.ensemble_spec()?;
    let master_seed = seed
        .or(doc.experiment.as_ref().map(|x| x.master_seed))
        .unwrap_or(0);
    let m = rmtlab_core::ensemble::sample_matrix(&ensemble, SeedSpec::new(master_seed, 0))?;
    m.write_coordinate_file(out)?;
    eprintln!(
        "wrote {} ({}x{}, {} nonzeros, master_seed {master_seed})",
        out.display(),
        m.rows(),
        m.cols(),
        m.csr().nnz()
    );
    Ok(())
}

pub fn cmd_spectral(matrix_path: &Path, tol: f64, full_svd: bool) -> Result<(), CliError> {
    let m = Matrix::read_coordinate_file(matrix_path)?;
    let summary = if full_svd {
        SpectralSummary::compute_full_svd(&m)?
    } else {
        SpectralSummary::compute(&m, tol)?
    };
    let doc = serde_json::json!({
        "version": VERSION,
        "input": matrix_path.display().to_string(),
        "tol": json_number(tol),
        "s_min": json_number(summary.s_min),
        "s_max": json_number(summary.s_max),
        "cond": json_number(summary.cond),
        "method": format!("{:?}", summary.method),
        "residual": json_number(summary.residual),
    });
    println!("{}", serde_json::to_string_pretty(&doc).unwrap());
    Ok(())
}

pub struct ExperimentOutcome {
    pub csv_path: std::path::PathBuf,
    pub json_path: std::path::PathBuf,
}

pub fn cmd_experiment(
    spec: &ExperimentSpec,
    out_dir: &Path,
    prefix: Option<&str>,
) -> Result<ExperimentOutcome, CliError> {
    std::fs::create_dir_all(out_dir)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", out_dir.display())))?;
    let stem = prefix.unwrap_or(&spec.name).to_string();
    let csv_path = out_dir.join(format!("{stem}.csv"));
    let json_path = out_dir.join(format!("{stem}.summary.json"));
    let marker_path = out_dir.join(format!("{stem}.FAILED"));
    let _ = std::fs::remove_file(&marker_path);

    match run_campaign(spec, &csv_path, &json_path) {
        Ok(()) => Ok(ExperimentOutcome { csv_path, json_path }),
        Err(e) => {
            // Whatever partial artifacts exist stay on disk; the marker
            // records the failure for scripts.
            let _ = std::fs::write(&marker_path, format!("{e}\n"));
            Err(e)
        }
    }
}

fn run_campaign(
    spec: &ExperimentSpec,
    csv_path: &Path,
    json_path: &Path,
) -> Result<(), CliError> {
    if let Some(sweep) = spec.sweep.clone() {
        let mut csv = String::from(CSV_HEADER);
        csv.push('\n');
        let mut points: Vec<ScanPoint> = Vec::new();
        for (i, &(n, p)) in sweep.iter().enumerate() {
            let mut sub = spec.at_sweep_point(n, p);
            sub.master_seed = spec.master_seed.wrapping_add((i as u64) << 32);
            let result = run_experiment(&sub)?;
            rmtlab_core::montecarlo::io::append_records_csv(
                &mut csv,
                &spec.name,
                n,
                p,
                spec.statistic.name(),
                &result.records,
            );
            // Flush progressively so completed points survive a failure.
            std::fs::write(csv_path, &csv)?;
            points.push(ScanPoint { n, p, stats: result.summary });
        }
        let overall = SummaryStats::from_values(&[]);
        let mut artifact = CampaignArtifact::new(VERSION, spec, &overall);
        artifact.sweep_points = Some(&points);
        std::fs::write(json_path, artifact.to_json())?;
        return Ok(());
    }

    let result: CampaignResult = run_experiment(spec)?;
    std::fs::write(csv_path, records_csv(spec, &result.records))?;

    let tail: Option<TailCurveReport> = match (&spec.statistic, &spec.eps_grid) {
        (Statistic::SMin, Some(grid)) => Some(smin_tail_curve(spec, grid)?),
        _ => None,
    };
    let zero_row_analytic = if spec.statistic == Statistic::ZeroRow {
        let n = spec.ensemble.n as i32;
        let q_row = (1.0 - spec.ensemble.p).powi(n);
        Some(1.0 - (1.0 - q_row).powi(n))
    } else {
        None
    };

    let mut artifact = CampaignArtifact::new(VERSION, spec, &result.summary);
    artifact.conditioning = result.conditioning.as_ref();
    artifact.smin_tail_curve = tail.as_ref();
    artifact.zero_row_analytic = zero_row_analytic;
    std::fs::write(json_path, artifact.to_json())?;
    Ok(())
}

pub fn cmd_lcd(vector_path: &Path, params: LcdParams) -> Result<(), CliError> {
    let coords = geometry::read_vector_file(vector_path)?;
    let norm = coords.iter().map(|x| x * x).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-6 {
        return Err(CliError::Validation(format!(
            "vector norm is {norm}; expected a unit vector (within 1e-6)"
        )));
    }
    if (norm - 1.0).abs() > 1e-12 {
        eprintln!("warning: renormalizing input (norm off by {:e})", (norm - 1.0).abs());
    }
    let x = UnitVector::normalized(coords).map_err(CliError::from)?;
    let out = geometry::lcd(&x, &params)?;
    let doc = serde_json::json!({
        "version": VERSION,
        "input": vector_path.display().to_string(),
        "params": params,
        "lcd": json_number(out.value),
        "lower_bounds": {
            "universal": json_number(out.universal_lower),
            "inf_norm": json_number(out.inf_norm_lower),
        },
    });
    println!("{}", serde_json::to_string_pretty(&doc).unwrap());
    Ok(())
}
