//! TOML configuration documents with `[ensemble]`, `[experiment]`, `[lcd]`,
//! and `[output]` sections. Unknown keys are rejected with the parser's
//! span-bearing error message.

use serde::Deserialize;

use rmtlab_core::ensemble::{DiagonalPolicy, DiagonalShift, EnsembleSpec, EntryDistribution};
use rmtlab_core::geometry::LcdParams;
use rmtlab_core::montecarlo::{ExperimentSpec, PatternParams, Statistic};

use crate::CliError;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigDocument {
    pub ensemble: Option<EnsembleConfig>,
    pub experiment: Option<ExperimentConfig>,
    pub lcd: Option<LcdConfig>,
    pub output: Option<OutputConfig>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleConfig {
    pub n: usize,
    pub p: f64,
    /// Entry law; a bare string for parameterless kinds or a table such as
    /// `{ kind = "pareto", rho = 4.5 }`.
    pub dist: Option<DistConfig>,
    /// "iid" (default) or "zero".
    pub diagonal: Option<String>,
    /// Scalar broadcast or per-index array.
    pub shift: Option<DiagonalShift>,
    /// Directed Erdős–Rényi adjacency sampling (0/1 edges, zero diagonal).
    #[serde(default)]
    pub adjacency: bool,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum DistConfig {
    Name(String),
    Table(DistTable),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistTable {
    pub kind: String,
    pub rho: Option<f64>,
    pub mu: Option<f64>,
    pub value: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub trials: u64,
    #[serde(default)]
    pub master_seed: u64,
    pub statistic: Statistic,
    pub condition_k: Option<f64>,
    pub eps_grid: Option<Vec<f64>>,
    pub sweep: Option<Vec<(usize, f64)>>,
    pub pattern: Option<PatternConfig>,
    pub shift_r: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatternConfig {
    pub j_cols: Vec<usize>,
    pub jprime_cols: Vec<usize>,
    #[serde(default = "default_threshold")]
    pub threshold: f64,
}

fn default_threshold() -> f64 {
    1.0
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LcdConfig {
    pub p: f64,
    pub delta0: Option<f64>,
    pub theta_max: Option<f64>,
    pub grid_step: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: Option<String>,
    pub prefix: Option<String>,
}

impl ConfigDocument {
    pub fn parse(text: &str) -> Result<ConfigDocument, CliError> {
        toml::from_str(text).map_err(|e| CliError::Validation(format!("config error: {e}")))
    }

    pub fn load(path: &std::path::Path) -> Result<ConfigDocument, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn ensemble_spec(&self) -> Result<EnsembleSpec, CliError> {
        let ec = self
            .ensemble
            .as_ref()
            .ok_or_else(|| CliError::Validation("config is missing [ensemble]".into()))?;
        ec.to_spec()
    }

    pub fn experiment_spec(&self) -> Result<ExperimentSpec, CliError> {
        let ensemble = self.ensemble_spec()?;
        let xc = self
            .experiment
            .as_ref()
            .ok_or_else(|| CliError::Validation("config is missing [experiment]".into()))?;
        let mut spec = ExperimentSpec::new(
            xc.name.clone(),
            ensemble,
            xc.trials,
            xc.master_seed,
            xc.statistic,
        );
        spec.condition_k = xc.condition_k;
        spec.eps_grid = xc.eps_grid.clone();
        spec.sweep = xc.sweep.clone();
        spec.shift_r = xc.shift_r;
        spec.pattern = xc.pattern.as_ref().map(|p| PatternParams {
            j_cols: p.j_cols.clone(),
            jprime_cols: p.jprime_cols.clone(),
            threshold: p.threshold,
        });
        spec.validate().map_err(CliError::from)?;
        Ok(spec)
    }

    pub fn lcd_params(&self) -> Result<Option<LcdParams>, CliError> {
        let Some(lc) = &self.lcd else { return Ok(None) };
        let mut params = LcdParams::for_sparsity(lc.p);
        if let Some(d) = lc.delta0 {
            params.delta0 = d;
        }
        if let Some(t) = lc.theta_max {
            params.theta_max = t;
        }
        if let Some(g) = lc.grid_step {
            params.grid_step = g;
        }
        params.validate().map_err(CliError::from)?;
        Ok(Some(params))
    }
}

impl EnsembleConfig {
    pub fn to_spec(&self) -> Result<EnsembleSpec, CliError> {
        if self.adjacency {
            if self.dist.is_some() {
                return Err(CliError::Validation(
                    "adjacency mode fixes the entry law; drop the dist key".into(),
                ));
            }
            let mut spec = EnsembleSpec::adjacency(self.n, self.p);
            if let Some(s) = &self.shift {
                spec = spec.with_shift(s.clone());
            }
            spec.validate().map_err(CliError::from)?;
            return Ok(spec);
        }

        let dist = match &self.dist {
            None => EntryDistribution::Rademacher,
            Some(d) => d.to_distribution()?,
        };
        let diagonal = match self.diagonal.as_deref() {
            None | Some("iid") => DiagonalPolicy::Iid,
            Some("zero") => DiagonalPolicy::Zero,
            Some(other) => {
                return Err(CliError::Validation(format!(
                    "diagonal must be \"iid\" or \"zero\", got \"{other}\""
                )))
            }
        };
        let mut spec = EnsembleSpec::new(self.n, self.p, dist, diagonal);
        if let Some(s) = &self.shift {
            spec = spec.with_shift(s.clone());
        }
        spec.validate().map_err(CliError::from)?;
        Ok(spec)
    }
}

impl DistConfig {
    pub fn to_distribution(&self) -> Result<EntryDistribution, CliError> {
        let (kind, rho, mu, value) = match self {
            DistConfig::Name(name) => (name.as_str(), None, None, None),
            DistConfig::Table(t) => (t.kind.as_str(), t.rho, t.mu, t.value),
        };
        let dist = match kind {
            "rademacher" => EntryDistribution::Rademacher,
            "gaussian" | "standard_gaussian" => EntryDistribution::StandardGaussian,
            "pareto" | "symmetric_pareto" => EntryDistribution::SymmetricPareto {
                rho: rho.ok_or_else(|| {
                    CliError::Validation("pareto needs a rho key (tail exponent > 2)".into())
                })?,
            },
            "bernoulli" | "shifted_bernoulli" => EntryDistribution::ShiftedBernoulli {
                mu: mu.ok_or_else(|| {
                    CliError::Validation("bernoulli needs a mu key (mean in (0,1))".into())
                })?,
            },
            "constant" => EntryDistribution::Constant {
                value: value.ok_or_else(|| {
                    CliError::Validation("constant needs a value key".into())
                })?,
            },
            other => {
                return Err(CliError::Validation(format!(
                    "unknown dist kind \"{other}\" (expected rademacher, gaussian, pareto, \
                     bernoulli, or constant)"
                )))
            }
        };
        dist.validate().map_err(CliError::from)?;
        Ok(dist)
    }
}
