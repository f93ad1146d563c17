//! JSON experiment configs. Unknown keys anywhere are errors.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use smallball_core::process::{KernelSpec, NormSpec, Weight};
use smallball_core::smalldev::{geometric_grid, quantile_grid};
use smallball_core::StableIndex;

use crate::error::{LabError, LabResult};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment_id: String,
    pub master_seed: u64,
    #[serde(default)]
    pub workers: Option<usize>,
    #[serde(default = "empty_object")]
    pub params: Value,
}

fn empty_object() -> Value {
    Value::Object(Default::default())
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> LabResult<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let field = if path == "." { "config".to_string() } else { path };
            LabError::validation(field, e.into_inner().to_string())
        })
    }

    pub fn load(path: &Path) -> LabResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
        Self::from_json(&text)
    }

    /// Typed view of `params`; errors name the offending key as `params.<key>`.
    pub fn params<T: DeserializeOwned>(&self) -> LabResult<T> {
        serde_path_to_error::deserialize(&self.params).map_err(|e| {
            let path = e.path().to_string();
            let field = if path == "." { "params".to_string() } else { format!("params.{path}") };
            LabError::validation(field, e.into_inner().to_string())
        })
    }
}

pub fn stable_index(alpha: f64) -> LabResult<StableIndex> {
    StableIndex::new(alpha).map_err(LabError::from)
}

/// Norm on the sample paths: `"sup"` or `{"lq": q}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum NormConfig {
    Sup,
    Lq(f64),
}

impl NormConfig {
    pub fn spec(self) -> LabResult<NormSpec> {
        match self {
            NormConfig::Sup => Ok(NormSpec::Sup),
            NormConfig::Lq(q) => NormSpec::lq(q).map_err(|e| match e {
                smallball_core::Error::Invalid { reason, .. } => LabError::validation("params.norm.lq", reason),
                e => e.into(),
            }),
        }
    }

    /// `q`, infinite for the sup norm.
    pub fn exponent(self) -> f64 {
        match self {
            NormConfig::Sup => f64::INFINITY,
            NormConfig::Lq(q) => q,
        }
    }
}

/// ε grid: explicit values, a geometric sequence, or empirical quantiles of
/// the sampled norms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum EpsConfig {
    Values(Vec<f64>),
    Geometric { start: f64, stop: f64, ratio: f64 },
    Quantiles {
        #[serde(default = "default_ratio")]
        ratio: f64,
        #[serde(default = "default_p_high")]
        p_high: f64,
        #[serde(default = "default_p_low")]
        p_low: f64,
    },
}

fn default_ratio() -> f64 {
    0.8
}
fn default_p_high() -> f64 {
    0.5
}
fn default_p_low() -> f64 {
    1e-4
}

impl Default for EpsConfig {
    fn default() -> Self {
        EpsConfig::Quantiles { ratio: default_ratio(), p_high: default_p_high(), p_low: default_p_low() }
    }
}

/// Fewest hits the quantile rule aims for at the smallest ε.
const MIN_HITS: f64 = 20.0;

impl EpsConfig {
    /// Checks what can be checked before sampling.
    pub fn validate(&self) -> LabResult<()> {
        match self {
            EpsConfig::Values(v) => smallball_core::smalldev::check_eps_grid(v).map_err(|e| eps_error(e, "values")),
            EpsConfig::Geometric { start, stop, ratio } => {
                geometric_grid(*start, *stop, *ratio).map(|_| ()).map_err(|e| eps_error(e, "geometric"))
            }
            EpsConfig::Quantiles { ratio, p_high, p_low } => {
                if !(*ratio > 0.0 && *ratio < 1.0) {
                    return Err(LabError::validation("params.eps.quantiles.ratio", "must lie in (0, 1)"));
                }
                if !(0.0 < *p_low && p_low < p_high && *p_high < 1.0) {
                    return Err(LabError::validation("params.eps.quantiles", "need 0 < p_low < p_high < 1"));
                }
                Ok(())
            }
        }
    }

    /// The grid for a run whose sampled norms are `norms`. The quantile rule
    /// raises `p_low` so the smallest ε still expects `MIN_HITS` hits.
    pub fn resolve(&self, norms: &[f64]) -> LabResult<Vec<f64>> {
        match self {
            EpsConfig::Values(v) => Ok(v.clone()),
            EpsConfig::Geometric { start, stop, ratio } => {
                geometric_grid(*start, *stop, *ratio).map_err(|e| eps_error(e, "geometric"))
            }
            EpsConfig::Quantiles { ratio, p_high, p_low } => {
                let floor = (MIN_HITS / norms.len() as f64).max(*p_low);
                if floor >= *p_high {
                    return Err(LabError::validation("params.n_samples", "too few samples for the quantile grid"));
                }
                quantile_grid(norms, *ratio, *p_high, floor).map_err(|e| eps_error(e, "quantiles"))
            }
        }
    }
}

fn eps_error(e: smallball_core::Error, kind: &str) -> LabError {
    match e {
        smallball_core::Error::Invalid { reason, .. } => LabError::validation(format!("params.eps.{kind}"), reason),
        e => e.into(),
    }
}

/// Process kernel as written in configs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum KernelConfig {
    RiemannLiouville { hurst: f64 },
    LevyMotion,
    WeightedLevy { weight: WeightConfig },
    Sheet { dim: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum WeightConfig {
    Constant(f64),
    Power(f64),
    Values(Vec<f64>),
}

impl WeightConfig {
    pub fn weight(&self) -> Weight {
        match self {
            WeightConfig::Constant(c) => Weight::Constant(*c),
            WeightConfig::Power(e) => Weight::Power { exponent: *e },
            WeightConfig::Values(v) => Weight::Values(v.clone()),
        }
    }
}

impl KernelConfig {
    pub fn spec(&self) -> KernelSpec {
        match self {
            KernelConfig::RiemannLiouville { hurst } => KernelSpec::RiemannLiouville { hurst: *hurst },
            KernelConfig::LevyMotion => KernelSpec::LevyMotion,
            KernelConfig::WeightedLevy { weight } => KernelSpec::WeightedLevy { weight: weight.weight() },
            KernelConfig::Sheet { dim } => KernelSpec::Sheet { dim: *dim },
        }
    }
}

/// Path sampler: exact cell increments or the conditionally Gaussian series.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SamplerConfig {
    #[default]
    Increments,
    Lepage { terms: usize },
}
