//! Run reports: fitted exponents next to their predictions, and named checks.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use smallball_core::regression::RateFit;
use smallball_core::smalldev::{Bound, RatePrediction, ThetaPrediction};

use crate::error::{LabError, LabResult};
use crate::plot::PlotSpec;

pub const REPORT_FILE: &str = "report.json";
pub const PLOT_FILE: &str = "plot.svg";

/// JSON writes NaN as `null`; these read it back.
mod nan {
    use serde::{Deserialize, Deserializer};

    pub fn f64<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
    }

    pub fn pair<'de, D: Deserializer<'de>>(d: D) -> Result<(f64, f64), D::Error> {
        let (a, b) = <(Option<f64>, Option<f64>)>::deserialize(d)?;
        Ok((a.unwrap_or(f64::NAN), b.unwrap_or(f64::NAN)))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    /// `null` when the predicted cost is infinite.
    pub tau: Option<f64>,
    pub theta: Option<f64>,
    pub theta_interval: Option<(f64, f64)>,
    pub kind: String,
    pub constant: Option<f64>,
    pub citation: String,
}

impl From<&RatePrediction> for Prediction {
    fn from(p: &RatePrediction) -> Self {
        let (theta, theta_interval) = match p.theta {
            ThetaPrediction::Exact(t) => (Some(t), None),
            ThetaPrediction::Interval { lower, upper } => (None, Some((lower, upper))),
        };
        Self {
            tau: p.tau.is_finite().then_some(p.tau),
            theta,
            theta_interval,
            kind: match p.kind {
                Bound::TwoSided => "two-sided",
                Bound::Upper => "upper-bound",
                Bound::Lower => "lower-bound",
            }
            .into(),
            constant: p.constant,
            citation: p.citation.into(),
        }
    }
}

/// A fitted rate, optionally compared with a prediction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitRow {
    pub label: String,
    #[serde(deserialize_with = "nan::f64")]
    pub tau: f64,
    #[serde(deserialize_with = "nan::pair")]
    pub tau_ci: (f64, f64),
    pub theta: Option<f64>,
    pub theta_ci: Option<(f64, f64)>,
    #[serde(deserialize_with = "nan::f64")]
    pub constant: f64,
    #[serde(deserialize_with = "nan::f64")]
    pub residual_rms: f64,
    pub n_points: usize,
    pub prediction: Option<Prediction>,
    /// Tolerance on `tau` used for `pass`: relative for small-deviation
    /// rates, absolute for sequence slopes.
    pub tolerance: Option<f64>,
    pub pass: Option<bool>,
}

impl FitRow {
    pub fn new(label: &str, fit: &RateFit, with_log_factor: bool) -> Self {
        Self {
            label: label.into(),
            tau: fit.tau,
            tau_ci: fit.tau_ci,
            theta: with_log_factor.then_some(fit.theta),
            theta_ci: fit.theta_ci,
            constant: fit.constant(),
            residual_rms: fit.residual_rms,
            n_points: fit.n_points,
            prediction: None,
            tolerance: None,
            pass: None,
        }
    }

    /// Compares `tau` with the prediction at relative tolerance `tol`:
    /// two-sided within `±tol`, an upper bound up to `1 + tol` times it.
    pub fn compare(mut self, pred: &RatePrediction, tol: f64) -> Self {
        let pass = if !pred.tau.is_finite() {
            false
        } else {
            match pred.kind {
                Bound::TwoSided => (self.tau / pred.tau - 1.0).abs() <= tol,
                Bound::Upper => self.tau <= pred.tau * (1.0 + tol),
                Bound::Lower => self.tau >= pred.tau * (1.0 - tol),
            }
        };
        self.prediction = Some(pred.into());
        self.tolerance = Some(tol);
        self.pass = Some(pass);
        self
    }
}

/// A named numerical check with its bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    #[serde(deserialize_with = "nan::f64")]
    pub value: f64,
    pub bound: String,
    pub pass: bool,
    pub citation: Option<String>,
}

impl Check {
    pub fn new(name: &str, value: f64, bound: impl Into<String>, pass: bool) -> Self {
        Self { name: name.into(), value, bound: bound.into(), pass, citation: None }
    }

    pub fn cite(mut self, citation: &str) -> Self {
        self.citation = Some(citation.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub experiment_id: String,
    pub description: String,
    pub citation: String,
    pub master_seed: u64,
    pub workers: usize,
    pub config: Value,
    pub fits: Vec<FitRow>,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
    /// Files written next to the report.
    pub artifacts: Vec<String>,
    pub plot: Option<PlotSpec>,
    pub passed: bool,
    pub wall_clock_seconds: f64,
}

impl Report {
    /// Every comparison passed (fits without a prediction do not count).
    pub fn all_pass(fits: &[FitRow], checks: &[Check]) -> bool {
        fits.iter().all(|f| f.pass != Some(false)) && checks.iter().all(|c| c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn fit(&self, label: &str) -> Option<&FitRow> {
        self.fits.iter().find(|f| f.label == label)
    }

    pub fn write(&self, dir: &Path) -> LabResult<()> {
        let path = dir.join(REPORT_FILE);
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(&path, text + "\n").map_err(|e| LabError::io(path, e))
    }

    pub fn load(dir: &Path) -> LabResult<Self> {
        let path = dir.join(REPORT_FILE);
        let text = std::fs::read_to_string(&path).map_err(|e| LabError::io(&path, e))?;
        Ok(serde_json::from_str(&text)?)
    }

    /// Human summary, one line per fit and check.
    pub fn summary(&self) -> String {
        let mut s = format!("{} ({}): {}\n", self.experiment_id, self.citation, if self.passed { "PASS" } else { "FAIL" });
        for f in &self.fits {
            s += &format!("  fit {}: tau = {:.4} [{:.4}, {:.4}]", f.label, f.tau, f.tau_ci.0, f.tau_ci.1);
            if let Some(t) = f.theta {
                s += &format!(", theta = {t:.4}");
            }
            if let Some(p) = &f.prediction {
                let tau = p.tau.map_or("inf".to_string(), |t| format!("{t:.4}"));
                s += &format!("; predicted {} tau = {tau}", p.kind);
            }
            if let Some(pass) = f.pass {
                s += if pass { " PASS" } else { " FAIL" };
            }
            s.push('\n');
        }
        for c in &self.checks {
            s += &format!("  check {}: {:.6} ({}) {}\n", c.name, c.value, c.bound, if c.pass { "PASS" } else { "FAIL" });
        }
        for n in &self.notes {
            s += &format!("  note: {n}\n");
        }
        s
    }
}
