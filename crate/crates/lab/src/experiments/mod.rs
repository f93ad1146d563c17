//! Registered experiments and the pieces they share.

use smallball_core::regression::RateFit;
use smallball_core::smalldev::{fit_rate, NormSampler, RatePrediction, SmallDevCurve};

use crate::config::{EpsConfig, ExperimentConfig};
use crate::error::{LabError, LabResult};
use crate::plot::{Line, PlotSpec};
use crate::report::{Check, FitRow};
use crate::runner::Context;
use crate::table::{Cell, Table};

mod entropy;
mod paths;

/// What an experiment hands back to the runner.
#[derive(Debug, Default)]
pub struct Outcome {
    pub fits: Vec<FitRow>,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
    pub plot: Option<PlotSpec>,
}

pub type RunFn = fn(&ExperimentConfig, &mut Context) -> LabResult<Outcome>;

pub struct Experiment {
    pub id: &'static str,
    pub description: &'static str,
    pub citation: &'static str,
    pub run: RunFn,
}

static REGISTRY: &[Experiment] = &[
    Experiment {
        id: "rl_smalldev",
        description: "Riemann-Liouville stable process in L_q: fitted small-deviation exponent against 1/H",
        citation: "Riemann-Liouville small deviations, -log P(||R^H||_q < eps) ~ c eps^(-1/H) for H > [1/alpha - 1/q]_+",
        run: paths::rl_smalldev,
    },
    Experiment {
        id: "weighted_levy",
        description: "weighted stable Levy motion in L_q: fitted exponent against alpha, weight norms reported",
        citation: "weighted Levy motion, eps^(-alpha) rate with constants between ||rho||_r and ||rho||_q",
        run: paths::weighted_levy,
    },
    Experiment {
        id: "sheet",
        description: "stable sheet on the unit cube in L_q: exponent alpha with an unresolved log factor",
        citation: "stable sheet, eps^(-alpha) log(1/eps)^theta with alpha(d-1) <= theta <= alpha(d-1/2)",
        run: paths::sheet,
    },
    Experiment {
        id: "sum_of_maxima",
        description: "sum of level maxima of a stable array: fitted exponent against the four-branch rate",
        citation: "sums of maxima with theta_n = 2^(-n/gamma) n^(-beta/gamma), subcritical and critical cases",
        run: paths::sum_of_maxima,
    },
    Experiment {
        id: "gap_case_a",
        description: "entropy gap of the random diagonal for sigma_k ~ 1/(k log^nu k): G_n/(log n)^(1/alpha) flatness",
        citation: "entropy gap of order (log n)^(1/alpha) for measures of type k^-1 (log k)^-nu",
        run: entropy::gap_case_a,
    },
    Experiment {
        id: "gap_case_b",
        description: "entropy gap of the random diagonal for sigma_k ~ k^-a log^-nu k: G_n boundedness",
        citation: "bounded entropy gap for measures of type k^-a (log k)^-nu, a > 1",
        run: entropy::gap_case_b,
    },
    Experiment {
        id: "gap_target",
        description: "measure built from a target gap d_k: lower bound lambda*_n >= c sigma_n^(1/alpha) d_n",
        citation: "prescribed entropy gap via sigma_k = c a_(k+1) exp(-A_k), lambda*_n >~ sigma_n^(1/alpha) d_n",
        run: entropy::gap_target,
    },
    Experiment {
        id: "ryznar_bound",
        description: "diagonal stable vector with alpha < 1, sup norm: fitted exponent below alpha/(1-alpha)",
        citation: "universal small-deviation bound alpha/(1-alpha) for stable vectors with alpha < 1 (Ryznar)",
        run: paths::ryznar_bound,
    },
    Experiment {
        id: "nm_counts",
        description: "number of distinct sites N_m among m draws: mean against E N_m, variance below E N_m",
        citation: "distinct-value counts N_m, P(G_k) = 1 - (1 - sigma_k)^m and Var(N_m) <= E N_m",
        run: entropy::nm_counts,
    },
    Experiment {
        id: "brownian_sup",
        description: "Brownian motion in sup norm: fitted exponent and constant against pi^2/8 eps^-2",
        citation: "classical Brownian sup-norm small deviations, -log P ~ (pi^2/8) eps^(-2)",
        run: paths::brownian_sup,
    },
    Experiment {
        id: "marginal_law",
        description: "one-dimensional marginals of the stable integrals: empirical characteristic function at t = 1",
        citation: "marginal law E exp(i lambda X(t)) = exp(-|lambda|^alpha ||K(t,.)||_alpha^alpha)",
        run: paths::marginal_law,
    },
    Experiment {
        id: "rearrangement",
        description: "decreasing rearrangement lambda*_k of the random diagonal: log-log slope against -a/alpha",
        citation: "lambda*_k ~ k^(-1/alpha) (log k)^(-(nu-1)/alpha) in case a, k^(-a/alpha) (log k)^(-nu/alpha) in case b",
        run: entropy::rearrangement,
    },
    Experiment {
        id: "interval_allocation",
        description: "disjoint intervals |A_n| = c d_n^-alpha / n and the resulting entropy-gap bound c^(-1/alpha) d_n",
        citation: "entropy gap of order at most d_n for diagonal operators into L_infinity on disjoint intervals",
        run: entropy::interval_allocation,
    },
];

/// All experiments in listing order.
pub fn registry() -> &'static [Experiment] {
    REGISTRY
}

pub fn find(id: &str) -> LabResult<&'static Experiment> {
    REGISTRY.iter().find(|e| e.id == id).ok_or_else(|| LabError::UnknownExperiment(id.into()))
}

/// Fewest Monte Carlo trials accepted for a curve.
pub const MIN_SAMPLES: u64 = 1000;

pub(crate) fn check_samples(n: u64) -> LabResult<()> {
    if n < MIN_SAMPLES {
        return Err(LabError::validation("params.n_samples", format!("need at least {MIN_SAMPLES} samples")));
    }
    Ok(())
}

pub(crate) fn positive(field: &str, v: f64) -> LabResult<()> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(LabError::validation(format!("params.{field}"), "must be positive and finite"));
    }
    Ok(())
}

/// One norm per trial, trial `i` on stream `spec.trial(i)`.
pub(crate) fn sample_norms<S: NormSampler + Sync>(ctx: &Context, sampler: &S, n: u64) -> Vec<f64> {
    let spec = ctx.spec;
    ctx.map(n, |i| sampler.sample_norm(&mut spec.trial(i).rng()))
}

pub const CURVE_FILE: &str = "curve.csv";

/// Samples, builds the curve on the resolved ε grid, writes it and fits it.
pub(crate) fn curve_and_fit<S: NormSampler + Sync>(
    ctx: &mut Context,
    sampler: &S,
    n: u64,
    eps: &EpsConfig,
    with_log_factor: bool,
) -> LabResult<(SmallDevCurve, Option<RateFit>, Vec<String>)> {
    check_samples(n)?;
    eps.validate()?;
    let norms = sample_norms(ctx, sampler, n);
    let grid = eps.resolve(&norms)?;
    let curve = SmallDevCurve::from_norms(&norms, &grid)?;
    let mut t = Table::new(&["eps", "hits", "n_samples", "probability", "neg_log_p", "stderr", "censored"]);
    for i in 0..curve.len() {
        t.push(vec![
            curve.eps[i].into(),
            curve.hits[i].into(),
            curve.n_samples.into(),
            curve.probability(i).into(),
            curve.neg_log_p(i).into(),
            curve.stderr(i).into(),
            Cell::Flag(curve.censored(i)),
        ]);
    }
    ctx.write_table(CURVE_FILE, &t)?;
    let mut notes = Vec::new();
    let censored = (0..curve.len()).filter(|&i| curve.censored(i)).count();
    if censored > 0 {
        notes.push(format!(
            "{censored} grid points had no hits; they only bound phi below by log n = {:.3}",
            curve.censoring_bound()
        ));
    }
    let fit = match fit_rate(&curve, with_log_factor) {
        Ok(f) => Some(f),
        Err(e @ smallball_core::Error::TooFewPoints { .. }) => {
            notes.push(format!("no fit: {e}"));
            None
        }
        Err(e) => return Err(e.into()),
    };
    Ok((curve, fit, notes))
}

/// `C ε^{-τ} log(1/ε)^θ` at `eps`.
pub(crate) fn fitted_phi(fit: &RateFit, eps: f64) -> f64 {
    let x = -eps.ln();
    let log = if fit.theta == 0.0 { 1.0 } else { x.powf(fit.theta) };
    fit.constant() * (1.0 / eps).powf(fit.tau) * log
}

/// Curve plot with the fitted law and a predicted-slope guide through the
/// middle fitted point.
pub(crate) fn curve_plot(
    title: &str,
    curve: &SmallDevCurve,
    fit: Option<&RateFit>,
    pred: Option<&RatePrediction>,
) -> PlotSpec {
    let idx = curve.fittable();
    let eps: Vec<f64> = idx.iter().map(|&i| curve.eps[i]).collect();
    let mut lines = Vec::new();
    if let (Some(f), false) = (fit, eps.is_empty()) {
        lines.push(Line {
            label: format!("fit: tau = {:.3}", f.tau),
            points: eps.iter().map(|&e| (e, fitted_phi(f, e))).collect(),
            dashed: false,
        });
    }
    if let (Some(p), false) = (pred, eps.is_empty()) {
        if p.tau.is_finite() {
            let mid = idx[idx.len() / 2];
            let (e0, y0) = (curve.eps[mid], curve.neg_log_p(mid).unwrap());
            lines.push(Line {
                label: format!("predicted slope {:.3}", p.tau),
                points: [eps[0], *eps.last().unwrap()].iter().map(|&e| (e, y0 * (e0 / e).powf(p.tau))).collect(),
                dashed: true,
            });
        }
    }
    PlotSpec {
        title: title.into(),
        csv: CURVE_FILE.into(),
        x: "eps".into(),
        y: "neg_log_p".into(),
        x_label: "eps".into(),
        y_label: "-log P(||X|| < eps)".into(),
        lines,
    }
}

/// Fit row compared with `pred`, or a failing check when nothing could be fitted.
pub(crate) fn compare_fit(
    out: &mut Outcome,
    label: &str,
    fit: Option<&RateFit>,
    with_log_factor: bool,
    pred: &RatePrediction,
    tol: f64,
) {
    match fit {
        Some(f) => out.fits.push(FitRow::new(label, f, with_log_factor).compare(pred, tol)),
        None => out.checks.push(Check::new("usable_points", 0.0, ">= 4 uncensored grid points", false).cite(pred.citation)),
    }
}
