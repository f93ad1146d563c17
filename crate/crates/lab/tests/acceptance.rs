//! Acceptance criteria, one PASS/FAIL line each. Exits non-zero if any criterion
//! fails other than the known failures listed below.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use serde_json::Value;
use smallball::{run_experiment, ExperimentConfig, Report};
use smallball_core::stable::c_alpha;
use smallball_core::StableIndex;

/// `c_α` on `α = 0.1 + 0.09 i` from 40-digit quadrature of `∫ x^{-α} sin x dx`
/// and `E|ξ|^α`, computed before the build.
#[allow(clippy::approx_constant)]
const C_ALPHA_ORACLE: [(f64, f64); 20] = [
    (0.1, 1.467351724629034),
    (0.19, 1.4384108328868086),
    (0.28, 1.4086385740175746),
    (0.37, 1.3779605308883391),
    (0.46, 1.346290907985744),
    (0.55, 1.3135300142984478),
    (0.64, 1.2795609988487564),
    (0.73, 1.2442455530913175),
    (0.82, 1.207418157117658),
    (0.91, 1.1688782277757213),
    (1.0, 1.1283791670955126),
    (1.09, 1.08561269685246),
    (1.18, 1.0401857783461164),
    (1.27, 0.9915853932072924),
    (1.36, 0.9391224707016774),
    (1.45, 0.8818378037106392),
    (1.54, 0.8183332860731221),
    (1.63, 0.7464412773928865),
    (1.72, 0.6624920659100845),
    (1.81, 0.5593584398607901),
];

/// Criteria that fail at desk scale; analysed in the README. They still print
/// FAIL, and a pass is reported so the list can be pruned.
const KNOWN_FAILURES: [&str; 3] = ["A4", "A7", "A11"];

struct Env {
    configs: PathBuf,
    out: tempfile::TempDir,
}

impl Env {
    fn config(&self, name: &str) -> ExperimentConfig {
        ExperimentConfig::load(&self.configs.join(format!("{name}.json"))).expect("config loads")
    }

    /// Runs a shipped config; returns the report and the wall clock.
    fn run(&self, name: &str) -> Result<(Report, f64), String> {
        let cfg = self.config(name);
        let start = Instant::now();
        let r = run_experiment(&cfg, None, &self.out.path().join(name)).map_err(|e| format!("{name}: {e}"))?;
        Ok((r, start.elapsed().as_secs_f64()))
    }
}

/// Short account of a report: fits with predictions, then failing checks.
fn describe(r: &Report) -> String {
    let mut parts = Vec::new();
    for f in &r.fits {
        if let Some(p) = &f.prediction {
            let want = p.tau.map_or("inf".into(), |t| format!("{t:.4}"));
            let mark = if f.pass == Some(false) { " (fail)" } else { "" };
            parts.push(format!("{} tau={:.4} vs {} {}{mark}", f.label, f.tau, p.kind, want));
        }
    }
    if parts.len() > 3 {
        let failing = r.fits.iter().filter(|f| f.pass == Some(false)).count();
        parts = vec![format!("{} fits, {failing} outside tolerance", r.fits.len())];
    }
    let failed: Vec<String> = r.checks.iter().filter(|c| !c.pass).map(|c| format!("{}={:.4}", c.name, c.value)).collect();
    if !failed.is_empty() {
        parts.push(format!("failed checks: {}", failed.join(", ")));
    } else if !r.checks.is_empty() {
        parts.push(format!("{} checks ok", r.checks.len()));
    }
    parts.join("; ")
}

type Verdict = Result<(bool, String), String>;
type Criterion = (&'static str, &'static str, Box<dyn Fn(&Env) -> Verdict>);

fn within_budget(secs: f64, budget: f64) -> (bool, String) {
    (secs < budget, format!("{secs:.1} s of {budget:.0} s"))
}

fn single(env: &Env, name: &str, budget: Option<f64>) -> Verdict {
    let (r, secs) = env.run(name)?;
    let (fast, t) = budget.map_or((true, format!("{secs:.1} s")), |b| within_budget(secs, b));
    Ok((r.passed && fast, format!("{}; {t}", describe(&r))))
}

fn several(env: &Env, names: &[&str], budget: Option<f64>) -> Verdict {
    let mut ok = true;
    let mut text = Vec::new();
    let mut total = 0.0;
    for n in names {
        let (r, secs) = env.run(n)?;
        total += secs;
        ok &= r.passed;
        text.push(format!("{n}: {}", describe(&r)));
    }
    let (fast, t) = budget.map_or((true, format!("{total:.1} s")), |b| within_budget(total, b));
    Ok((ok && fast, format!("{}; {t}", text.join(" | "))))
}

fn a1(_: &Env) -> Verdict {
    let start = Instant::now();
    let c1 = c_alpha(StableIndex::new(1.0).unwrap()).map_err(|e| e.to_string())?;
    let err1 = (c1 - 2.0 / PI.sqrt()).abs();
    let mut worst: f64 = 0.0;
    for (a, want) in C_ALPHA_ORACLE {
        let c = c_alpha(StableIndex::new(a).unwrap()).map_err(|e| e.to_string())?;
        worst = worst.max((c / want - 1.0).abs());
    }
    let secs = start.elapsed().as_secs_f64();
    Ok((
        err1 < 1e-9 && worst < 1e-9 && secs < 1.0,
        format!("|c_1 - 2/sqrt(pi)| = {err1:.2e}, worst grid error {worst:.2e}; {secs:.3} s"),
    ))
}

fn a3(env: &Env) -> Verdict {
    let (r, secs) = env.run("brownian_sup")?;
    let fit = r.fit("phi").ok_or("no fit")?;
    let constant = r.check("constant").ok_or("no constant check")?;
    let tau_ok = (1.8..=2.2).contains(&fit.tau);
    let (fast, t) = within_budget(secs, 180.0);
    Ok((
        tau_ok && constant.pass && fast,
        format!("tau = {:.4} in [1.8, 2.2]: {tau_ok}; constant {:.4} vs pi^2/8 = {:.4}; {t}", fit.tau, constant.value, PI * PI / 8.0),
    ))
}

/// Shrinks a config to a few seconds of work for the replay comparison.
fn reduced(cfg: &ExperimentConfig) -> ExperimentConfig {
    let mut c = cfg.clone();
    if let Value::Object(p) = &mut c.params {
        let caps: [(&str, u64); 6] = [
            ("n_samples", 3000),
            ("paths", 3000),
            ("replications", 500),
            ("seeds", 2),
            ("points", 256),
            ("levels", 10),
        ];
        for (key, cap) in caps {
            if let Some(v) = p.get(key).and_then(Value::as_u64) {
                p.insert(key.into(), Value::from(v.min(cap)));
            }
        }
        if let Some(v) = p.get("min_pass").and_then(Value::as_u64) {
            let seeds = p.get("seeds").and_then(Value::as_u64).unwrap_or(v);
            p.insert("min_pass".into(), Value::from(v.min(seeds)));
        }
    }
    c
}

/// Report without the fields that legitimately differ between runs.
fn stable_report(dir: &Path) -> Result<Value, String> {
    let r = Report::load(dir).map_err(|e| e.to_string())?;
    let mut v = serde_json::to_value(r).map_err(|e| e.to_string())?;
    if let Value::Object(m) = &mut v {
        m.remove("wall_clock_seconds");
        m.remove("workers");
    }
    Ok(v)
}

const REPLAYED: [&str; 14] = [
    "marginal_law",
    "brownian_sup",
    "rl_smalldev",
    "weighted_levy",
    "rearrangement_case_b",
    "rearrangement_case_a",
    "nm_counts",
    "nm_counts_case_a",
    "gap_case_a",
    "gap_case_b",
    "gap_target",
    "sum_of_maxima",
    "ryznar_bound",
    "sheet",
];

fn a13(env: &Env) -> Verdict {
    let mut differing = Vec::new();
    let mut files = 0;
    for name in REPLAYED {
        let cfg = reduced(&env.config(name));
        let mut dirs = Vec::new();
        for workers in [1usize, 8] {
            let dir = env.out.path().join("replay").join(format!("{name}-{workers}"));
            let r = run_experiment(&cfg, Some(workers), &dir).map_err(|e| format!("{name} with {workers} workers: {e}"))?;
            dirs.push((dir, r.artifacts));
        }
        let (one, eight) = (&dirs[0], &dirs[1]);
        if one.1 != eight.1 {
            differing.push(format!("{name}: artifact lists"));
            continue;
        }
        for a in &one.1 {
            files += 1;
            let x = std::fs::read(one.0.join(a)).map_err(|e| e.to_string())?;
            let y = std::fs::read(eight.0.join(a)).map_err(|e| e.to_string())?;
            if x != y {
                differing.push(format!("{name}/{a}"));
            }
        }
        if stable_report(&one.0)? != stable_report(&eight.0)? {
            differing.push(format!("{name}/report.json"));
        }
    }
    Ok((
        differing.is_empty(),
        if differing.is_empty() {
            format!("{files} artifacts from {} configs identical under 1 and 8 workers", REPLAYED.len())
        } else {
            format!("differences: {}", differing.join(", "))
        },
    ))
}

fn main() -> ExitCode {
    let env = Env {
        configs: Path::new(env!("CARGO_MANIFEST_DIR")).join("configs"),
        out: tempfile::tempdir().expect("temp dir"),
    };
    let criteria: Vec<Criterion> = vec![
        ("A1", "c_alpha oracle", Box::new(a1)),
        ("A2", "marginal characteristic functions", Box::new(|e| single(e, "marginal_law", Some(120.0)))),
        ("A3", "Brownian sup-norm benchmark", Box::new(a3)),
        ("A4", "Riemann-Liouville exponent 1/H", Box::new(|e| single(e, "rl_smalldev", Some(300.0)))),
        ("A5", "weighted Levy exponent alpha", Box::new(|e| single(e, "weighted_levy", Some(180.0)))),
        ("A6", "rearrangement slope, case b", Box::new(|e| single(e, "rearrangement_case_b", Some(60.0)))),
        ("A7", "rearrangement slope and compensation, case a", Box::new(|e| single(e, "rearrangement_case_a", None))),
        ("A8", "N_m enumeration and variance bound", Box::new(|e| several(e, &["nm_counts", "nm_counts_case_a"], Some(120.0)))),
        ("A9", "entropy gap flatness, cases a and b", Box::new(|e| several(e, &["gap_case_a", "gap_case_b"], Some(60.0)))),
        ("A10", "prescribed gap lower bound", Box::new(|e| single(e, "gap_target", None))),
        ("A11", "sum of maxima, subcritical exponent", Box::new(|e| single(e, "sum_of_maxima", Some(300.0)))),
        ("A12", "Ryznar upper bound", Box::new(|e| single(e, "ryznar_bound", Some(180.0)))),
        ("A13", "worker-count determinism", Box::new(a13)),
    ];
    let (mut failed, mut unexpected) = (0, Vec::new());
    for (id, title, check) in &criteria {
        let (pass, detail) = match check(&env) {
            Ok(v) => v,
            Err(e) => (false, format!("error: {e}")),
        };
        let known = KNOWN_FAILURES.contains(id);
        let tag = match (pass, known) {
            (false, true) => " [known failure]",
            (true, true) => " [known failure now passes]",
            _ => "",
        };
        failed += usize::from(!pass);
        if !pass && !known {
            unexpected.push(*id);
        }
        println!("{id} {} {title}: {detail}{tag}", if pass { "PASS" } else { "FAIL" });
    }
    println!(
        "{} of {} criteria passed; unexpected failures: {}",
        criteria.len() - failed,
        criteria.len(),
        if unexpected.is_empty() { "none".to_string() } else { unexpected.join(", ") }
    );
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
