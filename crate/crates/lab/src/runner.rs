//! Worker pool, run context and the top-level `run_experiment`.

use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use smallball_core::RngSpec;

use crate::config::ExperimentConfig;
use crate::error::{LabError, LabResult};
use crate::experiments::{find, Outcome};
use crate::plot;
use crate::report::{Report, PLOT_FILE};
use crate::table::Table;

/// Trials per work unit.
pub const BLOCK: u64 = 512;

/// Everything an experiment needs besides its parameters.
pub struct Context {
    pub spec: RngSpec,
    pub workers: usize,
    pub out: PathBuf,
    pool: rayon::ThreadPool,
    artifacts: Vec<String>,
}

impl Context {
    pub fn new(master_seed: u64, workers: usize, out: &Path) -> LabResult<Self> {
        if workers == 0 {
            return Err(LabError::validation("workers", "must be at least 1"));
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| LabError::validation("workers", e.to_string()))?;
        std::fs::create_dir_all(out).map_err(|e| LabError::io(out, e))?;
        Ok(Self { spec: RngSpec::new(master_seed, 0), workers, out: out.to_path_buf(), pool, artifacts: Vec::new() })
    }

    /// `f(0), …, f(n-1)` evaluated in blocks on the pool, returned in index
    /// order. Results depend only on the index, never on scheduling.
    pub fn map<T, F>(&self, n: u64, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Sync + Send,
    {
        let blocks = n.div_ceil(BLOCK);
        let parts: Vec<Vec<T>> = self.pool.install(|| {
            (0..blocks).into_par_iter().map(|b| (b * BLOCK..((b + 1) * BLOCK).min(n)).map(&f).collect()).collect()
        });
        parts.into_iter().flatten().collect()
    }

    /// Like [`Context::map`] with scratch state built once per block.
    pub fn map_with<S, T, I, F>(&self, n: u64, init: I, f: F) -> Vec<T>
    where
        T: Send,
        I: Fn() -> S + Sync + Send,
        F: Fn(&mut S, u64) -> T + Sync + Send,
    {
        let blocks = n.div_ceil(BLOCK);
        let parts: Vec<Vec<T>> = self.pool.install(|| {
            (0..blocks)
                .into_par_iter()
                .map(|b| {
                    let mut s = init();
                    (b * BLOCK..((b + 1) * BLOCK).min(n)).map(|i| f(&mut s, i)).collect()
                })
                .collect()
        });
        parts.into_iter().flatten().collect()
    }

    /// Writes `table` as `name` in the output directory.
    pub fn write_table(&mut self, name: &str, table: &Table) -> LabResult<()> {
        table.write(&self.out.join(name))?;
        if !self.artifacts.iter().any(|a| a == name) {
            self.artifacts.push(name.to_string());
        }
        Ok(())
    }
}

/// Default output directory: `$SMALLBALL_OUT/<id>` or `./smallball-out/<id>`.
pub fn default_out_dir(experiment_id: &str) -> PathBuf {
    let base = std::env::var_os("SMALLBALL_OUT").map(PathBuf::from).unwrap_or_else(|| PathBuf::from("smallball-out"));
    base.join(experiment_id)
}

/// Runs a config end to end: experiment, CSVs, report and plot.
pub fn run_experiment(cfg: &ExperimentConfig, workers: Option<usize>, out: &Path) -> LabResult<Report> {
    let exp = find(&cfg.experiment_id)?;
    let workers = workers.or(cfg.workers).unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let mut ctx = Context::new(cfg.master_seed, workers, out)?;
    let start = Instant::now();
    let Outcome { fits, checks, notes, plot } = (exp.run)(cfg, &mut ctx)?;
    let mut artifacts = ctx.artifacts.clone();
    if let Some(p) = &plot {
        plot::write(p, out, PLOT_FILE)?;
        artifacts.push(PLOT_FILE.into());
    }
    let report = Report {
        experiment_id: exp.id.into(),
        description: exp.description.into(),
        citation: exp.citation.into(),
        master_seed: cfg.master_seed,
        workers,
        config: serde_json::to_value(cfg)?,
        passed: Report::all_pass(&fits, &checks),
        fits,
        checks,
        notes,
        artifacts,
        plot,
        wall_clock_seconds: start.elapsed().as_secs_f64(),
    };
    report.write(out)?;
    Ok(report)
}

/// Re-renders the plot of a finished run from its CSV and report.
pub fn rerender(dir: &Path) -> LabResult<PathBuf> {
    let report = Report::load(dir)?;
    let spec = report.plot.ok_or_else(|| LabError::validation("plot", "this run has no plot"))?;
    plot::write(&spec, dir, PLOT_FILE)?;
    Ok(dir.join(PLOT_FILE))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_is_ordered_and_worker_free() {
        let dir = tempfile::tempdir().unwrap();
        let one = Context::new(1, 1, dir.path()).unwrap();
        let four = Context::new(1, 4, dir.path()).unwrap();
        let f = |i: u64| RngSpec::new(5, 0).trial(i).master_seed ^ i;
        let a = one.map(2000, f);
        assert_eq!(a, four.map(2000, f));
        assert_eq!(a.len(), 2000);
        assert!(Context::new(1, 0, dir.path()).is_err());
    }
}
