//! Case × seed sweeps. Every job is an independent scenario, so they run in
//! parallel when the `parallel` feature is on. Outputs do not depend on the
//! execution order.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::checks::check_records;
use super::config::ScenarioConfig;
use super::metrics::{compute_metrics, Metrics};
use super::records::write_records;
use super::simulate;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SweepJob {
    pub case: u8,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub job: SweepJob,
    pub metrics: Metrics,
    /// Invariant violations found in the run's log.
    pub violations: usize,
}

impl SweepJob {
    pub fn config(&self, base: &ScenarioConfig) -> ScenarioConfig {
        base.clone().with_case(self.case).with_seed(self.seed)
    }

    pub fn file_name(&self) -> String {
        format!("case{}_seed{}.csv", self.case, self.seed)
    }
}

/// Jobs for every case in `cfg.sweep.cases` and every seed in
/// `first_seed..first_seed + seeds`.
pub fn jobs(cfg: &ScenarioConfig) -> Vec<SweepJob> {
    let s = &cfg.sweep;
    s.cases
        .iter()
        .flat_map(|&case| (0..s.seeds as u64).map(move |k| SweepJob { case, seed: s.first_seed + k }))
        .collect()
}

fn run_job(base: &ScenarioConfig, job: SweepJob, out_dir: Option<&Path>) -> Result<SweepResult> {
    let cfg = job.config(base);
    let records = simulate(&cfg)?;
    if let Some(dir) = out_dir {
        write_records(&records, dir.join(job.file_name()))?;
    }
    let metrics = compute_metrics(&records, None, cfg.sim.eval_start)?;
    let params = cfg.turbine.recalibrated(cfg.controller.k_greedy)?;
    let violations = check_records(&records, &params, &cfg.controller, cfg.sim.dt)
        .violations
        .len();
    Ok(SweepResult {
        job,
        metrics,
        violations,
    })
}

/// Fill `percent_change` against case 0 of the same seed, when present.
fn attach_baselines(results: &mut [SweepResult]) {
    let baselines: Vec<(u64, f64)> = results
        .iter()
        .filter(|r| r.job.case == 0)
        .map(|r| (r.job.seed, r.metrics.mean_power))
        .collect();
    for r in results.iter_mut() {
        if let Some(&(_, base)) = baselines.iter().find(|(s, _)| *s == r.job.seed) {
            r.metrics.percent_change = Some(100.0 * (r.metrics.mean_power - base) / base);
        }
    }
}

pub fn run_many_sequential(
    base: &ScenarioConfig,
    jobs: &[SweepJob],
    out_dir: Option<&Path>,
) -> Result<Vec<SweepResult>> {
    let mut results = jobs
        .iter()
        .map(|&j| run_job(base, j, out_dir))
        .collect::<Result<Vec<_>>>()?;
    attach_baselines(&mut results);
    Ok(results)
}

#[cfg(feature = "parallel")]
pub fn run_many(
    base: &ScenarioConfig,
    jobs: &[SweepJob],
    out_dir: Option<&Path>,
) -> Result<Vec<SweepResult>> {
    use rayon::prelude::*;
    let mut results = jobs
        .par_iter()
        .map(|&j| run_job(base, j, out_dir))
        .collect::<Result<Vec<_>>>()?;
    attach_baselines(&mut results);
    Ok(results)
}

#[cfg(not(feature = "parallel"))]
pub fn run_many(
    base: &ScenarioConfig,
    jobs: &[SweepJob],
    out_dir: Option<&Path>,
) -> Result<Vec<SweepResult>> {
    run_many_sequential(base, jobs, out_dir)
}

pub fn summary_csv(results: &[SweepResult]) -> String {
    let n = results.first().map_or(0, |r| r.metrics.mean_thrust.len());
    let mut out = String::from("case,seed,mean_power,percent_change,rms_error");
    for i in 1..=n {
        write!(out, ",mean_thrust_{i}").unwrap();
    }
    for i in 1..=n {
        write!(out, ",sat_duty_{i}").unwrap();
    }
    out.push_str(",violations\n");
    for r in results {
        let m = &r.metrics;
        write!(out, "{},{},{:.8e},", r.job.case, r.job.seed, m.mean_power).unwrap();
        if let Some(p) = m.percent_change {
            write!(out, "{p:.8e}").unwrap();
        }
        write!(out, ",{:.8e}", m.rms_error).unwrap();
        for v in m.mean_thrust.iter().chain(&m.saturation_duty) {
            write!(out, ",{v:.8e}").unwrap();
        }
        writeln!(out, ",{}", r.violations).unwrap();
    }
    out
}

/// Run the sweep described by `cfg.sweep`, writing one CSV per job plus
/// `summary.csv` into `out_dir`.
pub fn write_sweep(cfg: &ScenarioConfig, out_dir: &Path) -> Result<Vec<SweepResult>> {
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let results = run_many(cfg, &jobs(cfg), Some(out_dir))?;
    let path = out_dir.join("summary.csv");
    fs::write(&path, summary_csv(&results)).map_err(|e| Error::io(&path, e))?;
    Ok(results)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn short() -> ScenarioConfig {
        let mut cfg = ScenarioConfig::default();
        cfg.sim.duration = 20.0;
        cfg.sim.eval_start = 10.0;
        cfg.flow.ti = 0.05;
        cfg.sweep.cases = vec![0, 1];
        cfg.sweep.seeds = 2;
        cfg
    }

    #[test]
    fn job_grid() {
        let j = jobs(&short());
        assert_eq!(j.len(), 4);
        assert_eq!(j[3], SweepJob { case: 1, seed: 2 });
        assert_eq!(j[0].file_name(), "case0_seed1.csv");
    }

    #[test]
    fn parallel_matches_sequential() {
        let cfg = short();
        let j = jobs(&cfg);
        let a = run_many(&cfg, &j, None).unwrap();
        let b = run_many_sequential(&cfg, &j, None).unwrap();
        assert_eq!(a, b);
        assert_eq!(a[0].metrics.percent_change, Some(0.0));
        assert!(a.iter().all(|r| r.violations == 0));
        assert_eq!(summary_csv(&a), summary_csv(&b));
    }
}
