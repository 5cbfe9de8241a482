use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use apc_core::control::ControlMode;
use apc_core::error::Error;
use apc_core::sim::{
    check_records, compute_metrics, run_scenario, simulate, step_test, write_records, write_sweep,
    Metrics, ScenarioConfig,
};

#[derive(Parser)]
#[command(name = "apc", version, about = "Wind-farm active power control simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write its log.
    Run {
        config: PathBuf,
        /// CSV destination; overrides `sim.output`.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Single-turbine demand step in both control modes and at each
    /// turbulence level.
    Steptest {
        config: PathBuf,
        #[arg(short, long, default_value = "steptest_out")]
        output_dir: PathBuf,
    },
    /// Case × seed sweep with per-run logs and a summary table.
    Sweep {
        config: PathBuf,
        /// Comma-separated case ids.
        #[arg(long, value_delimiter = ',')]
        cases: Option<Vec<u8>>,
        #[arg(long)]
        seeds: Option<usize>,
        /// Overrides `sweep.output_dir`.
        #[arg(short, long)]
        output_dir: Option<PathBuf>,
    },
    /// Run the scenario twice and scan the log for invariant violations.
    Validate { config: PathBuf },
}

fn print_metrics(label: &str, m: &Metrics) {
    println!(
        "{label}: mean power {:.4} MW, rms error {:.4} MW, samples {}",
        m.mean_power / 1e6,
        m.rms_error / 1e6,
        m.samples
    );
    let thrust: Vec<String> = m.mean_thrust.iter().map(|t| format!("{:.1}", t / 1e3)).collect();
    let duty: Vec<String> = m.saturation_duty.iter().map(|d| format!("{d:.3}")).collect();
    println!("  mean thrust [kN]: {}", thrust.join(", "));
    println!("  saturation duty: {}", duty.join(", "));
}

fn run(config: &Path, output: Option<PathBuf>) -> Result<(), Error> {
    let cfg = ScenarioConfig::load(config)?;
    let (records, metrics) = run_scenario(&cfg)?;
    print_metrics("run", &metrics);
    if let Some(path) = output.or_else(|| cfg.sim.output.clone()) {
        write_records(&records, &path)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn steptest(config: &Path, dir: &Path) -> Result<(), Error> {
    let cfg = ScenarioConfig::load(config)?;
    for mode in [ControlMode::ModeI, ControlMode::ModeII] {
        for &ti in &cfg.steptest.ti_levels {
            let records = step_test(&cfg, mode, ti)?;
            let tag = match mode {
                ControlMode::ModeI => "mode1",
                ControlMode::ModeII => "mode2",
            };
            let path = dir.join(format!("steptest_{tag}_ti{:02}.csv", (ti * 100.0).round() as u32));
            write_records(&records, &path)?;
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn sweep(
    config: &Path,
    cases: Option<Vec<u8>>,
    seeds: Option<usize>,
    dir: Option<PathBuf>,
) -> Result<(), Error> {
    let mut cfg = ScenarioConfig::load(config)?;
    if let Some(c) = cases {
        for &id in &c {
            cfg.clone().with_case(id).validate()?;
        }
        cfg.sweep.cases = c;
    }
    if let Some(s) = seeds {
        cfg.sweep.seeds = s;
    }
    let dir = dir.unwrap_or_else(|| cfg.sweep.output_dir.clone());
    let results = write_sweep(&cfg, &dir)?;
    println!("case  mean power [MW]  change [%]  rms error [MW]");
    for &case in &cfg.sweep.cases {
        let rs: Vec<_> = results.iter().filter(|r| r.job.case == case).collect();
        let n = rs.len() as f64;
        let mean = rs.iter().map(|r| r.metrics.mean_power).sum::<f64>() / n;
        let rms = rs.iter().map(|r| r.metrics.rms_error).sum::<f64>() / n;
        let change = rs
            .iter()
            .map(|r| r.metrics.percent_change)
            .sum::<Option<f64>>()
            .map_or("-".to_string(), |c| format!("{:+.2}", c / n));
        println!("{case:>4}  {:>15.4}  {change:>10}  {:>14.4}", mean / 1e6, rms / 1e6);
    }
    println!("wrote {} runs to {}", results.len(), dir.display());
    Ok(())
}

fn validate(config: &Path) -> Result<bool, Error> {
    let cfg = ScenarioConfig::load(config)?;
    let records = simulate(&cfg)?;
    let again = simulate(&cfg)?;
    let ctrl = &cfg.controller;
    let params = cfg.turbine.recalibrated(ctrl.k_greedy)?;
    let report = check_records(&records, &params, ctrl, cfg.sim.dt);
    for v in report.violations.iter().take(20) {
        println!("violation: {v}");
    }
    let deterministic = records == again;
    if !deterministic {
        println!("violation: repeated run produced a different log");
    }
    let metrics = compute_metrics(&records, None, cfg.sim.eval_start)?;
    print_metrics("validate", &metrics);
    println!(
        "{} steps checked, {} violations, deterministic: {deterministic}",
        report.steps,
        report.violations.len()
    );
    Ok(report.ok() && deterministic)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config, output } => run(&config, output).map(|_| true),
        Command::Steptest { config, output_dir } => steptest(&config, &output_dir).map(|_| true),
        Command::Sweep {
            config,
            cases,
            seeds,
            output_dir,
        } => sweep(&config, cases, seeds, output_dir).map(|_| true),
        Command::Validate { config } => validate(&config),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) if e.is_config() => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
