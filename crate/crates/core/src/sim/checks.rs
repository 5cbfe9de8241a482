//! Invariant scan over a simulation log.

use std::fmt;

use super::records::StepRecord;
use crate::control::ControllerConfig;
use crate::turbine::{Mode, TurbineParams};

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub step: usize,
    pub turbine: Option<usize>,
    pub what: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.turbine {
            Some(i) => write!(f, "step {} turbine {}: {}", self.step, i + 1, self.what),
            None => write!(f, "step {}: {}", self.step, self.what),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CheckReport {
    pub steps: usize,
    pub violations: Vec<Violation>,
}

impl CheckReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

// Slack for rate limits: the limiter itself is exact, the comparison below is
// on differences of logged values.
const RATE_TOL: f64 = 1e-9;

/// Scan for power-identity, bookkeeping, actuator-limit and saturation
/// coherence violations.
pub fn check_records(
    records: &[StepRecord],
    params: &TurbineParams,
    cfg: &ControllerConfig,
    dt: f64,
) -> CheckReport {
    let mut report = CheckReport {
        steps: records.len(),
        violations: Vec::new(),
    };
    let mut flag = |step, turbine, what: String| {
        report.violations.push(Violation { step, turbine, what })
    };
    let torque_step = cfg.max_torque_rate * dt;
    let pitch_step = cfg.max_pitch_rate * dt;

    for (k, rec) in records.iter().enumerate() {
        let p_bar: f64 = rec.turbines.iter().map(|t| t.p_gen).sum();
        if p_bar != rec.p_bar {
            flag(k, None, format!("P_bar {} != sum of P_gen {}", rec.p_bar, p_bar));
        }
        if rec.e != rec.r - p_bar {
            flag(k, None, format!("e {} != r - sum P_gen {}", rec.e, rec.r - p_bar));
        }
        for (i, t) in rec.turbines.iter().enumerate() {
            let identity =
                t.tau_gen * t.omega_r * params.gearbox_ratio * params.generator_efficiency;
            if (identity - t.p_gen).abs() > 1e-12 * t.p_gen.abs().max(1.0) {
                flag(k, Some(i), format!("P_gen {} != tau·omega_gen·eta {}", t.p_gen, identity));
            }
            if t.saturated != (t.mode == Mode::GreedyFallback) {
                flag(k, Some(i), "saturation flag disagrees with control mode".into());
            }
            if t.pitch < cfg.theta_fine - RATE_TOL || t.pitch > cfg.theta_max + RATE_TOL {
                flag(k, Some(i), format!("pitch {} outside limits", t.pitch));
            }
            if t.omega_r < 0.0 {
                flag(k, Some(i), format!("negative rotor speed {}", t.omega_r));
            }
            if k > 0 {
                let prev = &records[k - 1].turbines[i];
                if (t.tau_gen - prev.tau_gen).abs() > torque_step * (1.0 + RATE_TOL) {
                    flag(k, Some(i), format!("torque step {}", t.tau_gen - prev.tau_gen));
                }
                if (t.pitch - prev.pitch).abs() > pitch_step * (1.0 + RATE_TOL) {
                    flag(k, Some(i), format!("pitch step {}", t.pitch - prev.pitch));
                }
            }
        }
    }
    report
}
