use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::turbine::K_GREEDY;

pub fn rpm_to_rad(rpm: f64) -> f64 {
    rpm * std::f64::consts::PI / 30.0
}

/// Per-turbine controller parameters. Speeds are generator-side and given in
/// rpm, as in the usual controller tables; use the `*_rad` accessors inside
/// the control laws.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ControllerConfig {
    /// N·m/(rad/s)²
    pub k_greedy: f64,
    /// rpm
    pub omega_cut_in: f64,
    /// rpm
    pub omega_r15_to_2: f64,
    /// rpm
    pub omega_r2_to_25: f64,
    /// %
    pub slip_pct: f64,
    /// rpm
    pub omega_rated: f64,
    /// % of rated generator speed
    pub region3_entry_pct: f64,
    /// W
    pub rated_power: f64,
    pub generator_efficiency: f64,
    /// N·m/s
    pub max_torque_rate: f64,
    /// deg/s
    pub max_pitch_rate: f64,
    /// deg
    pub theta_fine: f64,
    /// deg
    pub theta_switch: f64,
    /// deg
    pub theta_max: f64,
    /// Hz
    pub lpf_corner: f64,
    /// [gain at the far end of the schedule, gain at fine pitch], s
    pub pid_kp_range: [f64; 2],
    /// [gain at the far end of the schedule, gain at fine pitch], s
    pub pid_ki_range: [f64; 2],
    /// s
    pub pid_kd: f64,
    /// Pitch (deg) where the gain schedule reaches its low end.
    pub schedule_pitch_end: f64,
    /// Leave greedy fallback once P_greedy exceeds this multiple of P_dem ...
    pub fallback_exit_ratio: f64,
    /// ... continuously for this long (s).
    pub fallback_dwell: f64,
    /// Generator speed guard (rad/s) below which tracking torque is undefined.
    pub min_gen_speed: f64,
}

impl Default for ControllerConfig {
    fn default() -> Self {
        Self {
            k_greedy: K_GREEDY,
            omega_cut_in: 200.0,
            omega_r15_to_2: 300.0,
            omega_r2_to_25: 405.0,
            slip_pct: 10.0,
            omega_rated: 445.67,
            region3_entry_pct: 95.0,
            rated_power: 10.0e6,
            generator_efficiency: 1.0,
            max_torque_rate: 15_000.0,
            max_pitch_rate: 10.0,
            theta_fine: 0.75,
            theta_switch: 1.0,
            theta_max: 45.0,
            lpf_corner: 0.1798,
            pid_kp_range: [0.039, 1.41],
            pid_ki_range: [0.067, 0.28],
            pid_kd: 0.0,
            schedule_pitch_end: 25.0,
            fallback_exit_ratio: 1.02,
            fallback_dwell: 0.5,
            // 0.1 rad/s rotor guard through a 50:1 gearbox.
            min_gen_speed: 5.0,
        }
    }
}

impl ControllerConfig {
    pub fn omega_cut_in_rad(&self) -> f64 {
        rpm_to_rad(self.omega_cut_in)
    }

    pub fn omega_r15_to_2_rad(&self) -> f64 {
        rpm_to_rad(self.omega_r15_to_2)
    }

    pub fn omega_r2_to_25_rad(&self) -> f64 {
        rpm_to_rad(self.omega_r2_to_25)
    }

    pub fn omega_rated_rad(&self) -> f64 {
        rpm_to_rad(self.omega_rated)
    }

    pub fn region3_entry_rad(&self) -> f64 {
        self.omega_rated_rad() * self.region3_entry_pct / 100.0
    }

    /// Proportional and integral gains scheduled linearly on pitch.
    pub fn scheduled_gains(&self, pitch: f64) -> (f64, f64) {
        let span = self.schedule_pitch_end - self.theta_fine;
        let t = ((pitch - self.theta_fine) / span).clamp(0.0, 1.0);
        let [kp_lo, kp_hi] = self.pid_kp_range;
        let [ki_lo, ki_hi] = self.pid_ki_range;
        (kp_hi + t * (kp_lo - kp_hi), ki_hi + t * (ki_lo - ki_hi))
    }

    pub fn validate(&self) -> Result<()> {
        let region3 = self.omega_rated * self.region3_entry_pct / 100.0;
        let slip_ceiling = self.omega_rated * (1.0 + self.slip_pct / 100.0);
        let mut problems = Vec::new();
        if !(0.0 < self.omega_cut_in
            && self.omega_cut_in < self.omega_r15_to_2
            && self.omega_r15_to_2 < self.omega_r2_to_25
            && self.omega_r2_to_25 < region3
            && region3 < slip_ceiling)
        {
            problems.push("generator speed breakpoints must increase strictly");
        }
        if !(self.k_greedy > 0.0 && self.rated_power > 0.0) {
            problems.push("k_greedy and rated_power must be positive");
        }
        if !(self.generator_efficiency > 0.0 && self.generator_efficiency <= 1.0) {
            problems.push("generator_efficiency must lie in (0, 1]");
        }
        if !(self.max_torque_rate > 0.0 && self.max_pitch_rate > 0.0 && self.lpf_corner > 0.0) {
            problems.push("rate limits and filter corner must be positive");
        }
        let gains = self.pid_kp_range.iter().chain(&self.pid_ki_range);
        if gains.into_iter().any(|&g| g <= 0.0) || self.pid_kd < 0.0 {
            problems.push("PID gains must be positive (kd non-negative)");
        }
        if !(self.theta_fine < self.theta_switch
            && self.theta_switch < self.theta_max
            && self.theta_fine < self.schedule_pitch_end)
        {
            problems.push("pitch limits must satisfy fine < switch < max");
        }
        if !(self.fallback_exit_ratio >= 1.0 && self.fallback_dwell >= 0.0 && self.min_gen_speed > 0.0) {
            problems.push("fallback hysteresis and speed guard out of range");
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(problems.join("; ")))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        ControllerConfig::default().validate().unwrap();
    }

    #[test]
    fn schedule_endpoints() {
        let c = ControllerConfig::default();
        assert_eq!(c.scheduled_gains(0.75), (1.41, 0.28));
        let (kp, ki) = c.scheduled_gains(25.0);
        assert!((kp - 0.039).abs() < 1e-15 && (ki - 0.067).abs() < 1e-15);
        assert_eq!(c.scheduled_gains(40.0), c.scheduled_gains(25.0));
        let (kp_mid, _) = c.scheduled_gains(12.875);
        assert!((kp_mid - 0.5 * (1.41 + 0.039)).abs() < 1e-12);
    }

    #[test]
    fn misordered_breakpoints_rejected() {
        let c = ControllerConfig {
            omega_r2_to_25: 290.0,
            ..Default::default()
        };
        assert!(c.validate().is_err());
    }
}
