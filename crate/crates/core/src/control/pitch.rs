//! Gain-scheduled collective pitch PID acting on low-pass-filtered
//! generator speed.
//!
//! Convention: the speed error is the generator speed in rad/s and the
//! output is pitch in degrees, so a proportional gain of 1.41 turns a
//! 1 rad/s overspeed into 1.41 deg of pitch.

use std::f64::consts::PI;

use super::config::ControllerConfig;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PitchPidState {
    /// deg, kept inside `[theta_fine, theta_max]`.
    pub integral: f64,
    /// rad/s
    pub filtered_speed: f64,
    /// deg
    pub prev_pitch: f64,
    /// N·m
    pub prev_torque: f64,
    /// rad/s, for the derivative term.
    pub prev_error: f64,
}

impl PitchPidState {
    /// Bumpless start at a given operating point.
    pub fn at(pitch: f64, gen_speed: f64, gen_torque: f64) -> Self {
        Self {
            integral: pitch,
            filtered_speed: gen_speed,
            prev_pitch: pitch,
            prev_torque: gen_torque,
            prev_error: 0.0,
        }
    }
}

/// Exact discretisation of a first-order low-pass with corner `corner_hz`.
pub fn lowpass_alpha(corner_hz: f64, dt: f64) -> f64 {
    1.0 - (-2.0 * PI * corner_hz * dt).exp()
}

pub fn rate_limit(prev: f64, target: f64, max_step: f64) -> f64 {
    prev + (target - prev).clamp(-max_step, max_step)
}

/// One controller sample. Returns the pitch command (deg) and the updated
/// state; `prev_torque` is left untouched.
pub fn pitch_pid_step(
    pid: &PitchPidState,
    omega_ref: f64,
    omega_meas: f64,
    dt: f64,
    cfg: &ControllerConfig,
) -> (f64, PitchPidState) {
    let mut next = *pid;
    let alpha = lowpass_alpha(cfg.lpf_corner, dt);
    next.filtered_speed = pid.filtered_speed + alpha * (omega_meas - pid.filtered_speed);

    let error = next.filtered_speed - omega_ref;
    let (kp, ki) = cfg.scheduled_gains(pid.prev_pitch);
    next.integral = (pid.integral + ki * error * dt).clamp(cfg.theta_fine, cfg.theta_max);
    let derivative = cfg.pid_kd * (error - pid.prev_error) / dt;
    let raw = (kp * error + next.integral + derivative).clamp(cfg.theta_fine, cfg.theta_max);

    let cmd = rate_limit(pid.prev_pitch, raw, cfg.max_pitch_rate * dt);
    next.prev_pitch = cmd;
    next.prev_error = error;
    (cmd, next)
}
