//! Per-turbine power-tracking control.
//!
//! Two torque strategies are available. [`ControlMode::ModeI`] always applies
//! the tracking law `τ = P_dem/(ω_gen·η)`. [`ControlMode::ModeII`] applies
//! `min(τ_greedy, τ_tracking)` and falls back to pure greedy operation when
//! the turbine cannot meet its demand. Both modes regulate rotor speed to the
//! demand-dependent reference from [`SetpointTable`] with the pitch PID.

mod config;
mod greedy;
mod greedy_power;
mod pitch;
mod setpoint;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use config::{rpm_to_rad, ControllerConfig};
pub use greedy::{GreedyCurve, Region};
pub use greedy_power::{greedy_equilibrium, GreedyPowerMap};
pub use pitch::{lowpass_alpha, pitch_pid_step, rate_limit, PitchPidState};
pub use setpoint::{SetpointTable, GRID_POINTS};

use crate::error::{Error, Result};
use crate::turbine::Mode;

pub fn greedy_torque(omega_gen: f64, curve: &GreedyCurve) -> f64 {
    curve.torque(omega_gen)
}

/// Torque that converts the current generator speed into exactly `p_dem`.
pub fn tracking_torque(p_dem: f64, omega_gen: f64, cfg: &ControllerConfig) -> Result<f64> {
    if omega_gen <= cfg.min_gen_speed {
        return Err(Error::RotorStopped {
            speed: omega_gen,
            guard: cfg.min_gen_speed,
        });
    }
    Ok(p_dem / (omega_gen * cfg.generator_efficiency))
}

/// `min(greedy, tracking)`: tracks the demand but never loads the rotor more
/// than the greedy curve would.
pub fn combined_torque(
    p_dem: f64,
    omega_gen: f64,
    curve: &GreedyCurve,
    cfg: &ControllerConfig,
) -> Result<f64> {
    let tracking = tracking_torque(p_dem, omega_gen, cfg)?;
    Ok(tracking.min(curve.torque(omega_gen)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum ControlMode {
    /// Forced power reference tracking.
    #[serde(rename = "mode1", alias = "ModeI")]
    ModeI,
    /// Greedy-limited tracking with saturation fallback.
    #[default]
    #[serde(rename = "mode2", alias = "ModeII")]
    ModeII,
}

/// Tracking/greedy-fallback state machine.
///
/// Enters fallback when pitch is at or below `theta_switch` while the
/// generator runs slower than its reference. Leaves fallback once the greedy
/// steady-state power has exceeded `fallback_exit_ratio · P_dem` for
/// `fallback_dwell` seconds and the generator has reached its reference.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ModeMachine {
    pub mode: Mode,
    dwell: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeInputs {
    /// deg
    pub pitch: f64,
    /// rad/s
    pub omega_gen: f64,
    /// rad/s
    pub omega_ref: f64,
    /// W
    pub p_greedy: f64,
    /// W
    pub p_dem: f64,
}

impl ModeMachine {
    pub fn new(mode: Mode) -> Self {
        Self { mode, dwell: 0.0 }
    }

    pub fn update(&mut self, inp: ModeInputs, dt: f64, cfg: &ControllerConfig) -> Mode {
        match self.mode {
            Mode::Tracking => {
                if inp.pitch <= cfg.theta_switch && inp.omega_gen < inp.omega_ref {
                    self.mode = Mode::GreedyFallback;
                    self.dwell = 0.0;
                }
            }
            Mode::GreedyFallback => {
                if inp.p_greedy > cfg.fallback_exit_ratio * inp.p_dem {
                    self.dwell += dt;
                } else {
                    self.dwell = 0.0;
                }
                // Half a sample of slack absorbs accumulated rounding in dwell.
                if self.dwell >= cfg.fallback_dwell - 0.5 * dt && inp.omega_gen >= inp.omega_ref {
                    self.mode = Mode::Tracking;
                    self.dwell = 0.0;
                }
            }
        }
        self.mode
    }
}

/// Immutable laws shared by every controller instance of a farm.
#[derive(Debug, Clone)]
pub struct ControlLaws {
    pub cfg: ControllerConfig,
    pub curve: GreedyCurve,
    pub table: SetpointTable,
}

impl ControlLaws {
    pub fn new(cfg: ControllerConfig) -> Result<Self> {
        cfg.validate()?;
        let curve = GreedyCurve::new(&cfg);
        let table = SetpointTable::build(&curve)?;
        Ok(Self { cfg, curve, table })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Measurements {
    /// rad/s
    pub gen_speed: f64,
    /// Greedy steady-state power at the current inflow, W.
    pub p_greedy: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Commands {
    /// N·m
    pub gen_torque: f64,
    /// deg
    pub pitch: f64,
    pub mode: Mode,
    /// rad/s
    pub omega_ref: f64,
}

#[derive(Debug, Clone)]
pub struct TurbineController {
    laws: Arc<ControlLaws>,
    control_mode: ControlMode,
    pid: PitchPidState,
    modes: ModeMachine,
}

impl TurbineController {
    pub fn new(
        laws: Arc<ControlLaws>,
        control_mode: ControlMode,
        pitch: f64,
        gen_speed: f64,
        gen_torque: f64,
    ) -> Self {
        Self {
            laws,
            control_mode,
            pid: PitchPidState::at(pitch, gen_speed, gen_torque),
            modes: ModeMachine::default(),
        }
    }

    pub fn mode(&self) -> Mode {
        self.modes.mode
    }

    pub fn pid(&self) -> &PitchPidState {
        &self.pid
    }

    /// One control sample: torque and pitch commands for demand `p_dem`.
    pub fn step(&mut self, p_dem: f64, meas: Measurements, dt: f64) -> Result<Commands> {
        let laws = Arc::clone(&self.laws);
        let cfg = &laws.cfg;
        let w = meas.gen_speed;
        let omega_ref = laws.table.lookup(p_dem);

        let mode = match self.control_mode {
            ControlMode::ModeI => Mode::Tracking,
            ControlMode::ModeII => self.modes.update(
                ModeInputs {
                    pitch: self.pid.prev_pitch,
                    omega_gen: w,
                    omega_ref,
                    p_greedy: meas.p_greedy,
                    p_dem,
                },
                dt,
                cfg,
            ),
        };

        let torque_target = match (self.control_mode, mode) {
            (ControlMode::ModeI, _) => tracking_torque(p_dem, w, cfg)?,
            (ControlMode::ModeII, Mode::Tracking) => combined_torque(p_dem, w, &laws.curve, cfg)?,
            (ControlMode::ModeII, Mode::GreedyFallback) => laws.curve.torque(w),
        };
        let gen_torque = rate_limit(self.pid.prev_torque, torque_target, cfg.max_torque_rate * dt);

        let pitch = match mode {
            Mode::Tracking => {
                let (cmd, next) = pitch_pid_step(&self.pid, omega_ref, w, dt, cfg);
                self.pid = next;
                cmd
            }
            Mode::GreedyFallback => {
                let cmd = rate_limit(self.pid.prev_pitch, cfg.theta_fine, cfg.max_pitch_rate * dt);
                let alpha = lowpass_alpha(cfg.lpf_corner, dt);
                self.pid.filtered_speed += alpha * (w - self.pid.filtered_speed);
                self.pid.integral = cmd;
                self.pid.prev_pitch = cmd;
                self.pid.prev_error = 0.0;
                cmd
            }
        };
        self.pid.prev_torque = gen_torque;

        Ok(Commands {
            gen_torque,
            pitch,
            mode,
            omega_ref,
        })
    }
}
