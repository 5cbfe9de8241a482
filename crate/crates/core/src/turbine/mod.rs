//! Single-turbine physics: quasi-steady aerodynamics on a rigid one-state
//! drivetrain.

mod surface;

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use surface::{induction_from_cp, induction_from_ct, AeroSurface, SurfacePoint, LAMBDA_MAX};

use crate::error::{Error, Result};

/// Rotor speed (rad/s) at or below which aerodynamic torque is not evaluated.
pub const ROTOR_SPEED_GUARD: f64 = 0.1;

/// Greedy torque constant, N·m/(rad/s)², generator side.
pub const K_GREEDY: f64 = 79.43986;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TurbineParams {
    /// m
    pub rotor_radius: f64,
    pub gearbox_ratio: f64,
    /// kg·m², lumped on the rotor side.
    pub rotor_inertia: f64,
    /// kg/m³
    pub air_density: f64,
    /// W
    pub rated_power: f64,
    pub generator_efficiency: f64,
    /// Always derived from the greedy torque constant, never read from files.
    #[serde(skip)]
    pub cp_max: f64,
    pub lambda_opt: f64,
}

impl Default for TurbineParams {
    fn default() -> Self {
        let mut p = Self {
            rotor_radius: 178.3 / 2.0,
            gearbox_ratio: 50.0,
            rotor_inertia: 1.6e8,
            air_density: 1.225,
            rated_power: 10.0e6,
            generator_efficiency: 1.0,
            cp_max: 0.0,
            lambda_opt: 8.0,
        };
        p.cp_max = calibrate_cp_max(&p, K_GREEDY).expect("default drivetrain calibrates");
        p
    }
}

impl TurbineParams {
    pub fn rotor_area(&self) -> f64 {
        PI * self.rotor_radius * self.rotor_radius
    }

    pub fn rotor_diameter(&self) -> f64 {
        2.0 * self.rotor_radius
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.rotor_radius > 0.0
            && self.gearbox_ratio >= 1.0
            && self.rotor_inertia > 0.0
            && self.air_density > 0.0
            && self.rated_power > 0.0
            && self.generator_efficiency > 0.0
            && self.generator_efficiency <= 1.0
            && self.cp_max > 0.0
            && self.cp_max < 16.0 / 27.0
            && self.lambda_opt > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("invalid turbine parameters: {self:?}")))
        }
    }

    /// Re-derive `cp_max` so that the greedy law `K·ω_gen²` is exactly
    /// optimal for this geometry.
    pub fn recalibrated(mut self, k_greedy: f64) -> Result<Self> {
        self.cp_max = calibrate_cp_max(&self, k_greedy)?;
        Ok(self)
    }
}

/// Power coefficient that makes the region-2 law `τ_gen = K·ω_gen²` hold
/// its rotor exactly at `lambda_opt`:
/// `cp_max = K·N³·λ_opt³ / (½·ρ·A·R³)`.
pub fn calibrate_cp_max(params: &TurbineParams, k_greedy: f64) -> Result<f64> {
    let n = params.gearbox_ratio;
    let r = params.rotor_radius;
    let cp_max = k_greedy * n.powi(3) * params.lambda_opt.powi(3)
        / (0.5 * params.air_density * params.rotor_area() * r.powi(3));
    if cp_max > 0.40 && cp_max < 0.55 {
        Ok(cp_max)
    } else {
        Err(Error::CalibrationOutOfRange { cp_max })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum Mode {
    #[default]
    Tracking,
    GreedyFallback,
}

impl Mode {
    pub fn code(self) -> u8 {
        match self {
            Mode::Tracking => 0,
            Mode::GreedyFallback => 1,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(Mode::Tracking),
            1 => Some(Mode::GreedyFallback),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TurbineState {
    /// rad/s
    pub rotor_speed: f64,
    /// deg
    pub pitch: f64,
    /// N·m, generator side.
    pub gen_torque: f64,
    /// W
    pub gen_power: f64,
    /// N
    pub thrust: f64,
    pub mode: Mode,
    /// Number of times the rotor speed had to be clamped at zero.
    pub speed_clamps: u32,
}

impl TurbineState {
    pub fn gen_speed(&self, params: &TurbineParams) -> f64 {
        self.rotor_speed * params.gearbox_ratio
    }
}

/// A turbine's parameters together with its tabulated aerodynamic surface.
#[derive(Debug, Clone)]
pub struct TurbineModel {
    pub params: TurbineParams,
    surface: Arc<AeroSurface>,
}

impl TurbineModel {
    pub fn new(params: TurbineParams, theta_fine: f64, theta_max: f64) -> Result<Self> {
        params.validate()?;
        let surface = AeroSurface::new(params.cp_max, params.lambda_opt, theta_fine, theta_max);
        Ok(Self {
            params,
            surface: Arc::new(surface),
        })
    }

    pub fn surface(&self) -> &AeroSurface {
        &self.surface
    }

    pub fn tip_speed_ratio(&self, rotor_speed: f64, wind_speed: f64) -> f64 {
        rotor_speed * self.params.rotor_radius / wind_speed
    }

    pub fn cp(&self, lambda: f64, pitch: f64) -> f64 {
        self.surface.cp(lambda, pitch)
    }

    pub fn ct(&self, lambda: f64, pitch: f64) -> f64 {
        self.surface.ct(lambda, pitch)
    }

    /// Rotor-side aerodynamic torque `½ρA·cp(λ,θ)·U³/ω_r`.
    pub fn aero_torque(&self, wind_speed: f64, state: &TurbineState) -> Result<f64> {
        let w = state.rotor_speed;
        if w <= ROTOR_SPEED_GUARD {
            return Err(Error::RotorStopped {
                speed: w,
                guard: ROTOR_SPEED_GUARD,
            });
        }
        if wind_speed <= 0.0 {
            return Ok(0.0);
        }
        let lambda = self.tip_speed_ratio(w, wind_speed);
        let cp = self.surface.cp(lambda, state.pitch);
        Ok(self.available_power(wind_speed) * cp / w)
    }

    /// Rotor thrust `½ρA·ct(λ,θ)·U²`.
    pub fn thrust(&self, wind_speed: f64, rotor_speed: f64, pitch: f64) -> f64 {
        if wind_speed <= 0.0 {
            return 0.0;
        }
        let ct = self.surface.ct(self.tip_speed_ratio(rotor_speed, wind_speed), pitch);
        0.5 * self.params.air_density * self.params.rotor_area() * ct * wind_speed * wind_speed
    }

    /// Axial induction at the given operating point.
    pub fn induction(&self, wind_speed: f64, rotor_speed: f64, pitch: f64) -> f64 {
        if wind_speed <= 0.0 {
            return 0.0;
        }
        let ct = self.surface.ct(self.tip_speed_ratio(rotor_speed, wind_speed), pitch);
        induction_from_ct(ct)
    }

    /// Kinetic power through the rotor disk, `½ρA·U³`.
    pub fn available_power(&self, wind_speed: f64) -> f64 {
        0.5 * self.params.air_density * self.params.rotor_area() * wind_speed.powi(3)
    }
}

/// One explicit-Euler step of `J·dω_r/dt = τ_aero − N·τ_gen`.
///
/// The returned state carries `tau_gen` as the applied generator torque and a
/// generator power recomputed from `τ_gen·ω_gen·η` at the new speed. Pitch,
/// mode and thrust are carried over unchanged.
pub fn step_drivetrain(
    state: &TurbineState,
    tau_aero: f64,
    tau_gen: f64,
    dt: f64,
    params: &TurbineParams,
) -> TurbineState {
    let mut next = *state;
    let accel = (tau_aero - params.gearbox_ratio * tau_gen) / params.rotor_inertia;
    next.rotor_speed = state.rotor_speed + dt * accel;
    if next.rotor_speed < 0.0 {
        next.rotor_speed = 0.0;
        next.speed_clamps += 1;
    }
    next.gen_torque = tau_gen;
    next.gen_power = tau_gen * next.gen_speed(params) * params.generator_efficiency;
    next
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model() -> TurbineModel {
        TurbineModel::new(TurbineParams::default(), 0.75, 45.0).unwrap()
    }

    #[test]
    fn rotor_area_is_exact() {
        let p = TurbineParams::default();
        assert_eq!(p.rotor_area(), PI * p.rotor_radius * p.rotor_radius);
        assert_eq!(p.rotor_radius, 89.15);
    }

    #[test]
    fn calibration_matches_closed_form() {
        // High-precision evaluation of K·N³·λ³/(½ρπR⁵).
        let cp = calibrate_cp_max(&TurbineParams::default(), K_GREEDY).unwrap();
        assert!((cp - 0.469_197_555_518_416_3).abs() < 1e-14, "{cp}");
    }

    #[test]
    fn calibration_rejects_degenerate_gain() {
        let err = calibrate_cp_max(&TurbineParams::default(), 0.0).unwrap_err();
        assert!(matches!(err, Error::CalibrationOutOfRange { cp_max } if cp_max == 0.0));
        let p = TurbineParams {
            lambda_opt: 10.0,
            ..TurbineParams::default()
        };
        assert!(calibrate_cp_max(&p, K_GREEDY).is_err());
    }

    #[test]
    fn calibration_is_linear_in_gain() {
        let p = TurbineParams::default();
        let a = calibrate_cp_max(&p, 70.0).unwrap();
        let b = calibrate_cp_max(&p, 77.0).unwrap();
        assert!((b / a - 1.1).abs() < 1e-12);
    }

    #[test]
    fn aero_torque_at_optimum() {
        let m = model();
        let p = m.params;
        let u = 9.0;
        let w = p.lambda_opt * u / p.rotor_radius;
        let state = TurbineState {
            rotor_speed: w,
            pitch: 0.75,
            ..Default::default()
        };
        let expected = 0.5 * p.air_density * p.rotor_area() * p.cp_max * u.powi(3) / w;
        let got = m.aero_torque(u, &state).unwrap();
        assert!((got / expected - 1.0).abs() < 1e-12);
    }

    #[test]
    fn aero_torque_linear_in_density() {
        let m1 = model();
        let mut p2 = m1.params;
        p2.air_density *= 2.0;
        let m2 = TurbineModel::new(p2, 0.75, 45.0).unwrap();
        let state = TurbineState {
            rotor_speed: 0.7,
            pitch: 3.0,
            ..Default::default()
        };
        let t1 = m1.aero_torque(8.0, &state).unwrap();
        let t2 = m2.aero_torque(8.0, &state).unwrap();
        assert!((t2 / t1 - 2.0).abs() < 1e-12);
    }

    #[test]
    fn aero_torque_zero_when_cp_zero() {
        let m = model();
        // Tip-speed ratio beyond the fit's positive region.
        let state = TurbineState {
            rotor_speed: 2.0,
            pitch: 45.0,
            ..Default::default()
        };
        assert!(m.cp(m.tip_speed_ratio(2.0, 5.0), 45.0) == 0.0);
        assert_eq!(m.aero_torque(5.0, &state).unwrap(), 0.0);
    }

    #[test]
    fn stopped_rotor_is_an_error() {
        let m = model();
        let state = TurbineState {
            rotor_speed: 0.05,
            ..Default::default()
        };
        assert!(matches!(
            m.aero_torque(9.0, &state),
            Err(Error::RotorStopped { .. })
        ));
    }

    #[test]
    fn drivetrain_equilibrium_and_sign() {
        let p = TurbineParams::default();
        let s = TurbineState {
            rotor_speed: 0.8,
            ..Default::default()
        };
        let eq = step_drivetrain(&s, 50.0 * 1.0e5, 1.0e5, 0.1, &p);
        assert_eq!(eq.rotor_speed, 0.8);
        let up = step_drivetrain(&s, 1.0e6, 0.0, 0.1, &p);
        assert!(up.rotor_speed > 0.8);
        assert_eq!(up.gen_power, 0.0);
    }

    #[test]
    fn drivetrain_increment_scales_inversely_with_inertia() {
        let p = TurbineParams::default();
        let p2 = TurbineParams {
            rotor_inertia: 2.0 * p.rotor_inertia,
            ..p
        };
        let s = TurbineState {
            rotor_speed: 0.8,
            ..Default::default()
        };
        let d1 = step_drivetrain(&s, 3.0e6, 2.0e4, 0.1, &p).rotor_speed - 0.8;
        let d2 = step_drivetrain(&s, 3.0e6, 2.0e4, 0.1, &p2).rotor_speed - 0.8;
        assert!((d1 / d2 - 2.0).abs() < 1e-9);
    }

    #[test]
    fn drivetrain_clamps_and_counts() {
        let p = TurbineParams::default();
        let s = TurbineState {
            rotor_speed: 0.01,
            ..Default::default()
        };
        let next = step_drivetrain(&s, 0.0, 1.0e6, 0.1, &p);
        assert_eq!(next.rotor_speed, 0.0);
        assert_eq!(next.speed_clamps, 1);
    }

    #[test]
    fn power_identity_holds() {
        let p = TurbineParams::default();
        let s = TurbineState {
            rotor_speed: 0.77,
            ..Default::default()
        };
        let n = step_drivetrain(&s, 4.0e6, 9.0e4, 0.1, &p);
        assert_eq!(n.gen_power, n.gen_torque * n.rotor_speed * 50.0 * 1.0);
    }

    #[test]
    fn thrust_decreases_with_pitch() {
        let m = model();
        let mut prev = f64::INFINITY;
        for k in 0..40 {
            let f = m.thrust(9.0, 0.8, 0.75 + k as f64);
            assert!(f >= 0.0 && f <= prev);
            prev = f;
        }
    }
}
