//! Steady-state power a turbine would reach under greedy control at a given
//! rotor-averaged wind speed.
//!
//! A simulator knows its own wind, so the "hypothetical greedy power" used
//! for saturation bookkeeping is tabulated once from the turbine's surface and
//! the greedy curve, then interpolated.

use super::greedy::GreedyCurve;
use crate::turbine::{TurbineModel, ROTOR_SPEED_GUARD};

const WIND_STEP: f64 = 0.05;
const WIND_MAX: f64 = 40.0;
const SCAN_POINTS: usize = 400;

/// Greedy equilibrium at fine pitch: the fastest stable rotor speed where
/// aerodynamic torque balances the greedy generator torque. `None` when the
/// aerodynamic torque exceeds the curve all the way up to the speed ceiling
/// (pitch regulation would be needed).
pub fn greedy_equilibrium(
    model: &TurbineModel,
    curve: &GreedyCurve,
    theta_fine: f64,
    wind_speed: f64,
) -> Option<f64> {
    if wind_speed <= 0.0 {
        return Some(0.0);
    }
    let n = model.params.gearbox_ratio;
    let area_power = model.available_power(wind_speed);
    // Net accelerating torque on the rotor, scaled by ω_r to stay finite.
    let surplus = |w: f64| {
        let cp = model.cp(model.tip_speed_ratio(w, wind_speed), theta_fine);
        area_power * cp - n * curve.torque(n * w) * w
    };
    let ceiling = 1.2 * curve.rated_speed() / n;
    if surplus(ceiling) > 0.0 {
        return None;
    }
    let lo_bound = ROTOR_SPEED_GUARD;
    let step = (ceiling - lo_bound) / SCAN_POINTS as f64;
    let mut hi = ceiling;
    let mut lo = None;
    for k in (0..SCAN_POINTS).rev() {
        let w = lo_bound + k as f64 * step;
        if surplus(w) > 0.0 {
            lo = Some(w);
            break;
        }
        hi = w;
    }
    // Too little wind to sustain rotation above the guard speed.
    let Some(mut lo) = lo else {
        return Some(lo_bound);
    };
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if surplus(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

#[derive(Debug, Clone)]
pub struct GreedyPowerMap {
    power: Vec<f64>,
}

impl GreedyPowerMap {
    pub fn build(model: &TurbineModel, curve: &GreedyCurve, theta_fine: f64) -> Self {
        let n_points = (WIND_MAX / WIND_STEP).round() as usize + 1;
        let n = model.params.gearbox_ratio;
        let rated = curve.rated_power();
        let power = (0..n_points)
            .map(|i| {
                let u = i as f64 * WIND_STEP;
                match greedy_equilibrium(model, curve, theta_fine, u) {
                    Some(w) => curve.power(n * w).min(rated),
                    None => rated,
                }
            })
            .collect();
        Self { power }
    }

    /// Greedy steady-state generator power (W) at rotor-averaged wind `u`.
    pub fn power(&self, wind_speed: f64) -> f64 {
        let x = (wind_speed.max(0.0) / WIND_STEP).min((self.power.len() - 1) as f64);
        let i = (x.floor() as usize).min(self.power.len() - 2);
        let f = x - i as f64;
        self.power[i] + f * (self.power[i + 1] - self.power[i])
    }
}
