//! Generator speed reference as a function of demanded power.
//!
//! Each grid power is mapped to the speed at which the greedy curve would
//! produce exactly that power, found by bisection on the increasing branch
//! between cut-in and the region-3 entry speed. Queries interpolate linearly.

use super::greedy::GreedyCurve;
use crate::error::{Error, Result};

pub const GRID_POINTS: usize = 512;
const BISECTION_REL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct SetpointTable {
    rated_power: f64,
    power_step: f64,
    /// Speeds for powers `0, step, 2·step, …, rated_power`.
    speeds: Vec<f64>,
    rated_speed: f64,
}

/// Smallest speed in `[lo, hi]` with `curve.power(ω) ≥ target`.
fn invert(curve: &GreedyCurve, target: f64, mut lo: f64, mut hi: f64) -> f64 {
    while hi - lo > BISECTION_REL_TOL * hi {
        let mid = 0.5 * (lo + hi);
        if curve.power(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

impl SetpointTable {
    pub fn build(curve: &GreedyCurve) -> Result<Self> {
        let [cut_in, _, _, region3] = curve.boundaries();
        let rated_power = curve.rated_power();
        let power_step = rated_power / GRID_POINTS as f64;
        let mut speeds = Vec::with_capacity(GRID_POINTS + 1);
        speeds.push(cut_in);
        for j in 1..GRID_POINTS {
            speeds.push(invert(curve, j as f64 * power_step, cut_in, region3));
        }
        speeds.push(region3);
        for (j, w) in speeds.windows(2).enumerate() {
            if w[1] <= w[0] {
                return Err(Error::NonMonotonicCurve {
                    power: (j + 1) as f64 * power_step,
                });
            }
        }
        Ok(Self {
            rated_power,
            power_step,
            speeds,
            rated_speed: curve.rated_speed(),
        })
    }

    /// Generator speed reference (rad/s) for demanded power `p_dem` (W).
    ///
    /// Non-positive demand maps to the cut-in speed; demand at or above rated
    /// power maps to the rated speed.
    pub fn lookup(&self, p_dem: f64) -> f64 {
        if p_dem >= self.rated_power {
            return self.rated_speed;
        }
        if p_dem <= 0.0 || p_dem.is_nan() {
            return self.speeds[0];
        }
        let x = p_dem / self.power_step;
        let i = (x.floor() as usize).min(GRID_POINTS - 1);
        let f = x - i as f64;
        self.speeds[i] + f * (self.speeds[i + 1] - self.speeds[i])
    }

    pub fn speeds(&self) -> &[f64] {
        &self.speeds
    }
}
