//! Five-region greedy generator torque curve.

use super::config::ControllerConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    /// Below cut-in: no torque.
    One,
    /// Linear ramp from zero at cut-in up to the optimal-torque value.
    OneHalf,
    /// Optimal-torque law `K·ω²`.
    Two,
    /// Steep line into the constant-power region.
    TwoHalf,
    /// Constant power.
    Three,
}

/// Generator torque versus generator speed (rad/s). Continuous at every
/// region boundary and non-decreasing up to the region-3 entry speed.
#[derive(Debug, Clone, PartialEq)]
pub struct GreedyCurve {
    k: f64,
    rated_power: f64,
    efficiency: f64,
    /// Boundary speeds: cut-in, 1.5→2, 2→2.5, 2.5→3 (rad/s).
    bounds: [f64; 4],
    ramp_slope: f64,
    line_slope: f64,
    rated_speed: f64,
}

impl GreedyCurve {
    pub fn new(cfg: &ControllerConfig) -> Self {
        let bounds = [
            cfg.omega_cut_in_rad(),
            cfg.omega_r15_to_2_rad(),
            cfg.omega_r2_to_25_rad(),
            cfg.region3_entry_rad(),
        ];
        let k = cfg.k_greedy;
        let tau_15 = k * bounds[1] * bounds[1];
        let tau_2 = k * bounds[2] * bounds[2];
        let tau_3 = cfg.rated_power / (cfg.generator_efficiency * bounds[3]);
        Self {
            k,
            rated_power: cfg.rated_power,
            efficiency: cfg.generator_efficiency,
            bounds,
            ramp_slope: tau_15 / (bounds[1] - bounds[0]),
            line_slope: (tau_3 - tau_2) / (bounds[3] - bounds[2]),
            rated_speed: cfg.omega_rated_rad(),
        }
    }

    pub fn boundaries(&self) -> [f64; 4] {
        self.bounds
    }

    pub fn rated_speed(&self) -> f64 {
        self.rated_speed
    }

    pub fn rated_power(&self) -> f64 {
        self.rated_power
    }

    pub fn efficiency(&self) -> f64 {
        self.efficiency
    }

    pub fn region(&self, omega_gen: f64) -> Region {
        let [b0, b1, b2, b3] = self.bounds;
        if omega_gen < b0 {
            Region::One
        } else if omega_gen < b1 {
            Region::OneHalf
        } else if omega_gen < b2 {
            Region::Two
        } else if omega_gen < b3 {
            Region::TwoHalf
        } else {
            Region::Three
        }
    }

    /// Evaluate one region's formula regardless of which region `omega_gen`
    /// falls in. Used to check continuity at the breakpoints.
    pub fn region_torque(&self, region: Region, omega_gen: f64) -> f64 {
        let [b0, _, b2, _] = self.bounds;
        match region {
            Region::One => 0.0,
            Region::OneHalf => self.ramp_slope * (omega_gen - b0),
            Region::Two => self.k * omega_gen * omega_gen,
            Region::TwoHalf => self.k * b2 * b2 + self.line_slope * (omega_gen - b2),
            Region::Three => self.rated_power / (self.efficiency * omega_gen),
        }
    }

    pub fn torque(&self, omega_gen: f64) -> f64 {
        let w = omega_gen.max(0.0);
        self.region_torque(self.region(w), w)
    }

    /// Generator power produced on the curve, `τ(ω)·ω·η`.
    pub fn power(&self, omega_gen: f64) -> f64 {
        self.torque(omega_gen) * omega_gen.max(0.0) * self.efficiency
    }
}
