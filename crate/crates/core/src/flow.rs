//! Desk-scale wind field: free-stream inflow with optional synthetic
//! turbulence and a top-hat (Jensen) wake deficit advected downstream at the
//! mean wind speed.

use std::collections::VecDeque;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FlowConfig {
    /// Mean free-stream wind speed, m/s. Also the wake advection speed.
    pub u_mean: f64,
    /// Turbulence intensity (fraction).
    pub ti: f64,
    /// Downstream positions in rotor diameters, strictly increasing.
    pub positions: Vec<f64>,
    /// m
    pub rotor_diameter: f64,
    pub wake_decay: f64,
    /// Turbulence correlation time, s.
    pub correlation_time: f64,
    pub seed: u64,
    /// Optional piecewise-constant free-stream schedule as `[t, u]` pairs
    /// (s, m/s); before the first entry `u_mean` applies.
    pub wind_schedule: Vec<[f64; 2]>,
}

impl Default for FlowConfig {
    fn default() -> Self {
        Self {
            u_mean: 9.0,
            ti: 0.0,
            positions: vec![0.0, 5.0, 10.0],
            rotor_diameter: 178.3,
            wake_decay: 0.05,
            correlation_time: 10.0,
            seed: 0,
            wind_schedule: Vec::new(),
        }
    }
}

impl FlowConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.u_mean > 0.0) {
            return Err(Error::Config("flow.u_mean must be positive".into()));
        }
        if !(self.ti >= 0.0) {
            return Err(Error::Config("flow.ti must be non-negative".into()));
        }
        if self.positions.is_empty() || self.positions.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("flow.positions must be non-empty and strictly increasing".into()));
        }
        if !(self.rotor_diameter > 0.0 && self.wake_decay >= 0.0 && self.correlation_time > 0.0) {
            return Err(Error::Config(
                "flow.rotor_diameter and correlation_time must be positive, wake_decay non-negative".into(),
            ));
        }
        if self.wind_schedule.windows(2).any(|w| w[1][0] < w[0][0])
            || self.wind_schedule.iter().any(|e| !(e[1] >= 0.0))
        {
            return Err(Error::Config(
                "flow.wind_schedule must be time-ordered with non-negative speeds".into(),
            ));
        }
        Ok(())
    }

    /// Free-stream mean wind at time `t` before turbulence.
    pub fn base_wind(&self, t: f64) -> f64 {
        self.wind_schedule
            .iter()
            .rev()
            .find(|e| e[0] <= t)
            .map_or(self.u_mean, |e| e[1])
    }
}

/// First-order autoregressive (Ornstein–Uhlenbeck) fractional perturbation
/// with stationary standard deviation `ti`.
#[derive(Debug, Clone)]
pub struct Turbulence {
    value: f64,
    phi: f64,
    innovation: f64,
    rng: ChaCha8Rng,
}

impl Turbulence {
    pub fn new(cfg: &FlowConfig, dt: f64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let phi = (-dt / cfg.correlation_time).exp();
        let value = if cfg.ti > 0.0 {
            let z: f64 = StandardNormal.sample(&mut rng);
            cfg.ti * z
        } else {
            0.0
        };
        Self {
            value,
            phi,
            innovation: cfg.ti * (1.0 - phi * phi).sqrt(),
            rng,
        }
    }

    /// Advance one sample and return the new perturbation.
    pub fn step(&mut self) -> f64 {
        if self.innovation > 0.0 {
            let z: f64 = StandardNormal.sample(&mut self.rng);
            self.value = self.phi * self.value + self.innovation * z;
        }
        self.value
    }

    pub fn value(&self) -> f64 {
        self.value
    }
}

/// Delay lines of upstream axial induction, one per turbine.
#[derive(Debug, Clone)]
pub struct WakeBuffer {
    /// `delays[i][j]`: steps for turbine j's wake to reach turbine i (j < i).
    delays: Vec<Vec<usize>>,
    history: Vec<VecDeque<f64>>,
    capacity: usize,
}

/// Whole samples for a wake to cover `distance` metres at `u_mean`.
pub fn advection_steps(distance: f64, u_mean: f64, dt: f64) -> usize {
    ((distance / (u_mean * dt)) - 1e-9).ceil().max(1.0) as usize
}

impl WakeBuffer {
    pub fn new(cfg: &FlowConfig, dt: f64, initial_induction: &[f64]) -> Result<Self> {
        let n = cfg.positions.len();
        if initial_induction.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: initial_induction.len(),
            });
        }
        let delays: Vec<Vec<usize>> = (0..n)
            .map(|i| {
                (0..i)
                    .map(|j| {
                        let x = (cfg.positions[i] - cfg.positions[j]) * cfg.rotor_diameter;
                        advection_steps(x, cfg.u_mean, dt)
                    })
                    .collect()
            })
            .collect();
        let capacity = delays.iter().flatten().copied().max().unwrap_or(1);
        let history = initial_induction
            .iter()
            .map(|&a| std::iter::repeat_n(a, capacity).collect())
            .collect();
        Ok(Self {
            delays,
            history,
            capacity,
        })
    }

    pub fn delay_steps(&self, upstream: usize, downstream: usize) -> usize {
        self.delays[downstream][upstream]
    }

    /// Record the inductions produced during the current step.
    pub fn push(&mut self, induction: &[f64]) {
        for (h, &a) in self.history.iter_mut().zip(induction) {
            if h.len() == self.capacity {
                h.pop_front();
            }
            h.push_back(a);
        }
    }

    /// Induction of `upstream` as seen by `downstream` at the coming step.
    pub fn delayed_induction(&self, upstream: usize, downstream: usize) -> f64 {
        let lag = self.delays[downstream][upstream];
        let h = &self.history[upstream];
        h[h.len() - lag]
    }
}

/// Single-wake fractional deficit `2a/(1 + 2k·x/D)²`.
pub fn jensen_deficit(induction: f64, distance_d: f64, wake_decay: f64) -> f64 {
    2.0 * induction / (1.0 + 2.0 * wake_decay * distance_d).powi(2)
}

/// Rotor-averaged wind at turbine `index` given the free-stream speed,
/// combining upstream deficits by root-sum-square.
pub fn effective_wind(index: usize, u_inf: f64, wakes: &WakeBuffer, cfg: &FlowConfig) -> f64 {
    let sum_sq: f64 = (0..index)
        .map(|j| {
            let a = wakes.delayed_induction(j, index);
            let x = cfg.positions[index] - cfg.positions[j];
            jensen_deficit(a, x, cfg.wake_decay).powi(2)
        })
        .sum();
    u_inf * (1.0 - sum_sq.sqrt())
}
