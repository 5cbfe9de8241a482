//! Farm-level dispatch: a fixed nominal split of the farm reference plus a
//! shared integrator correction that covers turbines unable to meet their
//! share.
//!
//! ```text
//! P_dem,i = α_i·r + Δu
//! e       = r − Σ P_gen
//! u      ← u + K_I·e·Δt,   K_I = 1/(N_T·Δt)
//! ```
//!
//! With every turbine behaving as a one-sample delay the integrator gain
//! removes the farm error in one step. The integrator is reset to zero while
//! no turbine is saturated and does not wind up while none of them can take
//! more power, either because it is saturated or because its demand already
//! sits at rated power.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How the integrator output reaches the individual demands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorrectionSplit {
    /// Every turbine receives `Δu = u`.
    #[default]
    Uniform,
    /// `Δu = u·N_T/N_unsaturated`, so the unsaturated turbines absorb the
    /// whole correction.
    Unsaturated,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FarmDispatchState {
    /// Integrator state, W.
    pub u: f64,
    pub alpha: Vec<f64>,
    pub saturated: Vec<bool>,
    /// Demands that hit `rated_power` on the previous step.
    pub at_rated: Vec<bool>,
    /// Last farm error, W.
    pub e: f64,
    k_i: f64,
    dt: f64,
    pub rated_power: f64,
    pub feedback: bool,
    pub split: CorrectionSplit,
}

/// Scale weights to sum to one. Logs a warning when the input was off by
/// more than 1e-9.
pub fn normalize_alpha(alpha: &[f64]) -> Result<Vec<f64>> {
    if alpha.is_empty() {
        return Err(Error::Config("alpha must not be empty".into()));
    }
    if alpha.iter().any(|a| !a.is_finite() || *a < 0.0) {
        return Err(Error::Config(format!("alpha entries must be finite and >= 0: {alpha:?}")));
    }
    let sum: f64 = alpha.iter().sum();
    if sum <= 0.0 {
        return Err(Error::Config("alpha must have a positive sum".into()));
    }
    if (sum - 1.0).abs() > 1e-9 {
        log::warn!("nominal distribution sums to {sum}; normalising");
        return Ok(alpha.iter().map(|a| a / sum).collect());
    }
    Ok(alpha.to_vec())
}

impl FarmDispatchState {
    pub fn new(alpha: &[f64], dt: f64, rated_power: f64, feedback: bool) -> Result<Self> {
        if !(dt > 0.0) {
            return Err(Error::Config(format!("dt must be positive, got {dt}")));
        }
        let alpha = normalize_alpha(alpha)?;
        let n = alpha.len();
        Ok(Self {
            u: 0.0,
            saturated: vec![false; n],
            at_rated: vec![false; n],
            alpha,
            e: 0.0,
            k_i: 1.0 / (n as f64 * dt),
            dt,
            rated_power,
            feedback,
            split: CorrectionSplit::Uniform,
        })
    }

    pub fn with_split(mut self, split: CorrectionSplit) -> Self {
        self.split = split;
        self
    }

    pub fn n_turbines(&self) -> usize {
        self.alpha.len()
    }

    pub fn k_i(&self) -> f64 {
        self.k_i
    }

    /// Advance one sample and return the per-turbine demands.
    pub fn step(&mut self, r: f64, p_gen: &[f64], saturated: &[bool]) -> Result<Vec<f64>> {
        let n = self.n_turbines();
        for len in [p_gen.len(), saturated.len()] {
            if len != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: len,
                });
            }
        }
        if r < 0.0 || r.is_nan() {
            return Err(Error::NegativeReference(r));
        }
        self.saturated.copy_from_slice(saturated);
        self.e = r - p_gen.iter().sum::<f64>();

        let n_sat = saturated.iter().filter(|&&s| s).count();
        let delta_u = if !self.feedback {
            self.u = 0.0;
            0.0
        } else {
            if n_sat == 0 {
                self.u = 0.0;
            } else {
                // When no turbine can take more power only unwinding is allowed.
                let blocked = (0..n).all(|i| saturated[i] || self.at_rated[i]);
                if !blocked || self.e < 0.0 {
                    self.u += self.k_i * self.e * self.dt;
                }
            }
            match self.split {
                CorrectionSplit::Uniform => self.u,
                CorrectionSplit::Unsaturated if n_sat < n => self.u * n as f64 / (n - n_sat) as f64,
                CorrectionSplit::Unsaturated => self.u,
            }
        };

        let p_dem: Vec<f64> = self.alpha.iter().map(|a| a * r + delta_u).collect();
        for (flag, p) in self.at_rated.iter_mut().zip(&p_dem) {
            *flag = *p >= self.rated_power;
        }
        Ok(p_dem.into_iter().map(|p| p.clamp(0.0, self.rated_power)).collect())
    }
}

/// `farm_step` in functional form.
pub fn farm_step(
    r: f64,
    p_gen: &[f64],
    saturated: &[bool],
    state: &FarmDispatchState,
) -> Result<(Vec<f64>, FarmDispatchState)> {
    let mut next = state.clone();
    let p_dem = next.step(r, p_gen, saturated)?;
    Ok((p_dem, next))
}

/// One of the five benchmark farm configurations.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseSpec {
    pub id: u8,
    pub alpha: Vec<f64>,
    pub feedback: bool,
    /// Greedy operation: dispatch is bypassed.
    pub greedy: bool,
}

pub fn select_case(case_id: u8) -> Result<CaseSpec> {
    let third = 1.0 / 3.0;
    let (alpha, feedback, greedy) = match case_id {
        0 => (vec![third; 3], false, false),
        1 => (vec![third; 3], true, false),
        2 => (vec![0.5, third, 1.0 / 6.0], true, false),
        3 => (vec![1.0 / 6.0, third, 0.5], true, false),
        4 => (vec![third; 3], false, true),
        other => return Err(Error::UnknownCase(other)),
    };
    Ok(CaseSpec {
        id: case_id,
        alpha,
        feedback,
        greedy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MW: f64 = 1.0e6;

    fn uniform(feedback: bool) -> FarmDispatchState {
        FarmDispatchState::new(&[1.0 / 3.0; 3], 0.1, 10.0 * MW, feedback).unwrap()
    }

    #[test]
    fn integrator_gain_is_frozen_at_construction() {
        let s = uniform(true);
        assert!((s.k_i() - 1.0 / 0.3).abs() < 1e-12);
    }

    #[test]
    fn one_saturated_turbine_increments_integrator() {
        let mut s = uniform(true);
        let r = 10.0 * MW;
        let p_gen = [3.0 * MW, 3.0 * MW, 3.0 * MW];
        let p_dem = s.step(r, &p_gen, &[false, false, true]).unwrap();
        assert!((s.u - 333_333.333_333).abs() < 1e-3, "{}", s.u);
        for p in &p_dem {
            assert!((p - (r / 3.0 + 333_333.333_333)).abs() < 1e-3);
        }
        // The two unsaturated turbines contribute 2/3 of the error next step.
        let gained = 2.0 * s.u;
        assert!((gained - 666_666.667).abs() < 1.0);
    }

    #[test]
    fn no_saturation_splits_evenly() {
        let mut s = uniform(true);
        s.u = 5.0e5;
        let p_dem = s.step(10.0 * MW, &[3.0 * MW; 3], &[false; 3]).unwrap();
        assert_eq!(s.u, 0.0);
        for p in p_dem {
            assert!((p - 3.333_333e6).abs() < 1.0);
        }
    }

    #[test]
    fn anti_windup_freezes_integrator() {
        let mut s = uniform(true);
        s.step(10.0 * MW, &[2.0 * MW; 3], &[true, false, false]).unwrap();
        let frozen = s.u;
        for _ in 0..100 {
            s.step(10.0 * MW, &[2.0 * MW; 3], &[true; 3]).unwrap();
            assert_eq!(s.u.to_bits(), frozen.to_bits());
        }
    }

    #[test]
    fn all_saturated_integrator_may_unwind() {
        let mut s = uniform(true);
        s.u = 2.0 * MW;
        s.step(5.0 * MW, &[2.0 * MW; 3], &[true; 3]).unwrap();
        assert!(s.u < 2.0 * MW);
    }

    #[test]
    fn demands_at_rated_block_windup() {
        let mut s = uniform(true);
        // One turbine saturated, the other two already demanded at rated.
        s.u = 7.0 * MW;
        s.step(20.0 * MW, &[10.0 * MW, 10.0 * MW, 0.0], &[false, false, true]).unwrap();
        let u = s.u;
        for _ in 0..50 {
            let p_dem = s.step(20.0 * MW, &[10.0 * MW, 10.0 * MW, 0.0], &[false, false, true]).unwrap();
            assert_eq!(p_dem[0], 10.0 * MW);
            assert_eq!(s.u, u);
        }
    }

    #[test]
    fn open_loop_is_pure_feedforward() {
        let mut s = uniform(false);
        for k in 0..50 {
            let r = (5.0 + k as f64 * 0.1) * MW;
            let p_dem = s.step(r, &[1.0 * MW; 3], &[true, false, true]).unwrap();
            for (p, a) in p_dem.iter().zip(&s.alpha) {
                assert_eq!(*p, a * r);
            }
            assert_eq!(s.u, 0.0);
        }
    }

    #[test]
    fn demands_are_clamped() {
        let mut s = uniform(true);
        s.u = 20.0 * MW;
        let p_dem = s.step(10.0 * MW, &[1.0 * MW; 3], &[true, false, false]).unwrap();
        assert!(p_dem.iter().all(|&p| p == 10.0 * MW));
        s.u = -20.0 * MW;
        let p_dem = s.step(1.0 * MW, &[9.0 * MW; 3], &[true, false, false]).unwrap();
        assert!(p_dem.iter().all(|&p| p == 0.0));
    }

    #[test]
    fn bad_inputs_rejected() {
        let mut s = uniform(true);
        assert!(matches!(
            s.step(1.0, &[0.0; 2], &[false; 3]),
            Err(Error::DimensionMismatch { expected: 3, got: 2 })
        ));
        assert!(matches!(
            s.step(-1.0, &[0.0; 3], &[false; 3]),
            Err(Error::NegativeReference(_))
        ));
    }

    #[test]
    fn alpha_is_normalised() {
        let s = FarmDispatchState::new(&[2.0, 1.0, 1.0], 0.1, 10.0 * MW, true).unwrap();
        assert_eq!(s.alpha, vec![0.5, 0.25, 0.25]);
        assert!(FarmDispatchState::new(&[0.0, 0.0], 0.1, 1.0, true).is_err());
        assert!(FarmDispatchState::new(&[-1.0, 2.0], 0.1, 1.0, true).is_err());
    }

    #[test]
    fn unsaturated_split_rescales() {
        let mut s = uniform(true).with_split(CorrectionSplit::Unsaturated);
        let r = 9.0 * MW;
        let p_dem = s.step(r, &[2.0 * MW; 3], &[false, false, true]).unwrap();
        // u = e/3 = 1 MW, rescaled by 3/2.
        assert!((p_dem[0] - (3.0 * MW + 1.5 * MW)).abs() < 1e-6);
    }

    #[test]
    fn case_table() {
        let c3 = select_case(3).unwrap();
        for (a, e) in c3.alpha.iter().zip([0.167, 0.333, 0.500]) {
            assert!((a - e).abs() < 1e-3);
        }
        assert!(c3.feedback && !c3.greedy);
        assert!(select_case(4).unwrap().greedy);
        assert!(!select_case(0).unwrap().feedback);
        assert!(select_case(1).unwrap().feedback);
        let c2 = select_case(2).unwrap();
        assert!((c2.alpha.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!(matches!(select_case(5), Err(Error::UnknownCase(5))));
    }

    #[test]
    fn functional_form_leaves_input_untouched() {
        let s = uniform(true);
        let (p, next) = farm_step(10.0 * MW, &[3.0 * MW; 3], &[true, false, false], &s).unwrap();
        assert_eq!(s.u, 0.0);
        assert!(next.u > 0.0);
        assert_eq!(p.len(), 3);
    }
}
