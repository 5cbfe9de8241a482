use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::control::{ControlMode, ControllerConfig};
use crate::error::{Error, Result};
use crate::farm::{select_case, CorrectionSplit};
use crate::flow::FlowConfig;
use crate::turbine::TurbineParams;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimSection {
    /// s
    pub dt: f64,
    /// s
    pub duration: f64,
    /// Start of the metrics window, s.
    pub eval_start: f64,
    pub control_mode: ControlMode,
    pub output: Option<PathBuf>,
}

impl Default for SimSection {
    fn default() -> Self {
        Self {
            dt: 0.1,
            duration: 1000.0,
            eval_start: 200.0,
            control_mode: ControlMode::ModeII,
            output: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FarmSection {
    /// Benchmark case 0–4. Ignored when `alpha` is given.
    pub case: Option<u8>,
    /// Explicit nominal distribution; normalised on load.
    pub alpha: Option<Vec<f64>>,
    /// Closed loop for an explicit `alpha`.
    pub feedback: bool,
    pub correction_split: CorrectionSplit,
    /// Piecewise-constant farm reference as `[t, W]` pairs.
    pub reference: Vec<[f64; 2]>,
}

impl Default for FarmSection {
    fn default() -> Self {
        Self {
            case: Some(1),
            alpha: None,
            feedback: true,
            correction_split: CorrectionSplit::Uniform,
            reference: vec![[0.0, 10.0e6]],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StepTestSection {
    /// W
    pub base_power: f64,
    /// W, added at `t_up` and removed at `t_down`.
    pub step_power: f64,
    pub t_up: f64,
    pub t_down: f64,
    pub duration: f64,
    pub ti_levels: Vec<f64>,
}

impl Default for StepTestSection {
    fn default() -> Self {
        Self {
            base_power: 4.0e6,
            step_power: 0.5e6,
            t_up: 100.0,
            t_down: 200.0,
            duration: 300.0,
            ti_levels: vec![0.0, 0.05],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub cases: Vec<u8>,
    pub seeds: usize,
    pub first_seed: u64,
    pub output_dir: PathBuf,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            cases: vec![0, 1, 2, 3, 4],
            seeds: 20,
            first_seed: 1,
            output_dir: PathBuf::from("sweep_out"),
        }
    }
}

/// Everything needed to run one scenario. Loaded from a sectioned TOML file;
/// every key is optional and falls back to the defaults below.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub sim: SimSection,
    pub farm: FarmSection,
    pub flow: FlowConfig,
    pub controller: ControllerConfig,
    pub turbine: TurbineParams,
    pub steptest: StepTestSection,
    pub sweep: SweepSection,
}

/// How per-turbine demands are produced.
#[derive(Debug, Clone, PartialEq)]
pub enum Dispatch {
    /// One turbine follows the reference directly.
    Single,
    /// Nominal distribution, optionally closed loop.
    Farm { alpha: Vec<f64>, feedback: bool },
    /// Every turbine demanded at rated power.
    Greedy,
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    pub fn n_turbines(&self) -> usize {
        self.flow.positions.len()
    }

    pub fn n_steps(&self) -> usize {
        (self.sim.duration / self.sim.dt).round() as usize
    }

    pub fn dispatch(&self) -> Result<Dispatch> {
        if self.n_turbines() == 1 {
            return Ok(Dispatch::Single);
        }
        if let Some(alpha) = &self.farm.alpha {
            return Ok(Dispatch::Farm {
                alpha: alpha.clone(),
                feedback: self.farm.feedback,
            });
        }
        let case = self
            .farm
            .case
            .ok_or_else(|| Error::Config("farm.case or farm.alpha is required".into()))?;
        let spec = select_case(case)?;
        if spec.greedy {
            return Ok(Dispatch::Greedy);
        }
        if spec.alpha.len() != self.n_turbines() {
            return Err(Error::Config(format!(
                "case {case} is defined for {} turbines, layout has {}",
                spec.alpha.len(),
                self.n_turbines()
            )));
        }
        Ok(Dispatch::Farm {
            alpha: spec.alpha,
            feedback: spec.feedback,
        })
    }

    /// Farm reference at time `t`.
    pub fn reference(&self, t: f64) -> f64 {
        let sched = &self.farm.reference;
        sched
            .iter()
            .rev()
            .find(|e| e[0] <= t)
            .or(sched.first())
            .map_or(0.0, |e| e[1])
    }

    /// Select a benchmark case, dropping any explicit distribution.
    pub fn with_case(mut self, case: u8) -> Self {
        self.farm.case = Some(case);
        self.farm.alpha = None;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.flow.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let s = &self.sim;
        if !(s.dt > 0.0) {
            return Err(Error::Config("sim.dt must be positive".into()));
        }
        if !(s.duration >= s.dt) {
            return Err(Error::Config("sim.duration must be at least one step".into()));
        }
        if self.farm.reference.is_empty() {
            return Err(Error::Config("farm.reference needs at least one entry".into()));
        }
        if self.farm.reference.windows(2).any(|w| w[1][0] < w[0][0])
            || self.farm.reference.iter().any(|e| !(e[1] >= 0.0))
        {
            return Err(Error::Config(
                "farm.reference must be time-ordered with non-negative powers".into(),
            ));
        }
        if let Some(alpha) = &self.farm.alpha {
            if alpha.len() != self.n_turbines() {
                return Err(Error::Config(format!(
                    "farm.alpha has {} entries for {} turbines",
                    alpha.len(),
                    self.n_turbines()
                )));
            }
        }
        self.flow.validate()?;
        self.controller.validate()?;
        self.turbine.validate()?;
        self.dispatch()?;
        Ok(())
    }
}
