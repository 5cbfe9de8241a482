//! Scenario engine.
//!
//! Each step reads the wind field, measures every turbine, dispatches the farm
//! reference, runs the turbine controllers and finally integrates the
//! drivetrains over one sample. The record for step `k` captures the state at
//! `t_k` together with the demand issued at `t_k`, so a turbine that tracks
//! perfectly shows `P_gen^{k+1} = P_dem^k`.

mod checks;
mod config;
mod metrics;
mod records;
mod sweep;

use std::sync::Arc;

pub use checks::{check_records, CheckReport, Violation};
pub use config::{Dispatch, FarmSection, ScenarioConfig, SimSection, StepTestSection, SweepSection};
pub use metrics::{compute_metrics, mean_power, Metrics};
pub use records::{
    format_row, header, parse_records, read_records, write_records, write_records_to, StepRecord,
    TurbineRecord,
};
pub use sweep::{
    jobs, run_many, run_many_sequential, summary_csv, write_sweep, SweepJob, SweepResult,
};

use crate::control::{
    greedy_equilibrium, ControlLaws, ControlMode, GreedyPowerMap, Measurements, TurbineController,
};
use crate::error::Result;
use crate::farm::FarmDispatchState;
use crate::flow::{effective_wind, jensen_deficit, Turbulence, WakeBuffer};
use crate::turbine::{step_drivetrain, Mode, TurbineModel, TurbineState};

enum Dispatcher {
    Single,
    Greedy,
    Farm(FarmDispatchState),
}

pub struct Simulation {
    cfg: ScenarioConfig,
    model: TurbineModel,
    laws: Arc<ControlLaws>,
    greedy_power: GreedyPowerMap,
    turbulence: Turbulence,
    wakes: WakeBuffer,
    states: Vec<TurbineState>,
    controllers: Vec<TurbineController>,
    dispatcher: Dispatcher,
    step: usize,
}

impl Simulation {
    pub fn new(cfg: ScenarioConfig) -> Result<Self> {
        cfg.validate()?;
        let ctrl = &cfg.controller;
        let params = cfg.turbine.recalibrated(ctrl.k_greedy)?;
        let model = TurbineModel::new(params, ctrl.theta_fine, ctrl.theta_max)?;
        let laws = Arc::new(ControlLaws::new(ctrl.clone())?);
        let greedy_power = GreedyPowerMap::build(&model, &laws.curve, ctrl.theta_fine);
        let dt = cfg.sim.dt;
        let turbulence = Turbulence::new(&cfg.flow, dt);

        // Start every turbine at its greedy operating point, walking downstream
        // so each one sees the wakes of those already placed.
        let n = cfg.n_turbines();
        let n_gear = model.params.gearbox_ratio;
        let u_inf = cfg.flow.base_wind(0.0) * (1.0 + turbulence.value());
        let mut inductions = Vec::with_capacity(n);
        let mut states = Vec::with_capacity(n);
        for i in 0..n {
            let sum_sq: f64 = (0..i)
                .map(|j| {
                    let x = cfg.flow.positions[i] - cfg.flow.positions[j];
                    jensen_deficit(inductions[j], x, cfg.flow.wake_decay).powi(2)
                })
                .sum();
            let wind = u_inf * (1.0 - sum_sq.sqrt());
            let rotor_speed = greedy_equilibrium(&model, &laws.curve, ctrl.theta_fine, wind)
                .unwrap_or(laws.curve.rated_speed() / n_gear);
            let gen_speed = rotor_speed * n_gear;
            let gen_torque = laws.curve.torque(gen_speed);
            inductions.push(model.induction(wind, rotor_speed, ctrl.theta_fine));
            states.push(TurbineState {
                rotor_speed,
                pitch: ctrl.theta_fine,
                gen_torque,
                gen_power: gen_torque * gen_speed * model.params.generator_efficiency,
                thrust: model.thrust(wind, rotor_speed, ctrl.theta_fine),
                mode: Mode::Tracking,
                speed_clamps: 0,
            });
        }
        let wakes = WakeBuffer::new(&cfg.flow, dt, &inductions)?;

        let control_mode = match cfg.dispatch()? {
            Dispatch::Greedy => ControlMode::ModeII,
            _ => cfg.sim.control_mode,
        };
        let controllers = states
            .iter()
            .map(|s| {
                TurbineController::new(
                    Arc::clone(&laws),
                    control_mode,
                    s.pitch,
                    s.gen_speed(&model.params),
                    s.gen_torque,
                )
            })
            .collect();

        let dispatcher = match cfg.dispatch()? {
            Dispatch::Single => Dispatcher::Single,
            Dispatch::Greedy => Dispatcher::Greedy,
            Dispatch::Farm { alpha, feedback } => Dispatcher::Farm(
                FarmDispatchState::new(&alpha, dt, ctrl.rated_power, feedback)?
                    .with_split(cfg.farm.correction_split),
            ),
        };

        Ok(Self {
            cfg,
            model,
            laws,
            greedy_power,
            turbulence,
            wakes,
            states,
            controllers,
            dispatcher,
            step: 0,
        })
    }

    pub fn config(&self) -> &ScenarioConfig {
        &self.cfg
    }

    pub fn model(&self) -> &TurbineModel {
        &self.model
    }

    pub fn laws(&self) -> &ControlLaws {
        &self.laws
    }

    pub fn states(&self) -> &[TurbineState] {
        &self.states
    }

    pub fn controllers(&self) -> &[TurbineController] {
        &self.controllers
    }

    /// Integrator state of the farm dispatcher, when there is one.
    pub fn dispatch_state(&self) -> Option<&FarmDispatchState> {
        match &self.dispatcher {
            Dispatcher::Farm(s) => Some(s),
            _ => None,
        }
    }

    /// Greedy steady-state power at a rotor-averaged wind speed.
    pub fn greedy_power(&self, wind_speed: f64) -> f64 {
        self.greedy_power.power(wind_speed)
    }

    /// Advance one sample and return the record for the state it started from.
    pub fn step(&mut self) -> Result<StepRecord> {
        let k = self.step;
        self.step_inner().map_err(|e| e.at_step(k))
    }

    fn step_inner(&mut self) -> Result<StepRecord> {
        let k = self.step;
        let dt = self.cfg.sim.dt;
        let t = k as f64 * dt;
        let n = self.states.len();

        let x = if k == 0 {
            self.turbulence.value()
        } else {
            self.turbulence.step()
        };
        let u_inf = self.cfg.flow.base_wind(t) * (1.0 + x);
        let winds: Vec<f64> = (0..n)
            .map(|i| effective_wind(i, u_inf, &self.wakes, &self.cfg.flow))
            .collect();
        let p_gen: Vec<f64> = self.states.iter().map(|s| s.gen_power).collect();
        let saturated: Vec<bool> = self
            .states
            .iter()
            .map(|s| s.mode == Mode::GreedyFallback)
            .collect();

        let r = self.cfg.reference(t);
        let p_dem = match &mut self.dispatcher {
            Dispatcher::Single => vec![r; n],
            Dispatcher::Greedy => vec![self.laws.cfg.rated_power; n],
            Dispatcher::Farm(state) => state.step(r, &p_gen, &saturated)?,
        };
        let u = self.dispatch_state().map_or(0.0, |s| s.u);
        let p_bar: f64 = p_gen.iter().sum();

        let params = &self.model.params;
        let mut turbines = Vec::with_capacity(n);
        let mut inductions = Vec::with_capacity(n);
        for i in 0..n {
            let s = &self.states[i];
            let thrust = self.model.thrust(winds[i], s.rotor_speed, s.pitch);
            inductions.push(self.model.induction(winds[i], s.rotor_speed, s.pitch));
            turbines.push(TurbineRecord {
                u_eff: winds[i],
                omega_r: s.rotor_speed,
                pitch: s.pitch,
                tau_gen: s.gen_torque,
                p_dem: p_dem[i],
                p_gen: p_gen[i],
                thrust,
                mode: s.mode,
                saturated: saturated[i],
            });
        }

        for i in 0..n {
            let meas = Measurements {
                gen_speed: self.states[i].gen_speed(params),
                p_greedy: self.greedy_power.power(winds[i]),
            };
            let cmd = self.controllers[i].step(p_dem[i], meas, dt)?;
            let mut s = self.states[i];
            s.pitch = cmd.pitch;
            s.mode = cmd.mode;
            s.thrust = turbines[i].thrust;
            let tau_aero = self.model.aero_torque(winds[i], &s)?;
            self.states[i] = step_drivetrain(&s, tau_aero, cmd.gen_torque, dt, params);
        }
        self.wakes.push(&inductions);
        self.step += 1;

        Ok(StepRecord {
            t,
            turbines,
            r,
            p_bar,
            e: r - p_bar,
            u,
        })
    }

    /// Run for the configured duration.
    pub fn run(&mut self) -> Result<Vec<StepRecord>> {
        let n = self.cfg.n_steps();
        let mut records = Vec::with_capacity(n);
        for _ in 0..n {
            records.push(self.step()?);
        }
        Ok(records)
    }
}

pub fn simulate(cfg: &ScenarioConfig) -> Result<Vec<StepRecord>> {
    Simulation::new(cfg.clone())?.run()
}

pub fn run_scenario(cfg: &ScenarioConfig) -> Result<(Vec<StepRecord>, Metrics)> {
    let records = simulate(cfg)?;
    let metrics = compute_metrics(&records, None, cfg.sim.eval_start)?;
    Ok((records, metrics))
}

/// Single-turbine configuration for the demand step experiment: one up-step
/// and one down-step around `base_power` under the given turbulence level.
pub fn step_test_config(cfg: &ScenarioConfig, mode: ControlMode, ti: f64) -> ScenarioConfig {
    let st = &cfg.steptest;
    let mut out = cfg.clone();
    out.flow.positions = vec![0.0];
    out.flow.ti = ti;
    out.farm.alpha = None;
    out.farm.reference = vec![
        [0.0, st.base_power],
        [st.t_up, st.base_power + st.step_power],
        [st.t_down, st.base_power],
    ];
    out.sim.control_mode = mode;
    out.sim.duration = st.duration;
    out.sim.eval_start = out.sim.eval_start.min(st.t_up);
    out
}

pub fn step_test(cfg: &ScenarioConfig, mode: ControlMode, ti: f64) -> Result<Vec<StepRecord>> {
    simulate(&step_test_config(cfg, mode, ti))
}
