use apc_core::control::ControlMode;
use apc_core::sim::{step_test, step_test_config, ScenarioConfig, Simulation, StepRecord};

const T_UP: usize = 1000;
const T_DOWN: usize = 2000;

/// `|P_gen^{k+1} − P_dem^k|` for the single turbine.
fn delay_error(recs: &[StepRecord], k: usize) -> f64 {
    (recs[k + 1].turbines[0].p_gen - recs[k].turbines[0].p_dem).abs()
}

/// Samples after `k0` until the one-sample-delay error first drops to `tol`
/// and stays there for `hold` samples.
fn settle_samples(recs: &[StepRecord], k0: usize, tol: f64, hold: usize) -> Option<usize> {
    (k0..k0 + 900).find(|&k| (k..k + hold).all(|j| delay_error(recs, j) <= tol)).map(|k| k - k0)
}

#[test]
fn down_step_behaves_as_one_sample_delay() {
    let cfg = ScenarioConfig::default();
    let tol = 0.01 * cfg.steptest.step_power;
    for mode in [ControlMode::ModeI, ControlMode::ModeII] {
        let recs = step_test(&cfg, mode, 0.0).unwrap();
        let n = settle_samples(&recs, T_DOWN, tol, 50).unwrap();
        assert!(n <= 10, "{mode:?}: {n} samples");
    }
}

#[test]
fn mode_two_down_steps_settle_no_slower_than_up_steps() {
    let cfg = ScenarioConfig::default();
    let tol = 0.01 * cfg.steptest.step_power;
    let recs = step_test(&cfg, ControlMode::ModeII, 0.0).unwrap();
    let up = settle_samples(&recs, T_UP, tol, 50).unwrap();
    let down = settle_samples(&recs, T_DOWN, tol, 50).unwrap();
    assert!(down <= up, "down {down} up {up}");
}

#[test]
fn mode_two_up_step_keeps_speed_changes_small() {
    let cfg = ScenarioConfig::default();
    let recs = step_test(&cfg, ControlMode::ModeII, 0.0).unwrap();
    for w in recs[T_UP..T_DOWN].windows(2) {
        let (a, b) = (w[0].turbines[0].omega_r, w[1].turbines[0].omega_r);
        assert!((b / a - 1.0).abs() < 0.01);
    }
}

#[test]
fn constant_demand_is_tracked_in_steady_state() {
    let mut cfg = ScenarioConfig::default();
    cfg.flow.positions = vec![0.0];
    cfg.farm.reference = vec![[0.0, 4.0e6]];
    cfg.sim.duration = 600.0;
    for mode in [ControlMode::ModeI, ControlMode::ModeII] {
        cfg.sim.control_mode = mode;
        let recs = apc_core::simulate(&cfg).unwrap();
        for r in &recs[5000..] {
            let p = r.turbines[0].p_gen;
            assert!((p / 4.0e6 - 1.0).abs() < 0.001, "{mode:?} t={}: {p}", r.t);
        }
    }
}

/// Lowest tip-speed ratio after an up-step beyond the available power.
/// Runs until the scenario ends or the rotor stops.
fn min_tip_speed_ratio_after_overload(mode: ControlMode) -> (f64, bool) {
    let mut cfg = ScenarioConfig::default();
    cfg.steptest.step_power = 2.5e6;
    cfg.steptest.t_down = 130.0;
    let cfg = step_test_config(&cfg, mode, 0.0);
    let mut sim = Simulation::new(cfg.clone()).unwrap();
    let radius = sim.model().params.rotor_radius;
    let mut min = f64::INFINITY;
    for k in 0..cfg.n_steps() {
        match sim.step() {
            Ok(r) if k >= T_UP => {
                let t = &r.turbines[0];
                min = min.min(t.omega_r * radius / t.u_eff);
            }
            Ok(_) => {}
            Err(_) => return (min, true),
        }
    }
    (min, false)
}

#[test]
fn mode_one_loses_more_tip_speed_ratio_than_mode_two() {
    let (one, one_stopped) = min_tip_speed_ratio_after_overload(ControlMode::ModeI);
    let (two, two_stopped) = min_tip_speed_ratio_after_overload(ControlMode::ModeII);
    assert!(!two_stopped);
    assert!(one < two, "mode I {one} (stopped: {one_stopped}), mode II {two}");
    assert!(two > 6.5);
}

#[test]
fn turbulent_step_tests_run_clean() {
    let cfg = ScenarioConfig::default();
    for mode in [ControlMode::ModeI, ControlMode::ModeII] {
        let recs = step_test(&cfg, mode, 0.05).unwrap();
        assert_eq!(recs.len(), 3000);
        assert!(recs.iter().all(|r| r.turbines[0].omega_r > 0.3));
    }
}
