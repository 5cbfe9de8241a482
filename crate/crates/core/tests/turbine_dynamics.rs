use apc_core::control::{ControllerConfig, GreedyCurve};
use apc_core::turbine::{step_drivetrain, TurbineModel, TurbineParams, TurbineState};
use proptest::prelude::*;
use std::sync::OnceLock;

fn shared_model() -> &'static TurbineModel {
    static MODEL: OnceLock<TurbineModel> = OnceLock::new();
    MODEL.get_or_init(|| setup().0)
}

fn setup() -> (TurbineModel, GreedyCurve, ControllerConfig) {
    let cfg = ControllerConfig::default();
    let model = TurbineModel::new(TurbineParams::default(), cfg.theta_fine, cfg.theta_max).unwrap();
    (model, GreedyCurve::new(&cfg), cfg)
}

/// Constant wind and pitch under the greedy torque curve.
fn run_greedy(wind: f64, omega0: f64, dt: f64, duration: f64) -> TurbineState {
    let (model, curve, cfg) = setup();
    let n = model.params.gearbox_ratio;
    let mut s = TurbineState {
        rotor_speed: omega0,
        pitch: cfg.theta_fine,
        ..Default::default()
    };
    for _ in 0..(duration / dt).round() as usize {
        let tau_gen = curve.torque(n * s.rotor_speed);
        let tau_aero = model.aero_torque(wind, &s).unwrap();
        s = step_drivetrain(&s, tau_aero, tau_gen, dt, &model.params);
    }
    s
}

#[test]
fn greedy_law_converges_to_optimal_tip_speed_ratio() {
    let (model, ..) = setup();
    for (wind, omega0) in [(8.0, 0.5), (9.0, 0.6), (9.0, 1.0), (7.5, 0.9)] {
        let s = run_greedy(wind, omega0, 0.1, 2000.0);
        let lambda = model.tip_speed_ratio(s.rotor_speed, wind);
        assert!(
            (lambda / model.params.lambda_opt - 1.0).abs() < 0.005,
            "U={wind} start={omega0}: lambda {lambda}"
        );
    }
}

#[test]
fn euler_step_size_sanity() {
    let coarse = run_greedy(9.0, 0.6, 0.1, 100.0);
    let fine = run_greedy(9.0, 0.6, 0.05, 100.0);
    let rel = (coarse.rotor_speed / fine.rotor_speed - 1.0).abs();
    assert!(rel < 0.002, "{rel}");
}

#[test]
fn power_identity_every_step() {
    let (model, curve, cfg) = setup();
    let p = &model.params;
    let mut s = TurbineState {
        rotor_speed: 0.7,
        pitch: cfg.theta_fine,
        ..Default::default()
    };
    for _ in 0..500 {
        let tau_gen = curve.torque(p.gearbox_ratio * s.rotor_speed);
        let tau_aero = model.aero_torque(9.0, &s).unwrap();
        s = step_drivetrain(&s, tau_aero, tau_gen, 0.1, p);
        assert_eq!(s.gen_power, s.gen_torque * s.gen_speed(p) * p.generator_efficiency);
    }
}

proptest! {
    #[test]
    fn thrust_non_negative_and_falls_with_pitch(
        lambda in 1.0f64..20.0,
        wind in 3.0f64..20.0,
        pitch in 0.75f64..40.0,
        extra in 0.5f64..5.0,
    ) {
        let model = shared_model();
        let omega = lambda * wind / model.params.rotor_radius;
        let lo = model.thrust(wind, omega, pitch);
        let hi = model.thrust(wind, omega, (pitch + extra).min(45.0));
        prop_assert!(lo >= 0.0 && hi >= 0.0);
        prop_assert!(hi <= lo + 1e-9 * lo.max(1.0));
    }

    #[test]
    fn induction_stays_below_half(lambda in 0.1f64..30.0, pitch in 0.0f64..50.0) {
        let model = shared_model();
        let a = apc_core::turbine::induction_from_ct(model.ct(lambda, pitch));
        prop_assert!((0.0..0.5).contains(&a));
    }
}
