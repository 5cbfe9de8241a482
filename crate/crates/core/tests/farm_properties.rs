use apc_core::farm::{FarmDispatchState, select_case};
use proptest::prelude::*;

const RATED: f64 = 10.0e6;
const DT: f64 = 0.1;

fn alpha_strategy() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.05f64..1.0, 2..6)
}

proptest! {
    #[test]
    fn alpha_sums_to_one(alpha in alpha_strategy()) {
        let s = FarmDispatchState::new(&alpha, DT, RATED, true).unwrap();
        let sum: f64 = s.alpha.iter().sum();
        prop_assert!((sum - 1.0).abs() < 1e-12);
        prop_assert!((s.k_i() - 1.0 / (alpha.len() as f64 * DT)).abs() < 1e-9);
    }

    #[test]
    fn demand_bookkeeping(
        alpha in alpha_strategy(),
        r in 0.0f64..5.0e6,
        gen in 0.0f64..3.0e6,
        sat_mask in any::<u8>(),
        steps in 1usize..20,
    ) {
        let n = alpha.len();
        let mut s = FarmDispatchState::new(&alpha, DT, 100.0 * RATED, true).unwrap();
        let sat: Vec<bool> = (0..n).map(|i| sat_mask >> i & 1 == 1).collect();
        let p_gen = vec![gen / n as f64; n];
        for _ in 0..steps {
            let p_dem = s.step(r, &p_gen, &sat).unwrap();
            let unclamped = p_dem.iter().all(|&p| p > 0.0);
            if unclamped {
                let sum: f64 = p_dem.iter().sum();
                prop_assert!((sum - (r + n as f64 * s.u)).abs() <= 1e-6 * r.max(1.0));
            }
            if !sat.iter().any(|&x| x) {
                prop_assert_eq!(s.u, 0.0);
            }
        }
    }

    #[test]
    fn open_loop_is_feedforward_only(
        alpha in alpha_strategy(),
        refs in prop::collection::vec(0.0f64..20.0e6, 1..50),
        sat_mask in any::<u8>(),
    ) {
        let n = alpha.len();
        let mut s = FarmDispatchState::new(&alpha, DT, RATED, false).unwrap();
        let sat: Vec<bool> = (0..n).map(|i| sat_mask >> i & 1 == 1).collect();
        for r in refs {
            let p_dem = s.step(r, &vec![1.0e6; n], &sat).unwrap();
            for (p, a) in p_dem.iter().zip(&s.alpha) {
                prop_assert_eq!(*p, (a * r).clamp(0.0, RATED));
            }
        }
    }

    /// Closed loop against delay turbines with random, time-varying
    /// capacities. Each turbine produces `min(P_dem, capacity)` one sample
    /// later and reports saturation when its demand exceeds capacity.
    #[test]
    fn integrator_is_bounded(
        case in 1u8..4,
        r in 0.0f64..30.0e6,
        caps in prop::collection::vec(prop::collection::vec(0.0f64..RATED, 3), 50..300),
    ) {
        let spec = select_case(case).unwrap();
        let mut s = FarmDispatchState::new(&spec.alpha, DT, RATED, true).unwrap();
        let mut p_gen = vec![0.0; 3];
        let mut sat = vec![false; 3];
        let bound = r.max(3.0 * RATED) + 3.0 * RATED;
        for cap in &caps {
            let p_dem = s.step(r, &p_gen, &sat).unwrap();
            prop_assert!(s.u.abs() <= bound, "u = {}", s.u);
            for i in 0..3 {
                p_gen[i] = p_dem[i].min(cap[i]);
                sat[i] = p_dem[i] > cap[i];
            }
        }
    }
}

#[test]
fn frozen_integrator_survives_hundred_saturated_steps() {
    let spec = select_case(1).unwrap();
    let mut s = FarmDispatchState::new(&spec.alpha, DT, RATED, true).unwrap();
    s.step(12.0e6, &[3.0e6; 3], &[true, false, false]).unwrap();
    let frozen = s.u;
    for _ in 0..100 {
        s.step(12.0e6, &[3.0e6; 3], &[true; 3]).unwrap();
    }
    assert_eq!(s.u.to_bits(), frozen.to_bits());
}
