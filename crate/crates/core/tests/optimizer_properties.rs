use proptest::prelude::*;
use rud_core::objectives::{make_random_spd, MatrixQuadratic, ScalarQuadratic};
use rud_core::{
    run, step_gd, step_nag, step_nag_original, step_nag_two_stage, FnObjective, Method, Objective,
    OptimizerState, Schedule,
};

/// Smooth non-quadratic test function: sum of log-cosh plus a quartic.
fn logcosh(dim: usize) -> impl Objective<f64> {
    FnObjective::new(
        dim,
        |th: &[f64]| th.iter().map(|x| x.cosh().ln() + 0.05 * x.powi(4)).sum::<f64>(),
        |th: &[f64]| th.iter().map(|x| x.tanh() + 0.2 * x.powi(3)).collect(),
    )
}

fn spd(dim: usize, seed: u64) -> MatrixQuadratic<f64> {
    make_random_spd(dim, seed, 0.01, 1.0).unwrap()
}

const MOMENTUM_METHODS: [Method; 5] = [
    Method::Mom,
    Method::Nag,
    Method::NagOriginal,
    Method::NagTwoStage,
    Method::Rud,
];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn first_step_is_gradient_descent(
        theta in prop::collection::vec(-3.0f64..3.0, 1..6),
        alpha in 0.01f64..1.0,
        mu in 0.0f64..1.0,
    ) {
        let f = logcosh(theta.len());
        let state = OptimizerState::new(theta.clone());
        let gd = step_gd(&state, &f, alpha).unwrap();
        for m in MOMENTUM_METHODS {
            let s = m.step(&state, &f, alpha, mu).unwrap();
            prop_assert_eq!(&s.theta, &gd.theta, "{}", m);
        }
    }

    #[test]
    fn stationary_point_is_fixed(alpha in 0.01f64..1.0, mu in 0.0f64..1.0, seed in 0u64..1000) {
        let q = spd(5, seed);
        let x = q.minimizer().unwrap();
        // pick b so that x is exactly stationary: use the scalar problem and zero
        let state = OptimizerState::new(vec![0.0]);
        for m in Method::ALL {
            let s = m.step(&state, &ScalarQuadratic, alpha, mu).unwrap();
            prop_assert_eq!(&s.theta, &state.theta);
            prop_assert_eq!(&s.velocity, &state.velocity);
        }
        // and on a random quadratic the minimizer is fixed up to solver rounding
        let state = OptimizerState::new(x.clone());
        for m in Method::ALL {
            let s = m.step(&state, &q, alpha, mu).unwrap();
            for (a, b) in s.theta.iter().zip(&x) {
                prop_assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn zero_momentum_first_step_matches_gd(
        theta in prop::collection::vec(-3.0f64..3.0, 1..6),
        alpha in 0.01f64..1.0,
    ) {
        let f = logcosh(theta.len());
        let state = OptimizerState::new(theta);
        let gd = step_gd(&state, &f, alpha).unwrap();
        for m in [Method::Mom, Method::Nag, Method::Rud] {
            let s = m.step(&state, &f, alpha, 0.0).unwrap();
            prop_assert_eq!(&s.theta, &gd.theta);
            prop_assert_eq!(&s.velocity, &gd.velocity);
        }
    }

    #[test]
    fn two_stage_equals_velocity_nag(
        theta in prop::collection::vec(-3.0f64..3.0, 1..6),
        velocity in prop::collection::vec(-1.0f64..1.0, 6),
        alpha in 0.01f64..1.0,
        mu in 0.0f64..1.0,
    ) {
        let n = theta.len();
        let f = logcosh(n);
        let state = OptimizerState::with_velocity(theta, velocity[..n].to_vec(), 3).unwrap();
        let a = step_nag(&state, &f, alpha, mu).unwrap();
        let b = step_nag_two_stage(&state, &f, alpha, (1.0 - mu) / alpha).unwrap();
        for (x, y) in a.theta.iter().zip(&b.theta).chain(a.velocity.iter().zip(&b.velocity)) {
            prop_assert!((x - y).abs() <= 1e-12, "{x} vs {y}");
        }
    }

    #[test]
    fn nag_forms_agree_on_quadratics(
        dim in 1usize..8,
        seed in 0u64..500,
        alpha in 0.01f64..1.0,
        mu in 0.0f64..1.0,
    ) {
        let q = spd(dim, seed);
        let theta1: Vec<f64> = (0..dim).map(|i| ((i + 1) as f64).sin()).collect();
        let sched = Schedule::constant(alpha, mu).unwrap();
        let velocity = run(Method::Nag, &q, theta1.clone(), &sched, 200).unwrap();
        let original = run(Method::NagOriginal, &q, theta1.clone(), &sched, 200).unwrap();
        let two_stage = run(Method::NagTwoStage, &q, theta1, &sched, 200).unwrap();
        for ((a, b), c) in velocity.records().iter().zip(original.records()).zip(two_stage.records()) {
            for i in 0..dim {
                prop_assert!((a.theta[i] - b.theta[i]).abs() < 1e-10);
                prop_assert!((a.theta[i] - c.theta[i]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn update_bookkeeping(seed in 0u64..500, alpha in 0.01f64..1.0, mu in 0.0f64..1.0) {
        let q = spd(4, seed);
        let sched = Schedule::constant(alpha, mu).unwrap();
        for m in Method::ALL {
            let trace = run(m, &q, vec![1.0, -0.5, 0.25, 2.0], &sched, 40).unwrap();
            for w in trace.records().windows(2) {
                for i in 0..4 {
                    let step = w[1].theta[i] - w[0].theta[i];
                    let scale = w[0].theta[i].abs().max(w[1].theta[i].abs());
                    prop_assert!((step - w[1].velocity[i]).abs() <= 2.0 * f64::EPSILON * scale);
                }
            }
        }
    }

    #[test]
    fn trace_values_are_recomputable(seed in 0u64..200, mu in 0.0f64..1.0) {
        let q = spd(3, seed);
        let sched = Schedule::constant(0.3, mu).unwrap();
        for m in Method::ALL {
            let trace = run(m, &q, vec![1.0, 2.0, 3.0], &sched, 25).unwrap();
            for (k, r) in trace.records().iter().enumerate() {
                prop_assert_eq!(r.t, k + 1);
                prop_assert_eq!(r.objective_value, q.value(&r.theta));
            }
        }
    }
}

#[test]
fn nag_original_standalone_matches_velocity_form() {
    let f = ScalarQuadratic;
    let a = step_nag_original(&[0.8f64], &[1.0], &f, 0.2, 0.9).unwrap();
    let state = OptimizerState::with_velocity(vec![0.8], vec![-0.2], 2).unwrap();
    let b = step_nag(&state, &f, 0.2, 0.9).unwrap();
    assert!((a[0] - b.theta[0]).abs() < 1e-15);
}

#[test]
fn stationary_gd_trace_is_constant() {
    let f = logcosh(3);
    let sched = Schedule::nesterov(0.4).unwrap();
    let trace = run(Method::Gd, &f, vec![0.0; 3], &sched, 5).unwrap();
    assert_eq!(trace.len(), 5);
    for r in trace.records() {
        assert_eq!(r.theta, vec![0.0; 3]);
        assert_eq!(r.objective_value, 0.0);
    }
}

#[test]
fn nag_and_two_stage_scalar_fifty_steps() {
    let sched = Schedule::constant(0.2, 0.9).unwrap();
    let a = run(Method::Nag, &ScalarQuadratic, vec![1.0f64], &sched, 50).unwrap();
    let b = run(Method::NagTwoStage, &ScalarQuadratic, vec![1.0], &sched, 50).unwrap();
    for (x, y) in a.component(0).iter().zip(b.component(0)) {
        assert!((x - y).abs() < 1e-12);
    }
}

#[test]
fn nesterov_schedule_drives_all_methods_down() {
    let q = spd(50, 2);
    let sched = Schedule::nesterov(0.2).unwrap();
    let jstar = q.min_value().unwrap();
    for m in Method::ALL {
        let trace = run(m, &q, vec![1.0; 50], &sched, 300).unwrap();
        let first = trace.records()[0].objective_value - jstar;
        let last = trace.last().unwrap().objective_value - jstar;
        let factor = if m == Method::Gd { 0.5 } else { 0.01 };
        assert!(last < factor * first, "{m}: {first} -> {last}");
    }
}

#[test]
fn f32_runs_too() {
    let sched = Schedule::<f32>::constant(0.2, 0.9).unwrap();
    let trace = run(Method::Rud, &ScalarQuadratic, vec![1.0f32], &sched, 3).unwrap();
    let th = trace.component(0);
    assert!((th[2] - 0.5).abs() < 1e-6);
}
