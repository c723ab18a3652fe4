//! Invariant suites run by `rudbench selfcheck`.
//!
//! The region and convergence suites take the coefficient model as a
//! parameter so a deliberately wrong model can show that they fail.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rud_core::objectives::{
    finite_diff_grad_relative, make_random_spd, ImageDataset, parse_idx_images, relative_error, write_idx_images, MlpAutoencoder,
    ScalarQuadratic,
};
use rud_core::spectral::{
    closed_form_trajectory, rasterize_region_with, roots, rud_region_closed_form, stability,
    stability_with, CoefficientModel, QuadraticModel, RegionPredicate,
};
use rud_core::{run, step_nag, step_nag_two_stage, FnObjective, IdxError, Method, Objective, OptimizerState, Schedule};

/// Failure messages kept per suite; the count covers all of them.
const MAX_MESSAGES: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub name: &'static str,
    pub checks: usize,
    pub failures: usize,
    pub messages: Vec<String>,
}

impl SuiteReport {
    fn new(name: &'static str) -> Self {
        SuiteReport {
            name,
            checks: 0,
            failures: 0,
            messages: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, message: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures += 1;
            if self.messages.len() < MAX_MESSAGES {
                self.messages.push(message());
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0 && self.checks > 0
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        write!(
            f,
            "{verdict} {:<28} {}/{} checks passed",
            self.name,
            self.checks - self.failures,
            self.checks
        )?;
        for m in &self.messages {
            write!(f, "\n     {m}")?;
        }
        Ok(())
    }
}

pub const SUITE_NAMES: [&str; 9] = [
    "first-step-universality",
    "two-stage-identity",
    "nag-form-equivalence",
    "closed-form-vs-iterated",
    "nag-mom-convergence",
    "rud-region-exactness",
    "rate-ordering",
    "gradient-checks",
    "idx-round-trip",
];

pub fn run_all() -> Vec<SuiteReport> {
    run_with(&QuadraticModel)
}

pub fn run_with<M: CoefficientModel<f64>>(model: &M) -> Vec<SuiteReport> {
    vec![
        first_step_universality(),
        two_stage_identity(),
        nag_form_equivalence(),
        closed_form_vs_iterated(),
        nag_mom_convergence(model),
        rud_region_exactness(model),
        rate_ordering(model),
        gradient_checks(),
        idx_round_trip(),
    ]
}

fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

fn first_step_universality() -> SuiteReport {
    let mut r = SuiteReport::new(SUITE_NAMES[0]);
    let log_cosh = FnObjective::new(
        1,
        |th: &[f64]| th[0].cosh().ln() + 0.25 * th[0].powi(4),
        |th: &[f64]| vec![th[0].tanh() + th[0].powi(3)],
    );
    for &alpha in &grid(0.01, 1.0, 12) {
        for &mu in &grid(0.0, 1.0, 11) {
            for theta1 in [1.0, -2.5, 0.3] {
                for method in [Method::Mom, Method::Nag, Method::Rud] {
                    let state = OptimizerState::new(vec![theta1]);
                    let quad = method.step(&state, &ScalarQuadratic, alpha, mu);
                    let expect = (1.0 - alpha) * theta1;
                    r.check(
                        matches!(&quad, Ok(s) if (s.theta[0] - expect).abs() <= 1e-15 * theta1.abs().max(1.0)),
                        || format!("{method} alpha={alpha} mu={mu}: {quad:?} vs {expect}"),
                    );
                    let gen = method.step(&state, &log_cosh, alpha, mu);
                    let expect = theta1 - alpha * log_cosh.gradient(&[theta1])[0];
                    r.check(
                        matches!(&gen, Ok(s) if (s.theta[0] - expect).abs() <= 1e-15 * expect.abs().max(1.0)),
                        || format!("{method} (log-cosh) alpha={alpha} mu={mu}: {gen:?} vs {expect}"),
                    );
                }
            }
        }
    }
    r
}

fn two_stage_identity() -> SuiteReport {
    let mut r = SuiteReport::new(SUITE_NAMES[1]);
    let problem = make_random_spd::<f64>(8, 3, 0.01, 1.0).expect("valid instance");
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let alpha: f64 = rng.random_range(0.01..1.0);
        let mu: f64 = rng.random_range(0.0..1.0);
        let theta: Vec<f64> = (0..8).map(|_| rng.random_range(-2.0..2.0)).collect();
        let velocity: Vec<f64> = (0..8).map(|_| rng.random_range(-1.0..1.0)).collect();
        let state = OptimizerState::with_velocity(theta, velocity, 1).expect("matching dims");
        let gamma = (1.0 - mu) / alpha;
        let a = step_nag(&state, &problem, alpha, mu);
        let b = step_nag_two_stage(&state, &problem, alpha, gamma);
        let ok = match (&a, &b) {
            (Ok(a), Ok(b)) => a.theta.iter().zip(&b.theta).all(|(x, y)| (x - y).abs() <= 1e-12),
            _ => false,
        };
        r.check(ok, || format!("alpha={alpha} mu={mu}: {a:?} vs {b:?}"));
    }
    r
}

fn max_gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn nag_form_equivalence() -> SuiteReport {
    let mut r = SuiteReport::new(SUITE_NAMES[2]);
    for &alpha in &grid(0.05, 1.0, 10) {
        for &mu in &grid(0.0, 0.99, 10) {
            let schedule = Schedule::constant(alpha, mu).expect("valid schedule");
            let path = |m: Method| run(m, &ScalarQuadratic, vec![1.0], &schedule, 200).map(|t| t.component(0));
            match (path(Method::Nag), path(Method::NagOriginal), path(Method::NagTwoStage)) {
                (Ok(v), Ok(o), Ok(s)) => {
                    let (go, gs) = (max_gap(&v, &o), max_gap(&v, &s));
                    r.check(go < 1e-10, || format!("alpha={alpha} mu={mu}: original differs by {go:e}"));
                    r.check(gs < 1e-12, || format!("alpha={alpha} mu={mu}: two-stage differs by {gs:e}"));
                }
                other => r.check(false, || format!("alpha={alpha} mu={mu}: run failed {other:?}")),
            }
        }
    }
    r
}

fn closed_form_vs_iterated() -> SuiteReport {
    let mut r = SuiteReport::new(SUITE_NAMES[3]);
    for i in 0..50 {
        let alpha = (i + 1) as f64 / 50.0;
        for j in 0..50 {
            let mu = j as f64 / 49.0;
            let schedule = Schedule::constant(alpha, mu).expect("valid schedule");
            for method in [Method::Mom, Method::Nag, Method::Rud] {
                match stability(method, alpha, mu) {
                    Ok(s) if s.spectral_radius < 0.999 => {}
                    _ => continue,
                }
                let closed = closed_form_trajectory(method, alpha, mu, 1.0, 100);
                let iter = run(method, &ScalarQuadratic, vec![1.0], &schedule, 100).map(|t| t.component(0));
                match (closed, iter) {
                    (Ok(c), Ok(it)) => {
                        let gap = max_gap(&c, &it);
                        r.check(gap < 1e-8, || format!("{method} alpha={alpha} mu={mu}: gap {gap:e}"));
                    }
                    (c, it) => r.check(false, || format!("{method} alpha={alpha} mu={mu}: {c:?} / {it:?}")),
                }
            }
        }
    }
    r
}

fn nag_mom_convergence<M: CoefficientModel<f64>>(model: &M) -> SuiteReport {
    let mut r = SuiteReport::new(SUITE_NAMES[4]);
    for i in 1..100 {
        let alpha = i as f64 / 100.0;
        for j in 1..100 {
            let mu = j as f64 / 100.0;
            for method in [Method::Nag, Method::Mom] {
                let s = stability_with(model, method, alpha, mu);
                r.check(
                    matches!(&s, Ok(s) if s.spectral_radius < 1.0),
                    || format!("{method} alpha={alpha} mu={mu}: {s:?}"),
                );
            }
        }
    }
    r
}

/// Distance from `(mu, alpha)` to the line `1 + mu = 1.5 alpha`.
pub fn rud_boundary_distance(alpha: f64, mu: f64) -> f64 {
    (1.0 + mu - 1.5 * alpha).abs() / (1.0f64 + 1.5 * 1.5).sqrt()
}

fn rud_region_exactness<M: CoefficientModel<f64>>(model: &M) -> SuiteReport {
    let mut r = SuiteReport::new(SUITE_NAMES[5]);
    match rasterize_region_with::<f64, M>(model, RegionPredicate::RudConverges, 200, 200) {
        Ok(g) => {
            for (i, &mu) in g.mu_axis.iter().enumerate() {
                for (j, &alpha) in g.alpha_axis.iter().enumerate() {
                    if rud_boundary_distance(alpha, mu) <= 1e-6 {
                        continue;
                    }
                    let expect = rud_region_closed_form(alpha, mu);
                    r.check(g.cell(i, j) == expect, || {
                        format!("alpha={alpha} mu={mu}: grid {} vs closed form {expect}", g.cell(i, j))
                    });
                }
            }
        }
        Err(e) => r.check(false, || format!("rasterization failed: {e}")),
    }
    r
}

fn rate_ordering<M: CoefficientModel<f64>>(model: &M) -> SuiteReport {
    let mut r = SuiteReport::new(SUITE_NAMES[6]);
    let (alpha, mu) = (0.2, 0.9);
    for (method, expect) in [(Method::Rud, 0.7f64.sqrt()), (Method::Nag, 0.72f64.sqrt()), (Method::Mom, 0.9f64.sqrt())] {
        let radius = model
            .coefficients(method, alpha, mu)
            .map(|c| roots(c).spectral_radius());
        r.check(
            matches!(radius, Ok(x) if (x - expect).abs() <= 1e-12),
            || format!("{method}: radius {radius:?}, expected {expect}"),
        );
    }
    r
}

fn gradient_checks() -> SuiteReport {
    let mut r = SuiteReport::new(SUITE_NAMES[7]);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for seed in 0..3 {
        let q = make_random_spd::<f64>(20, seed, 0.01, 1.0).expect("valid instance");
        let theta: Vec<f64> = (0..20).map(|_| rng.random_range(-1.0..1.0)).collect();
        let fd = finite_diff_grad_relative(&q, &theta, 1e-6);
        for (i, (a, n)) in q.gradient(&theta).iter().zip(&fd).enumerate() {
            let err = relative_error(*a, *n, 1e-8);
            r.check(err < 1e-6, || format!("quadratic seed={seed} coord {i}: rel err {err:e}"));
        }
    }
    let model = MlpAutoencoder::new(vec![12, 6, 3, 6, 12]).expect("valid architecture");
    let pixels: Vec<u8> = (0..4 * 12).map(|_| rng.random()).collect();
    let data = ImageDataset::<f64>::from_bytes(4, 3, 4, &pixels);
    let f = model.objective(data.images().view()).expect("shape matches");
    let theta = model.init_params::<f64>(9);
    let fd = finite_diff_grad_relative(&f, &theta, 1e-5);
    for (i, (a, n)) in f.gradient(&theta).iter().zip(&fd).enumerate() {
        let err = relative_error(*a, *n, 1e-8);
        r.check(err < 1e-4, || format!("autoencoder coord {i}: rel err {err:e}"));
    }
    r
}

fn idx_round_trip() -> SuiteReport {
    let mut r = SuiteReport::new(SUITE_NAMES[8]);
    let data = crate::synth::synthetic_digits(16, 4);
    let bytes = write_idx_images(&data);
    let parsed = parse_idx_images::<f64>(&bytes);
    r.check(matches!(&parsed, Ok(p) if *p == data), || "parse(write(x)) != x".into());
    if let Ok(p) = &parsed {
        r.check(write_idx_images(p) == bytes, || "rewrite is not byte-exact".into());
    }
    let mut bad = bytes.clone();
    bad[3] = 0x01;
    r.check(
        matches!(parse_idx_images::<f64>(&bad), Err(IdxError::BadMagic { .. })),
        || "bad magic not rejected".into(),
    );
    r.check(
        matches!(parse_idx_images::<f64>(&bytes[..bytes.len() - 1]), Err(IdxError::Truncated { .. })),
        || "truncated payload not rejected".into(),
    );
    r.check(
        matches!(parse_idx_images::<f64>(&bytes[..10]), Err(IdxError::Truncated { .. })),
        || "truncated header not rejected".into(),
    );
    r
}
