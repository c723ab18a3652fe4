use rud_core::spectral::{CoefficientModel, CharacteristicCoefficients, QuadraticModel};
use rud_core::{AnalysisError, Method};
use rud_harness::selfcheck::{run_all, run_with, SUITE_NAMES};

/// The standard table with one method's coefficients replaced.
struct Corrupted {
    target: Method,
    fudge: fn(CharacteristicCoefficients<f64>, f64, f64) -> CharacteristicCoefficients<f64>,
}

impl CoefficientModel<f64> for Corrupted {
    fn coefficients(
        &self,
        method: Method,
        alpha: f64,
        mu: f64,
    ) -> Result<CharacteristicCoefficients<f64>, AnalysisError> {
        let c = QuadraticModel.coefficients(method, alpha, mu)?;
        Ok(if method == self.target {
            (self.fudge)(c, alpha, mu)
        } else {
            c
        })
    }
}

fn verdicts(model: &Corrupted) -> Vec<(&'static str, bool)> {
    run_with(model).into_iter().map(|r| (r.name, r.passed())).collect()
}

fn passed(v: &[(&'static str, bool)], name: &str) -> bool {
    v.iter().find(|(n, _)| *n == name).unwrap().1
}

#[test]
fn fresh_build_passes_every_suite() {
    let reports = run_all();
    assert!(reports.len() >= 6);
    let names: Vec<&str> = reports.iter().map(|r| r.name).collect();
    assert_eq!(names, SUITE_NAMES);
    for r in &reports {
        assert!(r.passed(), "{r}");
    }
}

#[test]
fn lookahead_coefficient_swap_breaks_region_exactness() {
    // RUD analysed with the NAG lookahead
    let v = verdicts(&Corrupted {
        target: Method::Rud,
        fudge: |_, alpha, mu| CharacteristicCoefficients {
            b: -1.0 - mu + alpha + alpha * mu,
            c: mu - alpha * mu,
        },
    });
    assert!(!passed(&v, "rud-region-exactness"));
    assert!(!passed(&v, "rate-ordering"));
    assert!(passed(&v, "nag-mom-convergence"));
}

#[test]
fn corrupted_nag_coefficient_is_detected() {
    // sign error in the alpha * mu term of c
    let v = verdicts(&Corrupted {
        target: Method::Nag,
        fudge: |c, alpha, mu| CharacteristicCoefficients {
            b: c.b,
            c: c.c + 2.0 * alpha * mu,
        },
    });
    assert!(!passed(&v, "nag-mom-convergence"));
    assert!(!passed(&v, "rate-ordering"));
    assert!(passed(&v, "rud-region-exactness"));
}

#[test]
fn failing_suite_reports_counts() {
    let reports = run_with(&Corrupted {
        target: Method::Rud,
        fudge: |c, _, _| CharacteristicCoefficients { b: c.b * 1.5, c: c.c },
    });
    let region = reports.iter().find(|r| r.name == "rud-region-exactness").unwrap();
    assert!(region.failures > 0 && region.failures < region.checks);
    let line = region.to_string();
    assert!(line.starts_with("FAIL rud-region-exactness"), "{line}");
    assert!(line.contains(&format!("{}/{}", region.checks - region.failures, region.checks)));
}
