//! Closed-form convergence analysis on the scalar quadratic `J = theta^2 / 2`.
//!
//! With constant `alpha` and `mu`, MOM, NAG and RUD all collapse to the
//! recurrence `theta_{t+1} + b theta_t + c theta_{t-1} = 0`. Its
//! characteristic roots `w = (-b +- sqrt(b^2 - 4c)) / 2` decide convergence:
//! both roots lie inside the unit disc iff `|b| < 1 + c` and `c < 1`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::AnalysisError;
use crate::method::Method;
use crate::scalar::Scalar;

/// Spectral radii within this distance of 1 are flagged as boundary cases.
pub const BOUNDARY_TOL: f64 = 1e-9;
/// `|b^2 - 4c|` below this selects the repeated-root trajectory.
pub const REPEATED_ROOT_TOL: f64 = 1e-12;
/// Spectral radii closer than this compare as a tie.
pub const TIE_TOL: f64 = 1e-12;
/// Smallest learning rate on the region grids.
pub const REGION_ALPHA_MIN: f64 = 0.005;
pub const DEFAULT_REGION_RESOLUTION: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharacteristicCoefficients<T> {
    pub b: T,
    pub c: T,
}

impl<T: Scalar> CharacteristicCoefficients<T> {
    pub fn discriminant(&self) -> T {
        self.b * self.b - T::lit(4.0) * self.c
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootPair<T> {
    pub w_plus: Complex<T>,
    pub w_minus: Complex<T>,
}

impl<T: Scalar> RootPair<T> {
    pub fn spectral_radius(&self) -> T {
        self.w_plus.norm().max(self.w_minus.norm())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityResult<T> {
    pub spectral_radius: T,
    pub convergent: bool,
    pub boundary: bool,
}

/// Coefficients of `theta_t = A w_+^t + B w_-^t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryCoefficients<T> {
    pub a: Complex<T>,
    pub b: Complex<T>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RateOrdering {
    AFaster,
    BFaster,
    Tie,
}

/// Shading rules for the four convergence-region panels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegionPredicate {
    RudConverges,
    RudBeatsNag,
    MomBeatsNag,
    MomBeatsRud,
}

impl RegionPredicate {
    pub const ALL: [RegionPredicate; 4] = [
        RegionPredicate::RudConverges,
        RegionPredicate::RudBeatsNag,
        RegionPredicate::MomBeatsNag,
        RegionPredicate::MomBeatsRud,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RegionPredicate::RudConverges => "RUD_CONVERGES",
            RegionPredicate::RudBeatsNag => "RUD_BEATS_NAG",
            RegionPredicate::MomBeatsNag => "MOM_BEATS_NAG",
            RegionPredicate::MomBeatsRud => "MOM_BEATS_RUD",
        }
    }
}

impl fmt::Display for RegionPredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RegionPredicate {
    type Err = AnalysisError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.trim().replace('-', "_").to_ascii_uppercase();
        RegionPredicate::ALL
            .into_iter()
            .find(|p| p.name() == norm)
            .ok_or_else(|| AnalysisError::InvalidArgument(format!("unknown region predicate `{s}`")))
    }
}

/// Boolean verdicts over a `(mu, alpha)` grid; `cells[i][j]` belongs to
/// `(mu_axis[i], alpha_axis[j])`.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionGrid<T> {
    pub mu_axis: Vec<T>,
    pub alpha_axis: Vec<T>,
    pub cells: Vec<Vec<bool>>,
}

impl<T: Scalar> RegionGrid<T> {
    pub fn shaded_count(&self) -> usize {
        self.cells.iter().flatten().filter(|&&c| c).count()
    }

    pub fn cell(&self, mu_index: usize, alpha_index: usize) -> bool {
        self.cells[mu_index][alpha_index]
    }
}

/// Source of the `(b, c)` coefficients for each method.
///
/// The analysis entry points take a model so that the consistency checks can
/// be exercised against a deliberately wrong table.
pub trait CoefficientModel<T: Scalar>: Sync {
    fn coefficients(
        &self,
        method: Method,
        alpha: T,
        mu: T,
    ) -> Result<CharacteristicCoefficients<T>, AnalysisError>;
}

/// Coefficients of the scalar quadratic, whose gradient is `theta`.
#[derive(Debug, Clone, Copy, Default)]
pub struct QuadraticModel;

impl<T: Scalar> CoefficientModel<T> for QuadraticModel {
    fn coefficients(
        &self,
        method: Method,
        alpha: T,
        mu: T,
    ) -> Result<CharacteristicCoefficients<T>, AnalysisError> {
        let one = T::one();
        let (b, c) = match method {
            Method::Gd => (-one + alpha, T::zero()),
            Method::Mom => (-one - mu + alpha, mu),
            Method::Nag => (-one - mu + alpha + alpha * mu, mu - alpha * mu),
            Method::Rud => (-one - mu + T::lit(2.0) * alpha, mu - alpha),
            m @ (Method::NagOriginal | Method::NagTwoStage) => {
                return Err(AnalysisError::UnsupportedMethod(m.name()))
            }
        };
        Ok(CharacteristicCoefficients { b, c })
    }
}

pub fn coefficients<T: Scalar>(
    method: Method,
    alpha: T,
    mu: T,
) -> Result<CharacteristicCoefficients<T>, AnalysisError> {
    QuadraticModel.coefficients(method, alpha, mu)
}

pub fn roots<T: Scalar>(coeffs: CharacteristicCoefficients<T>) -> RootPair<T> {
    let two = T::lit(2.0);
    let disc = coeffs.discriminant();
    let centre = -coeffs.b / two;
    if disc < T::zero() {
        let im = (-disc).sqrt() / two;
        RootPair {
            w_plus: Complex::new(centre, im),
            w_minus: Complex::new(centre, -im),
        }
    } else {
        let half = disc.sqrt() / two;
        RootPair {
            w_plus: Complex::new(centre + half, T::zero()),
            w_minus: Complex::new(centre - half, T::zero()),
        }
    }
}

fn check_params<T: Scalar>(alpha: T, mu: T) -> Result<(), AnalysisError> {
    if alpha.is_nan() || alpha <= T::zero() || mu.is_nan() || mu < T::zero() || mu > T::one() {
        return Err(AnalysisError::InvalidArgument(format!(
            "need alpha > 0 and 0 <= mu <= 1, got alpha={alpha}, mu={mu}"
        )));
    }
    Ok(())
}

pub fn stability<T: Scalar>(
    method: Method,
    alpha: T,
    mu: T,
) -> Result<StabilityResult<T>, AnalysisError> {
    stability_with(&QuadraticModel, method, alpha, mu)
}

/// Root-based verdict, cross-checked against `|b| < 1 + c`, `c < 1` away
/// from the boundary band.
pub fn stability_with<T: Scalar, M: CoefficientModel<T> + ?Sized>(
    model: &M,
    method: Method,
    alpha: T,
    mu: T,
) -> Result<StabilityResult<T>, AnalysisError> {
    check_params(alpha, mu)?;
    let coeffs = model.coefficients(method, alpha, mu)?;
    let radius = roots(coeffs).spectral_radius();
    let boundary = (radius - T::one()).abs() < T::lit(BOUNDARY_TOL);
    let convergent = radius < T::one() && !boundary;
    let by_conditions = coeffs.b.abs() < T::one() + coeffs.c && coeffs.c < T::one();
    if !boundary && by_conditions != convergent {
        return Err(AnalysisError::InconsistentVerdict {
            alpha: alpha.to_f64_lossy(),
            mu: mu.to_f64_lossy(),
            radius: radius.to_f64_lossy(),
        });
    }
    Ok(StabilityResult {
        spectral_radius: radius,
        convergent,
        boundary,
    })
}

/// RUD converges on the scalar quadratic iff `1 + mu > 1.5 alpha`.
pub fn rud_region_closed_form<T: Scalar>(alpha: T, mu: T) -> bool {
    T::one() + mu > T::lit(1.5) * alpha
}

/// Solves `A w_+ + B w_- = theta1`, `A w_+^2 + B w_-^2 = theta2`.
pub fn trajectory_coefficients<T: Scalar>(
    roots: &RootPair<T>,
    theta1: T,
    theta2: T,
) -> Result<TrajectoryCoefficients<T>, AnalysisError> {
    let (p, m) = (roots.w_plus, roots.w_minus);
    let det = p * m * m - m * p * p;
    if det.norm() < T::lit(REPEATED_ROOT_TOL) {
        return Err(AnalysisError::Singular(det.norm().to_f64_lossy()));
    }
    let t1 = Complex::new(theta1, T::zero());
    let t2 = Complex::new(theta2, T::zero());
    Ok(TrajectoryCoefficients {
        a: (t1 * m * m - t2 * m) / det,
        b: (t2 * p - t1 * p * p) / det,
    })
}

/// `theta_1 .. theta_T` from the characteristic roots, starting from
/// `theta_2 = (1 - alpha) theta_1` (the first step of every method from
/// zero velocity).
///
/// Uses the basis `w^(t-1)`, so a zero root needs no special casing; the
/// repeated-root case switches to `(A + B (t-1)) w^(t-1)`.
pub fn closed_form_trajectory<T: Scalar>(
    method: Method,
    alpha: T,
    mu: T,
    theta1: T,
    iters: usize,
) -> Result<Vec<T>, AnalysisError> {
    check_params(alpha, mu)?;
    let coeffs = coefficients(method.analysis_alias(), alpha, mu)?;
    let theta2 = (T::one() - alpha) * theta1;
    let zero = T::zero();
    let c = |x: T| Complex::new(x, zero);

    let mut out = Vec::with_capacity(iters);
    if coeffs.discriminant().abs() < T::lit(REPEATED_ROOT_TOL) {
        let w = -coeffs.b / T::lit(2.0);
        let a = theta1;
        let b = if w == zero { zero } else { theta2 / w - a };
        let mut pw = T::one();
        for k in 0..iters {
            let k_t = T::from_usize(k).expect("iteration index representable");
            out.push((a + b * k_t) * pw);
            pw *= w;
        }
        return Ok(out);
    }

    let RootPair { w_plus, w_minus } = roots(coeffs);
    let diff = w_plus - w_minus;
    if diff.norm() == zero {
        return Err(AnalysisError::Singular(0.0));
    }
    let a = (c(theta2) - c(theta1) * w_minus) / diff;
    let b = c(theta1) - a;
    let (mut pp, mut pm) = (c(T::one()), c(T::one()));
    for _ in 0..iters {
        out.push((a * pp + b * pm).re);
        pp *= w_plus;
        pm *= w_minus;
    }
    Ok(out)
}

pub fn rate_compare<T: Scalar>(
    method_a: Method,
    method_b: Method,
    alpha: T,
    mu: T,
) -> Result<RateOrdering, AnalysisError> {
    rate_compare_with(&QuadraticModel, method_a, method_b, alpha, mu)
}

/// Orders two methods by asymptotic rate (smaller spectral radius wins).
pub fn rate_compare_with<T: Scalar, M: CoefficientModel<T> + ?Sized>(
    model: &M,
    method_a: Method,
    method_b: Method,
    alpha: T,
    mu: T,
) -> Result<RateOrdering, AnalysisError> {
    let ra = roots(model.coefficients(method_a, alpha, mu)?).spectral_radius();
    let rb = roots(model.coefficients(method_b, alpha, mu)?).spectral_radius();
    Ok(if (ra - rb).abs() <= T::lit(TIE_TOL) {
        RateOrdering::Tie
    } else if ra < rb {
        RateOrdering::AFaster
    } else {
        RateOrdering::BFaster
    })
}

fn linspace<T: Scalar>(lo: T, hi: T, n: usize) -> Vec<T> {
    let denom = T::from_usize(n - 1).expect("grid size representable");
    (0..n)
        .map(|i| {
            if i == n - 1 {
                hi
            } else {
                lo + (hi - lo) * T::from_usize(i).expect("grid index representable") / denom
            }
        })
        .collect()
}

/// Uniform axes: `mu` over `[0, 1]`, `alpha` over `[REGION_ALPHA_MIN, 1]`.
pub fn region_axes<T: Scalar>(
    mu_resolution: usize,
    alpha_resolution: usize,
) -> Result<(Vec<T>, Vec<T>), AnalysisError> {
    if mu_resolution < 2 || alpha_resolution < 2 {
        return Err(AnalysisError::InvalidArgument(format!(
            "grid resolutions must be at least 2, got {mu_resolution}x{alpha_resolution}"
        )));
    }
    Ok((
        linspace(T::zero(), T::one(), mu_resolution),
        linspace(T::lit(REGION_ALPHA_MIN), T::one(), alpha_resolution),
    ))
}

/// Evaluates one panel predicate at a single `(mu, alpha)` cell.
pub fn region_predicate_with<T: Scalar, M: CoefficientModel<T> + ?Sized>(
    model: &M,
    predicate: RegionPredicate,
    alpha: T,
    mu: T,
) -> Result<bool, AnalysisError> {
    let beats = |winner: Method, loser: Method| -> Result<bool, AnalysisError> {
        Ok(rate_compare_with(model, winner, loser, alpha, mu)? == RateOrdering::AFaster
            && stability_with(model, winner, alpha, mu)?.convergent)
    };
    match predicate {
        RegionPredicate::RudConverges => Ok(stability_with(model, Method::Rud, alpha, mu)?.convergent),
        RegionPredicate::RudBeatsNag => beats(Method::Rud, Method::Nag),
        RegionPredicate::MomBeatsNag => beats(Method::Mom, Method::Nag),
        RegionPredicate::MomBeatsRud => beats(Method::Mom, Method::Rud),
    }
}

pub fn rasterize_region<T: Scalar>(
    predicate: RegionPredicate,
    mu_resolution: usize,
    alpha_resolution: usize,
) -> Result<RegionGrid<T>, AnalysisError> {
    rasterize_region_with(&QuadraticModel, predicate, mu_resolution, alpha_resolution)
}

pub fn rasterize_region_with<T: Scalar, M: CoefficientModel<T> + ?Sized>(
    model: &M,
    predicate: RegionPredicate,
    mu_resolution: usize,
    alpha_resolution: usize,
) -> Result<RegionGrid<T>, AnalysisError> {
    let (mu_axis, alpha_axis) = region_axes::<T>(mu_resolution, alpha_resolution)?;
    let cells = mu_axis
        .par_iter()
        .map(|&mu| {
            alpha_axis
                .iter()
                .map(|&alpha| region_predicate_with(model, predicate, alpha, mu))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(RegionGrid {
        mu_axis,
        alpha_axis,
        cells,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn near(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn coefficient_examples() {
        let c = coefficients(Method::Nag, 0.2, 0.9).unwrap();
        assert!(near(c.b, -1.52, 1e-15) && near(c.c, 0.72, 1e-15));
        let c = coefficients(Method::Mom, 0.2, 0.0).unwrap();
        assert!(near(c.b, -0.8, 1e-15) && c.c == 0.0);
        let c = coefficients(Method::Rud, 0.2, 0.9).unwrap();
        assert!(near(c.b, -1.5, 1e-15) && near(c.c, 0.7, 1e-15));
        assert_eq!(
            coefficients(Method::Gd, 0.2, 0.7).unwrap(),
            coefficients(Method::Mom, 0.2, 0.0).unwrap()
        );
        assert!(coefficients(Method::NagOriginal, 0.2, 0.9).is_err());
        assert!(coefficients(Method::NagTwoStage, 0.2, 0.9).is_err());
    }

    #[test]
    fn root_examples() {
        let r = roots(CharacteristicCoefficients { b: 0.0, c: 0.0 });
        assert_eq!(r.w_plus, Complex::new(0.0, 0.0));
        assert_eq!(r.w_minus, Complex::new(0.0, 0.0));

        let r = roots(CharacteristicCoefficients { b: -1.52, c: 0.72 });
        assert_eq!(r.w_plus, r.w_minus.conj());
        assert!(r.w_plus.im != 0.0);
        assert!(near(r.spectral_radius(), 0.72f64.sqrt(), 1e-12));
        assert!(near(r.spectral_radius(), 0.84853, 1e-5));

        let r = roots(CharacteristicCoefficients { b: -1.5, c: 0.7 });
        assert!(near(r.w_minus.norm(), 0.7f64.sqrt(), 1e-12));
        assert!(near(r.spectral_radius(), 0.83666, 1e-5));
    }

    #[test]
    fn stability_examples() {
        let s = stability(Method::Nag, 0.2, 0.9).unwrap();
        assert!(s.convergent && near(s.spectral_radius, 0.84853, 1e-5));
        let s = stability(Method::Rud, 0.9, 0.2).unwrap();
        assert!(!s.convergent && !s.boundary);
        let s = stability(Method::Mom, 0.2, 0.9).unwrap();
        assert!(s.convergent && near(s.spectral_radius, 0.9f64.sqrt(), 1e-12));
        assert!(stability(Method::Mom, 0.0, 0.5).is_err());
        assert!(stability(Method::Mom, 0.1, 1.5).is_err());
    }

    #[test]
    fn mom_at_unit_momentum_is_boundary() {
        let s = stability(Method::Mom, 0.3, 1.0).unwrap();
        assert!(s.boundary && !s.convergent);
    }

    #[test]
    fn rud_closed_form_examples() {
        assert!(rud_region_closed_form(0.2, 0.9));
        assert!(!rud_region_closed_form(0.8, 0.2));
        assert!(!rud_region_closed_form(0.9, 0.2));
    }

    #[test]
    fn closed_form_examples() {
        for m in [Method::Mom, Method::Nag, Method::Rud, Method::Gd] {
            let z = closed_form_trajectory(m, 0.3, 0.4, 0.0, 10).unwrap();
            assert!(z.iter().all(|&x| x == 0.0));
        }
        let r = closed_form_trajectory(Method::Rud, 0.2, 0.9, 1.0, 3).unwrap();
        assert!(near(r[0], 1.0, 1e-12) && near(r[1], 0.8, 1e-12) && near(r[2], 0.5, 1e-12));
        let n = closed_form_trajectory(Method::Nag, 0.2, 0.9, 1.0, 3).unwrap();
        assert!(near(n[0], 1.0, 1e-12) && near(n[1], 0.8, 1e-12) && near(n[2], 0.496, 1e-12));
    }

    #[test]
    fn closed_form_repeated_and_zero_roots() {
        // MOM with mu = 0, alpha = 1: b = c = 0, a double root at zero
        let t = closed_form_trajectory(Method::Mom, 1.0, 0.0, 2.0, 5).unwrap();
        assert_eq!(t, vec![2.0, 0.0, 0.0, 0.0, 0.0]);
        // GD: single nonzero root 1 - alpha
        let t = closed_form_trajectory(Method::Gd, 0.25, 0.0, 1.0, 4).unwrap();
        for (k, x) in t.iter().enumerate() {
            assert!(near(*x, 0.75f64.powi(k as i32), 1e-15));
        }
        // MOM with b^2 = 4c: (1 + mu - alpha)^2 = 4 mu at mu = 0.25, alpha = 0.25
        let c = coefficients(Method::Mom, 0.25, 0.25).unwrap();
        assert_eq!(c.discriminant(), 0.0);
        let t = closed_form_trajectory(Method::Mom, 0.25, 0.25, 1.0, 30).unwrap();
        let mut prev = (1.0, 0.75);
        assert!(near(t[1], 0.75, 1e-15));
        for k in 2..30 {
            let next = -c.b * prev.1 - c.c * prev.0;
            assert!(near(t[k], next, 1e-12), "t={k}");
            prev = (prev.1, next);
        }
    }

    #[test]
    fn trajectory_coefficients_solve_the_system() {
        let r = roots(coefficients(Method::Nag, 0.2, 0.9).unwrap());
        let tc = trajectory_coefficients(&r, 1.0, 0.8).unwrap();
        let one = tc.a * r.w_plus + tc.b * r.w_minus;
        let two = tc.a * r.w_plus * r.w_plus + tc.b * r.w_minus * r.w_minus;
        assert!((one - Complex::new(1.0, 0.0)).norm() < 1e-10);
        assert!((two - Complex::new(0.8, 0.0)).norm() < 1e-10);

        let zero_root = roots(coefficients(Method::Mom, 0.2, 0.0).unwrap());
        assert!(matches!(
            trajectory_coefficients(&zero_root, 1.0, 0.8),
            Err(AnalysisError::Singular(_))
        ));
    }

    #[test]
    fn rate_compare_examples() {
        assert_eq!(rate_compare(Method::Rud, Method::Nag, 0.2, 0.9).unwrap(), RateOrdering::AFaster);
        assert_eq!(rate_compare(Method::Mom, Method::Nag, 0.2, 0.9).unwrap(), RateOrdering::BFaster);
        assert_eq!(rate_compare(Method::Nag, Method::Nag, 0.37, 0.11).unwrap(), RateOrdering::Tie);
    }

    #[test]
    fn rasterize_examples() {
        assert!(rasterize_region::<f64>(RegionPredicate::RudConverges, 1, 5).is_err());
        let g = rasterize_region::<f64>(RegionPredicate::RudConverges, 11, 200).unwrap();
        assert_eq!(g.cells.len(), 11);
        assert_eq!(g.cells[0].len(), 200);
        // mu = 0.9, alpha = 0.2 (index 39 on the 0.005-step alpha axis)
        assert!(near(g.mu_axis[9], 0.9, 1e-12) && near(g.alpha_axis[39], 0.2, 1e-12));
        assert!(g.cell(9, 39));
        // mu = 0.2, alpha = 0.9
        assert!(near(g.mu_axis[2], 0.2, 1e-12) && near(g.alpha_axis[179], 0.9, 1e-12));
        assert!(!g.cell(2, 179));
        let m = rasterize_region::<f64>(RegionPredicate::MomBeatsNag, 11, 200).unwrap();
        assert!(!m.cell(9, 39));
    }

    #[test]
    fn predicate_names_parse() {
        for p in RegionPredicate::ALL {
            assert_eq!(p.name().parse::<RegionPredicate>().unwrap(), p);
        }
        assert_eq!("rud-beats-nag".parse::<RegionPredicate>().unwrap(), RegionPredicate::RudBeatsNag);
        assert!("NAG_BEATS_ALL".parse::<RegionPredicate>().is_err());
    }
}
