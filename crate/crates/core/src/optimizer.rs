//! Step rules and the run loop for GD, momentum, the three Nesterov
//! formulations and Regularised Update Descent.
//!
//! Every step is a pure function from one [`OptimizerState`] to the next.
//! All methods share the bookkeeping `theta_{t+1} = theta_t + v_{t+1}`; they
//! differ only in how `v_{t+1}` is formed:
//!
//! | method          | `v_{t+1}`                                   |
//! |-----------------|---------------------------------------------|
//! | GD              | `-alpha * g(theta)`                         |
//! | MOM             | `mu * v - alpha * g(theta)`                 |
//! | NAG             | `mu * v - alpha * g(theta + mu * v)`        |
//! | NAG two-stage   | `(1 - alpha*gamma) * v - alpha * g(theta + (1 - alpha*gamma) * v)` |
//! | RUD             | `mu * v - alpha * g(theta + v)`             |

use std::fmt;

use crate::error::OptimError;
use crate::method::Method;
use crate::objective::Objective;
use crate::scalar::{all_finite, axpy, Scalar};
use crate::schedule::Schedule;
use crate::trace::{Record, Trace};

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerState<T> {
    pub theta: Vec<T>,
    pub velocity: Vec<T>,
    /// 1-based iteration index of `theta`.
    pub iteration: usize,
}

impl<T: Scalar> OptimizerState<T> {
    /// Initial state at `t = 1` with zero velocity.
    pub fn new(theta: Vec<T>) -> Self {
        let velocity = vec![T::zero(); theta.len()];
        OptimizerState {
            theta,
            velocity,
            iteration: 1,
        }
    }

    pub fn with_velocity(
        theta: Vec<T>,
        velocity: Vec<T>,
        iteration: usize,
    ) -> Result<Self, OptimError> {
        if theta.len() != velocity.len() {
            return Err(OptimError::DimensionMismatch {
                expected: theta.len(),
                got: velocity.len(),
            });
        }
        if iteration == 0 {
            return Err(OptimError::InvalidArgument(
                "iterations are 1-based".to_string(),
            ));
        }
        Ok(OptimizerState {
            theta,
            velocity,
            iteration,
        })
    }

    pub fn dim(&self) -> usize {
        self.theta.len()
    }

    fn advance(&self, velocity: Vec<T>) -> Result<Self, OptimError> {
        let theta: Vec<T> = self
            .theta
            .iter()
            .zip(&velocity)
            .map(|(&th, &v)| th + v)
            .collect();
        if !all_finite(&theta) {
            return Err(OptimError::NonFiniteIterate {
                iteration: self.iteration + 1,
            });
        }
        Ok(OptimizerState {
            theta,
            velocity,
            iteration: self.iteration + 1,
        })
    }
}

fn check_dim<T: Scalar, F: Objective<T> + ?Sized>(f: &F, len: usize) -> Result<(), OptimError> {
    if f.dim() != len {
        return Err(OptimError::DimensionMismatch {
            expected: f.dim(),
            got: len,
        });
    }
    Ok(())
}

fn gradient_at<T: Scalar, F: Objective<T> + ?Sized>(
    f: &F,
    point: &[T],
    iteration: usize,
) -> Result<Vec<T>, OptimError> {
    check_dim(f, point.len())?;
    let g = f.gradient(point);
    if g.len() != point.len() {
        return Err(OptimError::DimensionMismatch {
            expected: point.len(),
            got: g.len(),
        });
    }
    if !all_finite(&g) {
        return Err(OptimError::NonFiniteGradient { iteration });
    }
    Ok(g)
}

fn check_state<T: Scalar>(state: &OptimizerState<T>) -> Result<(), OptimError> {
    if state.theta.len() != state.velocity.len() {
        return Err(OptimError::DimensionMismatch {
            expected: state.theta.len(),
            got: state.velocity.len(),
        });
    }
    Ok(())
}

/// `v' = mu * v - alpha * g(theta + lookahead * v)`
fn lookahead_step<T: Scalar, F: Objective<T> + ?Sized>(
    state: &OptimizerState<T>,
    f: &F,
    alpha: T,
    mu: T,
    lookahead: T,
) -> Result<OptimizerState<T>, OptimError> {
    check_state(state)?;
    let point = if lookahead == T::zero() {
        state.theta.clone()
    } else {
        axpy(lookahead, &state.velocity, &state.theta)
    };
    let g = gradient_at(f, &point, state.iteration)?;
    let velocity = state
        .velocity
        .iter()
        .zip(&g)
        .map(|(&v, &gi)| mu * v - alpha * gi)
        .collect();
    state.advance(velocity)
}

pub fn step_gd<T: Scalar, F: Objective<T> + ?Sized>(
    state: &OptimizerState<T>,
    f: &F,
    alpha: T,
) -> Result<OptimizerState<T>, OptimError> {
    check_state(state)?;
    let g = gradient_at(f, &state.theta, state.iteration)?;
    state.advance(g.iter().map(|&gi| -alpha * gi).collect())
}

pub fn step_mom<T: Scalar, F: Objective<T> + ?Sized>(
    state: &OptimizerState<T>,
    f: &F,
    alpha: T,
    mu: T,
) -> Result<OptimizerState<T>, OptimError> {
    lookahead_step(state, f, alpha, mu, T::zero())
}

pub fn step_nag<T: Scalar, F: Objective<T> + ?Sized>(
    state: &OptimizerState<T>,
    f: &F,
    alpha: T,
    mu: T,
) -> Result<OptimizerState<T>, OptimError> {
    lookahead_step(state, f, alpha, mu, mu)
}

pub fn step_rud<T: Scalar, F: Objective<T> + ?Sized>(
    state: &OptimizerState<T>,
    f: &F,
    alpha: T,
    mu: T,
) -> Result<OptimizerState<T>, OptimError> {
    lookahead_step(state, f, alpha, mu, T::one())
}

/// Two-stage Nesterov: a descent step on the regulariser `gamma/2 * v^2`,
/// then a descent step on `J(theta + v)` from the shrunken velocity.
pub fn step_nag_two_stage<T: Scalar, F: Objective<T> + ?Sized>(
    state: &OptimizerState<T>,
    f: &F,
    alpha: T,
    gamma: T,
) -> Result<OptimizerState<T>, OptimError> {
    check_state(state)?;
    if alpha * gamma > T::one() {
        return Err(OptimError::InvalidArgument(format!(
            "alpha * gamma must not exceed 1 (alpha={alpha}, gamma={gamma})"
        )));
    }
    let shrink = T::one() - alpha * gamma;
    let shrunk: Vec<T> = state.velocity.iter().map(|&v| shrink * v).collect();
    let point: Vec<T> = state.theta.iter().zip(&shrunk).map(|(&th, &v)| th + v).collect();
    let g = gradient_at(f, &point, state.iteration)?;
    let velocity = shrunk
        .iter()
        .zip(&g)
        .map(|(&v, &gi)| v - alpha * gi)
        .collect();
    state.advance(velocity)
}

/// Nesterov in its original two-point form:
/// `y = (1 + mu) * theta_t - mu * theta_prev`, `theta_{t+1} = y - alpha * g(y)`.
///
/// `y` is evaluated as `theta_t + mu * (theta_t - theta_prev)`, which is exact
/// when the two iterates coincide.
///
/// On the first iteration pass `theta_prev = theta_t`. Errors report
/// iteration 1; [`run`] re-stamps them with the actual iteration.
pub fn step_nag_original<T: Scalar, F: Objective<T> + ?Sized>(
    theta_t: &[T],
    theta_prev: &[T],
    f: &F,
    alpha: T,
    mu: T,
) -> Result<Vec<T>, OptimError> {
    nag_original_at(theta_t, theta_prev, f, alpha, mu, 1)
}

fn nag_original_at<T: Scalar, F: Objective<T> + ?Sized>(
    theta_t: &[T],
    theta_prev: &[T],
    f: &F,
    alpha: T,
    mu: T,
    iteration: usize,
) -> Result<Vec<T>, OptimError> {
    if theta_t.len() != theta_prev.len() {
        return Err(OptimError::DimensionMismatch {
            expected: theta_t.len(),
            got: theta_prev.len(),
        });
    }
    let y: Vec<T> = theta_t
        .iter()
        .zip(theta_prev)
        .map(|(&a, &b)| a + mu * (a - b))
        .collect();
    let g = gradient_at(f, &y, iteration)?;
    let next: Vec<T> = y.iter().zip(&g).map(|(&yi, &gi)| yi - alpha * gi).collect();
    if !all_finite(&next) {
        return Err(OptimError::NonFiniteIterate {
            iteration: iteration + 1,
        });
    }
    Ok(next)
}

impl Method {
    /// Applies one step of this method with learning rate `alpha` and
    /// momentum `mu`.
    ///
    /// GD ignores `mu`. The two-stage form derives `gamma = (1 - mu) / alpha`.
    /// The original Nesterov form reconstructs `theta_{t-1} = theta_t - v_t`
    /// and records `v_{t+1} = theta_{t+1} - theta_t`.
    pub fn step<T: Scalar, F: Objective<T> + ?Sized>(
        self,
        state: &OptimizerState<T>,
        f: &F,
        alpha: T,
        mu: T,
    ) -> Result<OptimizerState<T>, OptimError> {
        match self {
            Method::Gd => step_gd(state, f, alpha),
            Method::Mom => step_mom(state, f, alpha, mu),
            Method::Nag => step_nag(state, f, alpha, mu),
            Method::Rud => step_rud(state, f, alpha, mu),
            Method::NagTwoStage => step_nag_two_stage(state, f, alpha, (T::one() - mu) / alpha),
            Method::NagOriginal => {
                check_state(state)?;
                let prev: Vec<T> = state
                    .theta
                    .iter()
                    .zip(&state.velocity)
                    .map(|(&th, &v)| th - v)
                    .collect();
                let next = nag_original_at(&state.theta, &prev, f, alpha, mu, state.iteration)?;
                Ok(original_state(&state.theta, next, state.iteration + 1))
            }
        }
    }
}

fn original_state<T: Scalar>(theta_t: &[T], next: Vec<T>, iteration: usize) -> OptimizerState<T> {
    let velocity = next.iter().zip(theta_t).map(|(&a, &b)| a - b).collect();
    OptimizerState {
        theta: next,
        velocity,
        iteration,
    }
}

/// Aborts a run once the objective leaves any plausible range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivergenceGuard {
    /// Limit on `|J(theta_t)|`.
    pub absolute: f64,
    /// Limit on `|J(theta_t)| / max(|J(theta_1)|, 1)`.
    pub growth: f64,
}

impl Default for DivergenceGuard {
    fn default() -> Self {
        DivergenceGuard {
            absolute: 1e100,
            growth: 1e30,
        }
    }
}

impl DivergenceGuard {
    fn trips<T: Scalar>(&self, value: T, initial: T) -> bool {
        let v = value.to_f64_lossy().abs();
        let scale = initial.to_f64_lossy().abs().max(1.0);
        !v.is_finite() || v > self.absolute || v > self.growth * scale
    }
}

/// A run that stopped early, with the records produced before the failure.
#[derive(Debug, Clone, PartialEq)]
pub struct RunFailure<T> {
    pub error: OptimError,
    pub partial: Trace<T>,
}

impl<T> fmt::Display for RunFailure<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.error)
    }
}

impl<T: fmt::Debug> std::error::Error for RunFailure<T> {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.error)
    }
}

/// Runs `method` for `iters` records (`iters - 1` steps) from `theta1` with
/// zero initial velocity, using the default [`DivergenceGuard`].
pub fn run<T: Scalar, F: Objective<T> + ?Sized>(
    method: Method,
    f: &F,
    theta1: Vec<T>,
    schedule: &Schedule<T>,
    iters: usize,
) -> Result<Trace<T>, RunFailure<T>> {
    run_with_guard(method, f, theta1, schedule, iters, DivergenceGuard::default())
}

pub fn run_with_guard<T: Scalar, F: Objective<T> + ?Sized>(
    method: Method,
    f: &F,
    theta1: Vec<T>,
    schedule: &Schedule<T>,
    iters: usize,
    guard: DivergenceGuard,
) -> Result<Trace<T>, RunFailure<T>> {
    let mut trace = Trace::new();
    let fail = |error, trace: Trace<T>| RunFailure {
        error,
        partial: trace,
    };
    if iters == 0 {
        return Err(fail(
            OptimError::InvalidArgument("run needs at least one iteration".into()),
            trace,
        ));
    }
    if !all_finite(&theta1) {
        return Err(fail(OptimError::NonFiniteIterate { iteration: 1 }, trace));
    }
    if let Err(e) = check_dim(f, theta1.len()) {
        return Err(fail(e, trace));
    }

    let mut state = OptimizerState::new(theta1);
    // exact previous iterate for the two-point Nesterov form
    let mut prev = state.theta.clone();
    let initial = f.value(&state.theta);
    if guard.trips(initial, initial) {
        return Err(fail(
            OptimError::Diverged {
                iteration: 1,
                value: initial.to_f64_lossy(),
            },
            trace,
        ));
    }
    trace.push(Record {
        t: 1,
        theta: state.theta.clone(),
        velocity: state.velocity.clone(),
        objective_value: initial,
    });

    for t in 1..iters {
        let alpha = schedule.alpha(t);
        let mu = schedule.mu(t);
        let next = match method {
            Method::NagOriginal => {
                nag_original_at(&state.theta, &prev, f, alpha, mu, t).map(|theta| {
                    prev = state.theta.clone();
                    original_state(&state.theta, theta, t + 1)
                })
            }
            m => m.step(&state, f, alpha, mu),
        };
        state = match next {
            Ok(s) => s,
            Err(e) => return Err(fail(e, trace)),
        };
        let value = f.value(&state.theta);
        if guard.trips(value, initial) {
            return Err(fail(
                OptimError::Diverged {
                    iteration: t + 1,
                    value: value.to_f64_lossy(),
                },
                trace,
            ));
        }
        trace.push(Record {
            t: t + 1,
            theta: state.theta.clone(),
            velocity: state.velocity.clone(),
            objective_value: value,
        });
    }
    Ok(trace)
}
