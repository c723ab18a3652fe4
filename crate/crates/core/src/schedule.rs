//! Per-iteration learning rate and momentum.
//!
//! Iterations are 1-based: the step taking `theta_t` to `theta_{t+1}` uses
//! `alpha(t)` and `mu(t)`.

use std::fmt;
use std::str::FromStr;

use crate::error::OptimError;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScheduleKind {
    /// Fixed `alpha` and `mu`.
    Constant,
    /// Fixed `alpha`, `mu_t = 1 - 3 / (5 + t)`.
    Nesterov,
}

impl ScheduleKind {
    pub fn name(self) -> &'static str {
        match self {
            ScheduleKind::Constant => "constant",
            ScheduleKind::Nesterov => "nesterov",
        }
    }
}

impl fmt::Display for ScheduleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScheduleKind {
    type Err = OptimError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "constant" => Ok(ScheduleKind::Constant),
            "nesterov" => Ok(ScheduleKind::Nesterov),
            other => Err(OptimError::InvalidSchedule(format!(
                "unknown schedule kind `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Schedule<T> {
    kind: ScheduleKind,
    alpha0: T,
    mu0: T,
}

impl<T: Scalar> Schedule<T> {
    /// Validates and builds a schedule. `mu0` is ignored for
    /// [`ScheduleKind::Nesterov`].
    pub fn new(kind: ScheduleKind, alpha0: T, mu0: T) -> Result<Self, OptimError> {
        if !alpha0.is_finite() || alpha0 <= T::zero() {
            return Err(OptimError::InvalidSchedule(format!(
                "alpha0 must be positive and finite, got {alpha0}"
            )));
        }
        let mu0 = match kind {
            ScheduleKind::Constant => {
                if !(mu0 >= T::zero() && mu0 <= T::one()) {
                    return Err(OptimError::InvalidSchedule(format!(
                        "mu0 must lie in [0, 1], got {mu0}"
                    )));
                }
                mu0
            }
            ScheduleKind::Nesterov => T::zero(),
        };
        Ok(Schedule { kind, alpha0, mu0 })
    }

    pub fn constant(alpha0: T, mu0: T) -> Result<Self, OptimError> {
        Self::new(ScheduleKind::Constant, alpha0, mu0)
    }

    pub fn nesterov(alpha0: T) -> Result<Self, OptimError> {
        Self::new(ScheduleKind::Nesterov, alpha0, T::zero())
    }

    pub fn kind(&self) -> ScheduleKind {
        self.kind
    }

    pub fn alpha(&self, _t: usize) -> T {
        self.alpha0
    }

    pub fn mu(&self, t: usize) -> T {
        match self.kind {
            ScheduleKind::Constant => self.mu0,
            ScheduleKind::Nesterov => {
                let t = T::from_usize(t).expect("iteration index representable");
                T::one() - T::lit(3.0) / (T::lit(5.0) + t)
            }
        }
    }

    /// Regularisation strength implied by `mu_t = 1 - alpha_t * gamma_t`.
    pub fn gamma(&self, t: usize) -> T {
        (T::one() - self.mu(t)) / self.alpha(t)
    }
}

/// Parses `kind` and builds a schedule.
pub fn make_schedule<T: Scalar>(kind: &str, alpha0: T, mu0: T) -> Result<Schedule<T>, OptimError> {
    Schedule::new(kind.parse()?, alpha0, mu0)
}
