//! First-order optimizers built around Regularised Update Descent (RUD).
//!
//! RUD updates the step itself by gradient descent on
//! `J(theta + v) + gamma/2 * v^2`, which gives
//!
//! ```text
//! v_{t+1}     = mu_t v_t - alpha_t J'(theta_t + v_t)
//! theta_{t+1} = theta_t + v_{t+1}
//! ```
//!
//! with `mu_t = 1 - alpha_t gamma_t`. Classical momentum evaluates the
//! gradient at `theta_t`, Nesterov at `theta_t + mu_t v_t`.
//!
//! The crate also carries a closed-form analysis of all these methods on the
//! scalar quadratic ([`spectral`]) and the objectives used by the benchmark
//! harness ([`objectives`]).
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`); the
//! `*64` aliases below fix it to `f64`, which is what the analysis
//! tolerances are tuned for.

pub mod error;
pub mod method;
pub mod objective;
pub mod objectives;
pub mod optimizer;
pub mod scalar;
pub mod schedule;
pub mod spectral;
pub mod trace;

pub use error::{AnalysisError, IdxError, ModelError, OptimError};
pub use method::Method;
pub use objective::{FnObjective, Objective};
pub use optimizer::{
    run, run_with_guard, step_gd, step_mom, step_nag, step_nag_original, step_nag_two_stage, step_rud,
    DivergenceGuard, OptimizerState, RunFailure,
};
pub use scalar::Scalar;
pub use schedule::{make_schedule, Schedule, ScheduleKind};
pub use trace::{Record, Trace};

pub type Schedule64 = Schedule<f64>;
pub type State64 = OptimizerState<f64>;
pub type Trace64 = Trace<f64>;
pub type MatrixQuadratic64 = objectives::MatrixQuadratic<f64>;
pub type ImageDataset64 = objectives::ImageDataset<f64>;
pub type RegionGrid64 = spectral::RegionGrid<f64>;

pub type Schedule32 = Schedule<f32>;
pub type State32 = OptimizerState<f32>;
pub type Trace32 = Trace<f32>;
pub type MatrixQuadratic32 = objectives::MatrixQuadratic<f32>;
pub type ImageDataset32 = objectives::ImageDataset<f32>;
