//! The experiment commands behind `rudbench`. Each writes a CSV plus a
//! `.meta` record next to it and reports what it wrote.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use rud_core::objectives::{make_random_spd, minibatches, parse_idx_images, MlpAutoencoder};
use rud_core::spectral::{closed_form_trajectory, rasterize_region, RegionPredicate};
use rud_core::{run, FnObjective, Method, Objective, OptimError, OptimizerState, Schedule, ScheduleKind, Trace};

use crate::output::{fmt_num, CsvOut, ExperimentRecord, Status};
use crate::UsageError;

/// Gradient norm below which a run counts as converged.
pub const GRAD_TOL: f64 = 1e-8;
/// Added to the optimality gap before taking its logarithm.
pub const LOG_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone, PartialEq)]
pub struct MethodSummary {
    pub method: Method,
    pub status: Status,
    /// Last value written for this method (`J`, `logJ` or `train_bce`).
    pub final_value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub csv: PathBuf,
    pub meta: PathBuf,
    pub rows: usize,
    pub status: Status,
    pub methods: Vec<MethodSummary>,
}

fn finish(
    csv: CsvOut,
    mut record: ExperimentRecord,
    out: &Path,
    started: Instant,
    methods: Vec<MethodSummary>,
) -> Result<Outcome> {
    let rows = csv.write_to(out)?;
    if !methods.is_empty() {
        record.status = Status::combine(methods.iter().map(|m| m.status));
        record
            .extra
            .push(("methods".into(), join_methods(methods.iter().map(|m| m.method))));
        for m in &methods {
            record.extra.push((format!("status.{}", m.method), m.status.to_string()));
        }
    }
    record.extra.push(("rows".into(), rows.to_string()));
    record.duration = started.elapsed();
    let meta = record.write_next_to(out)?;
    Ok(Outcome {
        csv: out.to_path_buf(),
        meta,
        rows,
        status: record.status,
        methods,
    })
}

fn join_methods(methods: impl Iterator<Item = Method>) -> String {
    methods.map(|m| m.name()).collect::<Vec<_>>().join(",")
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn check_methods(methods: &[Method]) -> Result<()> {
    if methods.is_empty() {
        return Err(UsageError("at least one method is required".into()).into());
    }
    Ok(())
}

fn make_schedule(kind: ScheduleKind, alpha: f64, mu: f64) -> Result<Schedule<f64>> {
    Schedule::new(kind, alpha, mu).map_err(|e| UsageError(e.to_string()).into())
}

/// Splits a run result into its trace and an outcome; only divergence and
/// non-finite values are treated as results rather than errors.
fn settle(result: std::result::Result<Trace<f64>, rud_core::RunFailure<f64>>) -> Result<(Trace<f64>, bool)> {
    match result {
        Ok(trace) => Ok((trace, false)),
        Err(failure) => match failure.error {
            OptimError::Diverged { .. }
            | OptimError::NonFiniteGradient { .. }
            | OptimError::NonFiniteIterate { .. } => Ok((failure.partial, true)),
            other => Err(other.into()),
        },
    }
}

#[derive(Debug, Clone)]
pub struct RegionConfig {
    pub predicate: RegionPredicate,
    pub mu_resolution: usize,
    pub alpha_resolution: usize,
    pub out: PathBuf,
}

/// Rasterizes a region predicate over the `(mu, alpha)` grid, rows
/// `mu`-major.
pub fn region(cfg: &RegionConfig) -> Result<Outcome> {
    let started = Instant::now();
    if cfg.mu_resolution < 2 || cfg.alpha_resolution < 2 {
        return Err(UsageError(format!(
            "grid resolutions must be at least 2, got {}x{}",
            cfg.mu_resolution, cfg.alpha_resolution
        ))
        .into());
    }
    let grid = rasterize_region::<f64>(cfg.predicate, cfg.mu_resolution, cfg.alpha_resolution)?;
    let mut csv = CsvOut::new(&["mu", "alpha", "shaded"])?;
    for (i, &mu) in grid.mu_axis.iter().enumerate() {
        for (j, &alpha) in grid.alpha_axis.iter().enumerate() {
            let shaded = if grid.cell(i, j) { "1" } else { "0" };
            csv.row(&[fmt_num(mu), fmt_num(alpha), shaded.to_string()])?;
        }
    }
    let mut record = ExperimentRecord::new("region")
        .config("predicate", cfg.predicate)
        .config("mu_resolution", cfg.mu_resolution)
        .config("alpha_resolution", cfg.alpha_resolution);
    record.extra.push(("shaded".into(), grid.shaded_count().to_string()));
    finish(csv, record, &cfg.out, started, Vec::new())
}

#[derive(Debug, Clone)]
pub struct TrajectoryConfig {
    pub method: Method,
    pub schedule: ScheduleKind,
    pub alpha: f64,
    pub mu: f64,
    pub theta1: Vec<f64>,
    pub iters: usize,
    pub out: PathBuf,
}

/// Runs one method on `J(theta) = |theta|^2 / 2`. For scalar `theta1` under
/// a constant schedule the CSV also carries the closed-form iterate.
pub fn trajectory(cfg: &TrajectoryConfig) -> Result<Outcome> {
    let started = Instant::now();
    if cfg.theta1.is_empty() {
        return Err(UsageError("theta1 needs at least one component".into()).into());
    }
    if cfg.iters == 0 {
        return Err(UsageError("iters must be at least 1".into()).into());
    }
    let schedule = make_schedule(cfg.schedule, cfg.alpha, cfg.mu)?;
    let dim = cfg.theta1.len();
    let f = FnObjective::new(
        dim,
        |th: &[f64]| 0.5 * th.iter().map(|x| x * x).sum::<f64>(),
        |th: &[f64]| th.to_vec(),
    );
    let (trace, diverged) = settle(run(cfg.method, &f, cfg.theta1.clone(), &schedule, cfg.iters))?;

    let scalar = dim == 1;
    let closed_form = if scalar && cfg.schedule == ScheduleKind::Constant {
        Some(closed_form_trajectory(cfg.method, cfg.alpha, cfg.mu, cfg.theta1[0], trace.len())?)
    } else {
        None
    };
    let header: Vec<String> = if scalar {
        ["t", "theta", "v", "J", "closed_form_theta"].map(String::from).to_vec()
    } else {
        let mut h = vec!["t".to_string()];
        h.extend((0..dim).map(|i| format!("theta_{i}")));
        h.extend((0..dim).map(|i| format!("v_{i}")));
        h.push("J".into());
        h
    };
    let mut csv = CsvOut::new(&header)?;
    for (k, rec) in trace.records().iter().enumerate() {
        let mut row = vec![rec.t.to_string()];
        row.extend(rec.theta.iter().map(|&x| fmt_num(x)));
        row.extend(rec.velocity.iter().map(|&x| fmt_num(x)));
        row.push(fmt_num(rec.objective_value));
        if scalar {
            row.push(closed_form.as_ref().map(|c| fmt_num(c[k])).unwrap_or_default());
        }
        csv.row(&row)?;
    }

    let last = trace.last();
    let status = match last {
        _ if diverged => Status::Diverged,
        Some(r) if norm(&r.theta) <= GRAD_TOL => Status::Converged,
        _ => Status::MaxIters,
    };
    let record = ExperimentRecord::new("trajectory")
        .config("method", cfg.method)
        .config("schedule", cfg.schedule)
        .config("alpha", cfg.alpha)
        .config("mu", cfg.mu)
        .config("theta1", cfg.theta1.iter().map(f64::to_string).collect::<Vec<_>>().join(","))
        .config("iters", cfg.iters);
    let summary = MethodSummary {
        method: cfg.method,
        status,
        final_value: last.map_or(f64::NAN, |r| r.objective_value),
    };
    finish(csv, record, &cfg.out, started, vec![summary])
}

#[derive(Debug, Clone)]
pub struct QuadbenchConfig {
    pub dim: usize,
    pub seed: u64,
    pub alpha: f64,
    pub schedule: ScheduleKind,
    pub mu: f64,
    pub iters: usize,
    pub methods: Vec<Method>,
    pub eig_low: f64,
    pub eig_high: f64,
    pub out: PathBuf,
}

impl Default for QuadbenchConfig {
    fn default() -> Self {
        QuadbenchConfig {
            dim: 1000,
            seed: 1,
            alpha: 0.2,
            schedule: ScheduleKind::Nesterov,
            mu: 0.9,
            iters: 300,
            methods: vec![Method::Gd, Method::Mom, Method::Nag, Method::Rud],
            eig_low: 0.01,
            eig_high: 1.0,
            out: PathBuf::from("quadbench.csv"),
        }
    }
}

/// Starting point for the quadratic benchmark: standard normal scaled by
/// `1 / sqrt(dim)`, drawn from stream 1 of the instance seed.
pub fn quadbench_start(dim: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    let scale = 1.0 / (dim as f64).sqrt();
    (0..dim).map(|_| scale * rng.sample::<f64, _>(StandardNormal)).collect()
}

/// Compares methods on a seeded random SPD quadratic, logging
/// `ln(J - J* + 1e-300)` per iteration.
pub fn quadbench(cfg: &QuadbenchConfig) -> Result<Outcome> {
    let started = Instant::now();
    check_methods(&cfg.methods)?;
    if cfg.dim == 0 || cfg.iters == 0 {
        return Err(UsageError("dim and iters must be at least 1".into()).into());
    }
    let schedule = make_schedule(cfg.schedule, cfg.alpha, cfg.mu)?;
    let problem = make_random_spd::<f64>(cfg.dim, cfg.seed, cfg.eig_low, cfg.eig_high)
        .map_err(|e| UsageError(e.to_string()))?;
    let optimum = problem.minimizer()?;
    let theta1 = quadbench_start(cfg.dim, cfg.seed);

    // J - J* = (theta - theta*)^T (A theta - b) / 2, which stays
    // non-negative and accurate near the optimum
    let gap = |theta: &[f64]| -> f64 {
        let g = problem.gradient(theta);
        let d: f64 = theta.iter().zip(&optimum).zip(&g).map(|((t, o), g)| (t - o) * g).sum();
        (0.5 * d).max(0.0)
    };

    let runs: Vec<(Trace<f64>, bool)> = cfg
        .methods
        .par_iter()
        .map(|&m| settle(run(m, &problem, theta1.clone(), &schedule, cfg.iters)))
        .collect::<Result<_>>()?;

    let mut csv = CsvOut::new(&["t", "method", "logJ", "theta0", "theta1"])?;
    let mut summaries = Vec::with_capacity(runs.len());
    for (&method, (trace, diverged)) in cfg.methods.iter().zip(&runs) {
        let mut last_log = f64::NAN;
        for rec in trace.records() {
            last_log = (gap(&rec.theta) + LOG_FLOOR).ln();
            let second = rec.theta.get(1).map(|&x| fmt_num(x)).unwrap_or_default();
            csv.row(&[
                rec.t.to_string(),
                method.name().to_string(),
                fmt_num(last_log),
                fmt_num(rec.theta[0]),
                second,
            ])?;
        }
        let status = match trace.last() {
            _ if *diverged => Status::Diverged,
            Some(r) if norm(&problem.gradient(&r.theta)) <= GRAD_TOL => Status::Converged,
            _ => Status::MaxIters,
        };
        summaries.push(MethodSummary {
            method,
            status,
            final_value: last_log,
        });
    }

    let record = ExperimentRecord::new("quadbench")
        .config("dim", cfg.dim)
        .config("seed", cfg.seed)
        .config("alpha", cfg.alpha)
        .config("schedule", cfg.schedule)
        .config("mu", cfg.mu)
        .config("iters", cfg.iters)
        .config("eig_low", cfg.eig_low)
        .config("eig_high", cfg.eig_high);
    finish(csv, record, &cfg.out, started, summaries)
}

#[derive(Debug, Clone)]
pub struct AutoencoderConfig {
    pub data: PathBuf,
    pub layers: MlpAutoencoder,
    pub images: usize,
    pub batch_size: usize,
    pub alpha: f64,
    pub schedule: ScheduleKind,
    pub mu: f64,
    pub epochs: usize,
    pub methods: Vec<Method>,
    pub seed: u64,
    pub out: PathBuf,
}

impl AutoencoderConfig {
    pub fn new(data: PathBuf, out: PathBuf) -> Self {
        AutoencoderConfig {
            data,
            layers: MlpAutoencoder::new(vec![784, 64, 16, 64, 784]).expect("valid default architecture"),
            images: 2000,
            batch_size: 200,
            alpha: 0.05,
            schedule: ScheduleKind::Nesterov,
            mu: 0.9,
            epochs: 20,
            methods: vec![Method::Gd, Method::Mom, Method::Nag, Method::Rud],
            seed: 1,
            out,
        }
    }
}

/// Shuffle seed for one epoch, shared by all methods.
fn epoch_seed(seed: u64, epoch: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(epoch as u64)
}

/// Trains the autoencoder with each method from the same initialization and
/// batch order, logging the full-set mean BCE before training and after
/// every epoch.
pub fn autoencoder(cfg: &AutoencoderConfig) -> Result<Outcome> {
    let started = Instant::now();
    check_methods(&cfg.methods)?;
    if cfg.epochs == 0 {
        return Err(UsageError("epochs must be at least 1".into()).into());
    }
    if cfg.batch_size == 0 || cfg.images == 0 {
        return Err(UsageError("batch size and image count must be at least 1".into()).into());
    }
    let schedule = make_schedule(cfg.schedule, cfg.alpha, cfg.mu)?;
    let bytes = fs::read(&cfg.data).with_context(|| format!("reading {}", cfg.data.display()))?;
    let data = parse_idx_images::<f64>(&bytes)
        .with_context(|| format!("parsing {}", cfg.data.display()))?
        .truncated(cfg.images);
    if data.pixel_dim() != cfg.layers.input_dim() {
        return Err(UsageError(format!(
            "images have {} pixels but the network expects {}",
            data.pixel_dim(),
            cfg.layers.input_dim()
        ))
        .into());
    }
    if cfg.batch_size > data.count() {
        return Err(UsageError(format!(
            "batch size {} exceeds the {} available images",
            cfg.batch_size,
            data.count()
        ))
        .into());
    }
    let model = &cfg.layers;
    let init = model.init_params::<f64>(cfg.seed);
    let orders: Vec<Vec<Vec<usize>>> = (1..=cfg.epochs)
        .map(|e| minibatches(data.count(), cfg.batch_size, epoch_seed(cfg.seed, e)))
        .collect::<std::result::Result<_, _>>()?;

    let full_loss = |theta: &[f64]| model.loss(theta, data.images().view()).ok();
    let train = |method: Method| -> Result<(Vec<f64>, bool)> {
        let mut losses = Vec::with_capacity(cfg.epochs + 1);
        let Some(first) = full_loss(&init) else {
            return Ok((losses, true));
        };
        losses.push(first);
        let mut state = OptimizerState::new(init.clone());
        for order in &orders {
            for idx in order {
                let batch = data.batch(idx);
                let f = model.objective(batch.view())?;
                let t = state.iteration;
                state = match method.step(&state, &f, schedule.alpha(t), schedule.mu(t)) {
                    Ok(next) => next,
                    Err(OptimError::NonFiniteGradient { .. } | OptimError::NonFiniteIterate { .. }) => {
                        return Ok((losses, true))
                    }
                    Err(e) => return Err(e.into()),
                };
            }
            match full_loss(&state.theta) {
                Some(l) => losses.push(l),
                None => return Ok((losses, true)),
            }
        }
        Ok((losses, false))
    };
    let runs: Vec<(Vec<f64>, bool)> = cfg.methods.par_iter().map(|&m| train(m)).collect::<Result<_>>()?;

    let mut csv = CsvOut::new(&["epoch", "method", "train_bce"])?;
    let mut summaries = Vec::with_capacity(runs.len());
    for (&method, (losses, diverged)) in cfg.methods.iter().zip(&runs) {
        for (epoch, &l) in losses.iter().enumerate() {
            csv.row(&[epoch.to_string(), method.name().to_string(), fmt_num(l)])?;
        }
        summaries.push(MethodSummary {
            method,
            status: if *diverged { Status::Diverged } else { Status::MaxIters },
            final_value: losses.last().copied().unwrap_or(f64::NAN),
        });
    }

    let record = ExperimentRecord::new("autoencoder")
        .config("data", cfg.data.display())
        .config("layers", model)
        .config("images", data.count())
        .config("batch_size", cfg.batch_size)
        .config("alpha", cfg.alpha)
        .config("schedule", cfg.schedule)
        .config("mu", cfg.mu)
        .config("epochs", cfg.epochs)
        .config("seed", cfg.seed);
    finish(csv, record, &cfg.out, started, summaries)
}

/// Writes `count` synthetic digit images as an IDX file.
pub fn synth_digits(count: usize, seed: u64, out: &Path) -> Result<()> {
    if count == 0 {
        return Err(UsageError("count must be at least 1".into()).into());
    }
    let data = crate::synth::synthetic_digits(count, seed);
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(out, rud_core::objectives::write_idx_images(&data))
        .with_context(|| format!("writing {}", out.display()))
}
