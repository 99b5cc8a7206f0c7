//! Particle gradient flows `x ← x − lr ∇_x loss(x, y)` driven by sliced losses.

use alloc::string::ToString;
use alloc::vec::Vec;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::exact_ot::{w2_exact, MatchingMap, ORACLE_MAX_N};
use crate::math::derive_seed;
use crate::measures::{argsort, project_raw, sample_direction, substream, PointCloud};
use crate::sliced_baselines::max_sw;
use crate::swgg::{minswgg_optimize, minswgg_random_search, swgg_perm, GdConfig, SmoothingConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlowLoss {
    Sw,
    MaxSw,
    Pwd,
    MinSwggRandom,
    MinSwggOptim,
}

impl FromStr for FlowLoss {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "sw" => FlowLoss::Sw,
            "max_sw" | "maxsw" => FlowLoss::MaxSw,
            "pwd" => FlowLoss::Pwd,
            "minswgg_random" | "minswgg-rs" => FlowLoss::MinSwggRandom,
            "minswgg_optim" | "minswgg-gd" => FlowLoss::MinSwggOptim,
            other => return Err(Error::Unknown(other.to_string())),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowConfig {
    pub loss: FlowLoss,
    pub steps: usize,
    pub lr: f64,
    pub seed: u64,
    /// Record a trace row every this many steps (0 records only the ends).
    pub trace_every: usize,
    /// Number of directions for SW, PWD and min-SWGG random search.
    pub directions: usize,
    pub smoothing: SmoothingConfig,
    /// Settings for max-SW ascent and min-SWGG descent.
    pub gd: GdConfig,
    /// Draw fresh directions at each step; otherwise reuse those of step 0.
    pub resample_directions: bool,
}

impl FlowConfig {
    pub fn new(loss: FlowLoss, steps: usize, lr: f64, seed: u64) -> Self {
        FlowConfig {
            loss,
            steps,
            lr,
            seed,
            trace_every: 10,
            directions: 50,
            smoothing: SmoothingConfig::default(),
            gd: GdConfig::default(),
            resample_directions: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowRecord {
    pub iteration: usize,
    pub objective: f64,
    /// Exact `W2²` to the target, when the clouds are small enough for the oracle.
    pub w2: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct FlowTrace {
    pub records: Vec<FlowRecord>,
}

/// Loss value and its gradient with respect to the source particles (row-major).
pub fn loss_and_gradient(x: &PointCloud, y: &PointCloud, cfg: &FlowConfig, step_seed: u64) -> Result<(f64, Vec<f64>)> {
    x.check_same_shape(y)?;
    let (n, d) = (x.len(), x.dim());
    let mut grad = alloc::vec![0.0; n * d];
    let matching_grad = |grad: &mut [f64], m: &MatchingMap, weight: f64| {
        for (i, &j) in m.as_slice().iter().enumerate() {
            for (k, (a, b)) in x.row(i).iter().zip(y.row(j)).enumerate() {
                grad[i * d + k] += weight * 2.0 * (a - b) / n as f64;
            }
        }
    };
    let value = match cfg.loss {
        FlowLoss::Sw | FlowLoss::Pwd => {
            if cfg.directions == 0 {
                return Err(Error::InvalidParameter("number of directions must be positive"));
            }
            let weight = 1.0 / cfg.directions as f64;
            let mut total = 0.0;
            for l in 0..cfg.directions {
                let theta = sample_direction(&mut substream(step_seed, l as u64), d)?;
                if cfg.loss == FlowLoss::Pwd {
                    let (v, m) = swgg_perm(x, y, &theta)?;
                    total += v;
                    matching_grad(&mut grad, &m, weight);
                } else {
                    total += sliced_gradient(x, y, theta.as_slice(), weight, &mut grad);
                }
            }
            total * weight
        }
        FlowLoss::MaxSw => {
            let (_, theta) = max_sw(x, y, &GdConfig { seed: step_seed, ..cfg.gd })?;
            sliced_gradient(x, y, theta.as_slice(), 1.0, &mut grad)
        }
        FlowLoss::MinSwggRandom => {
            let report = minswgg_random_search(x, y, cfg.directions, step_seed)?;
            matching_grad(&mut grad, &report.matching, 1.0);
            report.value
        }
        FlowLoss::MinSwggOptim => {
            let smoothing = SmoothingConfig { seed: derive_seed(cfg.smoothing.seed, step_seed), ..cfg.smoothing };
            let report = minswgg_optimize(x, y, &smoothing, &GdConfig { seed: step_seed, ..cfg.gd })?;
            matching_grad(&mut grad, &report.matching, 1.0);
            report.value
        }
    };
    Ok((value, grad))
}

/// Adds `weight · ∇_x` of the 1D distance along `theta` into `grad`; returns the distance.
fn sliced_gradient(x: &PointCloud, y: &PointCloud, theta: &[f64], weight: f64, grad: &mut [f64]) -> f64 {
    let (n, d) = (x.len(), x.dim());
    let p = project_raw(x, theta);
    let q = project_raw(y, theta);
    let sigma = argsort(&p);
    let tau = argsort(&q);
    let mut value = 0.0;
    for (&i, &j) in sigma.as_slice().iter().zip(tau.as_slice()) {
        let diff = p[i] - q[j];
        value += diff * diff;
        for (k, t) in theta.iter().enumerate() {
            grad[i * d + k] += weight * 2.0 * diff * t / n as f64;
        }
    }
    value / n as f64
}

/// Runs the flow and returns the final particles and a trace recorded at step 0,
/// every `trace_every` steps, and at the last step.
pub fn gradient_flow(source: &PointCloud, target: &PointCloud, cfg: &FlowConfig) -> Result<(PointCloud, FlowTrace)> {
    source.check_same_shape(target)?;
    if !(cfg.lr.is_finite() && cfg.lr > 0.0) {
        return Err(Error::InvalidParameter("learning rate must be positive"));
    }
    let with_w2 = source.len() <= ORACLE_MAX_N;
    let record = |x: &PointCloud, iteration: usize, objective: f64| -> Result<FlowRecord> {
        let w2 = if with_w2 { Some(w2_exact(x, target)?.0) } else { None };
        Ok(FlowRecord { iteration, objective, w2 })
    };
    let mut x = source.clone();
    let mut trace = FlowTrace::default();
    for t in 0..=cfg.steps {
        let step_seed = if cfg.resample_directions { derive_seed(cfg.seed, t as u64) } else { cfg.seed };
        let (value, grad) = loss_and_gradient(&x, target, cfg, step_seed)?;
        let due = t == 0 || t == cfg.steps || (cfg.trace_every > 0 && t % cfg.trace_every == 0);
        if due {
            trace.records.push(record(&x, t, value)?);
        }
        if t == cfg.steps {
            break;
        }
        let data: Vec<f64> = x.as_slice().iter().zip(&grad).map(|(a, g)| a - cfg.lr * g).collect();
        x = PointCloud::new(data, x.dim())?;
    }
    Ok((x, trace))
}
