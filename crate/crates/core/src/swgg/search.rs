//! Searching the sphere for min-SWGG: random search, simulated annealing, and
//! descent on the smoothed surrogate.

use alloc::vec::Vec;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::smooth::{SmoothedSurrogate, SmoothingConfig};
use super::{check_pair, swgg_perm, swgg_value};
use crate::error::{Error, Result};
use crate::exact_ot::MatchingMap;
use crate::math::{derive_seed, exp, sqrt};
use crate::measures::{rng_from_seed, sample_direction, substream, PointCloud, UnitDirection};
use crate::par::{map_indices, Stopwatch};

/// Outcome of a min-SWGG search.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceReport {
    pub value: f64,
    pub direction: UnitDirection,
    pub matching: MatchingMap,
    /// Number of SWGG or surrogate evaluations spent.
    pub evaluations: usize,
    /// Wall time in seconds (zero without the `std` feature).
    pub wall_time: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Optimizer {
    Plain,
    /// Adam with `β1 = 0.9`, `β2 = 0.999`, `ε = 1e−8`.
    Adam,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GdConfig {
    pub learning_rate: f64,
    pub iterations: usize,
    pub optimizer: Optimizer,
    pub seed: u64,
    /// Draw fresh smoothing noise at every iteration instead of reusing one draw.
    pub resample_noise: bool,
}

impl Default for GdConfig {
    fn default() -> Self {
        GdConfig { learning_rate: 5e-2, iterations: 100, optimizer: Optimizer::Adam, seed: 0, resample_noise: true }
    }
}

impl GdConfig {
    pub(crate) fn validate(&self) -> Result<()> {
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(Error::InvalidParameter("learning rate must be positive"));
        }
        if self.iterations == 0 {
            return Err(Error::InvalidParameter("iterations must be positive"));
        }
        Ok(())
    }
}

/// First-order step on the sphere: plain or Adam update, then renormalization.
pub(crate) struct SphereStepper {
    cfg: GdConfig,
    m: Vec<f64>,
    v: Vec<f64>,
    t: i32,
}

impl SphereStepper {
    pub(crate) fn new(cfg: GdConfig, d: usize) -> Self {
        SphereStepper { cfg, m: alloc::vec![0.0; d], v: alloc::vec![0.0; d], t: 0 }
    }

    /// Moves `theta` along `sign · grad` (sign −1 descends, +1 ascends).
    /// Returns false and leaves `theta` alone on a zero gradient or a degenerate step.
    pub(crate) fn step(&mut self, theta: &mut UnitDirection, grad: &[f64], sign: f64) -> bool {
        if grad.iter().all(|g| *g == 0.0) || grad.iter().any(|g| !g.is_finite()) {
            return false;
        }
        let lr = self.cfg.learning_rate;
        let mut next: Vec<f64> = theta.as_slice().to_vec();
        match self.cfg.optimizer {
            Optimizer::Plain => {
                for (x, g) in next.iter_mut().zip(grad) {
                    *x += sign * lr * g;
                }
            }
            Optimizer::Adam => {
                const B1: f64 = 0.9;
                const B2: f64 = 0.999;
                self.t += 1;
                let c1 = 1.0 - libm::pow(B1, self.t as f64);
                let c2 = 1.0 - libm::pow(B2, self.t as f64);
                for (((x, g), m), v) in next.iter_mut().zip(grad).zip(&mut self.m).zip(&mut self.v) {
                    *m = B1 * *m + (1.0 - B1) * g;
                    *v = B2 * *v + (1.0 - B2) * g * g;
                    *x += sign * lr * (*m / c1) / (sqrt(*v / c2) + 1e-8);
                }
            }
        }
        match UnitDirection::normalized(next) {
            Ok(th) => {
                *theta = th;
                true
            }
            Err(_) => false,
        }
    }
}

/// Best of `directions` uniformly sampled directions. Direction `l` comes from
/// substream `l` of `seed`, so the result does not depend on thread scheduling
/// and a larger `directions` only extends the same sequence.
pub fn minswgg_random_search(
    mu1: &PointCloud,
    mu2: &PointCloud,
    directions: usize,
    seed: u64,
) -> Result<DistanceReport> {
    mu1.check_same_shape(mu2)?;
    if directions == 0 {
        return Err(Error::InvalidParameter("number of directions must be positive"));
    }
    let clock = Stopwatch::start();
    let d = mu1.dim();
    let values = map_indices(directions, |l| {
        let theta = sample_direction(&mut substream(seed, l as u64), d).expect("d >= 1");
        swgg_value(mu1, mu2, theta.as_slice())
    });
    // first index wins on ties
    let best = values.iter().enumerate().fold(0, |b, (l, v)| if *v < values[b] { l } else { b });
    let direction = sample_direction(&mut substream(seed, best as u64), d)?;
    let (value, matching) = swgg_perm(mu1, mu2, &direction)?;
    Ok(DistanceReport { value, direction, matching, evaluations: directions, wall_time: clock.seconds() })
}

/// Gaussian perturbation scale of annealing proposals before renormalization.
pub const ANNEAL_STEP: f64 = 0.1;
/// Lower bound on the annealing temperature.
pub const ANNEAL_MIN_TEMPERATURE: f64 = 1e-6;

/// Simulated annealing on the sphere with temperature `T_k = 1 − (k+1)/iters`
/// (floored at [`ANNEAL_MIN_TEMPERATURE`]) and Metropolis acceptance.
/// Returns the best direction seen, proposals included.
pub fn minswgg_anneal(mu1: &PointCloud, mu2: &PointCloud, iters: usize, seed: u64) -> Result<DistanceReport> {
    mu1.check_same_shape(mu2)?;
    if iters == 0 {
        return Err(Error::InvalidParameter("iterations must be positive"));
    }
    let clock = Stopwatch::start();
    let d = mu1.dim();
    let mut rng = rng_from_seed(seed);
    let mut current = sample_direction(&mut rng, d)?;
    let mut current_value = swgg_value(mu1, mu2, current.as_slice());
    let mut best = (current_value, current.clone());
    for k in 0..iters {
        let temperature = (1.0 - (k as f64 + 1.0) / iters as f64).max(ANNEAL_MIN_TEMPERATURE);
        let proposal: Vec<f64> = current
            .as_slice()
            .iter()
            .map(|x| {
                let z: f64 = StandardNormal.sample(&mut rng);
                x + ANNEAL_STEP * z
            })
            .collect();
        let Ok(proposal) = UnitDirection::normalized(proposal) else { continue };
        let value = swgg_value(mu1, mu2, proposal.as_slice());
        let u: f64 = rng.random();
        if value <= current_value || u < exp(-(value - current_value) / temperature) {
            current = proposal.clone();
            current_value = value;
        }
        if value < best.0 {
            best = (value, proposal);
        }
    }
    let (value, matching) = swgg_perm(mu1, mu2, &best.1)?;
    Ok(DistanceReport { value, direction: best.1, matching, evaluations: iters + 1, wall_time: clock.seconds() })
}

/// Gradient descent on the smoothed surrogate from a random start, with
/// renormalization after every step. The returned direction is the one with the
/// lowest plain SWGG among all iterates.
pub fn minswgg_optimize(
    mu1: &PointCloud,
    mu2: &PointCloud,
    smoothing: &SmoothingConfig,
    gd: &GdConfig,
) -> Result<DistanceReport> {
    mu1.check_same_shape(mu2)?;
    smoothing.validate()?;
    gd.validate()?;
    let clock = Stopwatch::start();
    let mut rng = rng_from_seed(gd.seed);
    let theta = sample_direction(&mut rng, mu1.dim())?;
    let mut report = descend_from(mu1, mu2, theta, smoothing, gd)?;
    report.wall_time = clock.seconds();
    Ok(report)
}

pub(crate) fn descend_from(
    mu1: &PointCloud,
    mu2: &PointCloud,
    mut theta: UnitDirection,
    smoothing: &SmoothingConfig,
    gd: &GdConfig,
) -> Result<DistanceReport> {
    check_pair(mu1, mu2, &theta)?;
    let mut stepper = SphereStepper::new(*gd, mu1.dim());
    let mut best = (swgg_value(mu1, mu2, theta.as_slice()), theta.clone());
    let mut evaluations = 1;
    for t in 0..gd.iterations {
        let noise_seed = if gd.resample_noise { derive_seed(smoothing.seed, t as u64) } else { smoothing.seed };
        let cfg = SmoothingConfig { seed: noise_seed, ..*smoothing };
        let grad = SmoothedSurrogate::freeze(mu1, mu2, theta.as_slice(), &cfg)?.gradient(theta.as_slice());
        evaluations += 1;
        if !stepper.step(&mut theta, &grad, -1.0) {
            continue;
        }
        let value = swgg_value(mu1, mu2, theta.as_slice());
        evaluations += 1;
        if value < best.0 {
            best = (value, theta.clone());
        }
    }
    let (value, matching) = swgg_perm(mu1, mu2, &best.1)?;
    Ok(DistanceReport { value, direction: best.1, matching, evaluations, wall_time: 0.0 })
}
