//! Synthetic clouds for the benchmark modes.

use std::f64::consts::TAU;

use geowass::apps::RigidTransform;
use geowass::measures::rng_from_seed;
use geowass::PointCloud;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;

/// Length of the translation in [`rigid_benchmark`].
const RIGID_SHIFT: f64 = 5.0;
/// Deviation of the noise added to the moved cloud in [`rigid_benchmark`].
const RIGID_NOISE: f64 = 0.1;

fn normal(rng: &mut impl Rng) -> f64 {
    rng.sample(StandardNormal)
}

/// `n` samples of `N(m, AAᵀ)` with `m ~ N(0, I)` and `A_ij ~ N(0, 1/d)`.
fn random_gaussian(rng: &mut impl Rng, n: usize, d: usize) -> PointCloud {
    let mean: Vec<f64> = (0..d).map(|_| normal(rng)).collect();
    let scale = 1.0 / (d as f64).sqrt();
    let a: Vec<f64> = (0..d * d).map(|_| normal(rng) * scale).collect();
    let mut data = Vec::with_capacity(n * d);
    for _ in 0..n {
        let z: Vec<f64> = (0..d).map(|_| normal(rng)).collect();
        data.extend((0..d).map(|i| mean[i] + (0..d).map(|k| a[i * d + k] * z[k]).sum::<f64>()));
    }
    PointCloud::new(data, d).expect("finite Gaussian samples")
}

/// Two independent random Gaussian clouds.
pub fn gaussian_pair(n: usize, d: usize, seed: u64) -> (PointCloud, PointCloud) {
    let mut rng = rng_from_seed(seed);
    let a = random_gaussian(&mut rng, n, d);
    let b = random_gaussian(&mut rng, n, d);
    (a, b)
}

/// A planar random Gaussian cloud, its image under a random rotation or reflection
/// plus translation, shuffled and perturbed, and the true transform.
pub fn rigid_benchmark(n: usize, seed: u64) -> (PointCloud, PointCloud, RigidTransform) {
    let mut rng = rng_from_seed(seed);
    let source = random_gaussian(&mut rng, n, 2);
    let phi: f64 = rng.random_range(0.0..TAU);
    let flip = if rng.random_bool(0.5) { -1.0 } else { 1.0 };
    let heading: f64 = rng.random_range(0.0..TAU);
    let truth = RigidTransform::new(
        vec![phi.cos(), -flip * phi.sin(), phi.sin(), flip * phi.cos()],
        vec![RIGID_SHIFT * heading.cos(), RIGID_SHIFT * heading.sin()],
    )
    .expect("rotation matrices are orthogonal");
    let moved = truth.apply(&source).expect("dimensions agree");
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let noisy = moved.select(&order).into_vec().into_iter().map(|v| v + RIGID_NOISE * normal(&mut rng)).collect();
    (source, PointCloud::new(noisy, 2).expect("finite samples"), truth)
}
