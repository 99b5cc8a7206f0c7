#![allow(dead_code)]

use geowass::apps::RigidTransform;
use geowass::measures::{rng_from_seed, sample_direction, StdRng};
use geowass::{LineMeasure, PointCloud, UnitDirection};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn normal(rng: &mut StdRng) -> f64 {
    StandardNormal.sample(rng)
}

pub fn standard_cloud(rng: &mut StdRng, n: usize, d: usize) -> PointCloud {
    PointCloud::new((0..n * d).map(|_| normal(rng)).collect(), d).unwrap()
}

/// `n` samples of `N(m, AAᵀ)` with `m ~ N(0, I)` and `A_ij ~ N(0, 1/d)`.
pub fn random_gaussian(rng: &mut StdRng, n: usize, d: usize) -> PointCloud {
    let mean: Vec<f64> = (0..d).map(|_| normal(rng)).collect();
    let scale = 1.0 / (d as f64).sqrt();
    let a: Vec<f64> = (0..d * d).map(|_| normal(rng) * scale).collect();
    let mut data = Vec::with_capacity(n * d);
    for _ in 0..n {
        let z: Vec<f64> = (0..d).map(|_| normal(rng)).collect();
        for i in 0..d {
            data.push(mean[i] + (0..d).map(|k| a[i * d + k] * z[k]).sum::<f64>());
        }
    }
    PointCloud::new(data, d).unwrap()
}

pub fn gaussian_pair(n: usize, d: usize, seed: u64) -> (PointCloud, PointCloud) {
    let mut rng = rng_from_seed(seed);
    let a = random_gaussian(&mut rng, n, d);
    let b = random_gaussian(&mut rng, n, d);
    (a, b)
}

/// Random instance with `n ∈ [1, max_n]`, `d ∈ [1, max_d]`.
pub fn random_instance(rng: &mut StdRng, max_n: usize, max_d: usize) -> (PointCloud, PointCloud) {
    let n = rng.random_range(1..=max_n);
    let d = rng.random_range(1..=max_d);
    let shift = 2.0 * normal(rng);
    let a = standard_cloud(rng, n, d);
    let b = standard_cloud(rng, n, d);
    let b = b.translated(&vec![shift; d]).unwrap();
    (a, b)
}

pub fn random_direction(rng: &mut StdRng, d: usize) -> UnitDirection {
    sample_direction(rng, d).unwrap()
}

pub fn random_line(rng: &mut StdRng, n: usize, d: usize) -> LineMeasure {
    let dir = random_direction(rng, d);
    LineMeasure::new(dir, (0..n).map(|_| 3.0 * normal(rng)).collect()).unwrap()
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-12)
}

/// `k` clusters of `per` points each, centred at `centers`, isotropic spread `sd`.
pub fn clusters(rng: &mut StdRng, centers: &[Vec<f64>], per: usize, sd: f64) -> PointCloud {
    let d = centers[0].len();
    let mut data = Vec::with_capacity(centers.len() * per * d);
    for c in centers {
        for _ in 0..per {
            data.extend(c.iter().map(|v| v + sd * normal(rng)));
        }
    }
    PointCloud::new(data, d).unwrap()
}

/// Rigid benchmark: random rotation/reflection, ‖t‖ = 5, Gaussian noise 0.1, shuffled rows.
pub fn rigid_benchmark(n: usize, seed: u64) -> (PointCloud, PointCloud, RigidTransform) {
    let mut rng = rng_from_seed(seed);
    let source = random_gaussian(&mut rng, n, 2);
    let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let flip = if rng.random_bool(0.5) { -1.0 } else { 1.0 };
    let dir: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let truth = RigidTransform::new(
        vec![phi.cos(), -flip * phi.sin(), phi.sin(), flip * phi.cos()],
        vec![5.0 * dir.cos(), 5.0 * dir.sin()],
    )
    .unwrap();
    let moved = truth.apply(&source).unwrap();
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        order.swap(i, rng.random_range(0..=i));
    }
    let noisy: Vec<f64> = moved.select(&order).into_vec().into_iter().map(|v| v + 0.1 * normal(&mut rng)).collect();
    (source, PointCloud::new(noisy, 2).unwrap(), truth)
}
