//! Sliced comparators: Sliced-Wasserstein, max-sliced Wasserstein, and the
//! projected Wasserstein distance (PWD).
//!
//! `max_sw ≤ W2² ≤ min-SWGG ≤ PWD` when min-SWGG and PWD use the same directions.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::measures::{argsort, project_raw, rng_from_seed, sample_direction, substream, PointCloud, UnitDirection};
use crate::ot1d::sorted_cost;
use crate::par::map_indices;
use crate::swgg::{swgg_value, GdConfig, SphereStepper};

fn directions(d: usize, seed: u64) -> impl Fn(usize) -> UnitDirection {
    move |l| sample_direction(&mut substream(seed, l as u64), d).expect("d >= 1")
}

fn check(mu1: &PointCloud, mu2: &PointCloud, count: usize) -> Result<()> {
    mu1.check_same_shape(mu2)?;
    if count == 0 {
        return Err(Error::InvalidParameter("number of directions must be positive"));
    }
    Ok(())
}

/// 1D squared Wasserstein distance between the projections on `theta`.
pub(crate) fn projected_wd(mu1: &PointCloud, mu2: &PointCloud, theta: &[f64]) -> f64 {
    let p = project_raw(mu1, theta);
    let q = project_raw(mu2, theta);
    sorted_cost(&p, &q, &argsort(&p), &argsort(&q))
}

/// Monte-Carlo Sliced-Wasserstein: mean of the 1D distances over `count` directions.
pub fn sw(mu1: &PointCloud, mu2: &PointCloud, count: usize, seed: u64) -> Result<f64> {
    check(mu1, mu2, count)?;
    let dir = directions(mu1.dim(), seed);
    let values = map_indices(count, |l| projected_wd(mu1, mu2, dir(l).as_slice()));
    Ok(values.iter().sum::<f64>() / count as f64)
}

/// Projected Wasserstein distance: mean SWGG over `count` directions. Uses the
/// same direction stream as [`crate::swgg::minswgg_random_search`].
pub fn pwd(mu1: &PointCloud, mu2: &PointCloud, count: usize, seed: u64) -> Result<f64> {
    check(mu1, mu2, count)?;
    let dir = directions(mu1.dim(), seed);
    let values = map_indices(count, |l| swgg_value(mu1, mu2, dir(l).as_slice()));
    Ok(values.iter().sum::<f64>() / count as f64)
}

/// Gradient in `θ` of the 1D distance with the sort orders frozen:
/// `(2/n) Σ_k ⟨x_{σ(k)} − y_{τ(k)}, θ⟩ (x_{σ(k)} − y_{τ(k)})`.
pub(crate) fn projected_wd_gradient(mu1: &PointCloud, mu2: &PointCloud, theta: &[f64]) -> (f64, Vec<f64>) {
    let p = project_raw(mu1, theta);
    let q = project_raw(mu2, theta);
    let sigma = argsort(&p);
    let tau = argsort(&q);
    let n = mu1.len() as f64;
    let mut grad = alloc::vec![0.0; theta.len()];
    let mut value = 0.0;
    for (&i, &j) in sigma.as_slice().iter().zip(tau.as_slice()) {
        let diff = p[i] - q[j];
        value += diff * diff;
        for ((g, a), b) in grad.iter_mut().zip(mu1.row(i)).zip(mu2.row(j)) {
            *g += 2.0 * diff * (a - b) / n;
        }
    }
    (value / n, grad)
}

/// max-SW by projected gradient ascent from a random start (seeded by `gd.seed`).
/// Returns the best value seen and its direction.
pub fn max_sw(mu1: &PointCloud, mu2: &PointCloud, gd: &GdConfig) -> Result<(f64, UnitDirection)> {
    mu1.check_same_shape(mu2)?;
    gd.validate()?;
    let mut theta = sample_direction(&mut rng_from_seed(gd.seed), mu1.dim())?;
    let mut stepper = SphereStepper::new(*gd, mu1.dim());
    let (mut value, mut grad) = projected_wd_gradient(mu1, mu2, theta.as_slice());
    let mut best = (value, theta.clone());
    for _ in 0..gd.iterations {
        if !stepper.step(&mut theta, &grad, 1.0) {
            break;
        }
        (value, grad) = projected_wd_gradient(mu1, mu2, theta.as_slice());
        if value > best.0 {
            best = (value, theta.clone());
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ot1d::wd1d;
    use crate::swgg::{minswgg_random_search, swgg_perm, Optimizer};

    #[test]
    fn identical_clouds_are_zero() {
        let a = PointCloud::from_rows(&[[0.0, 1.0], [2.0, 0.5], [1.0, -1.0]]).unwrap();
        assert_eq!(sw(&a, &a, 10, 1).unwrap(), 0.0);
        assert_eq!(pwd(&a, &a, 10, 1).unwrap(), 0.0);
        assert_eq!(max_sw(&a, &a, &GdConfig::default()).unwrap().0, 0.0);
    }

    #[test]
    fn one_dimensional_sw_is_wd1d() {
        let x = [0.0, 3.0, 1.5, -2.0];
        let y = [1.0, 1.0, 4.0, 0.0];
        let a = PointCloud::new(x.to_vec(), 1).unwrap();
        let b = PointCloud::new(y.to_vec(), 1).unwrap();
        let w = wd1d(&x, &y).unwrap().0;
        for l in [1, 3, 20] {
            assert!((sw(&a, &b, l, 5).unwrap() - w).abs() < 1e-12);
        }
    }

    #[test]
    fn single_direction_pwd_is_swgg() {
        let a = PointCloud::from_rows(&[[0.0, 1.0], [2.0, 0.5], [1.0, -1.0]]).unwrap();
        let b = PointCloud::from_rows(&[[1.0, 0.0], [-1.0, 2.5], [0.3, 0.3]]).unwrap();
        let th = sample_direction(&mut substream(4, 0), 2).unwrap();
        assert_eq!(pwd(&a, &b, 1, 4).unwrap(), swgg_perm(&a, &b, &th).unwrap().0);
        assert!(pwd(&a, &b, 50, 4).unwrap() >= minswgg_random_search(&a, &b, 50, 4).unwrap().value);
    }

    #[test]
    fn max_sw_finds_the_displacement_axis() {
        let zero = PointCloud::from_rows(&[[0.0, 0.0, 0.0, 0.0]]).unwrap();
        let v = [1.0, -2.0, 0.5, 0.3];
        let moved = PointCloud::from_rows(&[v]).unwrap();
        let gd = GdConfig {
            learning_rate: 1.0,
            iterations: 200,
            optimizer: Optimizer::Plain,
            seed: 3,
            resample_noise: false,
        };
        let (value, dir) = max_sw(&zero, &moved, &gd).unwrap();
        let norm2 = crate::math::dot(&v, &v);
        assert!((value - norm2).abs() < 1e-6, "{value} vs {norm2}");
        let cos = crate::math::dot(dir.as_slice(), &v).abs() / libm::sqrt(norm2);
        assert!((cos - 1.0).abs() < 1e-6);
    }

    #[test]
    fn directions_count_must_be_positive() {
        let a = PointCloud::from_rows(&[[0.0]]).unwrap();
        assert!(sw(&a, &a, 0, 1).is_err());
        assert!(pwd(&a, &a, 0, 1).is_err());
    }
}
