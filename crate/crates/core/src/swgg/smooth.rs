//! Smoothed SWGG surrogate and its gradient in `θ`.
//!
//! SWGG is piecewise constant in `θ`: only the generalized mean depends on the
//! sort orders. The surrogate replaces that mean by a blurred one. Each atom
//! of `μ1` (resp. `μ2`), taken in rank order, is copied `s` times; every copy
//! gets its projection perturbed by Gaussian noise of deviation `√ε / 2`; the
//! copies are re-sorted by the noisy keys and averaged by consecutive blocks
//! of `s`. With `s = 1` and `ε = 0` the blurred mean is the exact
//! generalized mean and the surrogate equals SWGG.
//!
//! The value is `a + b − c` with
//! * `a = (2/n) Σ (‖x_i − Q x_i‖² + ‖y_i − Q y_i‖²)`,
//! * `b = (1/n) Σ_k (⟨x_{σ(k)}, θ⟩ − ⟨y_{τ(k)}, θ⟩)²`,
//! * `c = (4/n) Σ_k ‖½(Q x_{σ(k)} + Q y_{τ(k)}) − z_k‖²`, `z_k` the blurred mean,
//!
//! where `Q v = ⟨v, θ⟩ θ`. The formula is evaluated for any vector `θ`, unit or
//! not, which is what the gradient differentiates.

use alloc::vec::Vec;

use rand_distr::{Distribution, Normal};

use super::{check_pair, sort_pair};
use crate::error::{Error, Result};
use crate::math::{dot, sqrt};
use crate::measures::{argsort, rng_from_seed, PointCloud, SortPermutation, UnitDirection};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothingConfig {
    /// Copies per atom (`s ≥ 1`).
    pub copies: usize,
    /// Blur strength; per-copy noise deviation is `√ε / 2`.
    pub epsilon: f64,
    pub seed: u64,
}

impl Default for SmoothingConfig {
    fn default() -> Self {
        SmoothingConfig { copies: 10, epsilon: 1.0, seed: 0 }
    }
}

impl SmoothingConfig {
    pub(crate) fn validate(&self) -> Result<()> {
        if self.copies == 0 {
            return Err(Error::InvalidParameter("smoothing copies must be at least 1"));
        }
        if !(self.epsilon.is_finite() && self.epsilon >= 0.0) {
            return Err(Error::InvalidParameter("smoothing epsilon must be finite and nonnegative"));
        }
        Ok(())
    }
}

/// The surrogate with every sort order and noise draw frozen at one `θ`.
///
/// Between sort-order changes the surrogate is a smooth function of `θ`;
/// [`SmoothedSurrogate::value`] and [`SmoothedSurrogate::gradient`] evaluate that
/// piece, and agree with [`smoothed_swgg_at`] at the freezing point.
#[derive(Debug, Clone)]
pub struct SmoothedSurrogate<'a> {
    mu1: &'a PointCloud,
    mu2: &'a PointCloud,
    sigma: SortPermutation,
    tau: SortPermutation,
    /// Blurred mean, `n × d`, in rank order.
    blurred: Vec<f64>,
}

impl<'a> SmoothedSurrogate<'a> {
    pub fn freeze(mu1: &'a PointCloud, mu2: &'a PointCloud, theta: &[f64], cfg: &SmoothingConfig) -> Result<Self> {
        mu1.check_same_shape(mu2)?;
        mu1.check_dim(theta.len())?;
        cfg.validate()?;
        let (n, d, s) = (mu1.len(), mu1.dim(), cfg.copies);
        let (p, q, sigma, tau) = sort_pair(mu1, mu2, theta);

        let deviation = sqrt(cfg.epsilon) / 2.0;
        let normal = Normal::new(0.0, deviation).map_err(|_| Error::InvalidParameter("smoothing epsilon"))?;
        let mut rng = rng_from_seed(cfg.seed);
        // copy c of sample i sits at position i * s + c; noise stays with its sample
        let mut noisy_order = |proj: &[f64]| -> SortPermutation {
            let keys: Vec<f64> =
                (0..n * s).map(|k| proj[k / s] + if deviation > 0.0 { normal.sample(&mut rng) } else { 0.0 }).collect();
            argsort(&keys)
        };
        let sigma_s = noisy_order(&p);
        let tau_s = noisy_order(&q);

        let mut blurred = alloc::vec![0.0; n * d];
        let scale = 1.0 / (2.0 * s as f64);
        for (k, (&cx, &cy)) in sigma_s.as_slice().iter().zip(tau_s.as_slice()).enumerate() {
            let (x, y) = (mu1.row(cx / s), mu2.row(cy / s));
            let z = &mut blurred[(k / s) * d..(k / s + 1) * d];
            for ((zi, a), b) in z.iter_mut().zip(x).zip(y) {
                *zi += scale * (a + b);
            }
        }
        Ok(SmoothedSurrogate { mu1, mu2, sigma, tau, blurred })
    }

    fn blurred_row(&self, k: usize) -> &[f64] {
        let d = self.mu1.dim();
        &self.blurred[k * d..(k + 1) * d]
    }

    /// Surrogate value at `theta` with the frozen orders.
    pub fn value(&self, theta: &[f64]) -> f64 {
        let n = self.mu1.len() as f64;
        let tt = dot(theta, theta);
        let mut residuals = 0.0;
        for cloud in [self.mu1, self.mu2] {
            for x in cloud.rows() {
                let p = dot(x, theta);
                // ‖x − pθ‖² expanded; keeps the expression valid off the sphere
                residuals += dot(x, x) - 2.0 * p * p + p * p * tt;
            }
        }
        let mut along = 0.0;
        let mut blur = 0.0;
        for (k, (&i, &j)) in self.sigma.as_slice().iter().zip(self.tau.as_slice()).enumerate() {
            let p = dot(self.mu1.row(i), theta);
            let q = dot(self.mu2.row(j), theta);
            along += (p - q) * (p - q);
            let m = 0.5 * (p + q);
            blur += self.blurred_row(k).iter().zip(theta).map(|(z, th)| (m * th - z) * (m * th - z)).sum::<f64>();
        }
        (2.0 * residuals + along - 4.0 * blur) / n
    }

    /// Exact gradient of [`SmoothedSurrogate::value`] with respect to `theta`.
    pub fn gradient(&self, theta: &[f64]) -> Vec<f64> {
        let d = theta.len();
        let n = self.mu1.len() as f64;
        let mut grad = alloc::vec![0.0; d];
        let mut r = alloc::vec![0.0; d];

        // a: ∇‖x − pθ‖² = −2 (x ⟨θ, r⟩ + p r),  r = x − pθ
        for cloud in [self.mu1, self.mu2] {
            for x in cloud.rows() {
                let p = dot(x, theta);
                for ((ri, xi), th) in r.iter_mut().zip(x).zip(theta) {
                    *ri = xi - p * th;
                }
                let tr = dot(theta, &r);
                for ((g, xi), ri) in grad.iter_mut().zip(x).zip(&r) {
                    *g -= 4.0 * (xi * tr + p * ri);
                }
            }
        }

        let mut u = alloc::vec![0.0; d];
        for (k, (&i, &j)) in self.sigma.as_slice().iter().zip(self.tau.as_slice()).enumerate() {
            let x = self.mu1.row(i);
            let y = self.mu2.row(j);
            let p = dot(x, theta);
            let q = dot(y, theta);
            // b: 2 (p − q)(x − y)
            for ((g, xi), yi) in grad.iter_mut().zip(x).zip(y) {
                *g += 2.0 * (p - q) * (xi - yi);
            }
            // c: ∇‖mθ − z‖² = 2 (u ⟨θ, e⟩ + m e),  u = ½(x + y),  e = mθ − z
            let m = 0.5 * (p + q);
            for ((ui, xi), yi) in u.iter_mut().zip(x).zip(y) {
                *ui = 0.5 * (xi + yi);
            }
            let z = self.blurred_row(k);
            let mut te = 0.0;
            for ((ri, zi), th) in r.iter_mut().zip(z).zip(theta) {
                *ri = m * th - zi;
                te += th * *ri;
            }
            for ((g, ui), ei) in grad.iter_mut().zip(&u).zip(&r) {
                *g -= 8.0 * (ui * te + m * ei);
            }
        }
        grad.iter_mut().for_each(|g| *g /= n);
        grad
    }
}

/// Surrogate value at a unit direction.
pub fn smoothed_swgg(mu1: &PointCloud, mu2: &PointCloud, theta: &UnitDirection, cfg: &SmoothingConfig) -> Result<f64> {
    check_pair(mu1, mu2, theta)?;
    smoothed_swgg_at(mu1, mu2, theta.as_slice(), cfg)
}

/// Surrogate formula at an arbitrary vector `theta`, sort orders recomputed there.
pub fn smoothed_swgg_at(mu1: &PointCloud, mu2: &PointCloud, theta: &[f64], cfg: &SmoothingConfig) -> Result<f64> {
    Ok(SmoothedSurrogate::freeze(mu1, mu2, theta, cfg)?.value(theta))
}

/// Gradient of the surrogate at `theta`, sort orders and noise held fixed.
pub fn grad_smoothed_swgg(
    mu1: &PointCloud,
    mu2: &PointCloud,
    theta: &UnitDirection,
    cfg: &SmoothingConfig,
) -> Result<Vec<f64>> {
    check_pair(mu1, mu2, theta)?;
    Ok(SmoothedSurrogate::freeze(mu1, mu2, theta.as_slice(), cfg)?.gradient(theta.as_slice()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::swgg::swgg_perm;
    use alloc::vec;

    fn pair() -> (PointCloud, PointCloud) {
        let a = PointCloud::from_rows(&[[0.3, 1.0, 0.0], [2.0, -1.0, 0.5], [0.0, 0.5, -0.7], [1.1, 0.1, 0.2]]).unwrap();
        let b = PointCloud::from_rows(&[[1.3, 0.0, 0.4], [-2.0, 1.0, 1.0], [0.7, 0.2, -0.1], [0.0, 2.0, 0.0]]).unwrap();
        (a, b)
    }

    #[test]
    fn degenerate_smoothing_is_swgg() {
        let (a, b) = pair();
        let th = UnitDirection::normalized(vec![0.2, 1.0, -0.4]).unwrap();
        let cfg = SmoothingConfig { copies: 1, epsilon: 0.0, seed: 1 };
        let plain = swgg_perm(&a, &b, &th).unwrap().0;
        assert!((smoothed_swgg(&a, &b, &th, &cfg).unwrap() - plain).abs() < 1e-12);
        // noise-free copies collapse for any s
        let cfg = SmoothingConfig { copies: 7, epsilon: 0.0, seed: 1 };
        assert!((smoothed_swgg(&a, &b, &th, &cfg).unwrap() - plain).abs() < 1e-12);
    }

    #[test]
    fn identical_clouds() {
        let (a, _) = pair();
        let th = UnitDirection::normalized(vec![1.0, 1.0, 1.0]).unwrap();
        let cfg = SmoothingConfig { copies: 5, epsilon: 0.0, seed: 3 };
        assert!(smoothed_swgg(&a, &a, &th, &cfg).unwrap().abs() < 1e-12);
        let g = grad_smoothed_swgg(&a, &a, &th, &cfg).unwrap();
        assert!(g.iter().all(|v| v.abs() < 1e-12), "{g:?}");
    }

    #[test]
    fn deterministic_given_seed() {
        let (a, b) = pair();
        let th = UnitDirection::normalized(vec![0.5, -1.0, 0.1]).unwrap();
        let cfg = SmoothingConfig { copies: 10, epsilon: 1.0, seed: 42 };
        assert_eq!(smoothed_swgg(&a, &b, &th, &cfg).unwrap(), smoothed_swgg(&a, &b, &th, &cfg).unwrap());
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let (a, b) = pair();
        let th = UnitDirection::normalized(vec![0.5, -1.0, 0.1]).unwrap();
        let cfg = SmoothingConfig { copies: 10, epsilon: 1.0, seed: 42 };
        let g = grad_smoothed_swgg(&a, &b, &th, &cfg).unwrap();
        let h = 1e-6;
        for k in 0..3 {
            let mut plus = th.as_slice().to_vec();
            let mut minus = th.as_slice().to_vec();
            plus[k] += h;
            minus[k] -= h;
            let fd = (smoothed_swgg_at(&a, &b, &plus, &cfg).unwrap() - smoothed_swgg_at(&a, &b, &minus, &cfg).unwrap())
                / (2.0 * h);
            assert!((fd - g[k]).abs() <= 1e-4 * g[k].abs().max(1.0), "{k}: {fd} vs {}", g[k]);
        }
    }

    #[test]
    fn rejects_bad_config() {
        let (a, b) = pair();
        let th = UnitDirection::axis(3, 0).unwrap();
        assert!(smoothed_swgg(&a, &b, &th, &SmoothingConfig { copies: 0, ..Default::default() }).is_err());
        assert!(smoothed_swgg(&a, &b, &th, &SmoothingConfig { epsilon: -1.0, ..Default::default() }).is_err());
    }
}
