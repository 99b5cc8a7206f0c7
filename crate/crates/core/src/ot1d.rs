//! Exact optimal transport on the real line.
//!
//! Between two uniform measures with the same number of atoms the optimal
//! coupling is monotone: the `k`-th smallest source atom goes to the `k`-th
//! smallest target atom.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::measures::{argsort, project_scalar, LineMeasure, PointCloud, SortPermutation, UnitDirection};

/// Monotone coupling `x_{source_order[k]} ↔ y_{target_order[k]}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SortedPairing {
    pub source_order: SortPermutation,
    pub target_order: SortPermutation,
}

/// Squared 1D Wasserstein distance `(1/n) Σ_k (x_{σ(k)} − y_{τ(k)})²` and the sorted pairing.
pub fn wd1d(x: &[f64], y: &[f64]) -> Result<(f64, SortedPairing)> {
    if x.len() != y.len() {
        return Err(Error::SizeMismatch { left: x.len(), right: y.len() });
    }
    if x.is_empty() {
        return Err(Error::Empty);
    }
    if let Some(pos) = x.iter().chain(y).position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(pos));
    }
    let sigma = argsort(x);
    let tau = argsort(y);
    let value = sorted_cost(x, y, &sigma, &tau);
    Ok((value, SortedPairing { source_order: sigma, target_order: tau }))
}

pub(crate) fn sorted_cost(x: &[f64], y: &[f64], sigma: &SortPermutation, tau: &SortPermutation) -> f64 {
    let sum: f64 = sigma.as_slice().iter().zip(tau.as_slice()).map(|(&i, &j)| (x[i] - y[j]) * (x[i] - y[j])).sum();
    sum / x.len() as f64
}

/// 1D Wasserstein mean (midpoint of the geodesic) of the projections of two
/// clouds onto `theta`, as a measure on that line. Abscissae come out sorted.
pub fn wasserstein_mean_line(mu1: &PointCloud, mu2: &PointCloud, theta: &UnitDirection) -> Result<LineMeasure> {
    mu1.check_same_shape(mu2)?;
    let p = project_scalar(mu1, theta)?;
    let q = project_scalar(mu2, theta)?;
    let sigma = argsort(&p);
    let tau = argsort(&q);
    let abscissae: Vec<f64> = sigma.as_slice().iter().zip(tau.as_slice()).map(|(&i, &j)| 0.5 * (p[i] + q[j])).collect();
    LineMeasure::new(theta.clone(), abscissae)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn small_cases() {
        assert_eq!(wd1d(&[0.0, 2.0], &[1.0, 3.0]).unwrap().0, 1.0);
        assert_eq!(wd1d(&[0.0, 10.0], &[10.0, 0.0]).unwrap().0, 0.0);
        let x = [3.0, -1.0, 2.5, 7.0];
        let y = [7.0, 2.5, 3.0, -1.0];
        assert_eq!(wd1d(&x, &y).unwrap().0, 0.0);
    }

    #[test]
    fn errors() {
        assert_eq!(wd1d(&[0.0], &[1.0, 2.0]).unwrap_err(), Error::SizeMismatch { left: 1, right: 2 });
        assert_eq!(wd1d(&[], &[]).unwrap_err(), Error::Empty);
        assert!(matches!(wd1d(&[f64::NAN], &[1.0]), Err(Error::NonFinite(_))));
    }

    #[test]
    fn mean_line() {
        let th = UnitDirection::axis(2, 0).unwrap();
        let a = PointCloud::from_rows(&[[2.0, 1.0], [0.0, 5.0]]).unwrap();
        let b = PointCloud::from_rows(&[[6.0, 0.0], [4.0, -3.0]]).unwrap();
        let m = wasserstein_mean_line(&a, &b, &th).unwrap();
        assert_eq!(m.abscissae(), &[2.0, 4.0]);

        let same = wasserstein_mean_line(&a, &a, &th).unwrap();
        assert_eq!(same.abscissae(), &[0.0, 2.0]);

        let flat = PointCloud::from_rows(&[[1.0, 0.0], [1.0, 3.0]]).unwrap();
        let m = wasserstein_mean_line(&flat, &flat, &th).unwrap();
        assert_eq!(m.abscissae(), &[1.0, 1.0]);
    }

    #[test]
    fn mean_line_translation() {
        let th = UnitDirection::normalized(vec![1.0, 2.0]).unwrap();
        let a = PointCloud::from_rows(&[[2.0, 1.0], [0.0, 5.0], [-1.0, 0.5]]).unwrap();
        let b = PointCloud::from_rows(&[[6.0, 0.0], [4.0, -3.0], [0.0, 0.0]]).unwrap();
        let u = [0.7, -1.3];
        let base = wasserstein_mean_line(&a, &b, &th).unwrap();
        let moved = wasserstein_mean_line(&a.translated(&u).unwrap(), &b.translated(&u).unwrap(), &th).unwrap();
        let shift = crate::math::dot(&u, th.as_slice());
        for (m, b) in moved.abscissae().iter().zip(base.abscissae()) {
            assert!((m - b - shift).abs() < 1e-12);
        }
    }
}
