//! Closed-form transport towards a measure supported on a line.
//!
//! If `μ2` lives on the line `R θ`, the optimal map from `μ1` first drops every
//! atom orthogonally onto the line and then applies the monotone 1D map. The
//! cost splits into the mean squared residual plus a 1D Wasserstein distance,
//! so it is computed in `O(dn + n log n)`.

pub mod color;

use crate::error::{Error, Result};
use crate::exact_ot::MatchingMap;
use crate::math::sq_residual;
use crate::measures::{argsort, project_scalar, LineMeasure, PointCloud};
use crate::ot1d::sorted_cost;

pub use color::{color_transfer, colorize, RgbImage};

/// Exact squared 2-Wasserstein distance from `mu1` to a line-supported measure,
/// with the optimal map (source atom `i` → line atom `assign[i]`).
pub fn w2_to_line(mu1: &PointCloud, line: &LineMeasure) -> Result<(f64, MatchingMap)> {
    if mu1.len() != line.len() {
        return Err(Error::SizeMismatch { left: mu1.len(), right: line.len() });
    }
    let theta = line.direction();
    let p = project_scalar(mu1, theta)?;
    let n = mu1.len() as f64;
    let residual: f64 = mu1.rows().zip(&p).map(|(x, &t)| sq_residual(x, t, theta.as_slice())).sum::<f64>() / n;
    let sigma = argsort(&p);
    let tau = argsort(line.abscissae());
    let along = sorted_cost(&p, line.abscissae(), &sigma, &tau);
    let mut assign = alloc::vec![0usize; mu1.len()];
    for (&i, &j) in sigma.as_slice().iter().zip(tau.as_slice()) {
        assign[i] = j;
    }
    Ok((residual + along, MatchingMap::from_raw(assign)))
}

/// The two summands of the line split: mean squared residual to the line, and
/// the 1D distance between the projected source and the line measure.
pub fn line_split(mu1: &PointCloud, line: &LineMeasure) -> Result<(f64, f64)> {
    if mu1.len() != line.len() {
        return Err(Error::SizeMismatch { left: mu1.len(), right: line.len() });
    }
    let theta = line.direction();
    let p = project_scalar(mu1, theta)?;
    let residual: f64 =
        mu1.rows().zip(&p).map(|(x, &t)| sq_residual(x, t, theta.as_slice())).sum::<f64>() / mu1.len() as f64;
    let (along, _) = crate::ot1d::wd1d(&p, line.abscissae())?;
    Ok((residual, along))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::UnitDirection;
    use alloc::vec;

    #[test]
    fn vertical_drop() {
        let mu1 = PointCloud::from_rows(&[[0.0, 1.0], [2.0, 1.0]]).unwrap();
        let line = LineMeasure::new(UnitDirection::axis(2, 0).unwrap(), vec![0.0, 2.0]).unwrap();
        let (v, m) = w2_to_line(&mu1, &line).unwrap();
        assert_eq!(v, 1.0);
        assert_eq!(m.as_slice(), &[0, 1]);
        assert_eq!(line_split(&mu1, &line).unwrap(), (1.0, 0.0));
    }

    #[test]
    fn source_on_line_reduces_to_1d() {
        let th = UnitDirection::normalized(vec![1.0, 1.0]).unwrap();
        let src = LineMeasure::new(th.clone(), vec![3.0, -1.0, 0.5]).unwrap();
        let dst = LineMeasure::new(th, vec![0.0, 1.0, 2.0]).unwrap();
        let (v, _) = w2_to_line(&src.to_cloud(), &dst).unwrap();
        let (w, _) = crate::ot1d::wd1d(src.abscissae(), dst.abscissae()).unwrap();
        assert!((v - w).abs() < 1e-12);
    }

    #[test]
    fn size_mismatch() {
        let mu1 = PointCloud::from_rows(&[[0.0, 1.0]]).unwrap();
        let line = LineMeasure::new(UnitDirection::axis(2, 0).unwrap(), vec![0.0, 2.0]).unwrap();
        assert!(matches!(w2_to_line(&mu1, &line), Err(Error::SizeMismatch { .. })));
    }
}
