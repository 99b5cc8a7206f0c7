//! Sliced Wasserstein generalized geodesics (SWGG).
//!
//! For a direction `θ`, sort both clouds by their projections on `θ` and pair
//! the atoms rank by rank. `SWGG(μ1, μ2, θ)` is the full-dimensional mean
//! squared cost of that pairing, so it is an upper bound of `W2²` that comes
//! with an explicit one-to-one map. min-SWGG minimizes it over `θ`.
//!
//! Three algebraically equal evaluations are provided:
//! * [`swgg_perm`]: the pairing cost itself;
//! * [`swgg_geodesic`]: a combination of three transport costs to the pivot
//!   measure (the 1D Wasserstein mean on the line), each evaluated with the
//!   line closed form;
//! * [`swgg_decomposed`]: residuals of `μ1`, `μ2` and of the generalized mean
//!   to their projections plus one 1D distance, in `O(dn + n log n)`.

mod search;
mod smooth;

pub(crate) use search::SphereStepper;
pub use search::{
    minswgg_anneal, minswgg_optimize, minswgg_random_search, DistanceReport, GdConfig, Optimizer,
    ANNEAL_MIN_TEMPERATURE, ANNEAL_STEP,
};
pub use smooth::{grad_smoothed_swgg, smoothed_swgg, smoothed_swgg_at, SmoothedSurrogate, SmoothingConfig};

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::exact_ot::MatchingMap;
use crate::line_closed_form::w2_to_line;
use crate::math::{sq_dist, sq_residual};
use crate::measures::{argsort, project_raw, PointCloud, SortPermutation, UnitDirection};
use crate::ot1d::{sorted_cost, wasserstein_mean_line};

/// Sort orders of both clouds along `theta` (unit or not).
pub(crate) fn sort_pair(
    mu1: &PointCloud,
    mu2: &PointCloud,
    theta: &[f64],
) -> (Vec<f64>, Vec<f64>, SortPermutation, SortPermutation) {
    let p = project_raw(mu1, theta);
    let q = project_raw(mu2, theta);
    let sigma = argsort(&p);
    let tau = argsort(&q);
    (p, q, sigma, tau)
}

pub(crate) fn check_pair(mu1: &PointCloud, mu2: &PointCloud, theta: &UnitDirection) -> Result<()> {
    mu1.check_same_shape(mu2)?;
    mu1.check_dim(theta.dim())
}

/// Mean squared cost of the rank-by-rank pairing, without building the map.
pub(crate) fn swgg_value(mu1: &PointCloud, mu2: &PointCloud, theta: &[f64]) -> f64 {
    let (_, _, sigma, tau) = sort_pair(mu1, mu2, theta);
    pairing_cost(mu1, mu2, &sigma, &tau)
}

pub(crate) fn pairing_cost(mu1: &PointCloud, mu2: &PointCloud, sigma: &SortPermutation, tau: &SortPermutation) -> f64 {
    let s: f64 = sigma.as_slice().iter().zip(tau.as_slice()).map(|(&i, &j)| sq_dist(mu1.row(i), mu2.row(j))).sum();
    s / mu1.len() as f64
}

pub(crate) fn pairing_map(sigma: &SortPermutation, tau: &SortPermutation) -> MatchingMap {
    let mut assign = alloc::vec![0usize; sigma.len()];
    for (&i, &j) in sigma.as_slice().iter().zip(tau.as_slice()) {
        assign[i] = j;
    }
    MatchingMap::from_raw(assign)
}

/// `SWGG²(μ1, μ2, θ) = (1/n) Σ_k ‖x_{σ(k)} − y_{τ(k)}‖²` with its transport map.
pub fn swgg_perm(mu1: &PointCloud, mu2: &PointCloud, theta: &UnitDirection) -> Result<(f64, MatchingMap)> {
    check_pair(mu1, mu2, theta)?;
    let (_, _, sigma, tau) = sort_pair(mu1, mu2, theta.as_slice());
    Ok((pairing_cost(mu1, mu2, &sigma, &tau), pairing_map(&sigma, &tau)))
}

/// Map pairing `x_{sigma[k]}` with `y_{tau[k]}`: `assign[sigma[k]] = tau[k]`.
pub fn extract_map(sigma: &SortPermutation, tau: &SortPermutation) -> Result<MatchingMap> {
    if sigma.len() != tau.len() {
        return Err(Error::SizeMismatch { left: sigma.len(), right: tau.len() });
    }
    // re-validate: permutations may have been built from raw parts
    SortPermutation::new(sigma.as_slice().to_vec())?;
    SortPermutation::new(tau.as_slice().to_vec())?;
    Ok(pairing_map(sigma, tau))
}

/// Generalized Wasserstein mean through the line pivot: atom `k` is
/// `½(x_{σ(k)} + y_{τ(k)})`, listed in rank order.
pub fn generalized_mean(mu1: &PointCloud, mu2: &PointCloud, theta: &UnitDirection) -> Result<PointCloud> {
    check_pair(mu1, mu2, theta)?;
    let (_, _, sigma, tau) = sort_pair(mu1, mu2, theta.as_slice());
    Ok(midpoints(mu1, mu2, &sigma, &tau))
}

fn midpoints(mu1: &PointCloud, mu2: &PointCloud, sigma: &SortPermutation, tau: &SortPermutation) -> PointCloud {
    let d = mu1.dim();
    let mut data = Vec::with_capacity(mu1.len() * d);
    for (&i, &j) in sigma.as_slice().iter().zip(tau.as_slice()) {
        data.extend(mu1.row(i).iter().zip(mu2.row(j)).map(|(a, b)| 0.5 * (a + b)));
    }
    PointCloud::from_raw(data, d)
}

/// `2W²(μ1, ν) + 2W²(ν, μ2) − 4W²(μ_g, ν)` with `ν` the pivot on the line and
/// `μ_g` the generalized mean; every term uses the line closed form.
pub fn swgg_geodesic(mu1: &PointCloud, mu2: &PointCloud, theta: &UnitDirection) -> Result<f64> {
    check_pair(mu1, mu2, theta)?;
    let pivot = wasserstein_mean_line(mu1, mu2, theta)?;
    let mean = generalized_mean(mu1, mu2, theta)?;
    let (to_first, _) = w2_to_line(mu1, &pivot)?;
    let (to_second, _) = w2_to_line(mu2, &pivot)?;
    let (to_mean, _) = w2_to_line(&mean, &pivot)?;
    Ok(2.0 * to_first + 2.0 * to_second - 4.0 * to_mean)
}

/// Residual form: `2R(μ1) + 2R(μ2) − 4R(μ_g) + W²(P_θ μ1, P_θ μ2)`, where
/// `R(μ)` is the mean squared distance of the atoms to the line.
pub fn swgg_decomposed(mu1: &PointCloud, mu2: &PointCloud, theta: &UnitDirection) -> Result<f64> {
    check_pair(mu1, mu2, theta)?;
    let th = theta.as_slice();
    let (p, q, sigma, tau) = sort_pair(mu1, mu2, th);
    let n = mu1.len() as f64;
    let residual = |cloud: &PointCloud, proj: &[f64]| -> f64 {
        cloud.rows().zip(proj).map(|(x, &t)| sq_residual(x, t, th)).sum::<f64>() / n
    };
    let r1 = residual(mu1, &p);
    let r2 = residual(mu2, &q);
    let mut rg = 0.0;
    let mut mid = alloc::vec![0.0; mu1.dim()];
    for (&i, &j) in sigma.as_slice().iter().zip(tau.as_slice()) {
        for ((m, a), b) in mid.iter_mut().zip(mu1.row(i)).zip(mu2.row(j)) {
            *m = 0.5 * (a + b);
        }
        rg += sq_residual(&mid, 0.5 * (p[i] + q[j]), th);
    }
    rg /= n;
    let along = sorted_cost(&p, &q, &sigma, &tau);
    Ok(2.0 * r1 + 2.0 * r2 - 4.0 * rg + along)
}
