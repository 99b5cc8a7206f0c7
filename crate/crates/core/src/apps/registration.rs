//! Rigid registration: Procrustes alignment, ICP with pluggable correspondences,
//! and the Chamfer / Frobenius evaluation criteria.
//!
//! Transforms act as `x ↦ Ω (x − t)`, translation first.

use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::exact_ot::{sinkhorn_divergence, w2_exact, SinkhornConfig, SinkhornOutcome, ORACLE_MAX_N};
use crate::math::{derive_seed, sq_dist, sqrt};
use crate::measures::PointCloud;
use crate::par::{map_indices, Stopwatch};
use crate::swgg::{minswgg_optimize, minswgg_random_search, GdConfig, SmoothingConfig};

/// Orthogonality tolerance `‖ΩᵀΩ − I‖_F`.
pub const ORTHOGONALITY_TOLERANCE: f64 = 1e-8;

/// Relative size below which a singular value of the cross-covariance counts as zero.
const DEGENERATE_SINGULAR_VALUE: f64 = 1e-12;

/// Element of `O(d) × R^d` acting as `x ↦ Ω (x − t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RigidTransform {
    /// Row-major `d × d`.
    omega: Vec<f64>,
    t: Vec<f64>,
}

impl RigidTransform {
    pub fn new(omega: Vec<f64>, t: Vec<f64>) -> Result<Self> {
        let d = t.len();
        if d == 0 {
            return Err(Error::Empty);
        }
        if omega.len() != d * d {
            return Err(Error::DimensionMismatch { expected: d * d, found: omega.len() });
        }
        if omega.iter().chain(&t).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("transform entries must be finite"));
        }
        let tr = RigidTransform { omega, t };
        if tr.orthogonality_defect() > ORTHOGONALITY_TOLERANCE {
            return Err(Error::InvalidParameter("rotation part is not orthogonal"));
        }
        Ok(tr)
    }

    pub fn identity(d: usize) -> Self {
        let mut omega = alloc::vec![0.0; d * d];
        (0..d).for_each(|i| omega[i * d + i] = 1.0);
        RigidTransform { omega, t: alloc::vec![0.0; d] }
    }

    pub fn dim(&self) -> usize {
        self.t.len()
    }

    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    pub fn translation(&self) -> &[f64] {
        &self.t
    }

    /// `‖ΩᵀΩ − I‖_F`.
    pub fn orthogonality_defect(&self) -> f64 {
        let d = self.dim();
        let mut s = 0.0;
        for i in 0..d {
            for j in 0..d {
                let g: f64 = (0..d).map(|k| self.omega[k * d + i] * self.omega[k * d + j]).sum();
                let e = g - if i == j { 1.0 } else { 0.0 };
                s += e * e;
            }
        }
        sqrt(s)
    }

    pub fn apply_point(&self, x: &[f64]) -> Vec<f64> {
        let d = self.dim();
        (0..d).map(|i| (0..d).map(|k| self.omega[i * d + k] * (x[k] - self.t[k])).sum()).collect()
    }

    pub fn apply(&self, cloud: &PointCloud) -> Result<PointCloud> {
        cloud.check_dim(self.dim())?;
        let data: Vec<f64> = cloud.rows().flat_map(|x| self.apply_point(x)).collect();
        PointCloud::new(data, self.dim())
    }

    /// `next ∘ self`: `Ω₂Ω₁ (x − t₁ − Ω₁ᵀ t₂)`.
    pub fn then(&self, next: &RigidTransform) -> RigidTransform {
        let d = self.dim();
        let mut omega = alloc::vec![0.0; d * d];
        for i in 0..d {
            for j in 0..d {
                omega[i * d + j] = (0..d).map(|k| next.omega[i * d + k] * self.omega[k * d + j]).sum();
            }
        }
        let t = (0..d).map(|j| self.t[j] + (0..d).map(|k| self.omega[k * d + j] * next.t[k]).sum::<f64>()).collect();
        RigidTransform { omega, t }
    }

    /// Increment size used as the ICP stopping test: `‖Ω − I‖_F + ‖t‖₂`.
    pub fn distance_to_identity(&self) -> f64 {
        let d = self.dim();
        let mut s = 0.0;
        for i in 0..d {
            for j in 0..d {
                let e = self.omega[i * d + j] - if i == j { 1.0 } else { 0.0 };
                s += e * e;
            }
        }
        sqrt(s) + sqrt(self.t.iter().map(|v| v * v).sum())
    }
}

/// Best `(Ω, t)` for `Σ ‖Ω (x_i − t) − y_i‖²` over rows that already correspond.
/// Reflections are allowed. A zero cross-covariance yields `Ω = I` and the mean shift,
/// and directions the data leave undetermined are kept fixed.
pub fn procrustes(x: &PointCloud, y: &PointCloud) -> Result<RigidTransform> {
    x.check_same_shape(y)?;
    let d = x.dim();
    let mx = x.mean();
    let my = y.mean();
    // M = Σ (y − ȳ)(x − x̄)ᵀ
    let mut m = DMatrix::<f64>::zeros(d, d);
    for (a, b) in x.rows().zip(y.rows()) {
        for i in 0..d {
            let bi = b[i] - my[i];
            for j in 0..d {
                m[(i, j)] += bi * (a[j] - mx[j]);
            }
        }
    }
    if m.iter().all(|v| *v == 0.0) {
        let t = mx.iter().zip(&my).map(|(a, b)| a - b).collect();
        return Ok(RigidTransform { t, ..RigidTransform::identity(d) });
    }
    let svd = m.svd(true, true);
    let (mut u, v_t) = (svd.u.expect("u requested"), svd.v_t.expect("v_t requested"));
    // Singular pairs with a null singular value do not affect the objective; orient
    // them towards the identity so rank-deficient (e.g. collinear) clouds stay put.
    let sigma_max = svd.singular_values.max();
    for k in 0..d {
        if svd.singular_values[k] <= DEGENERATE_SINGULAR_VALUE * sigma_max
            && u.column(k).dot(&v_t.row(k).transpose()) < 0.0
        {
            u.column_mut(k).neg_mut();
        }
    }
    let rot = u * v_t;
    let mut omega = alloc::vec![0.0; d * d];
    for i in 0..d {
        for j in 0..d {
            omega[i * d + j] = rot[(i, j)];
        }
    }
    // Ω (x̄ − t) = ȳ  ⇒  t = x̄ − Ωᵀ ȳ
    let t = (0..d).map(|j| mx[j] - (0..d).map(|i| rot[(i, j)] * my[i]).sum::<f64>()).collect();
    Ok(RigidTransform { omega, t })
}

/// Squared Chamfer distance `Σ_x min_y ‖x − y‖² + Σ_y min_x ‖x − y‖²` (unnormalized).
pub fn chamfer(x: &PointCloud, y: &PointCloud) -> Result<f64> {
    x.check_dim(y.dim())?;
    let one_way =
        |a: &PointCloud, b: &PointCloud| -> f64 { map_indices(a.len(), |i| nearest(a.row(i), b).1).iter().sum() };
    Ok(one_way(x, y) + one_way(y, x))
}

fn nearest(p: &[f64], cloud: &PointCloud) -> (usize, f64) {
    cloud.rows().enumerate().fold((0, f64::INFINITY), |best, (j, q)| {
        let d = sq_dist(p, q);
        if d < best.1 {
            (j, d)
        } else {
            best
        }
    })
}

/// `‖Ω_a − Ω_b‖²_F + ‖t_a − t_b‖²`.
pub fn frobenius_gap(real: &RigidTransform, est: &RigidTransform) -> Result<f64> {
    if real.dim() != est.dim() {
        return Err(Error::DimensionMismatch { expected: real.dim(), found: est.dim() });
    }
    Ok(sq_dist(&real.omega, &est.omega) + sq_dist(&real.t, &est.t))
}

/// How ICP pairs source and target points at each iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Correspondence {
    /// Closest target point; may be many-to-one, clouds may differ in size.
    NearestNeighbor,
    /// Exact optimal matching; refused above [`ORACLE_MAX_N`].
    ExactOt,
    /// min-SWGG matching by random search over `directions` directions.
    MinSwgg { directions: usize },
    /// min-SWGG matching by descent on the smoothed surrogate.
    MinSwggOptim { smoothing: SmoothingConfig, gd: GdConfig },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IcpConfig {
    pub correspondence: Correspondence,
    pub max_iter: usize,
    /// Stop when the increment satisfies `‖Ω − I‖_F + ‖t‖₂ ≤ eps_stop`.
    pub eps_stop: f64,
    pub seed: u64,
    /// Compute the final Sinkhorn divergence to the target.
    pub sinkhorn: Option<SinkhornConfig>,
}

impl IcpConfig {
    pub fn new(correspondence: Correspondence) -> Self {
        IcpConfig { correspondence, max_iter: 50, eps_stop: 1e-4, seed: 0, sinkhorn: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IcpDiagnostics {
    /// Chamfer distance to the target before iteration 1 and after each iteration.
    pub chamfer: Vec<f64>,
    pub sinkhorn: Option<SinkhornOutcome>,
    pub iterations: usize,
    /// Registration time in seconds, excluding the final Sinkhorn evaluation.
    pub wall_time: f64,
}

impl IcpDiagnostics {
    pub fn final_chamfer(&self) -> f64 {
        *self.chamfer.last().expect("at least the initial value")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IcpResult {
    /// Accumulated transform mapping the source onto the target.
    pub transform: RigidTransform,
    pub aligned: PointCloud,
    pub diagnostics: IcpDiagnostics,
}

fn correspond(current: &PointCloud, target: &PointCloud, cfg: &IcpConfig, iter: usize) -> Result<Vec<usize>> {
    let seed = derive_seed(cfg.seed, iter as u64);
    Ok(match cfg.correspondence {
        Correspondence::NearestNeighbor => map_indices(current.len(), |i| nearest(current.row(i), target).0),
        Correspondence::ExactOt => w2_exact(current, target)?.1.as_slice().to_vec(),
        Correspondence::MinSwgg { directions } => {
            minswgg_random_search(current, target, directions, seed)?.matching.as_slice().to_vec()
        }
        Correspondence::MinSwggOptim { smoothing, gd } => {
            let smoothing = SmoothingConfig { seed: derive_seed(smoothing.seed, iter as u64), ..smoothing };
            let gd = GdConfig { seed, ..gd };
            minswgg_optimize(current, target, &smoothing, &gd)?.matching.as_slice().to_vec()
        }
    })
}

/// Iterative closest point: correspond, solve Procrustes, move the source, repeat.
pub fn icp(source: &PointCloud, target: &PointCloud, cfg: &IcpConfig) -> Result<IcpResult> {
    source.check_dim(target.dim())?;
    match cfg.correspondence {
        Correspondence::NearestNeighbor => {}
        _ => source.check_same_shape(target)?,
    }
    if cfg.correspondence == Correspondence::ExactOt && source.len() > ORACLE_MAX_N {
        return Err(Error::OracleGuard { n: source.len(), limit: ORACLE_MAX_N });
    }
    if cfg.max_iter == 0 {
        return Err(Error::InvalidParameter("max_iter must be positive"));
    }
    let clock = Stopwatch::start();
    let mut current = source.clone();
    let mut transform = RigidTransform::identity(source.dim());
    let mut chamfers = alloc::vec![chamfer(&current, target)?];
    let mut iterations = 0;
    for iter in 0..cfg.max_iter {
        iterations = iter + 1;
        let pairs = correspond(&current, target, cfg, iter)?;
        let step = procrustes(&current, &target.select(&pairs))?;
        current = step.apply(&current)?;
        transform = transform.then(&step);
        chamfers.push(chamfer(&current, target)?);
        if step.distance_to_identity() <= cfg.eps_stop {
            break;
        }
    }
    let wall_time = clock.seconds();
    let sinkhorn = match cfg.sinkhorn {
        Some(sc) => Some(sinkhorn_divergence(&current, target, &sc)?),
        None => None,
    };
    Ok(IcpResult {
        transform,
        aligned: current,
        diagnostics: IcpDiagnostics { chamfer: chamfers, sinkhorn, iterations, wall_time },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn sample() -> PointCloud {
        PointCloud::from_rows(&[[0.0, 0.0], [2.0, 0.3], [1.0, 1.5], [-0.5, 2.0], [3.0, -1.0]]).unwrap()
    }

    fn rotation(angle: f64) -> RigidTransform {
        let (s, c) = (libm::sin(angle), libm::cos(angle));
        RigidTransform::new(vec![c, -s, s, c], vec![0.0, 0.0]).unwrap()
    }

    #[test]
    fn procrustes_identity_and_translation() {
        let x = sample();
        let tr = procrustes(&x, &x).unwrap();
        assert!(frobenius_gap(&tr, &RigidTransform::identity(2)).unwrap() < 1e-20);

        let u = [1.5, -2.0];
        let tr = procrustes(&x, &x.translated(&u).unwrap()).unwrap();
        assert!(sq_dist(tr.omega(), RigidTransform::identity(2).omega()) < 1e-20);
        assert!((tr.translation()[0] + 1.5).abs() < 1e-12 && (tr.translation()[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn procrustes_recovers_rotation() {
        let x = sample();
        let r = rotation(2.1);
        let y = r.apply(&x).unwrap();
        let est = procrustes(&x, &y).unwrap();
        assert!(frobenius_gap(&r, &est).unwrap() < 1e-16);
    }

    #[test]
    fn procrustes_degenerate() {
        let x = PointCloud::from_rows(&[[1.0, 1.0], [1.0, 1.0]]).unwrap();
        let y = PointCloud::from_rows(&[[3.0, 0.0], [3.0, 0.0]]).unwrap();
        let tr = procrustes(&x, &y).unwrap();
        assert_eq!(tr.omega(), RigidTransform::identity(2).omega());
        assert_eq!(tr.apply(&x).unwrap(), y);
    }

    #[test]
    fn procrustes_collinear_identical_clouds_is_identity() {
        let x = PointCloud::from_rows(&[[0.0, 0.0], [1.0, 0.0], [3.0, 0.0]]).unwrap();
        let tr = procrustes(&x, &x).unwrap();
        assert!(tr.distance_to_identity() < 1e-12);
        let h = core::f64::consts::FRAC_1_SQRT_2;
        let y = PointCloud::from_rows(&[[0.0, 0.0], [h, h], [3.0 * h, 3.0 * h]]).unwrap();
        let tr = procrustes(&x, &y).unwrap();
        assert!(sq_dist(tr.apply(&x).unwrap().as_slice(), y.as_slice()) < 1e-18);
        assert!(tr.omega()[0] * tr.omega()[3] - tr.omega()[1] * tr.omega()[2] > 0.0);
    }

    #[test]
    fn composition() {
        let a = RigidTransform::new(rotation(0.4).omega().to_vec(), vec![1.0, 2.0]).unwrap();
        let b = RigidTransform::new(rotation(-1.3).omega().to_vec(), vec![-0.5, 0.7]).unwrap();
        let p = [0.3, -2.0];
        let direct = b.apply_point(&a.apply_point(&p));
        let composed = a.then(&b).apply_point(&p);
        assert!(sq_dist(&direct, &composed) < 1e-24);
    }

    #[test]
    fn rejects_non_orthogonal() {
        assert!(RigidTransform::new(vec![1.0, 0.1, 0.0, 1.0], vec![0.0, 0.0]).is_err());
        assert!(RigidTransform::new(vec![1.0], vec![0.0, 0.0]).is_err());
    }

    #[test]
    fn chamfer_cases() {
        let x = sample();
        assert_eq!(chamfer(&x, &x).unwrap(), 0.0);
        let a = PointCloud::from_rows(&[[0.0]]).unwrap();
        let b = PointCloud::from_rows(&[[3.0]]).unwrap();
        assert_eq!(chamfer(&a, &b).unwrap(), 18.0);
        assert!(chamfer(&a, &x).is_err());
    }

    #[test]
    fn frobenius_row_swap() {
        let swap = RigidTransform::new(vec![0.0, 1.0, 1.0, 0.0], vec![0.0, 0.0]).unwrap();
        assert_eq!(frobenius_gap(&swap, &RigidTransform::identity(2)).unwrap(), 4.0);
        assert_eq!(frobenius_gap(&swap, &swap).unwrap(), 0.0);
        assert!(frobenius_gap(&swap, &RigidTransform::identity(3)).is_err());
    }

    #[test]
    fn icp_on_identical_clouds_stops_at_once() {
        let x = sample();
        for corr in
            [Correspondence::NearestNeighbor, Correspondence::ExactOt, Correspondence::MinSwgg { directions: 20 }]
        {
            let out = icp(&x, &x, &IcpConfig::new(corr)).unwrap();
            assert_eq!(out.diagnostics.iterations, 1);
            assert!(frobenius_gap(&out.transform, &RigidTransform::identity(2)).unwrap() < 1e-20);
        }
    }

    #[test]
    fn icp_guards() {
        let x = sample();
        let y = PointCloud::from_rows(&[[0.0, 0.0]]).unwrap();
        assert!(icp(&x, &y, &IcpConfig::new(Correspondence::ExactOt)).is_err());
        assert!(icp(&x, &y, &IcpConfig::new(Correspondence::NearestNeighbor)).is_ok());
        let big = PointCloud::new(vec![0.0; 2 * (ORACLE_MAX_N + 1)], 2).unwrap();
        assert!(matches!(icp(&big, &big, &IcpConfig::new(Correspondence::ExactOt)), Err(Error::OracleGuard { .. })));
    }
}
