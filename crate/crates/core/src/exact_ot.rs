//! Exact discrete optimal transport between uniform clouds and the debiased
//! Sinkhorn divergence. Both are reference oracles: the assignment solver is
//! cubic and refuses clouds above [`ORACLE_MAX_N`].

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{exp, ln, sq_dist};
use crate::measures::PointCloud;
use crate::par::map_indices;

/// Largest cloud accepted by the cubic assignment oracle.
pub const ORACLE_MAX_N: usize = 4096;

/// Dense `n×n` cost matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl CostMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<f64>) -> Result<Self> {
        if rows != cols || entries.len() != rows * cols {
            return Err(Error::NonSquare { rows, cols });
        }
        if rows == 0 {
            return Err(Error::Empty);
        }
        if let Some(pos) = entries.iter().position(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::NonFinite(pos));
        }
        Ok(CostMatrix { n: rows, entries })
    }

    /// Squared Euclidean costs `c_ij = ‖x_i − y_j‖²`.
    pub fn squared_euclidean(mu1: &PointCloud, mu2: &PointCloud) -> Result<Self> {
        mu1.check_same_shape(mu2)?;
        let n = mu1.len();
        let mut entries = Vec::with_capacity(n * n);
        for x in mu1.rows() {
            entries.extend(mu2.rows().map(|y| sq_dist(x, y)));
        }
        Ok(CostMatrix { n, entries })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }
}

/// One-to-one transport map: source atom `i` goes to target atom `assign[i]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchingMap(Vec<usize>);

impl MatchingMap {
    pub fn new(assign: Vec<usize>) -> Result<Self> {
        let n = assign.len();
        let mut seen = vec![false; n];
        for &j in &assign {
            if j >= n || seen[j] {
                return Err(Error::InvalidPermutation(n));
            }
            seen[j] = true;
        }
        Ok(MatchingMap(assign))
    }

    pub fn identity(n: usize) -> Self {
        MatchingMap((0..n).collect())
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Mean squared displacement `(1/n) Σ ‖x_i − y_{assign[i]}‖²`.
    pub fn cost(&self, mu1: &PointCloud, mu2: &PointCloud) -> Result<f64> {
        mu1.check_same_shape(mu2)?;
        if self.0.len() != mu1.len() {
            return Err(Error::SizeMismatch { left: self.0.len(), right: mu1.len() });
        }
        let s: f64 = self.0.iter().enumerate().map(|(i, &j)| sq_dist(mu1.row(i), mu2.row(j))).sum();
        Ok(s / mu1.len() as f64)
    }

    /// Image of the source cloud: row `i` is `y_{assign[i]}`.
    pub fn pushforward(&self, target: &PointCloud) -> PointCloud {
        target.select(&self.0)
    }

    pub(crate) fn from_raw(assign: Vec<usize>) -> Self {
        MatchingMap(assign)
    }
}

/// Minimum-cost perfect matching by successive shortest augmenting paths with
/// dual potentials (Jonker–Volgenant augmentation), `O(n³)`.
/// Returns the mean cost `(1/n) Σ c_{i, assign[i]}`.
pub fn solve_assignment(cost: &CostMatrix) -> Result<(f64, MatchingMap)> {
    let n = cost.n;
    let inf = f64::INFINITY;
    // 1-based potentials; column 0 is the virtual root of each search tree
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut row_of = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    let mut minv = vec![inf; n + 1];
    let mut used = vec![false; n + 1];

    for i in 1..=n {
        row_of[0] = i;
        let mut j0 = 0usize;
        minv.iter_mut().for_each(|m| *m = inf);
        used.iter_mut().for_each(|b| *b = false);
        loop {
            used[j0] = true;
            let i0 = row_of[j0];
            let mut delta = inf;
            let mut j1 = 0usize;
            let row = &cost.entries[(i0 - 1) * n..i0 * n];
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = row[j - 1] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[row_of[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if row_of[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            row_of[j0] = row_of[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut assign = vec![0usize; n];
    for j in 1..=n {
        assign[row_of[j] - 1] = j - 1;
    }
    let total: f64 = assign.iter().enumerate().map(|(i, &j)| cost.get(i, j)).sum();
    Ok((total / n as f64, MatchingMap(assign)))
}

/// Exact squared 2-Wasserstein distance between two uniform clouds and an optimal Monge map.
pub fn w2_exact(mu1: &PointCloud, mu2: &PointCloud) -> Result<(f64, MatchingMap)> {
    mu1.check_same_shape(mu2)?;
    if mu1.len() > ORACLE_MAX_N {
        return Err(Error::OracleGuard { n: mu1.len(), limit: ORACLE_MAX_N });
    }
    solve_assignment(&CostMatrix::squared_euclidean(mu1, mu2)?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinkhornConfig {
    pub reg: f64,
    pub max_iter: usize,
    /// Stop once the L1 violation of the source marginal falls below this.
    pub tol: f64,
}

impl Default for SinkhornConfig {
    fn default() -> Self {
        SinkhornConfig { reg: 0.1, max_iter: 10_000, tol: 1e-9 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinkhornOutcome {
    pub value: f64,
    /// False if any of the three entropic problems hit `max_iter` above `tol`.
    pub converged: bool,
    pub iterations: usize,
}

fn log_sum_exp(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let m = values.clone().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + ln(values.map(|v| exp(v - m)).sum::<f64>())
}

/// Dual value `⟨a,f⟩ + ⟨b,g⟩` of entropic OT between uniform clouds, log-domain iterations.
fn entropic_ot(x: &PointCloud, y: &PointCloud, cfg: &SinkhornConfig) -> (f64, bool, usize) {
    let (n, m) = (x.len(), y.len());
    let eps = cfg.reg;
    // row-major cost and its transpose, so both potential updates scan contiguous rows
    let cost: Vec<f64> = x.rows().flat_map(|xi| y.rows().map(move |yj| sq_dist(xi, yj))).collect();
    let cost_t: Vec<f64> = y.rows().flat_map(|yj| x.rows().map(move |xi| sq_dist(xi, yj))).collect();
    let log_a = -ln(n as f64);
    let log_b = -ln(m as f64);
    let mut f = vec![0.0; n];
    let mut g = vec![0.0; m];
    let mut converged = false;
    let mut iters = 0;
    while iters < cfg.max_iter {
        iters += 1;
        f = map_indices(n, |i| {
            let row = &cost[i * m..(i + 1) * m];
            -eps * log_sum_exp(row.iter().zip(&g).map(|(c, gj)| log_b + (gj - c) / eps))
        });
        g = map_indices(m, |j| {
            let col = &cost_t[j * n..(j + 1) * n];
            -eps * log_sum_exp(col.iter().zip(&f).map(|(c, fi)| log_a + (fi - c) / eps))
        });
        if iters % 5 == 0 || iters == cfg.max_iter {
            let violation: f64 = map_indices(n, |i| {
                let row = &cost[i * m..(i + 1) * m];
                let mass: f64 = row.iter().zip(&g).map(|(c, gj)| exp(log_a + log_b + (f[i] + gj - c) / eps)).sum();
                (mass - 1.0 / n as f64).abs()
            })
            .iter()
            .sum();
            if violation <= cfg.tol {
                converged = true;
                break;
            }
        }
    }
    let value = f.iter().sum::<f64>() / n as f64 + g.iter().sum::<f64>() / m as f64;
    (value, converged, iters)
}

/// Debiased Sinkhorn divergence `OT_ε(μ1,μ2) − ½OT_ε(μ1,μ1) − ½OT_ε(μ2,μ2)`, clamped at zero.
pub fn sinkhorn_divergence(mu1: &PointCloud, mu2: &PointCloud, cfg: &SinkhornConfig) -> Result<SinkhornOutcome> {
    mu1.check_dim(mu2.dim())?;
    if !(cfg.reg.is_finite() && cfg.reg > 0.0) {
        return Err(Error::InvalidParameter("regularization must be positive"));
    }
    if cfg.max_iter == 0 {
        return Err(Error::InvalidParameter("max_iter must be positive"));
    }
    let (xy, c1, i1) = entropic_ot(mu1, mu2, cfg);
    let (xx, c2, i2) = entropic_ot(mu1, mu1, cfg);
    let (yy, c3, i3) = entropic_ot(mu2, mu2, cfg);
    Ok(SinkhornOutcome {
        value: (xy - 0.5 * xx - 0.5 * yy).max(0.0),
        converged: c1 && c2 && c3,
        iterations: i1.max(i2).max(i3),
    })
}
