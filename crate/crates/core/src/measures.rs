//! Uniform empirical measures, directions on the sphere, and projections.
//!
//! A [`PointCloud`] is the measure `(1/n) Σ δ_{x_i}`; masses are implicit and
//! always uniform. Projections come in two flavours: [`project_scalar`] gives
//! the abscissae `⟨x_i, θ⟩`, and [`project_line`] keeps them as a
//! [`LineMeasure`] whose atoms are embedded back in `R^d` as `⟨x_i, θ⟩ θ`.

use alloc::vec::Vec;
use core::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::math::{dot, sq_norm, sqrt};

/// Tolerance on `| ‖θ‖ − 1 |` accepted by [`UnitDirection::new`].
pub const UNIT_TOLERANCE: f64 = 1e-12;

/// Deterministic random generator used throughout the crate.
pub type StdRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> StdRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent substream `index` of `seed`. Direction `l` of a sweep is drawn
/// from `substream(seed, l)` so results do not depend on evaluation order.
pub fn substream(seed: u64, index: u64) -> StdRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Empirical measure with `n` atoms of dimension `d`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    data: Vec<f64>,
    n: usize,
    d: usize,
}

impl PointCloud {
    /// Builds a cloud from row-major data. Rejects empty clouds and non-finite entries.
    pub fn new(data: Vec<f64>, d: usize) -> Result<Self> {
        if d == 0 || data.is_empty() {
            return Err(Error::Empty);
        }
        if !data.len().is_multiple_of(d) {
            return Err(Error::RaggedData { len: data.len(), dim: d });
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(pos));
        }
        let n = data.len() / d;
        Ok(PointCloud { data, n, d })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let d = rows.first().map(|r| r.as_ref().len()).ok_or(Error::Empty)?;
        let mut data = Vec::with_capacity(rows.len() * d);
        for row in rows {
            let row = row.as_ref();
            if row.len() != d {
                return Err(Error::DimensionMismatch { expected: d, found: row.len() });
            }
            data.extend_from_slice(row);
        }
        Self::new(data, d)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    /// Always false; kept for API symmetry with `len`.
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.d..(i + 1) * self.d]
    }

    pub fn rows(&self) -> core::slice::ChunksExact<'_, f64> {
        self.data.chunks_exact(self.d)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn mean(&self) -> Vec<f64> {
        let mut m = alloc::vec![0.0; self.d];
        for row in self.rows() {
            for (acc, v) in m.iter_mut().zip(row) {
                *acc += v;
            }
        }
        let inv = 1.0 / self.n as f64;
        m.iter_mut().for_each(|v| *v *= inv);
        m
    }

    /// Cloud with rows taken in the given order (indices may repeat).
    pub fn select(&self, indices: &[usize]) -> PointCloud {
        let mut data = Vec::with_capacity(indices.len() * self.d);
        for &i in indices {
            data.extend_from_slice(self.row(i));
        }
        PointCloud { data, n: indices.len(), d: self.d }
    }

    /// Every atom shifted by `u`.
    pub fn translated(&self, u: &[f64]) -> Result<PointCloud> {
        self.check_dim(u.len())?;
        let mut data = self.data.clone();
        for row in data.chunks_exact_mut(self.d) {
            for (v, du) in row.iter_mut().zip(u) {
                *v += du;
            }
        }
        PointCloud::new(data, self.d)
    }

    pub(crate) fn check_dim(&self, d: usize) -> Result<()> {
        if self.d != d {
            return Err(Error::DimensionMismatch { expected: self.d, found: d });
        }
        Ok(())
    }

    /// Checks that `other` has the same number of atoms and dimension.
    pub(crate) fn check_same_shape(&self, other: &PointCloud) -> Result<()> {
        self.check_dim(other.d)?;
        if self.n != other.n {
            return Err(Error::SizeMismatch { left: self.n, right: other.n });
        }
        Ok(())
    }

    pub(crate) fn from_raw(data: Vec<f64>, d: usize) -> PointCloud {
        let n = data.len() / d;
        PointCloud { data, n, d }
    }
}

/// A point of the unit sphere `S^{d−1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitDirection(Vec<f64>);

impl UnitDirection {
    /// Accepts `theta` only if it is already unit length within [`UNIT_TOLERANCE`].
    pub fn new(theta: Vec<f64>) -> Result<Self> {
        if theta.is_empty() {
            return Err(Error::Empty);
        }
        let norm = sqrt(sq_norm(&theta));
        if !norm.is_finite() || (norm - 1.0).abs() > UNIT_TOLERANCE {
            return Err(Error::NotUnit(norm));
        }
        Ok(UnitDirection(theta))
    }

    /// Rescales `v` to unit length.
    pub fn normalized(mut v: Vec<f64>) -> Result<Self> {
        if v.is_empty() {
            return Err(Error::Empty);
        }
        let norm = sqrt(sq_norm(&v));
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::DegenerateDirection);
        }
        v.iter_mut().for_each(|x| *x /= norm);
        Ok(UnitDirection(v))
    }

    /// The `k`-th canonical basis vector of `R^d`.
    pub fn axis(d: usize, k: usize) -> Result<Self> {
        if k >= d {
            return Err(Error::InvalidParameter("axis index out of range"));
        }
        let mut v = alloc::vec![0.0; d];
        v[k] = 1.0;
        Ok(UnitDirection(v))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn negated(&self) -> UnitDirection {
        UnitDirection(self.0.iter().map(|v| -v).collect())
    }
}

/// A permutation of `0..n`; `order[k]` is the index of the `k`-th smallest element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SortPermutation(Vec<usize>);

impl SortPermutation {
    pub fn new(order: Vec<usize>) -> Result<Self> {
        let n = order.len();
        let mut seen = alloc::vec![false; n];
        for &i in &order {
            if i >= n || seen[i] {
                return Err(Error::InvalidPermutation(n));
            }
            seen[i] = true;
        }
        Ok(SortPermutation(order))
    }

    pub fn identity(n: usize) -> Self {
        SortPermutation((0..n).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn inverse(&self) -> SortPermutation {
        let mut inv = alloc::vec![0; self.0.len()];
        for (rank, &i) in self.0.iter().enumerate() {
            inv[i] = rank;
        }
        SortPermutation(inv)
    }

    #[cfg(test)]
    pub(crate) fn from_raw(order: Vec<usize>) -> Self {
        SortPermutation(order)
    }
}

/// Measure supported on the line `R θ`; atom `i` sits at `abscissae[i] · θ`.
#[derive(Debug, Clone, PartialEq)]
pub struct LineMeasure {
    direction: UnitDirection,
    abscissae: Vec<f64>,
}

impl LineMeasure {
    pub fn new(direction: UnitDirection, abscissae: Vec<f64>) -> Result<Self> {
        if abscissae.is_empty() {
            return Err(Error::Empty);
        }
        if let Some(pos) = abscissae.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(pos));
        }
        Ok(LineMeasure { direction, abscissae })
    }

    pub fn direction(&self) -> &UnitDirection {
        &self.direction
    }

    pub fn abscissae(&self) -> &[f64] {
        &self.abscissae
    }

    pub fn len(&self) -> usize {
        self.abscissae.len()
    }

    pub fn is_empty(&self) -> bool {
        self.abscissae.is_empty()
    }

    /// Atom `i` as a point of `R^d`.
    pub fn atom(&self, i: usize) -> Vec<f64> {
        let t = self.abscissae[i];
        self.direction.as_slice().iter().map(|th| t * th).collect()
    }

    pub fn to_cloud(&self) -> PointCloud {
        let d = self.direction.dim();
        let mut data = Vec::with_capacity(self.len() * d);
        for &t in &self.abscissae {
            data.extend(self.direction.as_slice().iter().map(|th| t * th));
        }
        PointCloud::from_raw(data, d)
    }
}

/// Abscissae `⟨x_i, θ⟩` of every atom.
pub fn project_scalar(cloud: &PointCloud, theta: &UnitDirection) -> Result<Vec<f64>> {
    cloud.check_dim(theta.dim())?;
    Ok(project_raw(cloud, theta.as_slice()))
}

/// Projections onto an arbitrary (not necessarily unit) vector.
pub(crate) fn project_raw(cloud: &PointCloud, theta: &[f64]) -> Vec<f64> {
    cloud.rows().map(|x| dot(x, theta)).collect()
}

/// Orthogonal projection of the cloud onto the line spanned by `theta`.
pub fn project_line(cloud: &PointCloud, theta: &UnitDirection) -> Result<LineMeasure> {
    let abscissae = project_scalar(cloud, theta)?;
    Ok(LineMeasure { direction: theta.clone(), abscissae })
}

/// Uniform direction on `S^{d−1}`: a normalized standard Gaussian vector.
pub fn sample_direction<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Result<UnitDirection> {
    if d == 0 {
        return Err(Error::InvalidParameter("dimension must be at least 1"));
    }
    loop {
        let v: Vec<f64> = (0..d).map(|_| StandardNormal.sample(rng)).collect();
        let norm = sqrt(sq_norm(&v));
        // all-zero draws have probability zero, but resample rather than divide by zero
        if norm > 1e-300 && norm.is_finite() {
            return UnitDirection::normalized(v);
        }
    }
}

/// Ascending order of `values`, ties broken by ascending index.
pub fn argsort(values: &[f64]) -> SortPermutation {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_unstable_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap_or(Ordering::Equal).then(a.cmp(&b)));
    SortPermutation(order)
}

/// Ascending order of the projections `⟨x_i, θ⟩` (stable on ties).
pub fn sort_by_projection(cloud: &PointCloud, theta: &UnitDirection) -> Result<SortPermutation> {
    Ok(argsort(&project_scalar(cloud, theta)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn cloud(rows: &[&[f64]]) -> PointCloud {
        PointCloud::from_rows(rows).unwrap()
    }

    #[test]
    fn rejects_bad_clouds() {
        assert_eq!(PointCloud::new(vec![], 2), Err(Error::Empty));
        assert_eq!(PointCloud::new(vec![1.0], 0), Err(Error::Empty));
        assert!(matches!(PointCloud::new(vec![1.0, 2.0, 3.0], 2), Err(Error::RaggedData { .. })));
        assert_eq!(PointCloud::new(vec![1.0, f64::NAN], 2), Err(Error::NonFinite(1)));
        assert_eq!(PointCloud::new(vec![f64::INFINITY], 1), Err(Error::NonFinite(0)));
    }

    #[test]
    fn projections() {
        let c = cloud(&[&[1.0, 0.0], &[0.0, 1.0]]);
        let e0 = UnitDirection::axis(2, 0).unwrap();
        assert_eq!(project_scalar(&c, &e0).unwrap(), vec![1.0, 0.0]);

        let c = cloud(&[&[3.0, 4.0]]);
        let th = UnitDirection::new(vec![0.6, 0.8]).unwrap();
        assert!((project_scalar(&c, &th).unwrap()[0] - 5.0).abs() < 1e-12);
        let line = project_line(&c, &th).unwrap();
        let atom = line.atom(0);
        assert!((atom[0] - 3.0).abs() < 1e-12 && (atom[1] - 4.0).abs() < 1e-12);

        let c = cloud(&[&[1.0, 1.0]]);
        let line = project_line(&c, &e0).unwrap();
        assert_eq!(line.abscissae(), &[1.0]);
        assert_eq!(line.atom(0), vec![1.0, 0.0]);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let c = cloud(&[&[1.0, 0.0]]);
        let th = UnitDirection::axis(3, 0).unwrap();
        assert_eq!(project_scalar(&c, &th), Err(Error::DimensionMismatch { expected: 2, found: 3 }));
    }

    #[test]
    fn unit_direction_invariant() {
        assert!(UnitDirection::new(vec![1.0, 1.0]).is_err());
        assert_eq!(UnitDirection::normalized(vec![0.0, 0.0]), Err(Error::DegenerateDirection));
        let th = UnitDirection::normalized(vec![3.0, 4.0]).unwrap();
        assert!((sqrt(sq_norm(th.as_slice())) - 1.0).abs() <= UNIT_TOLERANCE);
    }

    #[test]
    fn sorting_and_ties() {
        assert_eq!(argsort(&[3.0, 1.0, 2.0]).as_slice(), &[1, 2, 0]);
        assert_eq!(argsort(&[2.0; 5]).as_slice(), &[0, 1, 2, 3, 4]);
        assert_eq!(argsort(&[0.0, -0.0, 0.0]).as_slice(), &[0, 1, 2]);

        let c = cloud(&[&[3.0, 0.5], &[1.0, -2.0], &[2.0, 7.0]]);
        let th = UnitDirection::axis(2, 0).unwrap();
        let up = sort_by_projection(&c, &th).unwrap();
        let down = sort_by_projection(&c, &th.negated()).unwrap();
        let mut rev = up.as_slice().to_vec();
        rev.reverse();
        assert_eq!(down.as_slice(), &rev[..]);
    }

    #[test]
    fn sampled_directions() {
        let mut rng = rng_from_seed(3);
        for _ in 0..20 {
            let th = sample_direction(&mut rng, 1).unwrap();
            assert!(th.as_slice()[0] == 1.0 || th.as_slice()[0] == -1.0);
        }
        let a = sample_direction(&mut substream(11, 4), 7).unwrap();
        let b = sample_direction(&mut substream(11, 4), 7).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, sample_direction(&mut substream(11, 5), 7).unwrap());
        assert!(sample_direction(&mut rng, 0).is_err());
    }

    #[test]
    fn direction_mean_near_origin() {
        let mut rng = rng_from_seed(2024);
        let mut m = [0.0f64; 2];
        let count = 100_000;
        for _ in 0..count {
            let th = sample_direction(&mut rng, 2).unwrap();
            m[0] += th.as_slice()[0];
            m[1] += th.as_slice()[1];
        }
        let m = [m[0] / count as f64, m[1] / count as f64];
        assert!(sqrt(m[0] * m[0] + m[1] * m[1]) < 0.02, "{m:?}");
    }

    #[test]
    fn permutation_validation() {
        assert!(SortPermutation::new(vec![0, 0]).is_err());
        assert!(SortPermutation::new(vec![0, 2]).is_err());
        let p = SortPermutation::new(vec![2, 0, 1]).unwrap();
        assert_eq!(p.inverse().as_slice(), &[1, 2, 0]);
    }

    #[test]
    fn select_and_translate() {
        let c = cloud(&[&[1.0, 2.0], &[3.0, 4.0]]);
        assert_eq!(c.select(&[1, 1]).as_slice(), &[3.0, 4.0, 3.0, 4.0]);
        assert_eq!(c.translated(&[1.0, -1.0]).unwrap().as_slice(), &[2.0, 1.0, 4.0, 3.0]);
        assert_eq!(c.mean(), vec![2.0, 3.0]);
    }
}
