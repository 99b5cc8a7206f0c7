//! Grayscale colorization and color transfer between RGB images.
//!
//! A grayscale image is a point cloud on the line of grays `r = g = b`, so the
//! optimal transport towards it is the line closed form and scales to
//! megapixel images. General color transfer solves exact OT on subsampled
//! palettes and extends the map to every pixel by nearest neighbour.

use alloc::vec::Vec;

use rand::seq::index;
use rand::Rng;

use super::w2_to_line;
use crate::error::{Error, Result};
use crate::exact_ot::{w2_exact, ORACLE_MAX_N};
use crate::math::{dot, sq_dist};
use crate::measures::{rng_from_seed, substream, LineMeasure, PointCloud, UnitDirection};
use crate::par::map_indices;

/// Per-channel tolerance below which a pixel counts as gray.
pub const GRAY_TOLERANCE: f64 = 1e-6;

/// Row-major RGB image with channels in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RgbImage {
    width: usize,
    height: usize,
    pixels: Vec<[f64; 3]>,
}

impl RgbImage {
    pub fn new(width: usize, height: usize, pixels: Vec<[f64; 3]>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Empty);
        }
        if pixels.len() != width * height {
            return Err(Error::SizeMismatch { left: width * height, right: pixels.len() });
        }
        if let Some(pos) = pixels.iter().position(|p| p.iter().any(|c| !(0.0..=1.0).contains(c))) {
            return Err(Error::ChannelRange(pos));
        }
        Ok(RgbImage { width, height, pixels })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[[f64; 3]] {
        &self.pixels
    }

    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    pub fn to_cloud(&self) -> PointCloud {
        PointCloud::from_raw(self.pixels.iter().flatten().copied().collect(), 3)
    }

    /// Index of the first pixel whose channels differ by more than [`GRAY_TOLERANCE`].
    pub fn first_non_gray(&self) -> Option<usize> {
        self.pixels.iter().position(|[r, g, b]| (r - g).abs() > GRAY_TOLERANCE || (g - b).abs() > GRAY_TOLERANCE)
    }

    pub fn is_gray(&self) -> bool {
        self.first_non_gray().is_none()
    }
}

pub(crate) fn gray_axis() -> UnitDirection {
    let c = 1.0 / crate::math::sqrt(3.0);
    UnitDirection::new(alloc::vec![c, c, c]).expect("(1,1,1)/sqrt(3) is unit")
}

/// Recolors a grayscale image with the colors of `color` through the optimal
/// transport map between their pixel clouds.
pub fn colorize(gray: &RgbImage, color: &RgbImage) -> Result<RgbImage> {
    if gray.len() != color.len() {
        return Err(Error::SizeMismatch { left: gray.len(), right: color.len() });
    }
    if let Some(i) = gray.first_non_gray() {
        return Err(Error::NotGray(i));
    }
    let axis = gray_axis();
    let luminance: Vec<f64> = gray.pixels.iter().map(|p| dot(p, axis.as_slice())).collect();
    let line = LineMeasure::new(axis, luminance)?;
    // color pixel j is sent to gray pixel assign[j]
    let (_, matching) = w2_to_line(&color.to_cloud(), &line)?;
    let mut out = alloc::vec![[0.0; 3]; gray.len()];
    for (j, &i) in matching.as_slice().iter().enumerate() {
        out[i] = color.pixels[j];
    }
    RgbImage::new(gray.width, gray.height, out)
}

/// Pixels of `image` drawn uniformly with replacement until there are `count`.
fn resample_pixels(image: &RgbImage, count: usize, seed: u64) -> Vec<[f64; 3]> {
    let mut rng = substream(seed, 1);
    (0..count).map(|_| image.pixels[rng.random_range(0..image.len())]).collect()
}

/// Color transfer from `target` onto `source`.
///
/// `subsample` pixels of each image (capped at [`ORACLE_MAX_N`]) are matched by
/// exact OT; every source pixel then takes the color matched to its nearest
/// subsampled source pixel. A grayscale source with `subsample` covering the
/// whole image goes through [`colorize`] instead. A target with a different
/// pixel count is first resampled to the source count.
pub fn color_transfer(source: &RgbImage, target: &RgbImage, subsample: usize, seed: u64) -> Result<RgbImage> {
    if subsample == 0 {
        return Err(Error::InvalidParameter("subsample must be at least 1"));
    }
    let n = source.len();
    let target_pixels = if target.len() == n { target.pixels.clone() } else { resample_pixels(target, n, seed) };

    if subsample >= n && source.is_gray() {
        let resized = RgbImage::new(source.width, source.height, target_pixels)?;
        return colorize(source, &resized);
    }

    let k = subsample.min(n).min(ORACLE_MAX_N);
    let mut rng = rng_from_seed(seed);
    let src_idx = index::sample(&mut rng, n, k).into_vec();
    let dst_idx = index::sample(&mut rng, n, k).into_vec();
    let src_sub: Vec<[f64; 3]> = src_idx.iter().map(|&i| source.pixels[i]).collect();
    let dst_sub: Vec<[f64; 3]> = dst_idx.iter().map(|&i| target_pixels[i]).collect();
    let to_cloud = |px: &[[f64; 3]]| PointCloud::from_raw(px.iter().flatten().copied().collect(), 3);
    let (_, matching) = w2_exact(&to_cloud(&src_sub), &to_cloud(&dst_sub))?;
    let assign = matching.as_slice();

    let out = map_indices(n, |i| {
        let p = &source.pixels[i];
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (j, q) in src_sub.iter().enumerate() {
            let d = sq_dist(p, q);
            if d < best_d {
                best_d = d;
                best = j;
            }
        }
        dst_sub[assign[best]]
    });
    RgbImage::new(source.width, source.height, out)
}
