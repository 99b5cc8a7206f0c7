//! Sliced optimal transport with explicit maps.
//!
//! The central quantity is the *sliced Wasserstein generalized geodesic*
//! (SWGG) of two equal-size point clouds along a unit direction: sort both
//! projections, pair points by rank, and average the squared distances of the
//! paired points. Every direction yields an upper bound on the squared
//! 2-Wasserstein distance together with the transport map that achieves it;
//! min-SWGG minimizes over directions by random search, annealing, or
//! gradient descent on a smoothed surrogate.
//!
//! The crate is `no_std` + `alloc`. The default `std` feature enables
//! multi-threaded direction search (rayon) and wall-clock timing.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(feature = "std")]
extern crate std;

pub mod apps;
pub mod error;
pub mod exact_ot;
pub mod line_closed_form;
pub mod math;
pub mod measures;
pub mod ot1d;
mod par;
pub mod sliced_baselines;
pub mod swgg;

pub use error::{Error, Result};
pub use exact_ot::{sinkhorn_divergence, w2_exact, MatchingMap, SinkhornConfig, SinkhornOutcome, ORACLE_MAX_N};
pub use measures::{LineMeasure, PointCloud, SortPermutation, UnitDirection};
pub use ot1d::wd1d;
pub use sliced_baselines::{max_sw, pwd, sw};
pub use swgg::{
    extract_map, minswgg_anneal, minswgg_optimize, minswgg_random_search, swgg_decomposed, swgg_geodesic, swgg_perm,
    DistanceReport, GdConfig, Optimizer, SmoothingConfig,
};
