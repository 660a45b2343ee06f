//! Quadrature, histograms, goodness-of-fit measures and scalar solvers.

mod hist;
mod quad;
mod roots;
mod stats;

pub use hist::{histogram_log, LogHistogram};
pub use quad::{
    dyadic_mesh, integrate, integrate_2d, integrate_interval, integrate_s_axis, quad_heavy_tail, Estimate,
    QuadOptions, S_MAX,
};
pub use roots::{bisect_newton, minimize_golden};
pub use stats::{chi_square_per_bin, ks_distance, ks_distance_cdfs};
