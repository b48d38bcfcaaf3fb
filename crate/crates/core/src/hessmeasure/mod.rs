//! Hessian measures: exact polyhedral strata, quadrature for smooth inputs,
//! Steiner-coefficient extraction, densities and a weak-convergence metric.

mod atlas;
mod smooth;
mod steiner;

pub use atlas::{density, measure_distance, measures_pl, projection_measures, HessianMeasureAtlas, MeasureMode};
pub use smooth::{measures_smooth, normalized_invariants, SmoothConvex, SmoothFn};
pub use steiner::{steiner_extract, SteinerPolynomial};

use crate::convexfn::ConvexFunction;
use crate::error::Result;
use crate::subdiff::{parallel_set_volume, Window};

/// Steiner polynomial of `s -> H^n(P_s(u, η))`, nodes scaled by the window diameter.
pub fn steiner_of(u: &ConvexFunction, window: &Window) -> Result<SteinerPolynomial> {
    let scale = window.diameter().unwrap_or(1.0);
    steiner_extract(&|s| parallel_set_volume(u, window, s), u.dim(), scale)
}
