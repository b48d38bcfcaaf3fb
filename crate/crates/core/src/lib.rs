//! Hessian measures and Hessian valuations of convex functions.
//!
//! Exact computations cover piecewise-linear functions, indicators and support
//! functions of polytopes in dimensions one to three; quadratic and other smooth
//! inputs go through quadrature of normalized Hessian invariants.

pub mod convexfn;
pub mod error;
pub mod fenchel;
pub mod geometry;
pub mod harness;
pub mod hessmeasure;
pub mod linalg;
pub mod subdiff;
pub mod valuation;

pub use convexfn::{AffinePiece, ConvexFunction, GridSampled, LatticePair, MaxAffine, PairFamily, Quadratic};
pub use error::{Error, Result};
pub use geometry::{BallApprox, Polyhedron};
pub use linalg::{Matrix, Vector};
