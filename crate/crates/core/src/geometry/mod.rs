//! Exact polyhedral geometry in dimensions one to three.

pub mod faces;
pub mod measure;
pub mod polyhedron;
pub mod quadrature;

pub use faces::{f_vector, face_lattice, planar_cone_angle, Face};
pub use measure::{hausdorff_measure, intrinsic_volumes, polytope_volume, quermassintegrals, simplex_volume, simplices, span_factor, Measured};
pub use polyhedron::{sphere_directions, BallApprox, Halfspace, Polyhedron, VRep};
pub use quadrature::{gauss_legendre, integrate_interval, integrate_product, simplex_rule, Cubature, Estimate};
