//! Convex functions: representations, lattice operations, rigid motions.

mod epi;
mod function;
mod generate;
mod lattice;
mod transform;

pub use epi::{epi_distance, epi_distance_with};
pub use function::{AffinePiece, ConvexFunction, GridSampled, MaxAffine, Quadratic};
pub use generate::{generate_pair, random_max_affine, random_polytope, random_window, PairFamily};
pub use lattice::{join, lattice_ops, meet, LatticePair, LatticeResult, MeetCertificate};
pub use transform::{rotation_2d, rotation_3d, transform};
