//! Subdifferentials, the stratified subdifferential graph, and parallel sets.

mod atlas;
mod parallel;
mod window;

pub use atlas::{graph_atlas, FacePair, GraphAtlas};
pub(crate) use atlas::atlas_of;
pub use parallel::{gradient_preimage, measure_k, parallel_set_volume};
pub use window::{Region, Window, DEFAULT_BALL_SIDES};

use crate::convexfn::ConvexFunction;
use crate::error::{check_dim, Error, Result};
use crate::geometry::Polyhedron;
use crate::linalg::Vector;

/// `∂u(x)` as a polyhedron (empty outside the domain).
pub fn subdifferential(u: &ConvexFunction, x: &Vector) -> Result<Polyhedron> {
    check_dim(u.dim(), x.len())?;
    let n = u.dim();
    match u {
        ConvexFunction::Quadratic(q) => Ok(Polyhedron::point(&q.gradient(x))),
        ConvexFunction::Grid(_) => Err(Error::NotExactFamily("grid-sampled functions")),
        _ => {
            let m = u.as_max_affine().expect("piecewise-linear family");
            if !m.domain().contains(x) {
                return Ok(Polyhedron::empty(n));
            }
            let slopes: Vec<Vector> = m.active(x).into_iter().map(|j| m.pieces()[j].slope.clone()).collect();
            let normals: Vec<Vector> =
                m.domain().halfspaces().iter().filter(|h| h.is_tight(x)).map(|h| h.normal.clone()).collect();
            Ok(Polyhedron::from_generators(n, &slopes, &normals))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::vector;

    #[test]
    fn examples() {
        let abs = ConvexFunction::support(Polyhedron::interval(-1.0, 1.0)).unwrap();
        assert!(subdifferential(&abs, &vector(&[0.0])).unwrap().same_set(&Polyhedron::interval(-1.0, 1.0)));
        let sq = Polyhedron::cube(2);
        let h = ConvexFunction::support(sq.clone()).unwrap();
        assert!(subdifferential(&h, &vector(&[0.0, 0.0])).unwrap().same_set(&sq));
        let ind = ConvexFunction::indicator(Polyhedron::interval(0.0, 1.0)).unwrap();
        let d = subdifferential(&ind, &vector(&[1.0])).unwrap();
        assert!(d.same_set(&Polyhedron::new(1, &[(vec![-1.0], 0.0)]).unwrap()));
        assert!(subdifferential(&ind, &vector(&[2.0])).unwrap().is_empty());
        let face = subdifferential(&h, &vector(&[1.0, 0.0])).unwrap();
        assert!(face.same_set(&Polyhedron::box_(&[1.0, 0.0], &[1.0, 1.0])));
    }
}
