//! Volumes of parallel sets `P_s(u, η) = {x + s y : (x, y) ∈ η ∩ Γ_u}`.

use super::atlas::{atlas_of, GraphAtlas};
use super::window::Window;
use crate::convexfn::{ConvexFunction, Quadratic};
use crate::error::{check_dim, Error, Result};
use crate::geometry::{polytope_volume, Halfspace, Polyhedron};
use crate::linalg::Matrix;

/// `H^k` of `p`; zero when `p` is empty or has dimension below `k`.
pub fn measure_k(p: &Polyhedron, k: usize) -> Result<f64> {
    if p.is_empty() {
        return Ok(0.0);
    }
    if p.dimension().unwrap_or(0) < k {
        return Ok(0.0);
    }
    if !p.is_bounded() {
        return Err(Error::UnboundedResult(format!("a {k}-dimensional stratum meets the window in an unbounded set")));
    }
    polytope_volume(p, k)
}

pub fn parallel_set_volume(u: &ConvexFunction, window: &Window, s: f64) -> Result<f64> {
    check_dim(u.dim(), window.dim())?;
    if !(s >= 0.0) {
        return Err(Error::DegenerateInput("parallel sets need s >= 0".into()));
    }
    match u {
        ConvexFunction::Quadratic(q) => quadratic_volume(q, window, s),
        ConvexFunction::Grid(_) => Err(Error::NotExactFamily("grid-sampled functions")),
        _ => {
            let atlas = atlas_of(&u.as_max_affine().expect("piecewise-linear family"))?;
            pl_volume(&atlas, window, s)
        }
    }
}

/// Sum over measure-carrying strata of `s^j · span · H^k(F ∩ X) · H^j(G ∩ Y)`.
pub(crate) fn pl_volume(atlas: &GraphAtlas, window: &Window, s: f64) -> Result<f64> {
    let (xp, yp) = (window.x.polytope(), window.y.polytope());
    let mut total = 0.0;
    for st in atlas.measure_carrying() {
        let j = st.dual_dim;
        let weight = s.powi(j as i32) * st.span.unwrap_or(0.0);
        if weight == 0.0 {
            continue;
        }
        let fx = measure_k(&st.primal.intersect(&xp)?, st.primal_dim)?;
        if fx == 0.0 {
            continue;
        }
        let gy = measure_k(&st.dual.intersect(&yp)?, j)?;
        total += weight * fx * gy;
    }
    Ok(total)
}

/// Preimage `{x : ∇u(x) ∈ Y}` of a polyhedron under an affine gradient.
pub fn gradient_preimage(q: &Quadratic, y: &Polyhedron) -> Polyhedron {
    let n = q.dim();
    let mut hs = Vec::new();
    let mut infeasible = false;
    for h in y.halfspaces() {
        let normal = q.a().transpose() * &h.normal;
        let offset = h.offset - h.normal.dot(q.b());
        match Halfspace::new(normal, offset) {
            Some(h) => hs.push(h),
            None => infeasible |= offset < -1e-12,
        }
    }
    if infeasible || y.is_empty() {
        return Polyhedron::empty(n);
    }
    Polyhedron::from_halfspaces(n, hs)
}

fn quadratic_volume(q: &Quadratic, window: &Window, s: f64) -> Result<f64> {
    let n = q.dim();
    let region = window.x.polytope().intersect(&gradient_preimage(q, &window.y.polytope()))?;
    let vol = measure_k(&region, n)?;
    let jac = (Matrix::identity(n, n) + q.a() * s).determinant();
    Ok(jac * vol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convexfn::AffinePiece;
    use crate::linalg::vector;
    use crate::subdiff::Region;

    #[test]
    fn examples() {
        let abs = ConvexFunction::support(Polyhedron::interval(-1.0, 1.0)).unwrap();
        let w = Window::polys(Polyhedron::interval(-1.0, 1.0), Polyhedron::interval(-2.0, 2.0)).unwrap();
        assert!((parallel_set_volume(&abs, &w, 1.0).unwrap() - 4.0).abs() < 1e-12);

        let q = ConvexFunction::Quadratic(Quadratic::half_norm_squared(2));
        let beta = Polyhedron::from_points(2, &[vector(&[0.0, 0.0]), vector(&[2.0, 0.0]), vector(&[0.0, 1.0])]);
        let w = Window::new(Region::Poly(beta), Region::All(2)).unwrap();
        assert!((parallel_set_volume(&q, &w, 0.5).unwrap() - 2.25).abs() < 1e-12);

        let hinge = ConvexFunction::max_affine(
            vec![AffinePiece::new(vector(&[0.0, 0.0]), 0.0), AffinePiece::new(vector(&[1.0, 0.0]), -1.0)],
            Polyhedron::whole(2),
        )
        .unwrap();
        let w = Window::new(Region::Poly(Polyhedron::box_(&[0.0, 0.0], &[2.0, 2.0])), Region::All(2))
            .unwrap();
        assert!((parallel_set_volume(&hinge, &w, 2.0).unwrap() - 8.0).abs() < 1e-12);
    }

    #[test]
    fn unbounded_strata_error() {
        let ind = ConvexFunction::indicator(Polyhedron::interval(0.0, 1.0)).unwrap();
        let w = Window::new(Region::Poly(Polyhedron::interval(-1.0, 2.0)), Region::All(1)).unwrap();
        assert!(matches!(parallel_set_volume(&ind, &w, 1.0), Err(Error::UnboundedResult(_))));
    }
}
