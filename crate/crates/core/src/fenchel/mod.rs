//! Legendre-Fenchel conjugation and Lipschitz regularization.

mod grid;
mod regularize;

pub use grid::{conjugate_grid, conjugate_grid_on, DualGrid};
pub use regularize::{lipschitz_reg, lipschitz_reg_with, RegOptions};

use crate::convexfn::{AffinePiece, ConvexFunction, MaxAffine, Quadratic};
use crate::error::{Error, Result};
use crate::geometry::{Halfspace, Polyhedron};
use crate::linalg::Vector;

/// How a conjugate was obtained.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Exactness {
    Exact,
    Grid { step: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConjugatePair {
    pub primal: ConvexFunction,
    pub dual: ConvexFunction,
    pub exactness: Exactness,
}

impl ConjugatePair {
    pub fn new(primal: ConvexFunction) -> Result<Self> {
        match &primal {
            ConvexFunction::Grid(g) => {
                let step = g.step();
                let dual = ConvexFunction::Grid(conjugate_grid(g)?);
                Ok(Self { primal, dual, exactness: Exactness::Grid { step } })
            }
            _ => {
                let dual = conjugate(&primal)?;
                Ok(Self { primal, dual, exactness: Exactness::Exact })
            }
        }
    }
}

/// Exact conjugate `u*(y) = sup_x <x,y> - u(x)` for the structured families.
pub fn conjugate(u: &ConvexFunction) -> Result<ConvexFunction> {
    match u {
        ConvexFunction::Indicator(k) if k.is_bounded() => Ok(ConvexFunction::Support(k.clone())),
        ConvexFunction::Support(k) => Ok(ConvexFunction::Indicator(k.clone())),
        ConvexFunction::Quadratic(q) => conjugate_quadratic(q).map(ConvexFunction::Quadratic),
        ConvexFunction::Grid(_) => Err(Error::NotExactlyConjugable(
            "grid-sampled functions are conjugated with conjugate_grid".into(),
        )),
        other => {
            let m = other.as_max_affine().expect("piecewise-linear family");
            conjugate_max_affine(&m).map(ConvexFunction::MaxAffine)
        }
    }
}

fn conjugate_quadratic(q: &Quadratic) -> Result<Quadratic> {
    let n = q.dim();
    let min_eig = q.eigenvalues().into_iter().fold(f64::INFINITY, f64::min);
    let scale = q.a().amax().max(1.0);
    if n > 0 && min_eig <= 1e-12 * scale {
        return Err(Error::NotExactlyConjugable(format!(
            "quadratic form is singular (smallest eigenvalue {min_eig})"
        )));
    }
    let inv = q
        .a()
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::NotExactlyConjugable("quadratic form is singular".into()))?;
    let inv = (&inv + inv.transpose()) * 0.5;
    let shift = -(&inv * q.b());
    let c = 0.5 * q.b().dot(&(&inv * q.b())) - q.c();
    Quadratic::new(inv, shift, c)
}

/// Lifted epigraph `{(x,t) : x in dom, t >= <a_j,x> + c_j}` in `R^{n+1}`.
pub(crate) fn lifted_epigraph(m: &MaxAffine) -> Polyhedron {
    let n = m.dim();
    let mut hs = Vec::with_capacity(m.pieces().len() + m.domain().halfspaces().len());
    for p in m.pieces() {
        let mut normal = Vector::zeros(n + 1);
        normal.rows_mut(0, n).copy_from(&p.slope);
        normal[n] = -1.0;
        hs.extend(Halfspace::new(normal, -p.intercept));
    }
    for h in m.domain().halfspaces() {
        let mut normal = Vector::zeros(n + 1);
        normal.rows_mut(0, n).copy_from(&h.normal);
        hs.extend(Halfspace::new(normal, h.offset));
    }
    Polyhedron::from_halfspaces(n + 1, hs)
}

/// The conjugate of a max-affine function is again max-affine: its pieces come
/// from the vertices of the lifted epigraph and its domain from the recession
/// directions and lineality.
pub(crate) fn conjugate_max_affine(m: &MaxAffine) -> Result<MaxAffine> {
    let n = m.dim();
    let epi = lifted_epigraph(m);
    let v = epi.vrep();
    let pieces: Vec<AffinePiece> = v
        .vertices
        .iter()
        .map(|p| AffinePiece::new(p.rows(0, n).into_owned(), -p[n]))
        .collect();
    let mut hs = Vec::new();
    for d in &v.rays {
        hs.extend(Halfspace::new(d.rows(0, n).into_owned(), d[n]));
    }
    for l in &v.lineality {
        let normal = l.rows(0, n).into_owned();
        hs.extend(Halfspace::new(normal.clone(), l[n]));
        hs.extend(Halfspace::new(-normal, -l[n]));
    }
    let domain = Polyhedron::from_halfspaces(n, hs);
    if pieces.is_empty() || domain.is_empty() {
        return Err(Error::DegenerateInput("conjugate is identically +inf".into()));
    }
    MaxAffine::new(pieces, domain)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{vector, Matrix};

    fn abs1() -> ConvexFunction {
        ConvexFunction::support(Polyhedron::interval(-1.0, 1.0)).unwrap()
    }

    #[test]
    fn self_dual_quadratic() {
        let q = ConvexFunction::Quadratic(Quadratic::half_norm_squared(2));
        assert_eq!(conjugate(&q).unwrap(), q);
    }

    #[test]
    fn interval_indicator_and_abs() {
        let ind = ConvexFunction::indicator(Polyhedron::interval(-1.0, 1.0)).unwrap();
        let s = conjugate(&ind).unwrap();
        for y in [-3.0, -0.2, 0.0, 1.7] {
            assert!((s.eval(&vector(&[y])) - f64::abs(y)).abs() < 1e-14);
        }
        let ma = ConvexFunction::max_affine(
            vec![AffinePiece::new(vector(&[1.0]), 0.0), AffinePiece::new(vector(&[-1.0]), 0.0)],
            Polyhedron::whole(1),
        )
        .unwrap();
        let c = conjugate(&ma).unwrap();
        assert_eq!(c.eval(&vector(&[0.5])), 0.0);
        assert_eq!(c.eval(&vector(&[1.0])), 0.0);
        assert_eq!(c.eval(&vector(&[1.01])), f64::INFINITY);
        let back = conjugate(&abs1()).unwrap();
        assert_eq!(back.eval(&vector(&[-1.0])), 0.0);
    }

    #[test]
    fn linear_function_conjugates_to_point_indicator() {
        let ma = ConvexFunction::max_affine(vec![AffinePiece::new(vector(&[0.5, -1.0]), 2.0)], Polyhedron::whole(2))
            .unwrap();
        let c = conjugate(&ma).unwrap();
        assert!((c.eval(&vector(&[0.5, -1.0])) + 2.0).abs() < 1e-12);
        assert_eq!(c.eval(&vector(&[0.5, -0.9])), f64::INFINITY);
    }

    #[test]
    fn quadratic_closed_form_and_singular() {
        let a = Matrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0]);
        let q = Quadratic::new(a, vector(&[1.0, -1.0]), 0.3).unwrap();
        let qs = conjugate_quadratic(&q).unwrap();
        // Young-Fenchel equality at y = grad u(x).
        let x = vector(&[0.4, -0.7]);
        let y = q.gradient(&x);
        assert!((q.eval(&x) + qs.eval(&y) - x.dot(&y)).abs() < 1e-12);
        let sing = Quadratic::new(Matrix::from_row_slice(1, 1, &[0.0]), vector(&[0.0]), 0.0).unwrap();
        assert!(matches!(conjugate_quadratic(&sing), Err(Error::NotExactlyConjugable(_))));
    }

    #[test]
    fn biconjugate_of_max_affine_on_polygon() {
        let dom = Polyhedron::from_rows(2, &[vec![1.0, 0.0, 1.0], vec![0.0, 1.0, 1.0], vec![-1.0, -1.0, 1.0]]).unwrap();
        let m = ConvexFunction::max_affine(
            vec![
                AffinePiece::new(vector(&[1.0, 0.0]), 0.0),
                AffinePiece::new(vector(&[0.0, 2.0]), -0.5),
                AffinePiece::new(vector(&[-1.0, 0.5]), 0.2),
            ],
            dom,
        )
        .unwrap();
        let bi = conjugate(&conjugate(&m).unwrap()).unwrap();
        for x in [[0.0, 0.0], [0.9, -0.5], [-1.5, 0.3], [0.2, 0.99], [3.0, 3.0]] {
            let x = vector(&x);
            let (a, b) = (m.eval(&x), bi.eval(&x));
            assert!(a == b || (a - b).abs() < 1e-9, "{a} vs {b}");
        }
    }
}
