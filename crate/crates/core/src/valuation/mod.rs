//! Valuations built from Hessian measures and from sublevel sets.

pub mod kernel;
mod integrate;
mod levelset;
mod polar;
mod separation;
mod support;

pub use kernel::{Arity, Conjugated, Kernel, KernelFn, Profile, Quadric, Spatial};
pub use levelset::{ellipsoid_quermassintegrals, levelset_valuation, levelset_valuation_with, sublevel_set};
pub use separation::{separation_experiment, SeparationConfig, SeparationReport};
pub use support::{support_measures, support_measures_on, SupportMeasures, SupportRow};

use integrate::{check_converged, pl_integral, quadratic_integral, split};
use kernel::WithXSupport;

use crate::convexfn::{ConvexFunction, MaxAffine};
use crate::error::{Error, Result};
use crate::fenchel::{conjugate, lifted_epigraph};
use crate::geometry::{integrate_product, simplices, Cubature, Estimate, Halfspace, Polyhedron};
use crate::subdiff::atlas_of;

fn check_index(n: usize, i: usize) -> Result<()> {
    if i > n {
        return Err(Error::DimensionMismatch { expected: n, found: i });
    }
    Ok(())
}

fn check_arity(zeta: &Kernel) -> Result<()> {
    zeta.validate()?;
    if zeta.arity == Arity::Omega {
        return Err(Error::DegenerateInput("ω is a level-set kernel; use levelset_valuation".into()));
    }
    Ok(())
}

/// `Z_{ζ,i}(u) = ∫ ζ(u(x), x, y) dΘ_i(u, (x, y))`.
pub fn hessian_valuation(zeta: &Kernel, i: usize, u: &ConvexFunction) -> Result<f64> {
    check_arity(zeta)?;
    check_index(u.dim(), i)?;
    if zeta.is_zero() {
        return Ok(0.0);
    }
    hessian_valuation_with(zeta, i, u, &Cubature::default())
}

/// [`hessian_valuation`] for an arbitrary integrand and cubature.
pub fn hessian_valuation_with(zeta: &dyn KernelFn, i: usize, u: &ConvexFunction, cfg: &Cubature) -> Result<f64> {
    let n = u.dim();
    check_index(n, i)?;
    let e = match u {
        ConvexFunction::Quadratic(q) => quadratic_integral(zeta, i, q, cfg)?,
        ConvexFunction::Grid(_) => return Err(Error::NotExactFamily("grid-sampled functions")),
        _ => pl_integral(zeta, i, &atlas_of(&u.as_max_affine().expect("piecewise-linear family"))?, cfg)?,
    };
    check_converged(e)
}

/// Checks coercivity and returns `{u <= level}`. Exact for piecewise-linear
/// and quadratic functions; other families are rejected.
pub(crate) fn coercive_sublevel(u: &ConvexFunction, level: f64) -> Result<Polyhedron> {
    match u {
        ConvexFunction::Quadratic(q) => {
            let eig = q.eigenvalues();
            if eig.iter().any(|&l| l <= 1e-12) {
                return Err(Error::NotCoercive);
            }
            Ok(ellipsoid_box(q, level))
        }
        ConvexFunction::Grid(_) => Err(Error::UnsupportedFamily("grid-sampled functions")),
        _ => {
            let m = u.as_max_affine().expect("piecewise-linear family");
            let top = lifted_epigraph(&m).vertices().iter().map(|v| v[m.dim()]).fold(f64::NEG_INFINITY, f64::max);
            if !top.is_finite() {
                return Err(Error::NotCoercive);
            }
            // One nonempty bounded sublevel set forces all of them to be bounded.
            let probe = pl_sublevel(&m, top.max(level) + 1.0);
            if !probe.is_bounded() {
                return Err(Error::NotCoercive);
            }
            Ok(pl_sublevel(&m, level))
        }
    }
}

fn pl_sublevel(m: &MaxAffine, level: f64) -> Polyhedron {
    let mut p = m.domain().clone();
    for a in m.pieces() {
        match Halfspace::new(a.slope.clone(), level - a.intercept) {
            Some(h) => p = p.with_halfspace(h),
            None if a.intercept > level => return Polyhedron::empty(m.dim()),
            None => {}
        }
    }
    p
}

/// Axis-aligned box around `{q <= level}` (empty below the minimum).
fn ellipsoid_box(q: &crate::convexfn::Quadratic, level: f64) -> Polyhedron {
    let n = q.dim();
    let inv = q.a().clone().try_inverse().expect("positive definite");
    let center = -(&inv * q.b());
    let excess = level - q.eval(&center);
    if excess < 0.0 {
        return Polyhedron::empty(n);
    }
    let half: Vec<f64> = (0..n).map(|i| (2.0 * excess * inv[(i, i)]).sqrt() * (1.0 + 1e-12) + 1e-14).collect();
    let lo: Vec<f64> = (0..n).map(|i| center[i] - half[i]).collect();
    let hi: Vec<f64> = (0..n).map(|i| center[i] + half[i]).collect();
    Polyhedron::box_(&lo, &hi)
}

/// Translation-invariant valuation `∫ ζ(u(x), y) dΘ_i(u, (x, y))` of a coercive `u`.
pub fn coercive_valuation(zeta: &Kernel, i: usize, u: &ConvexFunction) -> Result<f64> {
    check_arity(zeta)?;
    check_index(u.dim(), i)?;
    if zeta.arity == Arity::Txy && zeta.x != Spatial::One {
        return Err(Error::DegenerateInput("coercive valuations take kernels independent of x".into()));
    }
    let top = zeta.profile.support().1;
    if zeta.is_zero() {
        coercive_sublevel(u, 0.0)?;
        return Ok(0.0);
    }
    if !top.is_finite() {
        return Err(Error::KernelNotCompact("t"));
    }
    let support = coercive_sublevel(u, top)?;
    if support.is_empty() {
        return Ok(0.0);
    }
    let k = WithXSupport { inner: zeta, support };
    hessian_valuation_with(&k, i, u, &Cubature::default())
}

/// `Z_{ζ,i}(u*)` computed on the conjugate and, independently, as `Z_{ζ̄,n-i}(u)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConjugateValuation {
    pub via_conjugate: f64,
    pub via_kernel: f64,
}

impl ConjugateValuation {
    pub fn difference(&self) -> f64 {
        (self.via_conjugate - self.via_kernel).abs()
    }

    pub fn value(&self) -> f64 {
        self.via_conjugate
    }
}

pub fn conjugate_valuation(zeta: &Kernel, i: usize, u: &ConvexFunction) -> Result<ConjugateValuation> {
    check_arity(zeta)?;
    let n = u.dim();
    check_index(n, i)?;
    if zeta.is_zero() {
        return Ok(ConjugateValuation { via_conjugate: 0.0, via_kernel: 0.0 });
    }
    let cfg = Cubature::default();
    let via_conjugate = hessian_valuation_with(zeta, i, &conjugate(u)?, &cfg)?;
    let via_kernel = hessian_valuation_with(&Conjugated(zeta), n - i, u, &cfg)?;
    Ok(ConjugateValuation { via_conjugate, via_kernel })
}

/// `∫_{dom u} ζ(u(x), x, ∇u(x)) dx` integrated cell by cell on the domain.
pub fn domain_integral(zeta: &dyn KernelFn, u: &ConvexFunction) -> Result<f64> {
    let n = u.dim();
    let cfg = Cubature::default();
    let e = match u {
        // The weight [D²q]_0 is one, so this is the index-n quadratic integral.
        ConvexFunction::Quadratic(q) => integrate::quadratic_integral(zeta, n, q, &cfg)?,
        ConvexFunction::Grid(_) => return Err(Error::NotExactFamily("grid-sampled functions")),
        _ => {
            let m = u.as_max_affine().expect("piecewise-linear family");
            let sx = zeta.x_support(n);
            let mut e = Estimate::default();
            for (j, a) in m.pieces().iter().enumerate() {
                let mut cell = m.domain().clone();
                for (k, b) in m.pieces().iter().enumerate() {
                    if let (true, Some(h)) = (k != j, Halfspace::new(&b.slope - &a.slope, a.intercept - b.intercept)) {
                        cell = cell.with_halfspace(h);
                    }
                }
                if let Some(s) = &sx {
                    cell = cell.intersect(s)?;
                }
                if cell.is_empty() || cell.dimension() != Some(n) {
                    continue;
                }
                if !cell.is_bounded() {
                    return Err(Error::KernelNotCompact("x"));
                }
                for part in split(vec![cell], &zeta.x_planes(n, a)) {
                    for s in simplices(&part)? {
                        e += integrate_product(&s, &[crate::linalg::Vector::zeros(0)], &|x, _| zeta.eval(a.eval(x), x, &a.slope), &cfg);
                    }
                }
            }
            e
        }
    };
    check_converged(e)
}

/// `∫_{dom u*} ζ(<∇u*(y), y> - u*(y), ∇u*(y), y) dy`, the domain integral of
/// the conjugated kernel against `u*`.
pub fn dual_domain_integral(zeta: &Kernel, u: &ConvexFunction) -> Result<f64> {
    domain_integral(&Conjugated(zeta), &conjugate(u)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convexfn::AffinePiece;
    use crate::convexfn::Quadratic;
    use crate::linalg::vector;

    fn abs1() -> ConvexFunction {
        ConvexFunction::MaxAffine(MaxAffine::on_whole_space(vec![
            AffinePiece { slope: vector(&[1.0]), intercept: 0.0 },
            AffinePiece { slope: vector(&[-1.0]), intercept: 0.0 },
        ]).unwrap())
    }

    fn tent_kernel() -> Kernel {
        Kernel::txy(Profile::Const { value: 1.0 }, Spatial::TensorHat { radius: 1.0 }, Spatial::TensorHat { radius: 2.0 })
    }

    #[test]
    fn abs_value_examples() {
        let u = abs1();
        let k = tent_kernel();
        assert!((hessian_valuation(&k, 0, &u).unwrap() - 3.0).abs() < 1e-12);
        assert!((hessian_valuation(&k, 1, &u).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(hessian_valuation(&Kernel::zero(Arity::Txy), 1, &u).unwrap(), 0.0);
    }

    #[test]
    fn coercive_quadratic_example() {
        let k = Kernel::ty(Profile::Ramp { end: 1.0 }, Spatial::Plateau { inner: 2.0, outer: 3.0 });
        let q = ConvexFunction::Quadratic(Quadratic::half_norm_squared(1));
        let v = coercive_valuation(&k, 1, &q).unwrap();
        assert!((v - 4.0 * 2f64.sqrt() / 3.0).abs() < 1e-8, "{v}");
        let shifted = ConvexFunction::Quadratic(Quadratic::new(crate::linalg::Matrix::identity(1, 1), vector(&[-0.3]), 0.045).unwrap());
        assert!((coercive_valuation(&k, 1, &shifted).unwrap() - v).abs() < 1e-8);
        let linear = ConvexFunction::MaxAffine(MaxAffine::on_whole_space(vec![AffinePiece { slope: vector(&[1.0]), intercept: 0.0 }]).unwrap());
        assert_eq!(coercive_valuation(&k, 1, &linear), Err(Error::NotCoercive));
    }

    #[test]
    fn kernel_without_compact_support_is_rejected() {
        let k = Kernel::txy(Profile::Const { value: 1.0 }, Spatial::One, Spatial::One);
        assert_eq!(hessian_valuation(&k, 1, &abs1()), Err(Error::KernelNotCompact("x")));
    }

    #[test]
    fn conjugate_paths_agree() {
        let k = Kernel::txy(
            Profile::Hat { center: 0.2, half_width: 1.0, height: 1.0 },
            Spatial::TensorHat { radius: 1.5 },
            Spatial::Plateau { inner: 0.3, outer: 1.2 },
        );
        for u in [abs1(), ConvexFunction::Quadratic(Quadratic::half_norm_squared(1))] {
            for i in 0..=1 {
                let c = conjugate_valuation(&k, i, &u).unwrap();
                assert!(c.difference() < 1e-6, "{c:?}");
            }
        }
    }

    #[test]
    fn boundary_integrals() {
        let k = Kernel::txy(
            Profile::Hat { center: 0.5, half_width: 1.0, height: 1.0 },
            Spatial::TensorHat { radius: 1.5 },
            Spatial::TensorHat { radius: 2.0 },
        );
        let u = abs1();
        let direct = domain_integral(&k, &u).unwrap();
        assert!((hessian_valuation(&k, 1, &u).unwrap() - direct).abs() < 1e-9);
        let dual = dual_domain_integral(&k, &u).unwrap();
        assert!((hessian_valuation(&k, 0, &u).unwrap() - dual).abs() < 1e-9, "{dual}");
    }
}
