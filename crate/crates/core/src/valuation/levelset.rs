//! `X_k(u) = ∫ ω(t) W_k({u <= t}) dt` for coercive `u`.

use std::f64::consts::PI;

use super::kernel::{Arity, Kernel};
use super::{coercive_sublevel, pl_sublevel};
use crate::convexfn::ConvexFunction;
use crate::error::{Error, Result};
use crate::fenchel::lifted_epigraph;
use crate::geometry::{integrate_interval, quermassintegrals, sphere_directions, Cubature, Estimate, Polyhedron};
use crate::linalg::Vector;
use crate::valuation::integrate::check_converged;

/// Sides of the polytope standing in for an ellipsoid in three dimensions.
const ELLIPSOID_SIDES: usize = 48;

/// `{u <= t}` for a coercive piecewise-linear or quadratic `u`. Quadratic
/// sublevel sets are returned as their bounding box; use
/// [`ellipsoid_quermassintegrals`] for their measures.
pub fn sublevel_set(u: &ConvexFunction, t: f64) -> Result<Polyhedron> {
    coercive_sublevel(u, t)
}

/// Quermassintegrals of the ellipsoid with the given semi-axes. Exact for
/// `n <= 2` (the perimeter by quadrature); a latitude/longitude polytope
/// inscribed in the ellipsoid for `n = 3`.
pub fn ellipsoid_quermassintegrals(semi_axes: &[f64]) -> Result<Vec<f64>> {
    let n = semi_axes.len();
    match n {
        1 => Ok(vec![2.0 * semi_axes[0], 2.0]),
        2 => {
            let (a, b) = (semi_axes[0], semi_axes[1]);
            let speed = |th: f64| (a * a * th.sin().powi(2) + b * b * th.cos().powi(2)).sqrt();
            let perimeter = integrate_interval(0.0, 2.0 * PI, &speed, &Cubature::default()).value;
            Ok(vec![PI * a * b, perimeter / 2.0, PI])
        }
        3 => {
            let pts: Vec<Vector> = sphere_directions(3, ELLIPSOID_SIDES)
                .into_iter()
                .map(|d| Vector::from_iterator(3, (0..3).map(|i| d[i] * semi_axes[i])))
                .collect();
            quermassintegrals(&Polyhedron::from_points(3, &pts))
        }
        _ => Err(Error::UnsupportedFamily("ellipsoids beyond dimension three")),
    }
}

pub fn levelset_valuation(omega: &Kernel, k: usize, u: &ConvexFunction) -> Result<f64> {
    levelset_valuation_with(omega, k, u, &Cubature::default())
}

pub fn levelset_valuation_with(omega: &Kernel, k: usize, u: &ConvexFunction, cfg: &Cubature) -> Result<f64> {
    if omega.arity != Arity::Omega {
        return Err(Error::DegenerateInput("level-set valuations take a kernel of arity omega".into()));
    }
    omega.validate()?;
    let n = u.dim();
    if k > n {
        return Err(Error::DimensionMismatch { expected: n, found: k });
    }
    if n > 3 {
        return Err(Error::UnsupportedFamily("level sets beyond dimension three"));
    }
    if omega.is_zero() {
        coercive_sublevel(u, 0.0)?;
        return Ok(0.0);
    }
    let (lo, hi) = omega.profile.support();
    if !hi.is_finite() {
        return Err(Error::KernelNotCompact("t"));
    }
    coercive_sublevel(u, hi)?;
    let inside = |t: f64| lo <= t && t <= hi;
    let mut total = Estimate::default();
    match u {
        ConvexFunction::Quadratic(q) => {
            let eig = q.eigenvalues();
            let inv = q.a().clone().try_inverse().expect("positive definite");
            let minimum = q.eval(&-(&inv * q.b()));
            // t = minimum + s², which removes the square-root behaviour at the bottom.
            let start = lo.max(minimum);
            if start >= hi {
                return Ok(0.0);
            }
            let mut cuts = vec![start - minimum, hi - minimum];
            cuts.extend(omega.profile.kinks().into_iter().filter(|&t| t > start && t < hi).map(|t| t - minimum));
            let mut cuts: Vec<f64> = cuts.into_iter().map(f64::sqrt).collect();
            cuts.sort_by(f64::total_cmp);
            let failure = std::cell::Cell::new(None);
            let f = |s: f64| {
                let axes: Vec<f64> = eig.iter().map(|l| s * (2.0 / l).sqrt()).collect();
                let w = match ellipsoid_quermassintegrals(&axes) {
                    Ok(w) => w[k],
                    Err(e) => {
                        failure.set(Some(e));
                        0.0
                    }
                };
                2.0 * s * omega.omega_at(minimum + s * s) * w
            };
            for pair in cuts.windows(2) {
                total += integrate_interval(pair[0], pair[1], &f, cfg);
            }
            if let Some(e) = failure.take() {
                return Err(e);
            }
        }
        _ => {
            let m = u.as_max_affine().expect("piecewise-linear family");
            let levels: Vec<f64> = lifted_epigraph(&m).vertices().iter().map(|v| v[n]).collect();
            let minimum = levels.iter().copied().fold(f64::INFINITY, f64::min);
            let start = lo.max(minimum);
            if start >= hi {
                return Ok(0.0);
            }
            let mut cuts = vec![start, hi];
            cuts.extend(levels.iter().copied().chain(omega.profile.kinks()).filter(|&t| t > start && t < hi));
            cuts.sort_by(f64::total_cmp);
            cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
            let failure = std::cell::Cell::new(None);
            let f = |t: f64| {
                if !inside(t) {
                    return 0.0;
                }
                match quermassintegrals(&pl_sublevel(&m, t)) {
                    Ok(w) => omega.omega_at(t) * w[k],
                    Err(e) => {
                        failure.set(Some(e));
                        0.0
                    }
                }
            };
            for pair in cuts.windows(2) {
                total += integrate_interval(pair[0], pair[1], &f, cfg);
            }
            if let Some(e) = failure.take() {
                return Err(e);
            }
        }
    }
    check_converged(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convexfn::MaxAffine;
    use crate::geometry::Polyhedron;
    use crate::valuation::Profile;

    fn hat() -> Kernel {
        Kernel::omega(Profile::Hat { center: 1.0, half_width: 1.0, height: 1.0 })
    }

    /// Polygonal cone `max_k <e_k, x>` for `m` equally spaced unit vectors;
    /// its sublevel sets are dilates of a regular `m`-gon of inradius one.
    fn polygonal_cone(m: usize) -> ConvexFunction {
        ConvexFunction::support(Polyhedron::from_points(2, &sphere_directions(2, m))).unwrap()
    }

    #[test]
    fn cone_volume_and_top_index() {
        let m = 12;
        let u = polygonal_cone(m);
        let area = m as f64 * (PI / m as f64).tan();
        let v = levelset_valuation(&hat(), 0, &u).unwrap();
        // ∫ ω(t) t² dt = 1/4 + 11/12
        assert!((v - area * 7.0 / 6.0).abs() < 1e-8, "{v}");
        let top = levelset_valuation(&hat(), 2, &u).unwrap();
        assert!((top - PI).abs() < 1e-8, "{top}");
        assert_eq!(levelset_valuation(&Kernel::omega(Profile::Const { value: 0.0 }), 0, &u).unwrap(), 0.0);
    }

    #[test]
    fn quadratic_disk() {
        // {|x|²/2 <= t} is the disk of radius √(2t): W_0 = 2πt, W_1 = π√(2t).
        let u = ConvexFunction::Quadratic(crate::convexfn::Quadratic::half_norm_squared(2));
        let v0 = levelset_valuation(&hat(), 0, &u).unwrap();
        assert!((v0 - 2.0 * PI).abs() < 1e-8, "{v0}");
        let v1 = levelset_valuation(&hat(), 1, &u).unwrap();
        let r2 = 2f64.sqrt();
        let direct = PI * r2 * (0.4 + 4.0 / 3.0 * (2.0 * r2 - 1.0) - 0.4 * (4.0 * r2 - 1.0));
        assert!((v1 - direct).abs() < 1e-8, "{v1} vs {direct}");
    }

    #[test]
    fn non_coercive_rejected() {
        let line = ConvexFunction::MaxAffine(MaxAffine::on_whole_space(vec![crate::convexfn::AffinePiece { slope: Vector::from_element(1, 1.0), intercept: 0.0 }]).unwrap());
        assert_eq!(levelset_valuation(&hat(), 0, &line), Err(Error::NotCoercive));
    }
}
