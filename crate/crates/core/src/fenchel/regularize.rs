//! Pasch-Hausdorff regularization `u_r = (u* + I_{B(0,1/r)})*`.

use super::{conjugate, conjugate_grid_on, conjugate_max_affine, DualGrid};
use crate::convexfn::{ConvexFunction, GridSampled, MaxAffine};
use crate::error::{Error, Result};
use crate::geometry::{BallApprox, Polyhedron};
use crate::linalg::Vector;

#[derive(Clone, Debug, PartialEq)]
pub struct RegOptions {
    /// Facets of the polyhedral ball used on the exact piecewise-linear path.
    pub sides: usize,
    /// Half-width of the primal box for results computed on grids.
    pub grid_half_width: f64,
    /// Primal grid step; `None` picks one from the dimension.
    pub grid_step: Option<f64>,
    /// Dual nodes per unit of `1/r` along each axis.
    pub dual_nodes: usize,
}

impl Default for RegOptions {
    fn default() -> Self {
        Self { sides: 64, grid_half_width: 5.0, grid_step: None, dual_nodes: 0 }
    }
}

pub fn lipschitz_reg(u: &ConvexFunction, r: f64) -> Result<ConvexFunction> {
    lipschitz_reg_with(u, r, &RegOptions::default())
}

/// Exact for the piecewise-linear families, with the ball replaced by an
/// inscribed polytope in dimensions two and three (so the result is a lower
/// bound of the true regularization). Other families are regularized on grids.
pub fn lipschitz_reg_with(u: &ConvexFunction, r: f64, opts: &RegOptions) -> Result<ConvexFunction> {
    if !(r > 0.0) {
        return Err(Error::RegularizationUndefined { radius: r });
    }
    let n = u.dim();
    if u.is_piecewise_linear() {
        let m = u.as_max_affine().expect("piecewise-linear family");
        let dual = conjugate_max_affine(&m)?;
        let ball = Polyhedron::ball(&Vector::zeros(n), 1.0 / r, opts.sides, BallApprox::Inscribed);
        let dom = dual.domain().intersect(&ball)?;
        if dom.is_empty() {
            return Err(Error::RegularizationUndefined { radius: r });
        }
        let truncated = MaxAffine::new(dual.pieces().to_vec(), dom)?;
        return conjugate_max_affine(&truncated).map(ConvexFunction::MaxAffine);
    }
    grid_path(u, r, opts)
}

fn grid_path(u: &ConvexFunction, r: f64, opts: &RegOptions) -> Result<ConvexFunction> {
    let n = u.dim();
    let radius = 1.0 / r;
    let per_unit = if opts.dual_nodes > 0 { opts.dual_nodes } else { [0, 2000, 100, 20][n.min(3)] };
    let dual_count = 2 * per_unit + 1;
    let dual_step = radius / per_unit as f64;
    let dual = DualGrid { lo: vec![-radius; n], step: dual_step, counts: vec![dual_count; n] };

    // Values of u* on the dual grid, from the exact conjugate when available.
    let dual_values: GridSampled = match u {
        ConvexFunction::Grid(g) => conjugate_grid_on(g, &dual)?,
        _ => {
            let us = conjugate(u)?;
            GridSampled::sample(dual.lo.clone(), dual.step, dual.counts.clone(), |y| us.eval(y))?
        }
    };
    let masked: Vec<f64> = (0..dual_values.values().len())
        .map(|i| {
            if dual_values.node(i).norm() <= radius * (1.0 + 1e-12) {
                dual_values.values()[i]
            } else {
                f64::INFINITY
            }
        })
        .collect();
    if masked.iter().all(|v| v.is_infinite()) {
        return Err(Error::RegularizationUndefined { radius: r });
    }
    let masked = GridSampled::new(dual.lo.clone(), dual.step, dual.counts.clone(), masked)?;
    let half = opts.grid_half_width;
    let step = opts.grid_step.unwrap_or([0.0, 1e-3, 2e-2, 0.1][n.min(3)] * half);
    let count = (2.0 * half / step).round() as usize + 1;
    let primal = DualGrid { lo: vec![-half; n], step, counts: vec![count; n] };
    conjugate_grid_on(&masked, &primal).map(ConvexFunction::Grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convexfn::Quadratic;
    use crate::linalg::vector;

    #[test]
    fn point_indicator_becomes_norm() {
        let u = ConvexFunction::indicator(Polyhedron::point(&vector(&[0.0]))).unwrap();
        let reg = lipschitz_reg(&u, 1.0).unwrap();
        for x in [-2.0, -0.3, 0.0, 1.5] {
            assert!((reg.eval(&vector(&[x])) - f64::abs(x)).abs() < 1e-12);
        }
    }

    #[test]
    fn abs_is_unchanged_for_small_radius() {
        let u = ConvexFunction::support(Polyhedron::interval(-1.0, 1.0)).unwrap();
        for r in [1.0, 0.5, 0.1] {
            let reg = lipschitz_reg(&u, r).unwrap();
            for x in [-2.0, 0.0, 0.7] {
                assert!((reg.eval(&vector(&[x])) - f64::abs(x)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn huber_from_quadratic() {
        let u = ConvexFunction::Quadratic(Quadratic::half_norm_squared(1));
        let reg = lipschitz_reg(&u, 0.5).unwrap();
        for x in [-4.0, -2.5, -1.0, 0.0, 1.9, 3.0] {
            let h = if f64::abs(x) <= 2.0 { 0.5 * x * x } else { 2.0 * f64::abs(x) - 2.0 };
            assert!((reg.eval(&vector(&[x])) - h).abs() < 1e-5, "x={x}");
        }
    }

    #[test]
    fn undefined_when_ball_misses_dual_domain() {
        let u = ConvexFunction::max_affine(
            vec![crate::convexfn::AffinePiece::new(vector(&[3.0]), 0.0)],
            Polyhedron::whole(1),
        )
        .unwrap();
        assert!(matches!(lipschitz_reg(&u, 0.5), Err(Error::RegularizationUndefined { .. })));
        assert!(lipschitz_reg(&u, 0.25).is_ok());
    }
}
