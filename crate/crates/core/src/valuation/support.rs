//! Hessian measures of support functions against the unit ball.

use crate::convexfn::ConvexFunction;
use crate::error::{Error, Result};
use crate::geometry::{hausdorff_measure, quermassintegrals, Polyhedron};
use crate::hessmeasure::HessianMeasureAtlas;
use crate::linalg::unit_ball_volume;
use crate::subdiff::{Region, Window};

/// `Θ_i(h_K, B × R^n)` with `B` a polytope standing in for the unit ball.
#[derive(Clone, Debug, PartialEq)]
pub struct SupportMeasures {
    pub theta: Vec<f64>,
    pub quermass: Vec<f64>,
    pub sides: usize,
    /// `H^n(B) - κ_n`; every entry's offset from the round-ball value is
    /// controlled by this volume excess.
    pub ball_excess: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SupportRow {
    pub index: usize,
    pub theta: f64,
    /// `W_i(K)`.
    pub quermass_same: f64,
    /// `W_{n-i}(K)`.
    pub quermass_reversed: f64,
}

impl SupportMeasures {
    pub fn table(&self) -> Vec<SupportRow> {
        let n = self.theta.len() - 1;
        (0..=n)
            .map(|i| SupportRow {
                index: i,
                theta: self.theta[i],
                quermass_same: self.quermass[i],
                quermass_reversed: self.quermass[n - i],
            })
            .collect()
    }
}

/// Measures on `B × R^n` where `B` is the polytope with `sides` facets
/// circumscribing the unit ball.
pub fn support_measures(k: &Polyhedron, sides: usize) -> Result<SupportMeasures> {
    let n = k.dim();
    let ball = Region::Ball { center: crate::linalg::Vector::zeros(n), radius: 1.0, sides };
    let b = ball.polytope();
    let theta = support_measures_on(k, &b)?;
    Ok(SupportMeasures {
        theta,
        quermass: quermassintegrals(k)?,
        sides,
        ball_excess: hausdorff_measure(&b)?.value - unit_ball_volume(n),
    })
}

/// Measures on `x_window × R^n` for an arbitrary polyhedral x-window.
pub fn support_measures_on(k: &Polyhedron, x_window: &Polyhedron) -> Result<Vec<f64>> {
    if !k.is_bounded() || k.is_empty() {
        return Err(Error::UnboundedPolyhedron);
    }
    let h = ConvexFunction::support(k.clone())?;
    let n = k.dim();
    let window = Window::new(Region::Poly(x_window.clone()), Region::All(n))?;
    HessianMeasureAtlas::new(&h)?.measures(&window)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn square_and_segments() {
        let m = support_measures(&Polyhedron::box_(&[0.0, 0.0], &[1.0, 1.0]), 64).unwrap();
        assert!((m.theta[0] - 1.0).abs() < 1e-9 && (m.theta[1] - 2.0).abs() < 1e-9);
        assert!((m.theta[2] - PI).abs() < 3e-3, "{:?}", m.theta);
        assert!((m.theta[2] - PI - m.ball_excess).abs() < 1e-9);
        let pt = support_measures(&Polyhedron::interval(0.3, 0.3), 64).unwrap();
        assert!(pt.theta[0].abs() < 1e-12 && (pt.theta[1] - 2.0).abs() < 1e-12);
        let seg = support_measures(&Polyhedron::interval(0.0, 2.0), 64).unwrap();
        assert!((seg.theta[0] - 2.0).abs() < 1e-12 && (seg.theta[1] - 2.0).abs() < 1e-12);
        let rows = seg.table();
        assert_eq!(rows[0].quermass_same, seg.quermass[0]);
    }
}
