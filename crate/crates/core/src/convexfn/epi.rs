//! Hausdorff distance of epigraphs truncated to a cylinder.

use itertools::Itertools;

use super::ConvexFunction;
use crate::error::{check_dim, Error, Result};
use crate::linalg::Vector;

/// Distance on the default grid (2001, 81, 21 columns per axis for n = 1, 2, 3).
pub fn epi_distance(u: &ConvexFunction, v: &ConvexFunction, radius: f64) -> Result<f64> {
    let per_axis = [0, 2001, 81, 21][u.dim().min(3)];
    epi_distance_with(u, v, radius, per_axis)
}

/// Hausdorff distance between `epi(u) ∩ C` and `epi(v) ∩ C` with
/// `C = {|x| <= R, |t| <= R}`, both sets replaced by their vertical sections
/// over a grid of `per_axis^n` columns. Sections are segments, and the
/// distance to a convex set is convex along a segment, so only section
/// endpoints are tested. Returns `+inf` when exactly one set is empty.
pub fn epi_distance_with(u: &ConvexFunction, v: &ConvexFunction, radius: f64, per_axis: usize) -> Result<f64> {
    check_dim(u.dim(), v.dim())?;
    if !(radius > 0.0) {
        return Err(Error::DegenerateInput("epi_distance needs a positive radius".into()));
    }
    let n = u.dim();
    let per_axis = per_axis.max(2) | 1;
    let coords: Vec<f64> =
        (0..per_axis).map(|i| -radius + 2.0 * radius * i as f64 / (per_axis - 1) as f64).collect();
    let xs: Vec<Vector> = (0..n)
        .map(|_| coords.iter().copied())
        .multi_cartesian_product()
        .map(Vector::from_vec)
        .filter(|x| x.norm() <= radius * (1.0 + 1e-12))
        .collect();
    let sections = |f: &ConvexFunction| -> Vec<(usize, f64)> {
        xs.iter()
            .enumerate()
            .filter_map(|(i, x)| {
                let val = f.eval(x);
                (val <= radius).then_some((i, val.max(-radius)))
            })
            .collect()
    };
    let (a, b) = (sections(u), sections(v));
    match (a.is_empty(), b.is_empty()) {
        (true, true) => return Err(Error::BothInfiniteOnWindow),
        (true, false) | (false, true) => return Ok(f64::INFINITY),
        _ => {}
    }
    let one_sided = |from: &[(usize, f64)], to: &[(usize, f64)]| -> f64 {
        let mut worst: f64 = 0.0;
        for &(i, lo) in from {
            for t in [lo, radius] {
                let mut best = f64::INFINITY;
                for &(j, lo2) in to {
                    let dx2 = (&xs[i] - &xs[j]).norm_squared();
                    if dx2 >= best * best {
                        continue;
                    }
                    let dt = (lo2 - t).max(0.0);
                    best = best.min((dx2 + dt * dt).sqrt());
                }
                worst = worst.max(best);
            }
        }
        worst
    };
    Ok(one_sided(&a, &b).max(one_sided(&b, &a)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convexfn::AffinePiece;
    use crate::geometry::Polyhedron;
    use crate::linalg::vector;

    fn constant(c: f64) -> ConvexFunction {
        ConvexFunction::max_affine(vec![AffinePiece::new(vector(&[0.0]), c)], Polyhedron::whole(1)).unwrap()
    }

    #[test]
    fn examples() {
        let u = constant(0.0);
        assert_eq!(epi_distance(&u, &u, 3.0).unwrap(), 0.0);
        assert!((epi_distance(&u, &constant(0.5), 10.0).unwrap() - 0.5).abs() < 1e-12);
        let p = ConvexFunction::indicator(Polyhedron::point(&vector(&[0.0]))).unwrap();
        let d = 0.05;
        let q = ConvexFunction::indicator(Polyhedron::interval(-d, d)).unwrap();
        assert!(epi_distance(&p, &q, 1.0).unwrap() <= d + 1e-12);
    }

    #[test]
    fn empty_windows() {
        let far = ConvexFunction::indicator(Polyhedron::interval(5.0, 6.0)).unwrap();
        assert!(matches!(epi_distance(&far, &far, 1.0), Err(Error::BothInfiniteOnWindow)));
        assert_eq!(epi_distance(&far, &constant(0.0), 1.0).unwrap(), f64::INFINITY);
    }
}
