//! Hessian measures on product windows.

use super::smooth::normalized_invariants;
use crate::convexfn::{ConvexFunction, Quadratic};
use crate::error::{check_dim, Error, Result};
use crate::fenchel::conjugate;
use crate::geometry::{Halfspace, Polyhedron};
use crate::linalg::{binomial, unit, Vector};
use crate::subdiff::{graph_atlas, measure_k, FacePair, GraphAtlas, Window};

#[derive(Clone, Debug)]
pub enum MeasureMode {
    /// Weighted strata of the subdifferential graph.
    PlExact(GraphAtlas),
    /// Constant Hessian; measures are invariants times preimage volumes.
    Quadratic(Quadratic),
}

/// The measures `Θ_0, ..., Θ_n` of one function, queryable on windows.
#[derive(Clone, Debug)]
pub struct HessianMeasureAtlas {
    pub source: ConvexFunction,
    pub mode: MeasureMode,
    /// Hessian invariants are `e_k(λ) / C(n,k)`; this is the only convention
    /// under which the smooth and polyhedral definitions agree.
    pub binomial_normalization: bool,
}

impl HessianMeasureAtlas {
    pub fn new(u: &ConvexFunction) -> Result<Self> {
        let mode = match u {
            ConvexFunction::Quadratic(q) => MeasureMode::Quadratic(q.clone()),
            ConvexFunction::Grid(_) => return Err(Error::UnsupportedFamily("no Hessian measures for grid-sampled functions")),
            _ => MeasureMode::PlExact(graph_atlas(u)?),
        };
        Ok(Self { source: u.clone(), mode, binomial_normalization: true })
    }

    pub fn dim(&self) -> usize {
        self.source.dim()
    }

    /// `(Θ_0(η), ..., Θ_n(η))`.
    pub fn measures(&self, window: &Window) -> Result<Vec<f64>> {
        check_dim(self.dim(), window.dim())?;
        let (xp, yp) = (window.x.polytope(), window.y.polytope());
        self.product_measures(&xp, &yp)
    }

    fn product_measures(&self, xp: &Polyhedron, yp: &Polyhedron) -> Result<Vec<f64>> {
        let n = self.dim();
        match &self.mode {
            MeasureMode::PlExact(atlas) => {
                let mut theta = vec![0.0; n + 1];
                for st in atlas.measure_carrying() {
                    let j = st.dual_dim;
                    let fx = measure_k(&st.primal.intersect(xp)?, st.primal_dim)?;
                    if fx == 0.0 {
                        continue;
                    }
                    let gy = measure_k(&st.dual.intersect(yp)?, j)?;
                    theta[n - j] += st.span.unwrap_or(0.0) * fx * gy / binomial(n, j);
                }
                Ok(theta)
            }
            MeasureMode::Quadratic(q) => {
                let region = xp.intersect(&crate::subdiff::gradient_preimage(q, yp))?;
                let vol = measure_k(&region, n)?;
                let inv = normalized_invariants(q.a());
                Ok((0..=n).map(|i| inv[n - i] * vol).collect())
            }
        }
    }

    /// `table[i][a][b] = Θ_i(xs[a] × ys[b])`.
    /// Per-cell measures for slab partitions `xs` of `x_all` and `ys` of `y_all`.
    fn cell_table(&self, x_all: &Polyhedron, xs: &[Polyhedron], y_all: &Polyhedron, ys: &[Polyhedron]) -> Result<Vec<Vec<Vec<f64>>>> {
        let n = self.dim();
        let mut table = vec![vec![vec![0.0; ys.len()]; xs.len()]; n + 1];
        // Clip once to the whole window, then visit only slabs overlapping the clipped range.
        let per_slab = |set: &Polyhedron, all: &Polyhedron, slabs: &[Polyhedron], k: usize| -> Result<Vec<f64>> {
            let clipped = set.intersect(all)?;
            if measure_k(&clipped, k)? == 0.0 {
                return Ok(vec![0.0; slabs.len()]);
            }
            let (lo, hi) = first_coordinate_range(&clipped);
            slabs
                .iter()
                .map(|s| {
                    let (sl, sh) = first_coordinate_range(s);
                    if sh < lo - 1e-9 || sl > hi + 1e-9 {
                        Ok(0.0)
                    } else {
                        measure_k(&clipped.intersect(s)?, k)
                    }
                })
                .collect()
        };
        match &self.mode {
            MeasureMode::PlExact(atlas) => {
                for st in atlas.measure_carrying() {
                    let j = st.dual_dim;
                    let w = st.span.unwrap_or(0.0) / binomial(n, j);
                    let fx = per_slab(&st.primal, x_all, xs, st.primal_dim)?;
                    if fx.iter().all(|&v| v == 0.0) {
                        continue;
                    }
                    let gy = per_slab(&st.dual, y_all, ys, j)?;
                    for (a, fa) in fx.iter().enumerate() {
                        for (b, gb) in gy.iter().enumerate() {
                            table[n - j][a][b] += w * fa * gb;
                        }
                    }
                }
            }
            MeasureMode::Quadratic(_) => {
                for (a, x) in xs.iter().enumerate() {
                    for (b, y) in ys.iter().enumerate() {
                        let m = self.product_measures(x, y)?;
                        for i in 0..=n {
                            table[i][a][b] = m[i];
                        }
                    }
                }
            }
        }
        Ok(table)
    }
}

/// Range of the first coordinate over the vertices of a bounded polyhedron.
fn first_coordinate_range(p: &Polyhedron) -> (f64, f64) {
    p.vertices().iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v[0]), hi.max(v[0])))
}

/// `Θ_0..Θ_n` of a piecewise-linear function on a window.
pub fn measures_pl(u: &ConvexFunction, window: &Window) -> Result<Vec<f64>> {
    if !u.is_piecewise_linear() {
        return Err(Error::UnsupportedFamily("measures_pl needs a piecewise-linear function"));
    }
    HessianMeasureAtlas::new(u)?.measures(window)
}

/// Density of `Θ_i` with respect to `H^n` on the graph at `(x, y)`.
pub fn density(atlas: &HessianMeasureAtlas, x: &Vector, y: &Vector, i: usize) -> Result<f64> {
    let n = atlas.dim();
    check_dim(n, x.len())?;
    check_dim(n, y.len())?;
    match &atlas.mode {
        MeasureMode::PlExact(g) => {
            let hit: Vec<&FacePair> = g.strata.iter().filter(|s| s.contains(x, y)).collect();
            if hit.is_empty() {
                return Err(Error::OffGraph);
            }
            // Prefer the stratum of largest dual dimension that carries measure:
            // on a boundary point it is the one whose relative interior is closest.
            let best = hit.iter().filter(|s| s.carries_measure()).max_by_key(|s| s.dual_dim);
            Ok(match best {
                Some(s) if n - s.dual_dim == i => s.span.unwrap_or(0.0) / binomial(n, s.dual_dim),
                _ => 0.0,
            })
        }
        MeasureMode::Quadratic(q) => {
            let g = q.gradient(x);
            if (&g - y).amax() > 1e-9 * (1.0 + g.amax()) {
                return Err(Error::OffGraph);
            }
            // On the graph {(x, ∇u(x))} with area element sqrt(det(I + A²)).
            let a = q.a();
            let jac = (crate::linalg::Matrix::identity(n, n) + a * a).determinant().sqrt();
            Ok(normalized_invariants(a)[n - i] / jac)
        }
    }
}

/// `H^n` of the projections of `η ∩ Γ_u` onto the x and y factors, computed
/// cell by cell from the pieces instead of the atlas: a.e. point of the
/// domain has a unique active piece, so the x-projection is the union of the
/// cells whose slope lies in the y-window. The y-projection is the same
/// computation for the conjugate on the swapped window.
pub fn projection_measures(u: &ConvexFunction, window: &Window) -> Result<(f64, f64)> {
    let px = x_projection(u, window)?;
    let py = x_projection(&conjugate(u)?, &window.swapped())?;
    Ok((px, py))
}

fn x_projection(u: &ConvexFunction, window: &Window) -> Result<f64> {
    let m = u.as_max_affine().ok_or(Error::UnsupportedFamily("projection measures need a piecewise-linear function"))?;
    let n = m.dim();
    let (xp, yr) = (window.x.polytope(), window.y.polytope());
    let base = m.domain().intersect(&xp)?;
    let mut total = 0.0;
    for (j, pj) in m.pieces().iter().enumerate() {
        if !yr.contains(&pj.slope) {
            continue;
        }
        let mut hs = base.halfspaces().to_vec();
        for (l, pl) in m.pieces().iter().enumerate() {
            if l != j {
                hs.extend(Halfspace::new(&pl.slope - &pj.slope, pj.intercept - pl.intercept));
            }
        }
        total += measure_k(&Polyhedron::from_halfspaces(n, hs), n)?;
    }
    Ok(total)
}

/// Largest one-cell-dilated discrepancy between two measure atlases over a
/// `resolution × resolution` partition of a bounded window (slabs along the
/// first coordinate of each factor), one value per index `i`.
///
/// For a cell `c` with neighbourhood `N(c)` (the cell and its neighbours) the
/// discrepancy is `max(Θ^A(c) - Θ^B(N(c)), Θ^B(c) - Θ^A(N(c)), 0)`.
pub fn measure_distance(
    a: &HessianMeasureAtlas,
    b: &HessianMeasureAtlas,
    window: &Window,
    resolution: usize,
) -> Result<Vec<f64>> {
    check_dim(a.dim(), b.dim())?;
    check_dim(a.dim(), window.dim())?;
    let n = a.dim();
    let res = resolution.max(1);
    let slabs = |region: &crate::subdiff::Region| -> Result<Vec<Polyhedron>> {
        let (lo, hi) = region
            .bounding_box()
            .ok_or_else(|| Error::DegenerateInput("measure_distance needs a bounded window".into()))?;
        let p = region.polytope();
        let width = (hi[0] - lo[0]) / res as f64;
        Ok((0..res)
            .map(|k| {
                let l = lo[0] + k as f64 * width;
                let h = if k + 1 == res { hi[0] } else { l + width };
                let e = unit(n, 0);
                p.with_halfspace(Halfspace::new(e.clone(), h).expect("unit"))
                    .with_halfspace(Halfspace::new(-e, -l).expect("unit"))
            })
            .collect())
    };
    let (xs, ys) = (slabs(&window.x)?, slabs(&window.y)?);
    let (xp, yp) = (window.x.polytope(), window.y.polytope());
    let ta = a.cell_table(&xp, &xs, &yp, &ys)?;
    let tb = b.cell_table(&xp, &xs, &yp, &ys)?;
    let hood = |t: &Vec<Vec<f64>>, p: usize, q: usize| -> f64 {
        let mut s = 0.0;
        for pp in p.saturating_sub(1)..=(p + 1).min(res - 1) {
            for qq in q.saturating_sub(1)..=(q + 1).min(res - 1) {
                s += t[pp][qq];
            }
        }
        s
    };
    Ok((0..=n)
        .map(|i| {
            let mut worst: f64 = 0.0;
            for p in 0..res {
                for q in 0..res {
                    let d1 = ta[i][p][q] - hood(&tb[i], p, q);
                    let d2 = tb[i][p][q] - hood(&ta[i], p, q);
                    worst = worst.max(d1).max(d2);
                }
            }
            worst
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convexfn::{transform, AffinePiece};
    use crate::linalg::{vector, Matrix};
    use crate::subdiff::Region;

    fn abs1() -> ConvexFunction {
        ConvexFunction::support(Polyhedron::interval(-1.0, 1.0)).unwrap()
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < tol)
    }

    #[test]
    fn examples() {
        let w = Window::polys(Polyhedron::interval(-1.0, 1.0), Polyhedron::interval(-2.0, 2.0)).unwrap();
        assert!(close(&measures_pl(&abs1(), &w).unwrap(), &[2.0, 2.0], 1e-12));

        let pt = ConvexFunction::indicator(Polyhedron::point(&vector(&[0.0]))).unwrap();
        let w = Window::polys(Polyhedron::interval(-1.0, 1.0), Polyhedron::interval(-1.0, 1.0)).unwrap();
        assert!(close(&measures_pl(&pt, &w).unwrap(), &[2.0, 0.0], 1e-12));

        let hinge = ConvexFunction::max_affine(
            vec![AffinePiece::new(vector(&[0.0, 0.0]), 0.0), AffinePiece::new(vector(&[1.0, 0.0]), -1.0)],
            Polyhedron::whole(2),
        )
        .unwrap();
        let w = Window::new(Region::Poly(Polyhedron::box_(&[0.0, 0.0], &[2.0, 2.0])), Region::All(2)).unwrap();
        assert!(close(&measures_pl(&hinge, &w).unwrap(), &[0.0, 1.0, 4.0], 1e-12));
    }

    #[test]
    fn densities() {
        let at = HessianMeasureAtlas::new(&abs1()).unwrap();
        assert_eq!(density(&at, &vector(&[0.0]), &vector(&[0.5]), 0).unwrap(), 1.0);
        assert_eq!(density(&at, &vector(&[0.5]), &vector(&[1.0]), 1).unwrap(), 1.0);
        assert_eq!(density(&at, &vector(&[0.5]), &vector(&[1.0]), 0).unwrap(), 0.0);
        assert!(matches!(density(&at, &vector(&[0.5]), &vector(&[0.0]), 0), Err(Error::OffGraph)));
    }

    #[test]
    fn quadratic_mode_matches_invariants() {
        let q = ConvexFunction::Quadratic(Quadratic::half_norm_squared(3));
        let at = HessianMeasureAtlas::new(&q).unwrap();
        let w = Window::new(Region::Poly(Polyhedron::cube(3)), Region::All(3)).unwrap();
        assert!(close(&at.measures(&w).unwrap(), &[1.0; 4], 1e-12));
    }

    #[test]
    fn projections_agree_with_extreme_measures() {
        let u = ConvexFunction::support(Polyhedron::from_points(
            2,
            &[vector(&[0.0, 0.0]), vector(&[1.0, 0.2]), vector(&[0.3, 1.0])],
        ))
        .unwrap();
        let w = Window::polys(Polyhedron::box_(&[-1.0, -0.5], &[0.7, 1.2]), Polyhedron::box_(&[0.1, -0.1], &[0.8, 0.9]))
            .unwrap();
        let theta = measures_pl(&u, &w).unwrap();
        let (px, py) = projection_measures(&u, &w).unwrap();
        assert!((theta[2] - px).abs() < 1e-12 && (theta[0] - py).abs() < 1e-12, "{theta:?} {px} {py}");
    }

    #[test]
    fn distance_is_zero_for_identical_and_small_for_shifts() {
        let u = abs1();
        let a = HessianMeasureAtlas::new(&u).unwrap();
        let w = Window::polys(Polyhedron::interval(-1.0, 1.0), Polyhedron::interval(-2.0, 2.0)).unwrap();
        assert!(measure_distance(&a, &a, &w, 16).unwrap().iter().all(|&d| d == 0.0));
        let moved = transform(&u, &Matrix::identity(1, 1), &vector(&[1e-3])).unwrap();
        let b = HessianMeasureAtlas::new(&moved).unwrap();
        let d = measure_distance(&a, &b, &w, 16).unwrap();
        assert!(d.iter().all(|&v| v <= 2e-3 + 1e-12), "{d:?}");
    }
}
