//! Quadrature of `∫ ζ(u(x), x, y) dΘ_i(u, (x, y))` over the strata of the graph.

use super::kernel::{KernelFn, Quadric};
use super::polar::integrate_with_kinks;
use crate::convexfn::{AffinePiece, Quadratic};
use crate::error::{Error, Result};
use crate::geometry::{integrate_product, simplices, Cubature, Estimate, Halfspace, Polyhedron};
use crate::hessmeasure::normalized_invariants;
use crate::linalg::{binomial, Vector};
use crate::subdiff::{gradient_preimage, GraphAtlas};

/// Cuts each polytope of `parts` by the given hyperplanes, keeping pieces of
/// full relative dimension.
pub(crate) fn split(parts: Vec<Polyhedron>, planes: &[(Vector, f64)]) -> Vec<Polyhedron> {
    let mut parts = parts;
    for (w, b) in planes {
        let (Some(lo), Some(hi)) = (Halfspace::new(w.clone(), *b), Halfspace::new(-w, -b)) else {
            continue;
        };
        let mut next = Vec::with_capacity(parts.len());
        for p in parts {
            let tol = 1e-10 * (1.0 + b.abs()) * (1.0 + w.norm());
            let (mn, mx) = p.vertices().iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(mn, mx), v| {
                let s = w.dot(v) - b;
                (mn.min(s), mx.max(s))
            });
            if mn < -tol && mx > tol {
                let d = p.dimension();
                for half in [p.with_halfspace(lo.clone()), p.with_halfspace(hi.clone())] {
                    if !half.is_empty() && half.dimension() == d {
                        next.push(half);
                    }
                }
            } else {
                next.push(p);
            }
        }
        parts = next;
    }
    parts
}

/// Whether some sphere `|x| = r` passes through the interior of the polytope `p`.
fn crosses_sphere(p: &Polyhedron, radii: &[f64]) -> bool {
    let v = p.vertices();
    let far = v.iter().map(|x| x.norm()).fold(0.0, f64::max);
    let near = if p.contains(&Vector::zeros(p.dim())) {
        0.0
    } else {
        let mut d = f64::INFINITY;
        for (i, a) in v.iter().enumerate() {
            for b in &v[i + 1..] {
                let e = b - a;
                let s = (-a.dot(&e) / e.norm_squared().max(f64::MIN_POSITIVE)).clamp(0.0, 1.0);
                d = d.min((a + &e * s).norm());
            }
        }
        d
    };
    radii.iter().any(|&r| near < r && r < far)
}

/// Splits one-dimensional parts where they cross a sphere `|x| = r`.
fn cut_segments_at_spheres(parts: Vec<Polyhedron>, radii: &[f64]) -> Vec<Polyhedron> {
    if radii.is_empty() {
        return parts;
    }
    let mut out = Vec::with_capacity(parts.len());
    for p in parts {
        let v = p.vertices();
        if v.len() != 2 || p.dimension() != Some(1) {
            out.push(p);
            continue;
        }
        let (a, d) = (&v[0], &v[1] - &v[0]);
        let mut planes = Vec::new();
        for &r in radii {
            // |a + s d|² = r²
            let (qa, qb, qc) = (d.norm_squared(), 2.0 * a.dot(&d), a.norm_squared() - r * r);
            let disc = qb * qb - 4.0 * qa * qc;
            if disc <= 0.0 {
                continue;
            }
            for s in [(-qb - disc.sqrt()) / (2.0 * qa), (-qb + disc.sqrt()) / (2.0 * qa)] {
                if s > 1e-12 && s < 1.0 - 1e-12 {
                    planes.push((d.clone(), d.dot(&(a + &d * s))));
                }
            }
        }
        out.extend(split(vec![p], &planes));
    }
    out
}

/// Clips `set` to an optional support and checks that the result is bounded.
fn clip(set: &Polyhedron, support: Option<&Polyhedron>, k: usize, which: &'static str) -> Result<Option<Polyhedron>> {
    let clipped = match support {
        Some(s) => set.intersect(s)?,
        None => set.clone(),
    };
    if clipped.is_empty() || clipped.dimension().is_none_or(|d| d < k) {
        return Ok(None);
    }
    if !clipped.is_bounded() {
        return Err(Error::KernelNotCompact(which));
    }
    Ok(Some(clipped))
}

fn integrate_parts(
    xs: &[Polyhedron],
    ysimp: &[Vec<Vector>],
    f: &dyn Fn(&Vector, &Vector) -> f64,
    cfg: &Cubature,
) -> Result<Estimate> {
    let mut out = Estimate::default();
    for p in xs {
        for sf in simplices(p)? {
            for sg in ysimp {
                out += integrate_product(&sf, sg, f, cfg);
            }
        }
    }
    Ok(out)
}

pub(crate) fn check_converged(e: Estimate) -> Result<f64> {
    if e.error > 1e-6 * e.value.abs() + 1e-10 {
        return Err(Error::QuadratureNotConverged { estimate: e.error / e.value.abs().max(f64::MIN_POSITIVE) });
    }
    Ok(e.value)
}

/// Sum over strata with `dim G = n - i` of `(span / C(n, n-i)) ∫_F ∫_G ζ`.
pub(crate) fn pl_integral(k: &dyn KernelFn, i: usize, atlas: &GraphAtlas, cfg: &Cubature) -> Result<Estimate> {
    let n = atlas.dim;
    let j = n - i;
    let (sx, sy) = (k.x_support(n), k.y_support(n));
    let mut total = Estimate::default();
    for st in atlas.measure_carrying().filter(|s| s.dual_dim == j) {
        let span = st.span.unwrap_or(0.0);
        if span == 0.0 {
            continue;
        }
        let Some(f) = clip(&st.primal, sx.as_ref(), st.primal_dim, "x")? else { continue };
        let Some(g) = clip(&st.dual, sy.as_ref(), j, "y")? else { continue };
        let piece = &st.affine;
        let (x_planes, y_planes) = (k.x_planes(n, piece), k.y_planes(n, piece, &st.primal_point));
        let e = if n == 2 && j == 0 && crosses_sphere(&f, &k.x_spheres()) {
            let y = &g.vertices()[0];
            let spheres: Vec<Quadric> = k.x_spheres().into_iter().map(|r| Quadric::sphere(n, r)).collect();
            integrate_with_kinks(&f, &x_planes, &spheres, &|x| k.eval(piece.eval(x), x, y), cfg)?
        } else if n == 2 && j == 2 && crosses_sphere(&g, &k.y_spheres()) {
            let x = &f.vertices()[0];
            let t = piece.eval(x);
            let spheres: Vec<Quadric> = k.y_spheres().into_iter().map(|r| Quadric::sphere(n, r)).collect();
            integrate_with_kinks(&g, &y_planes, &spheres, &|y| k.eval(t, x, y), cfg)?
        } else {
            let xs = cut_segments_at_spheres(split(vec![f], &x_planes), &k.x_spheres());
            let ys = cut_segments_at_spheres(split(vec![g], &y_planes), &k.y_spheres());
            let ysimp = ys.iter().map(simplices).collect::<Result<Vec<_>>>()?.concat();
            integrate_parts(&xs, &ysimp, &|x, y| k.eval(piece.eval(x), x, y), cfg)?
        };
        let w = span / binomial(n, j);
        total += Estimate { value: w * e.value, error: w * e.error };
    }
    Ok(total)
}

/// `∫ ζ(q(x), x, ∇q(x)) [D²q]_{n-i} dx` over the region where both factors can
/// be nonzero.
pub(crate) fn quadratic_integral(k: &dyn KernelFn, i: usize, q: &Quadratic, cfg: &Cubature) -> Result<Estimate> {
    let n = q.dim();
    let weight = normalized_invariants(q.a())[n - i];
    if weight == 0.0 {
        return Ok(Estimate::default());
    }
    let mut region = Polyhedron::whole(n);
    if let Some(s) = k.y_support(n) {
        region = region.intersect(&gradient_preimage(q, &s))?;
    }
    let Some(region) = clip(&region, k.x_support(n).as_ref(), n, "x")? else {
        return Ok(Estimate::default());
    };
    let flat = AffinePiece { slope: Vector::zeros(n), intercept: 0.0 };
    let mut planes = k.x_planes(n, &flat);
    for (w, c) in k.y_planes(n, &flat, &Vector::zeros(n)) {
        // <w, A x + b> = c
        planes.push((q.a().transpose() * &w, c - w.dot(q.b())));
    }
    let f = |x: &Vector| k.eval(q.eval(x), x, &q.gradient(x));
    let e = if n <= 2 {
        integrate_with_kinks(&region, &planes, &k.quadric_kinks(q), &f, cfg)?
    } else {
        let xs = split(vec![region], &planes);
        integrate_parts(&xs, &[vec![Vector::zeros(0)]], &|x, _| f(x), cfg)?
    };
    Ok(Estimate { value: weight * e.value, error: weight * e.error })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::vector;

    #[test]
    fn split_square_by_diagonal_and_axis() {
        let sq = Polyhedron::box_(&[-1.0, -1.0], &[1.0, 1.0]);
        let parts = split(vec![sq], &[(vector(&[1.0, 1.0]), 0.0), (vector(&[1.0, 0.0]), 0.0), (vector(&[0.0, 1.0]), 5.0)]);
        assert_eq!(parts.len(), 4);
        let area: f64 = parts.iter().map(|p| crate::geometry::polytope_volume(p, 2).unwrap()).sum();
        assert!((area - 4.0).abs() < 1e-12);
    }
}
