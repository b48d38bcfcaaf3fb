//! Hausdorff measures, triangulations and quermassintegrals of polytopes.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{self, affine_hull, binomial, unit_ball_volume, Matrix, Vector};

use super::polyhedron::Polyhedron;

/// A measured set: its affine dimension and `H^dim` value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Measured {
    pub dim: usize,
    pub value: f64,
}

/// Triangulation of a bounded polytope into simplices of its own dimension.
///
/// Each simplex is returned as `dim + 1` points in ambient coordinates.
pub fn simplices(p: &Polyhedron) -> Result<Vec<Vec<Vector>>> {
    if p.is_empty() {
        return Ok(Vec::new());
    }
    if !p.is_bounded() {
        return Err(Error::UnboundedPolyhedron);
    }
    let n = p.dim();
    let verts = p.vertices();
    let (origin, basis, _) = affine_hull(n, verts);
    let k = basis.len();
    match k {
        0 => Ok(vec![vec![verts[0].clone()]]),
        1 => {
            let d = &basis[0];
            let (lo, hi) = verts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                let t = d.dot(&(v - &origin));
                (lo.min(t), hi.max(t))
            });
            Ok(vec![vec![&origin + d * lo, &origin + d * hi]])
        }
        2 => {
            let ring = ordered_polygon(verts, &origin, &basis[0], &basis[1]);
            Ok((1..ring.len() - 1)
                .map(|i| vec![ring[0].clone(), ring[i].clone(), ring[i + 1].clone()])
                .collect())
        }
        3 if n == 3 => {
            let c = linalg::centroid(n, verts);
            let mut out = Vec::new();
            for facet in facets_3d(p) {
                for i in 1..facet.len() - 1 {
                    out.push(vec![c.clone(), facet[0].clone(), facet[i].clone(), facet[i + 1].clone()]);
                }
            }
            Ok(out)
        }
        _ => Err(Error::DegenerateInput(format!("triangulation of a {k}-polytope in R^{n}"))),
    }
}

/// Vertices of a planar convex polygon sorted by angle around `origin`
/// in the plane spanned by `e1, e2`.
fn ordered_polygon(verts: &[Vector], origin: &Vector, e1: &Vector, e2: &Vector) -> Vec<Vector> {
    let mut with_angle: Vec<(f64, Vector)> = verts
        .iter()
        .map(|v| {
            let d = v - origin;
            (d.dot(e2).atan2(d.dot(e1)), v.clone())
        })
        .collect();
    with_angle.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    with_angle.into_iter().map(|(_, v)| v).collect()
}

/// Facets of a full-dimensional 3-polytope as ordered vertex rings, with outer normals.
fn facets_3d_with_normals(p: &Polyhedron) -> Vec<(Vector, Vec<Vector>)> {
    let verts = p.vertices();
    let mut seen: Vec<Vec<usize>> = Vec::new();
    let mut out = Vec::new();
    for h in p.halfspaces() {
        let ids: Vec<usize> = (0..verts.len()).filter(|&i| h.is_tight(&verts[i])).collect();
        if ids.len() < 3 || seen.contains(&ids) {
            continue;
        }
        let pts: Vec<Vector> = ids.iter().map(|&i| verts[i].clone()).collect();
        let (o, b, _) = affine_hull(3, &pts);
        if b.len() != 2 {
            continue;
        }
        seen.push(ids);
        out.push((h.normal.clone(), ordered_polygon(&pts, &o, &b[0], &b[1])));
    }
    out
}

fn facets_3d(p: &Polyhedron) -> Vec<Vec<Vector>> {
    facets_3d_with_normals(p).into_iter().map(|(_, f)| f).collect()
}

/// `H^k` volume of a `k`-simplex given by its vertices.
pub fn simplex_volume(s: &[Vector]) -> f64 {
    let k = s.len() - 1;
    if k == 0 {
        return 1.0;
    }
    let e = Matrix::from_columns(&s[1..].iter().map(|v| v - &s[0]).collect::<Vec<_>>());
    let g = e.transpose() * &e;
    let det = g.determinant().max(0.0);
    let fact: f64 = (1..=k).map(|i| i as f64).product();
    det.sqrt() / fact
}

/// Affine dimension and Hausdorff measure of a polyhedron (empty: `H^0 = 0`).
pub fn hausdorff_measure(p: &Polyhedron) -> Result<Measured> {
    if p.is_empty() {
        return Ok(Measured { dim: 0, value: 0.0 });
    }
    let dim = p.dimension().unwrap_or(0);
    if !p.is_bounded() {
        return Err(Error::UnboundedPolyhedron);
    }
    let value = simplices(p)?.iter().map(|s| simplex_volume(s)).sum();
    Ok(Measured { dim, value })
}

/// `H^k` measure of `p`, which must be bounded. Sets of lower dimension than
/// `k` have measure zero; the empty set has measure zero.
pub fn polytope_volume(p: &Polyhedron, k: usize) -> Result<f64> {
    if p.is_empty() {
        return Ok(0.0);
    }
    let m = hausdorff_measure(p)?;
    if m.dim < k {
        Ok(0.0)
    } else if m.dim == k {
        Ok(m.value)
    } else {
        Err(Error::DegenerateInput(format!(
            "set has dimension {} but H^{} was requested",
            m.dim, k
        )))
    }
}

/// Intrinsic volumes `V_0..V_d` of a bounded polytope of affine dimension `d <= 3`.
pub fn intrinsic_volumes(p: &Polyhedron) -> Result<Vec<f64>> {
    if p.is_empty() {
        return Ok(vec![0.0]);
    }
    if !p.is_bounded() {
        return Err(Error::UnboundedPolyhedron);
    }
    let n = p.dim();
    let verts = p.vertices();
    let (origin, basis, _) = affine_hull(n, verts);
    let d = basis.len();
    let vol = hausdorff_measure(p)?.value;
    Ok(match d {
        0 => vec![1.0],
        1 => vec![1.0, vol],
        2 => {
            let ring = ordered_polygon(verts, &origin, &basis[0], &basis[1]);
            let perim: f64 = (0..ring.len()).map(|i| (&ring[(i + 1) % ring.len()] - &ring[i]).norm()).sum();
            vec![1.0, perim / 2.0, vol]
        }
        3 if n == 3 => {
            let facets = facets_3d_with_normals(p);
            let area: f64 = facets
                .iter()
                .map(|(_, ring)| {
                    (1..ring.len() - 1)
                        .map(|i| simplex_volume(&[ring[0].clone(), ring[i].clone(), ring[i + 1].clone()]))
                        .sum::<f64>()
                })
                .sum();
            // Mean-width term: sum over edges of length times the exterior angle.
            let mut v1 = 0.0;
            for a in 0..facets.len() {
                for b in a + 1..facets.len() {
                    let shared: Vec<&Vector> = facets[a]
                        .1
                        .iter()
                        .filter(|v| facets[b].1.iter().any(|w| (*v - w).amax() < 1e-9))
                        .collect();
                    if shared.len() == 2 {
                        let len = (shared[0] - shared[1]).norm();
                        let ext = facets[a].0.dot(&facets[b].0).clamp(-1.0, 1.0).acos();
                        v1 += len * ext / (2.0 * PI);
                    }
                }
            }
            vec![1.0, v1, area / 2.0, vol]
        }
        _ => return Err(Error::DegenerateInput(format!("intrinsic volumes of a {d}-polytope"))),
    })
}

/// Quermassintegrals `(W_0, ..., W_n)` normalized by
/// `H^n(P + rB) = sum_j C(n,j) W_j r^j`. The empty set gives all zeros.
pub fn quermassintegrals(p: &Polyhedron) -> Result<Vec<f64>> {
    let n = p.dim();
    if p.is_empty() {
        return Ok(vec![0.0; n + 1]);
    }
    let v = intrinsic_volumes(p)?;
    let mut w = vec![0.0; n + 1];
    for (j, vj) in v.iter().enumerate() {
        // W_{n-j} = kappa_{n-j} V_j / C(n, j)
        w[n - j] = unit_ball_volume(n - j) * vj / binomial(n, j);
    }
    Ok(w)
}

/// Absolute determinant of the matrix with columns `basis_f` then `basis_g`.
pub fn span_factor(basis_f: &[Vector], basis_g: &[Vector]) -> Result<f64> {
    let n = basis_f.first().or(basis_g.first()).map(|v| v.len()).unwrap_or(0);
    if basis_f.len() + basis_g.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: basis_f.len() + basis_g.len() });
    }
    for v in basis_f.iter().chain(basis_g) {
        if v.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: v.len() });
        }
    }
    for basis in [basis_f, basis_g] {
        for (i, a) in basis.iter().enumerate() {
            for (j, b) in basis.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                if (a.dot(b) - target).abs() > 1e-10 {
                    return Err(Error::DegenerateInput("basis is not orthonormal".into()));
                }
            }
        }
    }
    if n == 0 {
        return Ok(1.0);
    }
    let cols: Vec<Vector> = basis_f.iter().chain(basis_g).cloned().collect();
    Ok(Matrix::from_columns(&cols).determinant().abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::vector;

    #[test]
    fn basic_volumes() {
        assert!((polytope_volume(&Polyhedron::cube(2), 2).unwrap() - 1.0).abs() < 1e-14);
        assert!((polytope_volume(&Polyhedron::interval(0.0, 2.0), 1).unwrap() - 2.0).abs() < 1e-14);
        let t = Polyhedron::from_points(2, &[vector(&[0.0, 0.0]), vector(&[1.0, 0.0]), vector(&[0.0, 1.0])]);
        assert!((polytope_volume(&t, 2).unwrap() - 0.5).abs() < 1e-14);
        assert!((polytope_volume(&Polyhedron::cube(3), 3).unwrap() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn unbounded_volume_is_error() {
        let p = Polyhedron::new(1, &[(vec![1.0], 0.0)]).unwrap();
        assert_eq!(polytope_volume(&p, 1), Err(Error::UnboundedPolyhedron));
        assert_eq!(polytope_volume(&Polyhedron::empty(2), 2), Ok(0.0));
    }

    #[test]
    fn quermass_examples() {
        let w = quermassintegrals(&Polyhedron::cube(2)).unwrap();
        assert!((w[0] - 1.0).abs() < 1e-12 && (w[1] - 2.0).abs() < 1e-12 && (w[2] - PI).abs() < 1e-12);
        let w = quermassintegrals(&Polyhedron::point(&vector(&[0.3]))).unwrap();
        assert_eq!(w, vec![0.0, 2.0]);
        let seg = Polyhedron::from_points(2, &[vector(&[0.0, 0.0]), vector(&[1.0, 0.0])]);
        let w = quermassintegrals(&seg).unwrap();
        assert!(w[0].abs() < 1e-14 && (w[1] - 1.0).abs() < 1e-12 && (w[2] - PI).abs() < 1e-12);
        assert_eq!(quermassintegrals(&Polyhedron::empty(2)).unwrap(), vec![0.0; 3]);
    }

    #[test]
    fn cube_quermass() {
        // H^3(C + rB) = 1 + 6r + 3 pi r^2 + 4/3 pi r^3
        let w = quermassintegrals(&Polyhedron::cube(3)).unwrap();
        assert!((w[0] - 1.0).abs() < 1e-12);
        assert!((w[1] - 2.0).abs() < 1e-12);
        assert!((w[2] - PI).abs() < 1e-12);
        assert!((w[3] - 4.0 * PI / 3.0).abs() < 1e-12);
    }

    #[test]
    fn span_factor_examples() {
        let e1 = vector(&[1.0, 0.0]);
        let e2 = vector(&[0.0, 1.0]);
        let d = vector(&[1.0, 1.0]) / 2f64.sqrt();
        assert!((span_factor(std::slice::from_ref(&e1), &[e2]).unwrap() - 1.0).abs() < 1e-15);
        assert!((span_factor(std::slice::from_ref(&e1), std::slice::from_ref(&d)).unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(span_factor(std::slice::from_ref(&e1), std::slice::from_ref(&e1)).unwrap(), 0.0);
        assert_eq!(span_factor(std::slice::from_ref(&d), std::slice::from_ref(&e1)).unwrap(), span_factor(std::slice::from_ref(&e1), &[d]).unwrap());
        assert!(matches!(span_factor(std::slice::from_ref(&e1), &[]), Err(Error::DimensionMismatch { .. })));
    }
}
