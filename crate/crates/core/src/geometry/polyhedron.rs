//! Convex polyhedra in H-representation with a lazily derived V-representation.
//!
//! The canonical data is a list of half-spaces `n . x <= b` with unit normals.
//! Vertices, extreme rays and the lineality space are derived on demand by
//! brute-force intersection of constraint subsets, which is adequate for the
//! ambient dimensions used here (at most four, counting lifted epigraphs).

use std::sync::OnceLock;

use itertools::Itertools;
use nalgebra::DVector;

use crate::error::{check_dim, Result};
use crate::linalg::{self, max_abs, null_direction, solve_square, span_basis, Matrix, Vector};

/// Feasibility / tightness tolerance on normalized constraints, scaled by the
/// magnitude of the point being tested.
pub fn feas_tol(x: &Vector) -> f64 {
    1e-9 * (1.0 + max_abs(x))
}

fn same_point(a: &Vector, b: &Vector) -> bool {
    (a - b).amax() <= 1e-8 * (1.0 + max_abs(a).max(max_abs(b)))
}

/// Closed half-space `normal . x <= offset` with `|normal| = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct Halfspace {
    pub normal: Vector,
    pub offset: f64,
}

impl Halfspace {
    /// Normalizes `normal`; returns `None` for a zero normal.
    pub fn new(normal: Vector, offset: f64) -> Option<Self> {
        let len = normal.norm();
        if !(len > 1e-14) || !offset.is_finite() {
            return None;
        }
        Some(Self {
            normal: normal / len,
            offset: offset / len,
        })
    }

    /// Signed violation `n . x - b` (non-positive inside).
    pub fn excess(&self, x: &Vector) -> f64 {
        self.normal.dot(x) - self.offset
    }

    pub fn flipped(&self) -> Self {
        Self {
            normal: -&self.normal,
            offset: -self.offset,
        }
    }

    pub fn is_tight(&self, x: &Vector) -> bool {
        self.excess(x).abs() <= feas_tol(x)
    }
}

/// Derived generator description of a polyhedron:
/// `P = conv(vertices) + cone(rays) + span(lineality)`, with the vertices and
/// rays taken from the pointed part `P ∩ lineality^⊥`.
#[derive(Clone, Debug, Default)]
pub struct VRep {
    pub vertices: Vec<Vector>,
    pub rays: Vec<Vector>,
    pub lineality: Vec<Vector>,
}

/// How a ball is replaced by a polytope.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BallApprox {
    /// Vertices on the sphere: the polytope is contained in the ball.
    Inscribed,
    /// Facets tangent to the sphere: the polytope contains the ball.
    Circumscribed,
}

#[derive(Debug)]
pub struct Polyhedron {
    dim: usize,
    halfspaces: Vec<Halfspace>,
    infeasible: bool,
    vrep: OnceLock<VRep>,
}

impl Clone for Polyhedron {
    fn clone(&self) -> Self {
        let vrep = OnceLock::new();
        if let Some(v) = self.vrep.get() {
            let _ = vrep.set(v.clone());
        }
        Self {
            dim: self.dim,
            halfspaces: self.halfspaces.clone(),
            infeasible: self.infeasible,
            vrep,
        }
    }
}

impl PartialEq for Polyhedron {
    /// Structural equality of the H-representation.
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim
            && self.infeasible == other.infeasible
            && self.halfspaces == other.halfspaces
    }
}

impl Polyhedron {
    pub fn from_halfspaces(dim: usize, halfspaces: Vec<Halfspace>) -> Self {
        Self {
            dim,
            halfspaces,
            infeasible: false,
            vrep: OnceLock::new(),
        }
    }

    /// Builds from raw `(normal, offset)` rows. Zero rows are dropped when
    /// satisfied (`0 <= b`) and make the set empty otherwise.
    pub fn new(dim: usize, rows: &[(Vec<f64>, f64)]) -> Result<Self> {
        let mut hs = Vec::with_capacity(rows.len());
        let mut infeasible = false;
        for (n, b) in rows {
            check_dim(dim, n.len())?;
            match Halfspace::new(linalg::vector(n), *b) {
                Some(h) => hs.push(h),
                None => {
                    if !(*b >= -1e-12) {
                        infeasible = true;
                    }
                }
            }
        }
        let mut p = Self::from_halfspaces(dim, hs);
        p.infeasible = infeasible;
        Ok(p)
    }

    /// Rows in the serialized form `[n_1, ..., n_d, offset]`.
    pub fn from_rows(dim: usize, rows: &[Vec<f64>]) -> Result<Self> {
        let mut parsed = Vec::with_capacity(rows.len());
        for r in rows {
            check_dim(dim + 1, r.len())?;
            parsed.push((r[..dim].to_vec(), r[dim]));
        }
        Self::new(dim, &parsed)
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.halfspaces
            .iter()
            .map(|h| {
                let mut r: Vec<f64> = h.normal.iter().copied().collect();
                r.push(h.offset);
                r
            })
            .collect()
    }

    pub fn whole(dim: usize) -> Self {
        Self::from_halfspaces(dim, Vec::new())
    }

    pub fn empty(dim: usize) -> Self {
        let mut p = Self::whole(dim);
        p.infeasible = true;
        p
    }

    pub fn cube(dim: usize) -> Self {
        Self::box_(&vec![0.0; dim], &vec![1.0; dim])
    }

    /// Axis-parallel box `[lo, hi]`.
    pub fn box_(lo: &[f64], hi: &[f64]) -> Self {
        let dim = lo.len();
        let mut hs = Vec::with_capacity(2 * dim);
        for i in 0..dim {
            hs.push(Halfspace::new(linalg::unit(dim, i), hi[i]).unwrap());
            hs.push(Halfspace::new(-linalg::unit(dim, i), -lo[i]).unwrap());
        }
        Self::from_halfspaces(dim, hs)
    }

    pub fn interval(a: f64, b: f64) -> Self {
        Self::box_(&[a], &[b])
    }

    pub fn point(p: &Vector) -> Self {
        Self::box_(p.as_slice(), p.as_slice())
    }

    /// Convex hull of finitely many points.
    pub fn from_points(dim: usize, points: &[Vector]) -> Self {
        Self::from_generators(dim, points, &[])
    }

    /// Convex hull of `points` plus the cone generated by `rays`, converted to
    /// H-representation. Facet normals are found among hyperplanes spanned by
    /// generator subsets inside the affine hull.
    pub fn from_generators(dim: usize, points: &[Vector], rays: &[Vector]) -> Self {
        if points.is_empty() {
            return Self::empty(dim);
        }
        let p0 = points[0].clone();
        let mut dirs: Vec<Vector> = points.iter().map(|p| p - &p0).collect();
        dirs.extend(rays.iter().cloned());
        let (basis, comp) = span_basis(dim, &dirs);
        let k = basis.len();
        let mut hs = Vec::new();
        for c in &comp {
            let b = c.dot(&p0);
            hs.push(Halfspace { normal: c.clone(), offset: b });
            hs.push(Halfspace { normal: -c, offset: -b });
        }
        if k > 0 {
            let b = Matrix::from_columns(&basis);
            let zp: Vec<Vector> = points.iter().map(|p| b.transpose() * (p - &p0)).collect();
            let zr: Vec<Vector> = rays
                .iter()
                .map(|r| b.transpose() * r)
                .filter(|r| r.norm() > 1e-12)
                .map(|r| r.normalize())
                .collect();
            for (w, off) in hull_facets(k, &zp, &zr) {
                let normal = &b * &w;
                let offset = off + normal.dot(&p0);
                hs.push(Halfspace { normal, offset });
            }
        }
        Self::from_halfspaces(dim, hs)
    }

    /// Polytope approximation of the ball `center + radius * B^n`.
    ///
    /// In one dimension the interval is exact. In two dimensions the regular
    /// `sides`-gon has its vertices (inscribed) or tangent points
    /// (circumscribed) at angles `2 pi k / sides`, so the coordinate axes are
    /// always hit exactly. In three dimensions a latitude/longitude net with
    /// `sides` meridians is used.
    pub fn ball(center: &Vector, radius: f64, sides: usize, mode: BallApprox) -> Self {
        let dim = center.len();
        if dim == 1 {
            return Self::interval(center[0] - radius, center[0] + radius);
        }
        let dirs = sphere_directions(dim, sides.max(3));
        match mode {
            BallApprox::Circumscribed => {
                let hs = dirs
                    .into_iter()
                    .map(|u| {
                        let off = u.dot(center) + radius;
                        Halfspace { normal: u, offset: off }
                    })
                    .collect();
                Self::from_halfspaces(dim, hs)
            }
            BallApprox::Inscribed => {
                let pts: Vec<Vector> = dirs.into_iter().map(|u| center + u * radius).collect();
                Self::from_points(dim, &pts)
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn halfspaces(&self) -> &[Halfspace] {
        &self.halfspaces
    }

    pub fn contains(&self, x: &Vector) -> bool {
        !self.infeasible && self.halfspaces.iter().all(|h| h.excess(x) <= feas_tol(x))
    }

    pub fn intersect(&self, other: &Polyhedron) -> Result<Polyhedron> {
        check_dim(self.dim, other.dim)?;
        let mut hs = self.halfspaces.clone();
        hs.extend(other.halfspaces.iter().cloned());
        let mut p = Self::from_halfspaces(self.dim, hs);
        p.infeasible = self.infeasible || other.infeasible;
        Ok(p)
    }

    pub fn with_halfspace(&self, h: Halfspace) -> Polyhedron {
        let mut hs = self.halfspaces.clone();
        hs.push(h);
        let mut p = Self::from_halfspaces(self.dim, hs);
        p.infeasible = self.infeasible;
        p
    }

    /// Image under `x -> rotation * x + shift` (rotation orthogonal).
    pub fn transform(&self, rotation: &Matrix, shift: &Vector) -> Polyhedron {
        let hs = self
            .halfspaces
            .iter()
            .map(|h| {
                let normal = rotation * &h.normal;
                let offset = h.offset + normal.dot(shift);
                Halfspace { normal, offset }
            })
            .collect();
        let mut p = Self::from_halfspaces(self.dim, hs);
        p.infeasible = self.infeasible;
        p
    }

    pub fn translate(&self, shift: &Vector) -> Polyhedron {
        self.transform(&Matrix::identity(self.dim, self.dim), shift)
    }

    /// Image under `x -> t x` for `t > 0`.
    pub fn scale(&self, t: f64) -> Polyhedron {
        let hs = self
            .halfspaces
            .iter()
            .map(|h| Halfspace { normal: h.normal.clone(), offset: h.offset * t })
            .collect();
        let mut p = Self::from_halfspaces(self.dim, hs);
        p.infeasible = self.infeasible;
        p
    }

    pub fn vrep(&self) -> &VRep {
        self.vrep.get_or_init(|| {
            if self.infeasible {
                VRep::default()
            } else {
                compute_vrep(self.dim, &self.halfspaces)
            }
        })
    }

    pub fn vertices(&self) -> &[Vector] {
        &self.vrep().vertices
    }

    pub fn is_empty(&self) -> bool {
        self.infeasible || self.vrep().vertices.is_empty()
    }

    pub fn is_bounded(&self) -> bool {
        let v = self.vrep();
        v.rays.is_empty() && v.lineality.is_empty()
    }

    /// Affine hull `(origin, direction basis)`; `None` when empty.
    pub fn affine_hull(&self) -> Option<(Vector, Vec<Vector>)> {
        if self.is_empty() {
            return None;
        }
        let v = self.vrep();
        let origin = v.vertices[0].clone();
        let mut dirs: Vec<Vector> = v.vertices.iter().map(|p| p - &origin).collect();
        dirs.extend(v.rays.iter().cloned());
        dirs.extend(v.lineality.iter().cloned());
        let (basis, _) = span_basis(self.dim, &dirs);
        Some((origin, basis))
    }

    /// Dimension of the affine hull; `None` for the empty set.
    pub fn dimension(&self) -> Option<usize> {
        self.affine_hull().map(|(_, b)| b.len())
    }

    /// Whether `other ⊆ self`, checked on generators.
    pub fn contains_set(&self, other: &Polyhedron) -> bool {
        if other.is_empty() {
            return true;
        }
        if self.is_empty() {
            return false;
        }
        let v = other.vrep();
        let dir_ok = |d: &Vector| self.halfspaces.iter().all(|h| h.normal.dot(d) <= 1e-9);
        v.vertices.iter().all(|p| self.contains(p))
            && v.rays.iter().all(dir_ok)
            && v.lineality.iter().all(|l| dir_ok(l) && dir_ok(&-l))
    }

    /// Set equality by mutual containment.
    pub fn same_set(&self, other: &Polyhedron) -> bool {
        self.contains_set(other) && other.contains_set(self)
    }

    /// Maximum of `<direction, x>` over the polyhedron (`+inf` if unbounded above).
    pub fn support_value(&self, direction: &Vector) -> f64 {
        if self.is_empty() {
            return f64::NEG_INFINITY;
        }
        let v = self.vrep();
        let tol = 1e-12 * (1.0 + direction.norm());
        if v.rays.iter().any(|r| r.dot(direction) > tol)
            || v.lineality.iter().any(|l| l.dot(direction).abs() > tol)
        {
            return f64::INFINITY;
        }
        v.vertices
            .iter()
            .map(|p| p.dot(direction))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Radius of a centered cube containing every vertex.
    pub fn vertex_extent(&self) -> f64 {
        self.vertices().iter().map(max_abs).fold(0.0, f64::max)
    }
}

/// Unit directions used for polytope approximations of the sphere.
pub fn sphere_directions(dim: usize, sides: usize) -> Vec<Vector> {
    use std::f64::consts::PI;
    match dim {
        2 => (0..sides)
            .map(|k| {
                let a = 2.0 * PI * k as f64 / sides as f64;
                linalg::vector(&[a.cos(), a.sin()])
            })
            .collect(),
        3 => {
            let rings = (sides / 2).max(2);
            let mut out = vec![linalg::vector(&[0.0, 0.0, 1.0]), linalg::vector(&[0.0, 0.0, -1.0])];
            for i in 1..rings {
                let th = PI * i as f64 / rings as f64;
                for k in 0..sides {
                    let ph = 2.0 * PI * k as f64 / sides as f64;
                    out.push(linalg::vector(&[th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos()]));
                }
            }
            out
        }
        _ => {
            let mut out = Vec::new();
            for i in 0..dim {
                out.push(linalg::unit(dim, i));
                out.push(-linalg::unit(dim, i));
            }
            out
        }
    }
}

fn compute_vrep(dim: usize, hs: &[Halfspace]) -> VRep {
    let normals: Vec<Vector> = hs.iter().map(|h| h.normal.clone()).collect();
    let (row_span, lineality) = if normals.is_empty() {
        (Vec::new(), (0..dim).map(|i| linalg::unit(dim, i)).collect())
    } else {
        span_basis(dim, &normals)
    };
    drop(row_span);
    // Rows of the pointed part: inequalities plus equalities l . x = 0.
    let mut rows: Vec<(&Vector, f64)> = hs.iter().map(|h| (&h.normal, h.offset)).collect();
    for l in &lineality {
        rows.push((l, 0.0));
    }
    let n_ineq = hs.len();
    let feasible = |x: &Vector| {
        let tol = feas_tol(x);
        hs.iter().all(|h| h.excess(x) <= tol) && lineality.iter().all(|l| l.dot(x).abs() <= tol)
    };

    let mut vertices: Vec<Vector> = Vec::new();
    if rows.len() >= dim {
        for combo in (0..rows.len()).combinations(dim) {
            let a: Vec<&Vector> = combo.iter().map(|&i| rows[i].0).collect();
            let b: Vec<f64> = combo.iter().map(|&i| rows[i].1).collect();
            if let Some(x) = solve_square(&a, &b) {
                if x.iter().all(|v| v.is_finite()) && feasible(&x) && !vertices.iter().any(|v| same_point(v, &x)) {
                    vertices.push(x);
                }
            }
        }
    }

    let mut rays: Vec<Vector> = Vec::new();
    if !vertices.is_empty() && dim >= 1 {
        let dir_ok = |d: &Vector| {
            hs.iter().all(|h| h.normal.dot(d) <= 1e-10) && lineality.iter().all(|l| l.dot(d).abs() <= 1e-10)
        };
        let k = dim - 1;
        if rows.len() >= k {
            for combo in (0..rows.len()).combinations(k) {
                let a: Vec<&Vector> = combo.iter().map(|&i| rows[i].0).collect();
                if let Some(d) = null_direction(dim, &a) {
                    for cand in [d.clone(), -d] {
                        if dir_ok(&cand) && !rays.iter().any(|r| same_point(r, &cand)) {
                            rays.push(cand);
                        }
                    }
                }
            }
        }
        // Only extreme rays of the pointed recession cone are wanted: drop
        // rays that are positive combinations of two others (can appear when
        // the chosen rows include redundant equalities).
        let _ = n_ineq;
        rays = prune_rays(dim, rays, hs, &lineality);
    }
    VRep { vertices, rays, lineality }
}

fn prune_rays(dim: usize, rays: Vec<Vector>, hs: &[Halfspace], lineality: &[Vector]) -> Vec<Vector> {
    // A ray of a pointed cone is extreme iff its tight constraints have rank dim - 1.
    rays.into_iter()
        .filter(|d| {
            let mut tight: Vec<Vector> = hs
                .iter()
                .filter(|h| h.normal.dot(d).abs() <= 1e-10)
                .map(|h| h.normal.clone())
                .collect();
            tight.extend(lineality.iter().cloned());
            let (span, _) = span_basis(dim, &tight);
            span.len() + 1 >= dim
        })
        .collect()
}

/// Facet halfspaces `(w, b)` of `conv(points) + cone(rays)` in `R^k`, where the
/// generators are known to span `R^k` affinely.
fn hull_facets(k: usize, points: &[Vector], rays: &[Vector]) -> Vec<(Vector, f64)> {
    enum Gen<'a> {
        P(&'a Vector),
        R(&'a Vector),
    }
    let gens: Vec<Gen> = points
        .iter()
        .map(Gen::P)
        .chain(rays.iter().map(Gen::R))
        .collect();
    let mut out: Vec<(Vector, f64)> = Vec::new();
    let consider = |w: Vector, out: &mut Vec<(Vector, f64)>| {
        for w in [w.clone(), -w] {
            if rays.iter().any(|r| r.dot(&w) > 1e-10) {
                continue;
            }
            let b = points.iter().map(|p| p.dot(&w)).fold(f64::NEG_INFINITY, f64::max);
            let tol = 1e-9 * (1.0 + b.abs());
            // The supporting hyperplane must touch a (k-1)-dimensional face.
            let tp: Vec<&Vector> = points.iter().filter(|p| (p.dot(&w) - b).abs() <= tol).collect();
            let mut dirs: Vec<Vector> = tp.iter().map(|p| *p - tp[0]).collect();
            dirs.extend(rays.iter().filter(|r| r.dot(&w).abs() <= 1e-10).cloned());
            let (span, _) = span_basis(k, &dirs);
            if span.len() + 1 != k {
                continue;
            }
            if !out.iter().any(|(w2, b2)| (w2 - &w).amax() < 1e-9 && (b2 - b).abs() < 1e-9 * (1.0 + b.abs())) {
                out.push((w, b));
            }
        }
    };
    if k == 1 {
        consider(linalg::unit(1, 0), &mut out);
        return out;
    }
    for combo in (0..gens.len()).combinations(k) {
        let base = combo.iter().find_map(|&i| match gens[i] {
            Gen::P(p) => Some(p),
            Gen::R(_) => None,
        });
        let Some(base) = base else { continue };
        let mut vecs: Vec<Vector> = Vec::with_capacity(k - 1);
        let mut used_base = false;
        for &i in &combo {
            match gens[i] {
                Gen::P(p) => {
                    if !used_base && std::ptr::eq(p, base) {
                        used_base = true;
                    } else {
                        vecs.push(p - base);
                    }
                }
                Gen::R(r) => vecs.push(r.clone()),
            }
        }
        let refs: Vec<&Vector> = vecs.iter().collect();
        if let Some(w) = null_direction(k, &refs) {
            consider(w, &mut out);
        }
    }
    out
}

impl From<&Polyhedron> for Vec<Vec<f64>> {
    fn from(p: &Polyhedron) -> Self {
        p.to_rows()
    }
}

#[allow(dead_code)]
pub(crate) fn zeros(dim: usize) -> Vector {
    DVector::zeros(dim)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::vector;

    #[test]
    fn square_vertices() {
        let sq = Polyhedron::cube(2);
        assert_eq!(sq.vertices().len(), 4);
        assert!(sq.is_bounded());
        for v in sq.vertices() {
            assert!(sq.contains(v));
        }
    }

    #[test]
    fn halfplane_has_lineality_and_ray() {
        let p = Polyhedron::new(2, &[(vec![1.0, 0.0], 1.0)]).unwrap();
        let v = p.vrep();
        assert_eq!(v.vertices.len(), 1);
        assert_eq!(v.lineality.len(), 1);
        assert_eq!(v.rays.len(), 1);
        assert!(!p.is_bounded());
        assert_eq!(p.dimension(), Some(2));
    }

    #[test]
    fn quadrant_rays() {
        let p = Polyhedron::new(2, &[(vec![-1.0, 0.0], 0.0), (vec![0.0, -1.0], 0.0)]).unwrap();
        let v = p.vrep();
        assert_eq!(v.vertices.len(), 1);
        assert_eq!(v.rays.len(), 2);
        assert!(v.lineality.is_empty());
    }

    #[test]
    fn hull_of_triangle_points() {
        let pts = [vector(&[0.0, 0.0]), vector(&[1.0, 0.0]), vector(&[0.0, 1.0]), vector(&[0.2, 0.2])];
        let t = Polyhedron::from_points(2, &pts);
        assert_eq!(t.halfspaces().len(), 3);
        assert_eq!(t.vertices().len(), 3);
    }

    #[test]
    fn segment_in_plane() {
        let seg = Polyhedron::from_points(2, &[vector(&[0.0, 0.0]), vector(&[1.0, 1.0])]);
        assert_eq!(seg.dimension(), Some(1));
        assert_eq!(seg.vertices().len(), 2);
        assert!(seg.contains(&vector(&[0.5, 0.5])));
        assert!(!seg.contains(&vector(&[0.5, 0.6])));
    }

    #[test]
    fn cone_from_generators() {
        let c = Polyhedron::from_generators(2, &[vector(&[0.0, 0.0])], &[vector(&[1.0, 0.0]), vector(&[0.0, 1.0])]);
        assert!(c.contains(&vector(&[3.0, 5.0])));
        assert!(!c.contains(&vector(&[-1.0, 5.0])));
        assert!(!c.is_bounded());
    }

    #[test]
    fn infeasible_is_empty() {
        let p = Polyhedron::new(1, &[(vec![1.0], 0.0), (vec![-1.0], -1.0)]).unwrap();
        assert!(p.is_empty());
    }

    #[test]
    fn circumscribed_contains_inscribed() {
        let c = vector(&[0.0, 0.0]);
        let outer = Polyhedron::ball(&c, 1.0, 16, BallApprox::Circumscribed);
        let inner = Polyhedron::ball(&c, 1.0, 16, BallApprox::Inscribed);
        assert!(outer.contains_set(&inner));
        assert!(!inner.contains_set(&outer));
    }
}
