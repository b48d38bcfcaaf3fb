//! Face enumeration for low-dimensional polyhedra.
//!
//! Unbounded inputs are truncated by a box large enough to contain every
//! vertex of the pointed part in its interior. Faces of the truncated polytope
//! whose tight set avoids the box constraints are in bijection with the faces
//! of the original polyhedron.

use std::collections::{BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::linalg::{self, affine_hull, Vector};

use super::measure::{hausdorff_measure, Measured};
use super::polyhedron::{Halfspace, Polyhedron};

/// Face of a truncated polytope: indices of its vertices and tight constraints.
#[derive(Clone, Debug)]
pub(crate) struct RawFace {
    pub vertex_ids: Vec<usize>,
    pub tight: Vec<usize>,
}

/// Enumerates all nonempty faces of the bounded polytope `{x : hs}` and keeps
/// those whose tight set contains no index `>= n_genuine`.
pub(crate) fn enumerate_faces(dim: usize, hs: &[Halfspace], n_genuine: usize) -> (Vec<Vector>, Vec<RawFace>) {
    let poly = Polyhedron::from_halfspaces(dim, hs.to_vec());
    let verts: Vec<Vector> = poly.vertices().to_vec();
    if verts.is_empty() {
        return (verts, Vec::new());
    }
    let tight_of = |v: &Vector| -> Vec<usize> { (0..hs.len()).filter(|&i| hs[i].is_tight(v)).collect() };
    let vtight: Vec<Vec<usize>> = verts.iter().map(tight_of).collect();
    let constraint_sets: Vec<Vec<usize>> = (0..hs.len())
        .map(|c| (0..verts.len()).filter(|&v| vtight[v].contains(&c)).collect::<Vec<_>>())
        .filter(|s: &Vec<usize>| !s.is_empty())
        .collect();

    let all: Vec<usize> = (0..verts.len()).collect();
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut queue: VecDeque<Vec<usize>> = VecDeque::new();
    seen.insert(all.clone());
    queue.push_back(all);
    for s in &constraint_sets {
        if seen.insert(s.clone()) {
            queue.push_back(s.clone());
        }
    }
    while let Some(f) = queue.pop_front() {
        for s in &constraint_sets {
            let inter: Vec<usize> = f.iter().copied().filter(|v| s.binary_search(v).is_ok()).collect();
            if !inter.is_empty() && seen.insert(inter.clone()) {
                queue.push_back(inter);
            }
        }
    }
    let faces = seen
        .into_iter()
        .map(|ids| {
            let tight: Vec<usize> = (0..hs.len())
                .filter(|c| ids.iter().all(|&v| vtight[v].contains(c)))
                .collect();
            RawFace { vertex_ids: ids, tight }
        })
        .filter(|f| f.tight.iter().all(|&c| c < n_genuine))
        .collect();
    (verts, faces)
}

/// Half-width of a box whose interior contains the pointed part of `p`.
pub(crate) fn truncation_radius(p: &Polyhedron) -> f64 {
    2.0 * (1.0 + p.vertex_extent()) + 1.0
}

pub(crate) fn box_halfspaces(dim: usize, radius: f64) -> Vec<Halfspace> {
    let mut hs = Vec::with_capacity(2 * dim);
    for i in 0..dim {
        hs.push(Halfspace { normal: linalg::unit(dim, i), offset: radius });
        hs.push(Halfspace { normal: -linalg::unit(dim, i), offset: radius });
    }
    hs
}

/// A face of a polyhedron together with its normal cone.
#[derive(Clone, Debug)]
pub struct Face {
    pub dim: usize,
    /// Closed face as a polyhedron in the ambient space.
    pub carrier: Polyhedron,
    /// Vertices of the face (truncated by the enumeration box when unbounded).
    pub vertices: Vec<Vector>,
    pub affine_origin: Vector,
    /// Orthonormal basis of the direction space, `dim` vectors.
    pub affine_basis: Vec<Vector>,
    /// `H^dim` of the face; `+inf` for unbounded faces of positive dimension.
    pub relative_measure: f64,
    /// Indices of the defining half-spaces that are tight on the face.
    pub tight: Vec<usize>,
    pub normal_cone: Polyhedron,
}

/// Face lattice of `p` (faces of every dimension, including `p` itself).
///
/// A polyhedron with empty interior is rejected unless `allow_lower_dim`.
pub fn face_lattice(p: &Polyhedron, allow_lower_dim: bool) -> Result<Vec<Face>> {
    let n = p.dim();
    if p.is_empty() {
        return Ok(Vec::new());
    }
    let full = p.dimension().unwrap_or(0);
    if full < n && !allow_lower_dim {
        return Err(Error::DegenerateInput(format!(
            "polyhedron has dimension {full} in R^{n}"
        )));
    }
    let genuine = p.halfspaces().len();
    let mut hs = p.halfspaces().to_vec();
    let bounded = p.is_bounded();
    if !bounded {
        hs.extend(box_halfspaces(n, truncation_radius(p)));
    }
    let (verts, raw) = enumerate_faces(n, &hs, genuine);
    let mut faces = Vec::with_capacity(raw.len());
    for f in raw {
        let fv: Vec<Vector> = f.vertex_ids.iter().map(|&i| verts[i].clone()).collect();
        let (origin, basis, _) = affine_hull(n, &fv);
        let mut carrier_hs = p.halfspaces().to_vec();
        for &t in &f.tight {
            carrier_hs.push(p.halfspaces()[t].flipped());
        }
        let carrier = Polyhedron::from_halfspaces(n, carrier_hs);
        let relative_measure = match hausdorff_measure(&carrier) {
            Ok(Measured { value, .. }) => value,
            Err(_) => f64::INFINITY,
        };
        let normals: Vec<Vector> = f.tight.iter().map(|&t| p.halfspaces()[t].normal.clone()).collect();
        let normal_cone = Polyhedron::from_generators(n, &[Vector::zeros(n)], &normals);
        faces.push(Face {
            dim: basis.len(),
            carrier,
            vertices: fv,
            affine_origin: origin,
            affine_basis: basis,
            relative_measure,
            tight: f.tight,
            normal_cone,
        });
    }
    faces.sort_by_key(|f| f.dim);
    Ok(faces)
}

/// Counts of faces by dimension.
pub fn f_vector(faces: &[Face], n: usize) -> Vec<usize> {
    let mut out = vec![0; n + 1];
    for f in faces {
        out[f.dim] += 1;
    }
    out
}

/// Planar angle of a two-dimensional pointed cone given in H-representation
/// (the normal cone of a polygon vertex).
pub fn planar_cone_angle(cone: &Polyhedron) -> f64 {
    let v = cone.vrep();
    if !v.lineality.is_empty() {
        return if v.lineality.len() >= 2 {
            2.0 * std::f64::consts::PI
        } else {
            std::f64::consts::PI
        };
    }
    match v.rays.len() {
        0 => 0.0,
        1 => 0.0,
        _ => {
            let a = &v.rays[0];
            let b = &v.rays[1];
            (a.dot(b) / (a.norm() * b.norm())).clamp(-1.0, 1.0).acos()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::vector;

    #[test]
    fn square_face_counts() {
        let faces = face_lattice(&Polyhedron::cube(2), false).unwrap();
        assert_eq!(f_vector(&faces, 2), vec![4, 4, 1]);
    }

    #[test]
    fn interval_face_counts() {
        let faces = face_lattice(&Polyhedron::interval(0.0, 1.0), false).unwrap();
        assert_eq!(f_vector(&faces, 1), vec![2, 1]);
    }

    #[test]
    fn triangle_exterior_angles_sum_to_two_pi() {
        let t = Polyhedron::from_points(2, &[vector(&[0.0, 0.0]), vector(&[1.0, 0.0]), vector(&[0.0, 1.0])]);
        let faces = face_lattice(&t, false).unwrap();
        let total: f64 = faces.iter().filter(|f| f.dim == 0).map(|f| planar_cone_angle(&f.normal_cone)).sum();
        assert!((total - 2.0 * std::f64::consts::PI).abs() < 1e-10);
    }

    #[test]
    fn degenerate_rejected_unless_requested() {
        let seg = Polyhedron::from_points(2, &[vector(&[0.0, 0.0]), vector(&[1.0, 0.0])]);
        assert!(matches!(face_lattice(&seg, false), Err(Error::DegenerateInput(_))));
        let faces = face_lattice(&seg, true).unwrap();
        assert_eq!(f_vector(&faces, 2), vec![2, 1, 0]);
    }

    #[test]
    fn halfplane_faces() {
        let p = Polyhedron::new(2, &[(vec![1.0, 0.0], 1.0)]).unwrap();
        let faces = face_lattice(&p, false).unwrap();
        assert_eq!(f_vector(&faces, 2), vec![0, 1, 1]);
    }
}
