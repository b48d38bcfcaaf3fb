//! Stratification of the subdifferential graph of a piecewise-linear function.
//!
//! Non-vertical faces of the epigraph project onto the cells of the induced
//! subdivision of the domain. On the relative interior of the cell below a face
//! with tight pieces `S` and tight domain constraints `T`, the subdifferential
//! is `conv{a_j : j in S} + cone{n_t : t in T}`.

use crate::convexfn::{AffinePiece, ConvexFunction, MaxAffine};
use crate::error::{Error, Result};
use crate::fenchel::lifted_epigraph;
use crate::geometry::faces::{box_halfspaces, enumerate_faces, truncation_radius};
use crate::geometry::{span_factor, Halfspace, Polyhedron};
use crate::linalg::{self, affine_hull, span_basis, Vector};

/// A stratum `relint(F) × G` of the subdifferential graph.
#[derive(Clone, Debug)]
pub struct FacePair {
    /// Closed cell `F` of the induced subdivision of the domain.
    pub primal: Polyhedron,
    pub primal_dim: usize,
    pub primal_basis: Vec<Vector>,
    /// A point in the relative interior of `F`.
    pub primal_point: Vector,
    /// The subdifferential `G` on `relint(F)`.
    pub dual: Polyhedron,
    pub dual_dim: usize,
    pub dual_basis: Vec<Vector>,
    /// A point in the relative interior of `G`.
    pub dual_point: Vector,
    /// `u = <slope, x> + intercept` on `F`.
    pub affine: AffinePiece,
    /// Jacobian factor of `(x, y) -> x + s y` on the stratum; set when
    /// `primal_dim + dual_dim = n`.
    pub span: Option<f64>,
    /// Indices of the pieces and domain constraints tight on the stratum.
    pub tight_pieces: Vec<usize>,
    pub tight_domain: Vec<usize>,
}

impl FacePair {
    pub fn carries_measure(&self) -> bool {
        self.span.is_some()
    }

    /// Whether `(x, y)` lies on the closed stratum `F × G`.
    pub fn contains(&self, x: &Vector, y: &Vector) -> bool {
        self.primal.contains(x) && self.dual.contains(y)
    }
}

#[derive(Clone, Debug)]
pub struct GraphAtlas {
    pub dim: usize,
    pub function: MaxAffine,
    pub strata: Vec<FacePair>,
}

impl GraphAtlas {
    pub fn measure_carrying(&self) -> impl Iterator<Item = &FacePair> {
        self.strata.iter().filter(|s| s.carries_measure())
    }

    /// Whether `(x, y)` lies on the (closed) graph, up to tolerance.
    pub fn on_graph(&self, x: &Vector, y: &Vector) -> bool {
        self.strata.iter().any(|s| s.contains(x, y))
    }
}

pub fn graph_atlas(u: &ConvexFunction) -> Result<GraphAtlas> {
    let m = u.as_max_affine().ok_or(Error::UnsupportedFamily("graph atlas needs a piecewise-linear function"))?;
    atlas_of(&m)
}

pub(crate) fn atlas_of(m: &MaxAffine) -> Result<GraphAtlas> {
    let n = m.dim();
    let pieces = m.pieces();
    let dom_hs = m.domain().halfspaces();
    let epi = lifted_epigraph(m);
    let mut hs: Vec<Halfspace> = epi.halfspaces().to_vec();
    let genuine = hs.len();
    debug_assert_eq!(genuine, pieces.len() + dom_hs.len());

    // Truncate: a box in x and a cap on t above every vertex of the truncated graph.
    let radius = truncation_radius(&epi);
    for h in box_halfspaces(n, radius) {
        let mut normal = Vector::zeros(n + 1);
        normal.rows_mut(0, n).copy_from(&h.normal);
        hs.push(Halfspace { normal, offset: h.offset });
    }
    let cap = pieces
        .iter()
        .map(|p| p.slope.iter().map(|a| a.abs()).sum::<f64>() * radius + p.intercept.abs())
        .fold(0.0, f64::max)
        + 1.0;
    hs.push(Halfspace { normal: linalg::unit(n + 1, n), offset: cap });

    let (verts, faces) = enumerate_faces(n + 1, &hs, genuine);
    let mut strata = Vec::new();
    for f in faces {
        let s: Vec<usize> = f.tight.iter().copied().filter(|&i| i < pieces.len()).collect();
        if s.is_empty() {
            continue; // vertical face
        }
        let t: Vec<usize> = f.tight.iter().filter(|&&i| i >= pieces.len()).map(|&i| i - pieces.len()).collect();
        let xs: Vec<Vector> = f.vertex_ids.iter().map(|&i| verts[i].rows(0, n).into_owned()).collect();
        let (origin, primal_basis, _) = affine_hull(n, &xs);

        let j0 = s[0];
        let mut cell = dom_hs.to_vec();
        for (l, pl) in pieces.iter().enumerate() {
            if l == j0 {
                continue;
            }
            let normal = &pl.slope - &pieces[j0].slope;
            let offset = pieces[j0].intercept - pl.intercept;
            cell.extend(Halfspace::new(normal.clone(), offset));
            if s.contains(&l) {
                cell.extend(Halfspace::new(-normal, -offset));
            }
        }
        for &ti in &t {
            cell.push(dom_hs[ti].flipped());
        }
        let primal = Polyhedron::from_halfspaces(n, cell);

        let points: Vec<Vector> = s.iter().map(|&j| pieces[j].slope.clone()).collect();
        let rays: Vec<Vector> = t.iter().map(|&ti| dom_hs[ti].normal.clone()).collect();
        let dual = Polyhedron::from_generators(n, &points, &rays);
        let mut dirs: Vec<Vector> = points.iter().map(|p| p - &points[0]).collect();
        dirs.extend(rays.iter().cloned());
        let (dual_basis, _) = span_basis(n, &dirs);
        let mut dual_point = linalg::centroid(n, &points);
        for r in &rays {
            dual_point += r;
        }

        let (pd, dd) = (primal_basis.len(), dual_basis.len());
        let span = if pd + dd == n { Some(span_factor(&primal_basis, &dual_basis)?) } else { None };
        strata.push(FacePair {
            primal,
            primal_dim: pd,
            primal_basis,
            primal_point: origin,
            dual,
            dual_dim: dd,
            dual_basis,
            dual_point,
            affine: pieces[j0].clone(),
            span,
            tight_pieces: s,
            tight_domain: t,
        });
    }
    strata.sort_by_key(|s| (s.primal_dim, s.dual_dim));
    Ok(GraphAtlas { dim: n, function: m.clone(), strata })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convexfn::AffinePiece;
    use crate::linalg::vector;

    fn dims(a: &GraphAtlas) -> Vec<(usize, usize)> {
        a.strata.iter().map(|s| (s.primal_dim, s.dual_dim)).collect()
    }

    #[test]
    fn abs_has_three_strata() {
        let u = ConvexFunction::support(Polyhedron::interval(-1.0, 1.0)).unwrap();
        let a = graph_atlas(&u).unwrap();
        assert_eq!(dims(&a), vec![(0, 1), (1, 0), (1, 0)]);
        assert!(a.strata[0].dual.same_set(&Polyhedron::interval(-1.0, 1.0)));
        assert!(a.strata.iter().all(|s| s.span == Some(1.0)));
    }

    #[test]
    fn hinge_in_the_plane() {
        let u = ConvexFunction::max_affine(
            vec![AffinePiece::new(vector(&[0.0, 0.0]), 0.0), AffinePiece::new(vector(&[1.0, 0.0]), -1.0)],
            Polyhedron::whole(2),
        )
        .unwrap();
        let a = graph_atlas(&u).unwrap();
        assert_eq!(dims(&a), vec![(1, 1), (2, 0), (2, 0)]);
        let hinge = &a.strata[0];
        assert!(hinge.dual.same_set(&Polyhedron::box_(&[0.0, 0.0], &[1.0, 0.0])));
        assert!(hinge.primal.contains(&vector(&[1.0, 37.0])));
    }

    #[test]
    fn square_indicator_has_nine_strata() {
        let u = ConvexFunction::indicator(Polyhedron::cube(2)).unwrap();
        let a = graph_atlas(&u).unwrap();
        let mut d = dims(&a);
        d.sort();
        assert_eq!(d, [vec![(0, 2); 4], vec![(1, 1); 4], vec![(2, 0)]].concat());
        for s in &a.strata {
            assert!(s.contains(&s.primal_point, &s.dual_point));
        }
    }

    #[test]
    fn grid_is_rejected() {
        let g = crate::convexfn::GridSampled::sample(vec![0.0], 0.5, vec![3], |x| x[0]).unwrap();
        assert!(matches!(graph_atlas(&ConvexFunction::Grid(g)), Err(Error::UnsupportedFamily(_))));
    }
}
