//! Product windows `x_set × y_set`.

use crate::error::{check_dim, Result};
use crate::geometry::{BallApprox, Polyhedron};
use crate::linalg::{Matrix, Vector};

/// Facet count used when a ball must be replaced by a polytope.
pub const DEFAULT_BALL_SIDES: usize = 64;

/// One factor of a product window.
#[derive(Clone, Debug, PartialEq)]
pub enum Region {
    Poly(Polyhedron),
    /// Euclidean ball, measured through a circumscribed polytope with `sides` facets
    /// per great circle.
    Ball { center: Vector, radius: f64, sides: usize },
    All(usize),
}

impl Region {
    pub fn ball(center: Vector, radius: f64) -> Self {
        Self::Ball { center, radius, sides: DEFAULT_BALL_SIDES }
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Poly(p) => p.dim(),
            Self::Ball { center, .. } => center.len(),
            Self::All(n) => *n,
        }
    }

    pub fn polytope(&self) -> Polyhedron {
        match self {
            Self::Poly(p) => p.clone(),
            Self::Ball { center, radius, sides } => Polyhedron::ball(center, *radius, *sides, BallApprox::Circumscribed),
            Self::All(n) => Polyhedron::whole(*n),
        }
    }

    pub fn contains(&self, x: &Vector) -> bool {
        match self {
            Self::Poly(p) => p.contains(x),
            Self::Ball { center, radius, .. } => (x - center).norm() <= radius * (1.0 + 1e-12),
            Self::All(_) => true,
        }
    }

    pub fn is_bounded(&self) -> bool {
        match self {
            Self::Poly(p) => p.is_bounded() || p.is_empty(),
            Self::Ball { .. } => true,
            Self::All(n) => *n == 0,
        }
    }

    /// Image under `x -> rotation x + shift`.
    pub fn transform(&self, rotation: &Matrix, shift: &Vector) -> Region {
        match self {
            Self::Poly(p) => Self::Poly(p.transform(rotation, shift)),
            Self::Ball { center, radius, sides } => {
                Self::Ball { center: rotation * center + shift, radius: *radius, sides: *sides }
            }
            Self::All(n) => Self::All(*n),
        }
    }

    pub fn scale(&self, t: f64) -> Region {
        match self {
            Self::Poly(p) => Self::Poly(p.scale(t)),
            Self::Ball { center, radius, sides } => Self::Ball { center: center * t, radius: radius * t, sides: *sides },
            Self::All(n) => Self::All(*n),
        }
    }

    /// Axis-aligned bounding box, if bounded.
    pub fn bounding_box(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        let p = match self {
            Self::Ball { center, radius, .. } => {
                return Some((center.iter().map(|c| c - radius).collect(), center.iter().map(|c| c + radius).collect()))
            }
            Self::All(_) => return None,
            Self::Poly(p) => p,
        };
        if !p.is_bounded() || p.is_empty() {
            return None;
        }
        let n = p.dim();
        let mut lo = vec![f64::INFINITY; n];
        let mut hi = vec![f64::NEG_INFINITY; n];
        for v in p.vertices() {
            for i in 0..n {
                lo[i] = lo[i].min(v[i]);
                hi[i] = hi[i].max(v[i]);
            }
        }
        Some((lo, hi))
    }
}

/// A product window `x_set × y_set` in `R^n × R^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct Window {
    pub x: Region,
    pub y: Region,
}

impl Window {
    pub fn new(x: Region, y: Region) -> Result<Self> {
        check_dim(x.dim(), y.dim())?;
        Ok(Self { x, y })
    }

    pub fn polys(x: Polyhedron, y: Polyhedron) -> Result<Self> {
        Self::new(Region::Poly(x), Region::Poly(y))
    }

    pub fn dim(&self) -> usize {
        self.x.dim()
    }

    /// The window with its two factors exchanged.
    pub fn swapped(&self) -> Window {
        Window { x: self.y.clone(), y: self.x.clone() }
    }

    pub fn contains(&self, x: &Vector, y: &Vector) -> bool {
        self.x.contains(x) && self.y.contains(y)
    }

    /// Diameter of the bounded factors (unbounded factors are ignored).
    pub fn diameter(&self) -> Option<f64> {
        let mut sq = 0.0;
        let mut any = false;
        for r in [&self.x, &self.y] {
            if let Some((lo, hi)) = r.bounding_box() {
                any = true;
                sq += lo.iter().zip(&hi).map(|(a, b)| (b - a) * (b - a)).sum::<f64>();
            }
        }
        any.then(|| f64::sqrt(sq))
    }
}
