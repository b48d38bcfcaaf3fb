//! Tagged representations of proper lsc convex functions.

use nalgebra::SymmetricEigen;

use crate::error::{check_dim, Error, Result};
use crate::geometry::Polyhedron;
use crate::linalg::{Matrix, Vector};

/// Affine function `x -> <slope, x> + intercept`.
#[derive(Clone, Debug, PartialEq)]
pub struct AffinePiece {
    pub slope: Vector,
    pub intercept: f64,
}

impl AffinePiece {
    pub fn new(slope: Vector, intercept: f64) -> Self {
        Self { slope, intercept }
    }

    pub fn eval(&self, x: &Vector) -> f64 {
        self.slope.dot(x) + self.intercept
    }
}

/// `max_j (<a_j, x> + c_j)` on a polyhedral domain, `+inf` outside it.
#[derive(Clone, Debug, PartialEq)]
pub struct MaxAffine {
    pieces: Vec<AffinePiece>,
    domain: Polyhedron,
}

impl MaxAffine {
    pub fn new(pieces: Vec<AffinePiece>, domain: Polyhedron) -> Result<Self> {
        let n = domain.dim();
        if pieces.is_empty() {
            return Err(Error::DegenerateInput("max-affine function needs at least one piece".into()));
        }
        for p in &pieces {
            check_dim(n, p.slope.len())?;
        }
        if domain.is_empty() {
            return Err(Error::DegenerateInput("max-affine function with empty domain".into()));
        }
        let mut uniq: Vec<AffinePiece> = Vec::with_capacity(pieces.len());
        for p in pieces {
            if !uniq.iter().any(|q| (&q.slope - &p.slope).amax() < 1e-13 && (q.intercept - p.intercept).abs() < 1e-13) {
                uniq.push(p);
            }
        }
        Ok(Self { pieces: uniq, domain })
    }

    /// Finite max-affine function on all of `R^n`.
    pub fn on_whole_space(pieces: Vec<AffinePiece>) -> Result<Self> {
        let n = pieces.first().map(|p| p.slope.len()).unwrap_or(0);
        Self::new(pieces, Polyhedron::whole(n))
    }

    pub fn pieces(&self) -> &[AffinePiece] {
        &self.pieces
    }

    pub fn domain(&self) -> &Polyhedron {
        &self.domain
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn eval(&self, x: &Vector) -> f64 {
        if !self.domain.contains(x) {
            return f64::INFINITY;
        }
        self.eval_pieces(x)
    }

    /// Max over pieces, ignoring the domain.
    pub fn eval_pieces(&self, x: &Vector) -> f64 {
        self.pieces.iter().map(|p| p.eval(x)).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Indices of pieces attaining the maximum at `x`.
    pub fn active(&self, x: &Vector) -> Vec<usize> {
        let m = self.eval_pieces(x);
        let tol = 1e-9 * (1.0 + m.abs() + crate::linalg::max_abs(x));
        (0..self.pieces.len()).filter(|&j| m - self.pieces[j].eval(x) <= tol).collect()
    }
}

/// `x -> 1/2 x^T A x + <b, x> + c` with `A` symmetric positive semidefinite.
#[derive(Clone, Debug, PartialEq)]
pub struct Quadratic {
    a: Matrix,
    b: Vector,
    c: f64,
}

impl Quadratic {
    pub fn new(a: Matrix, b: Vector, c: f64) -> Result<Self> {
        let n = a.nrows();
        check_dim(n, a.ncols())?;
        check_dim(n, b.len())?;
        if (&a - a.transpose()).amax() > 1e-12 {
            return Err(Error::NonConvexInput { path: "A".into(), message: "matrix is not symmetric".into() });
        }
        let min_eig = SymmetricEigen::new(a.clone()).eigenvalues.min();
        if min_eig < -1e-10 {
            return Err(Error::NonConvexInput {
                path: "A".into(),
                message: format!("eigenvalue {min_eig} is negative"),
            });
        }
        Ok(Self { a, b, c })
    }

    /// `1/2 |x|^2` in `R^n`.
    pub fn half_norm_squared(n: usize) -> Self {
        Self { a: Matrix::identity(n, n), b: Vector::zeros(n), c: 0.0 }
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }
    pub fn b(&self) -> &Vector {
        &self.b
    }
    pub fn c(&self) -> f64 {
        self.c
    }
    pub fn dim(&self) -> usize {
        self.b.len()
    }

    pub fn eval(&self, x: &Vector) -> f64 {
        0.5 * x.dot(&(&self.a * x)) + self.b.dot(x) + self.c
    }

    pub fn gradient(&self, x: &Vector) -> Vector {
        &self.a * x + &self.b
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        SymmetricEigen::new(self.a.clone()).eigenvalues.iter().copied().collect()
    }
}

/// Values on a uniform grid over a box, multilinearly interpolated inside and
/// `+inf` outside. Row-major with the last axis fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSampled {
    lo: Vec<f64>,
    step: f64,
    counts: Vec<usize>,
    values: Vec<f64>,
}

impl GridSampled {
    pub fn new(lo: Vec<f64>, step: f64, counts: Vec<usize>, values: Vec<f64>) -> Result<Self> {
        if counts.contains(&0) || values.is_empty() {
            return Err(Error::EmptyGrid);
        }
        check_dim(lo.len(), counts.len())?;
        let total: usize = counts.iter().product();
        check_dim(total, values.len())?;
        if !(step > 0.0) {
            return Err(Error::DegenerateInput("grid step must be positive".into()));
        }
        let g = Self { lo, step, counts, values };
        g.check_midpoint_convexity()?;
        Ok(g)
    }

    /// Samples `f` at the grid nodes of `[lo, lo + (counts-1) step]`.
    pub fn sample(lo: Vec<f64>, step: f64, counts: Vec<usize>, f: impl Fn(&Vector) -> f64) -> Result<Self> {
        let total: usize = counts.iter().product();
        let mut values = Vec::with_capacity(total);
        let probe = Self { lo: lo.clone(), step, counts: counts.clone(), values: Vec::new() };
        for flat in 0..total {
            values.push(f(&probe.node(flat)));
        }
        Self::new(lo, step, counts, values)
    }

    fn check_midpoint_convexity(&self) -> Result<()> {
        let n = self.counts.len();
        let strides = self.strides();
        for flat in 0..self.values.len() {
            let idx = self.unflatten(flat);
            for ax in 0..n {
                if idx[ax] == 0 || idx[ax] + 1 >= self.counts[ax] {
                    continue;
                }
                let (l, m, r) = (self.values[flat - strides[ax]], self.values[flat], self.values[flat + strides[ax]]);
                if !(l.is_finite() && m.is_finite() && r.is_finite()) {
                    continue;
                }
                if m > 0.5 * (l + r) + 1e-9 * (1.0 + m.abs()) {
                    return Err(Error::NonConvexInput {
                        path: format!("values[{flat}]"),
                        message: "grid values are not midpoint convex".into(),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.counts.len()
    }
    pub fn lo(&self) -> &[f64] {
        &self.lo
    }
    pub fn step(&self) -> f64 {
        self.step
    }
    pub fn counts(&self) -> &[usize] {
        &self.counts
    }
    pub fn values(&self) -> &[f64] {
        &self.values
    }
    pub fn hi(&self) -> Vec<f64> {
        self.lo.iter().zip(&self.counts).map(|(l, &c)| l + (c - 1) as f64 * self.step).collect()
    }

    pub(crate) fn strides(&self) -> Vec<usize> {
        let n = self.counts.len();
        let mut s = vec![1; n];
        for ax in (0..n.saturating_sub(1)).rev() {
            s[ax] = s[ax + 1] * self.counts[ax + 1];
        }
        s
    }

    pub(crate) fn unflatten(&self, mut flat: usize) -> Vec<usize> {
        let n = self.counts.len();
        let mut idx = vec![0; n];
        for ax in (0..n).rev() {
            idx[ax] = flat % self.counts[ax];
            flat /= self.counts[ax];
        }
        idx
    }

    pub fn node(&self, flat: usize) -> Vector {
        let idx = self.unflatten(flat);
        Vector::from_iterator(idx.len(), idx.iter().enumerate().map(|(ax, &i)| self.lo[ax] + i as f64 * self.step))
    }

    pub fn eval(&self, x: &Vector) -> f64 {
        let n = self.counts.len();
        let strides = self.strides();
        let mut base = 0usize;
        let mut frac = vec![0.0; n];
        for ax in 0..n {
            let t = (x[ax] - self.lo[ax]) / self.step;
            let last = (self.counts[ax] - 1) as f64;
            if t < -1e-9 || t > last + 1e-9 {
                return f64::INFINITY;
            }
            let t = t.clamp(0.0, last);
            let mut i = t.floor() as usize;
            if i + 1 >= self.counts[ax] {
                i = self.counts[ax].saturating_sub(2).min(i);
            }
            frac[ax] = if self.counts[ax] == 1 { 0.0 } else { t - i as f64 };
            base += i * strides[ax];
        }
        let mut sum = 0.0;
        for corner in 0..(1usize << n) {
            let mut w = 1.0;
            let mut off = 0;
            for ax in 0..n {
                if corner >> ax & 1 == 1 {
                    if self.counts[ax] == 1 {
                        w = 0.0;
                        break;
                    }
                    w *= frac[ax];
                    off += strides[ax];
                } else {
                    w *= 1.0 - frac[ax];
                }
            }
            if w != 0.0 {
                let v = self.values[base + off];
                if v.is_infinite() {
                    return f64::INFINITY;
                }
                sum += w * v;
            }
        }
        sum
    }
}

/// An element of Conv(R^n) in one of the supported representation families.
#[derive(Clone, Debug, PartialEq)]
pub enum ConvexFunction {
    MaxAffine(MaxAffine),
    Quadratic(Quadratic),
    /// Convex indicator `I_K` (0 on `K`, `+inf` elsewhere).
    Indicator(Polyhedron),
    /// Support function `h_K` of a polytope.
    Support(Polyhedron),
    Grid(GridSampled),
}

impl ConvexFunction {
    pub fn indicator(k: Polyhedron) -> Result<Self> {
        if k.is_empty() {
            return Err(Error::DegenerateInput("indicator of the empty set".into()));
        }
        Ok(Self::Indicator(k))
    }

    pub fn support(k: Polyhedron) -> Result<Self> {
        if k.is_empty() {
            return Err(Error::DegenerateInput("support function of the empty set".into()));
        }
        if !k.is_bounded() {
            return Err(Error::UnboundedPolyhedron);
        }
        Ok(Self::Support(k))
    }

    pub fn max_affine(pieces: Vec<AffinePiece>, domain: Polyhedron) -> Result<Self> {
        MaxAffine::new(pieces, domain).map(Self::MaxAffine)
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::MaxAffine(m) => m.dim(),
            Self::Quadratic(q) => q.dim(),
            Self::Indicator(k) | Self::Support(k) => k.dim(),
            Self::Grid(g) => g.dim(),
        }
    }

    pub fn family(&self) -> &'static str {
        match self {
            Self::MaxAffine(_) => "max_affine",
            Self::Quadratic(_) => "quadratic",
            Self::Indicator(_) => "indicator",
            Self::Support(_) => "support",
            Self::Grid(_) => "grid",
        }
    }

    /// Value at `x`, `f64::INFINITY` standing for `+inf`.
    pub fn evaluate(&self, x: &Vector) -> Result<f64> {
        check_dim(self.dim(), x.len())?;
        Ok(self.eval(x))
    }

    pub(crate) fn eval(&self, x: &Vector) -> f64 {
        match self {
            Self::MaxAffine(m) => m.eval(x),
            Self::Quadratic(q) => q.eval(x),
            Self::Indicator(k) => {
                if k.contains(x) {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            Self::Support(k) => k.support_value(x),
            Self::Grid(g) => g.eval(x),
        }
    }

    /// Piecewise-linear families as a max-affine function on a polyhedron.
    pub fn as_max_affine(&self) -> Option<MaxAffine> {
        match self {
            Self::MaxAffine(m) => Some(m.clone()),
            Self::Indicator(k) => {
                MaxAffine::new(vec![AffinePiece::new(Vector::zeros(k.dim()), 0.0)], k.clone()).ok()
            }
            Self::Support(k) => MaxAffine::on_whole_space(
                k.vertices().iter().map(|v| AffinePiece::new(v.clone(), 0.0)).collect(),
            )
            .ok(),
            _ => None,
        }
    }

    pub fn is_piecewise_linear(&self) -> bool {
        matches!(self, Self::MaxAffine(_) | Self::Indicator(_) | Self::Support(_))
    }

    /// Effective domain as a polyhedron (grid: its box; quadratic: everything).
    pub fn domain(&self) -> Polyhedron {
        match self {
            Self::MaxAffine(m) => m.domain().clone(),
            Self::Quadratic(q) => Polyhedron::whole(q.dim()),
            Self::Indicator(k) => k.clone(),
            Self::Support(k) => Polyhedron::whole(k.dim()),
            Self::Grid(g) => Polyhedron::box_(g.lo(), &g.hi()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::vector;

    #[test]
    fn evaluation_examples() {
        let ind = ConvexFunction::indicator(Polyhedron::interval(-1.0, 1.0)).unwrap();
        assert_eq!(ind.evaluate(&vector(&[2.0])).unwrap(), f64::INFINITY);
        let sup = ConvexFunction::support(Polyhedron::cube(2)).unwrap();
        assert_eq!(sup.evaluate(&vector(&[1.0, 1.0])).unwrap(), 2.0);
        let q = ConvexFunction::Quadratic(Quadratic::half_norm_squared(2));
        assert_eq!(q.evaluate(&vector(&[1.0, 2.0])).unwrap(), 2.5);
        assert!(matches!(q.evaluate(&vector(&[1.0])), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn quadratic_rejects_negative_eigenvalue() {
        let a = Matrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -0.1]);
        assert!(matches!(Quadratic::new(a, Vector::zeros(2), 0.0), Err(Error::NonConvexInput { .. })));
    }

    #[test]
    fn support_is_positively_homogeneous() {
        let k = Polyhedron::from_points(2, &[vector(&[0.0, 0.0]), vector(&[2.0, 0.5]), vector(&[-1.0, 1.0])]);
        let h = ConvexFunction::support(k).unwrap();
        for (x, t) in [([0.3, -0.7], 2.0), ([1.0, 1.0], 0.5), ([-2.0, 0.1], 3.0)] {
            let x = vector(&x);
            assert!((h.eval(&(&x * t)) - t * h.eval(&x)).abs() < 1e-12);
        }
    }

    #[test]
    fn grid_interpolates_and_rejects_concave() {
        let g = GridSampled::sample(vec![-1.0], 0.5, vec![5], |x| x[0].abs()).unwrap();
        assert!((g.eval(&vector(&[0.25])) - 0.25).abs() < 1e-15);
        assert_eq!(g.eval(&vector(&[1.5])), f64::INFINITY);
        assert!(GridSampled::sample(vec![-1.0], 0.5, vec![5], |x| -x[0] * x[0]).is_err());
        let g2 = GridSampled::sample(vec![0.0, 0.0], 0.5, vec![3, 3], |x| x[0] + 2.0 * x[1]).unwrap();
        assert!((g2.eval(&vector(&[0.3, 0.7])) - 1.7).abs() < 1e-14);
    }

    #[test]
    fn max_affine_domain() {
        let m = MaxAffine::new(
            vec![AffinePiece::new(vector(&[1.0]), 0.0), AffinePiece::new(vector(&[-1.0]), 0.0)],
            Polyhedron::interval(-1.0, 2.0),
        )
        .unwrap();
        assert_eq!(m.eval(&vector(&[-0.5])), 0.5);
        assert_eq!(m.eval(&vector(&[3.0])), f64::INFINITY);
        assert_eq!(m.active(&vector(&[0.0])), vec![0, 1]);
    }
}
