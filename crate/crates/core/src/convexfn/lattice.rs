//! Pointwise max and min, the latter only when it is certified convex.

use itertools::Itertools;

use super::{AffinePiece, ConvexFunction, GridSampled, MaxAffine, PairFamily};
use crate::error::{check_dim, Error, Result};
use crate::fenchel::conjugate_max_affine;
use crate::geometry::Polyhedron;
use crate::linalg::Vector;

/// How convexity of `u ∧ v` was established.
#[derive(Clone, Debug, PartialEq)]
pub enum MeetCertificate {
    /// Known by construction of the pair.
    Constructive(PairFamily),
    /// The convex hull of the minimum matched it at every checked point.
    Sampled { points: usize },
    /// Grid minimum passed the midpoint convexity test on every grid line.
    GridMidpoint,
}

impl MeetCertificate {
    pub fn is_exact(&self) -> bool {
        matches!(self, Self::Constructive(_))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LatticeResult {
    pub join: ConvexFunction,
    pub meet: ConvexFunction,
    pub certificate: MeetCertificate,
}

/// A pair whose minimum is convex, with the constructive reason.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticePair {
    pub u: ConvexFunction,
    pub v: ConvexFunction,
    pub certificate: PairFamily,
    pub(crate) join: ConvexFunction,
    pub(crate) meet: ConvexFunction,
}

impl LatticePair {
    pub fn join(&self) -> &ConvexFunction {
        &self.join
    }
    pub fn meet(&self) -> &ConvexFunction {
        &self.meet
    }
    pub fn lattice(&self) -> LatticeResult {
        LatticeResult {
            join: self.join.clone(),
            meet: self.meet.clone(),
            certificate: MeetCertificate::Constructive(self.certificate),
        }
    }
}

/// `(u ∨ v, u ∧ v)`.
pub fn lattice_ops(u: &ConvexFunction, v: &ConvexFunction) -> Result<LatticeResult> {
    let j = join(u, v)?;
    let (m, certificate) = meet(u, v)?;
    Ok(LatticeResult { join: j, meet: m, certificate })
}

pub fn join(u: &ConvexFunction, v: &ConvexFunction) -> Result<ConvexFunction> {
    check_dim(u.dim(), v.dim())?;
    use ConvexFunction as F;
    match (u, v) {
        (F::Indicator(k), F::Indicator(l)) => {
            let kl = k.intersect(l)?;
            if kl.is_empty() {
                return Err(Error::IdenticallyInfiniteMax);
            }
            Ok(F::Indicator(kl))
        }
        (F::Support(k), F::Support(l)) => {
            let pts: Vec<Vector> = k.vertices().iter().chain(l.vertices()).cloned().collect();
            Ok(F::Support(Polyhedron::from_points(k.dim(), &pts)))
        }
        (F::Grid(a), F::Grid(b)) => {
            let vals = grid_zip(a, b, f64::max)?;
            GridSampled::new(a.lo().to_vec(), a.step(), a.counts().to_vec(), vals).map(F::Grid)
        }
        _ if u == v => Ok(u.clone()),
        _ => {
            let (a, b) = pl_pair(u, v)?;
            let dom = a.domain().intersect(b.domain())?;
            if dom.is_empty() {
                return Err(Error::IdenticallyInfiniteMax);
            }
            let pieces = a.pieces().iter().chain(b.pieces()).cloned().collect();
            MaxAffine::new(pieces, dom).map(F::MaxAffine)
        }
    }
}

/// `u ∧ v` with a convexity certificate, or `NotConvexMin`.
pub fn meet(u: &ConvexFunction, v: &ConvexFunction) -> Result<(ConvexFunction, MeetCertificate)> {
    check_dim(u.dim(), v.dim())?;
    use ConvexFunction as F;
    if u == v {
        return Ok((u.clone(), MeetCertificate::Constructive(PairFamily::Trivial)));
    }
    if let (F::Grid(a), F::Grid(b)) = (u, v) {
        let vals = grid_zip(a, b, f64::min)?;
        return match GridSampled::new(a.lo().to_vec(), a.step(), a.counts().to_vec(), vals) {
            Ok(g) => Ok((F::Grid(g), MeetCertificate::GridMidpoint)),
            Err(Error::NonConvexInput { path, .. }) => Err(Error::NotConvexMin { at: vec![grid_index(&path)] }),
            Err(e) => Err(e),
        };
    }
    let (a, b) = pl_pair(u, v)?;
    let ca = conjugate_max_affine(&a)?;
    let cb = conjugate_max_affine(&b)?;
    let cdom = ca.domain().intersect(cb.domain())?;
    let n = u.dim();
    if cdom.is_empty() {
        // A convex minimum would have the proper conjugate u* ∨ v*.
        let at = a.domain().vertices().first().map(|p| p.iter().copied().collect()).unwrap_or_else(|| vec![0.0; n]);
        return Err(Error::NotConvexMin { at });
    }
    let cj = MaxAffine::new(ca.pieces().iter().chain(cb.pieces()).cloned().collect(), cdom)?;
    let hull = conjugate_max_affine(&cj)?;

    // The candidate is the closed convex hull of min(u,v); it equals the minimum
    // iff the minimum is convex. Compare on structural points and a dense sample.
    let mut points: Vec<Vector> = Vec::new();
    for m in [&a, &b, &hull] {
        points.extend(m.domain().vertices().iter().cloned());
    }
    for c in [&ca, &cb, &cj] {
        points.extend(c.pieces().iter().map(|p| p.slope.clone()));
    }
    let extent = points.iter().map(crate::linalg::max_abs).fold(1.0, f64::max) * 1.5 + 1.0;
    points.extend(sample_box(n, extent));
    let count = points.len();
    for x in &points {
        let lhs = a.eval(x).min(b.eval(x));
        let rhs = hull.eval(x);
        let ok = if lhs.is_infinite() || rhs.is_infinite() {
            lhs == rhs
        } else {
            (lhs - rhs).abs() <= 1e-9 * (1.0 + lhs.abs())
        };
        if !ok {
            return Err(Error::NotConvexMin { at: x.iter().copied().collect() });
        }
    }
    let meet = simplify(u, v, hull);
    Ok((meet, MeetCertificate::Sampled { points: count }))
}

fn simplify(u: &ConvexFunction, v: &ConvexFunction, hull: MaxAffine) -> ConvexFunction {
    use ConvexFunction as F;
    match (u, v) {
        (F::Indicator(k), F::Indicator(l)) => {
            let pts: Vec<Vector> = k.vertices().iter().chain(l.vertices()).cloned().collect();
            if k.is_bounded() && l.is_bounded() {
                return F::Indicator(Polyhedron::from_points(k.dim(), &pts));
            }
            F::MaxAffine(hull)
        }
        (F::Support(k), F::Support(l)) => match k.intersect(l) {
            Ok(kl) if !kl.is_empty() => F::Support(kl),
            _ => F::MaxAffine(hull),
        },
        _ => F::MaxAffine(hull),
    }
}

fn pl_pair(u: &ConvexFunction, v: &ConvexFunction) -> Result<(MaxAffine, MaxAffine)> {
    match (u.as_max_affine(), v.as_max_affine()) {
        (Some(a), Some(b)) => Ok((a, b)),
        _ => Err(Error::UnsupportedCombination(format!("{} with {}", u.family(), v.family()))),
    }
}

fn grid_zip(a: &GridSampled, b: &GridSampled, op: fn(f64, f64) -> f64) -> Result<Vec<f64>> {
    if a.lo() != b.lo() || a.step() != b.step() || a.counts() != b.counts() {
        return Err(Error::UnsupportedCombination("grids on different lattices".into()));
    }
    Ok(a.values().iter().zip(b.values()).map(|(&x, &y)| op(x, y)).collect())
}

fn grid_index(path: &str) -> f64 {
    path.trim_start_matches("values[").trim_end_matches(']').parse().unwrap_or(f64::NAN)
}

/// Deterministic sample of about 10^4 points in `[-extent, extent]^n`.
pub(crate) fn sample_box(n: usize, extent: f64) -> Vec<Vector> {
    let per_axis = match n {
        1 => 10_001,
        2 => 101,
        _ => 22,
    };
    let coords: Vec<f64> = (0..per_axis)
        .map(|i| -extent + 2.0 * extent * i as f64 / (per_axis - 1) as f64)
        .collect();
    (0..n)
        .map(|_| coords.iter().copied())
        .multi_cartesian_product()
        .map(Vector::from_vec)
        .collect()
}

pub(crate) fn affine(slope: &[f64], c: f64) -> AffinePiece {
    AffinePiece::new(Vector::from_row_slice(slope), c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::vector;

    #[test]
    fn split_support_meet_is_zero() {
        let u = ConvexFunction::support(Polyhedron::interval(-1.0, 0.0)).unwrap();
        let v = ConvexFunction::support(Polyhedron::interval(0.0, 1.0)).unwrap();
        let r = lattice_ops(&u, &v).unwrap();
        for x in [-2.0, -0.1, 0.0, 3.0] {
            assert_eq!(r.meet.eval(&vector(&[x])), 0.0);
            assert_eq!(r.join.eval(&vector(&[x])), f64::abs(x));
        }
        assert!(matches!(r.meet, ConvexFunction::Support(_)));
    }

    #[test]
    fn overlapping_interval_indicators() {
        let u = ConvexFunction::indicator(Polyhedron::interval(0.0, 1.0)).unwrap();
        let v = ConvexFunction::indicator(Polyhedron::interval(0.5, 2.0)).unwrap();
        let (m, _) = meet(&u, &v).unwrap();
        match m {
            ConvexFunction::Indicator(k) => assert!(k.same_set(&Polyhedron::interval(0.0, 2.0))),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn disjoint_indicators_and_shifted_abs_fail() {
        let u = ConvexFunction::indicator(Polyhedron::interval(0.0, 1.0)).unwrap();
        let v = ConvexFunction::indicator(Polyhedron::interval(2.0, 3.0)).unwrap();
        assert!(matches!(meet(&u, &v), Err(Error::NotConvexMin { .. })));
        assert!(matches!(join(&u, &v), Err(Error::IdenticallyInfiniteMax)));
        let a = ConvexFunction::max_affine(vec![affine(&[1.0], 0.0), affine(&[-1.0], 0.0)], Polyhedron::whole(1)).unwrap();
        let b = ConvexFunction::max_affine(vec![affine(&[1.0], -2.0), affine(&[-1.0], 2.0)], Polyhedron::whole(1)).unwrap();
        assert!(matches!(meet(&a, &b), Err(Error::NotConvexMin { .. })));
    }

    #[test]
    fn quadratic_combinations_are_unsupported() {
        let q = ConvexFunction::Quadratic(crate::convexfn::Quadratic::half_norm_squared(1));
        let a = ConvexFunction::support(Polyhedron::interval(-1.0, 1.0)).unwrap();
        assert!(matches!(meet(&q, &a), Err(Error::UnsupportedCombination(_))));
        assert_eq!(meet(&q, &q).unwrap().0, q);
    }
}
