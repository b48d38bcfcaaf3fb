//! Rigid motions `x -> u(R^T (x - x0))`.

use super::{AffinePiece, ConvexFunction, GridSampled, MaxAffine, Quadratic};
use crate::error::{check_dim, Error, Result};
use crate::linalg::{Matrix, Vector};

pub fn rotation_2d(angle: f64) -> Matrix {
    let (s, c) = angle.sin_cos();
    Matrix::from_row_slice(2, 2, &[c, -s, s, c])
}

/// Rotation by `angle` about the unit `axis` (Rodrigues).
pub fn rotation_3d(axis: &Vector, angle: f64) -> Matrix {
    let k = axis / axis.norm();
    let cross = Matrix::from_row_slice(3, 3, &[0.0, -k[2], k[1], k[2], 0.0, -k[0], -k[1], k[0], 0.0]);
    let (s, c) = angle.sin_cos();
    Matrix::identity(3, 3) + &cross * s + &cross * &cross * (1.0 - c)
}

/// The function `x -> u(rotation^T (x - shift))`, i.e. `u` moved by the rigid
/// motion `x -> rotation x + shift`.
pub fn transform(u: &ConvexFunction, rotation: &Matrix, shift: &Vector) -> Result<ConvexFunction> {
    let n = u.dim();
    check_dim(n, rotation.nrows())?;
    check_dim(n, rotation.ncols())?;
    check_dim(n, shift.len())?;
    if (rotation.transpose() * rotation - Matrix::identity(n, n)).amax() > 1e-12 {
        return Err(Error::DegenerateInput("transform needs an orthogonal matrix".into()));
    }
    use ConvexFunction as F;
    Ok(match u {
        F::MaxAffine(m) => F::MaxAffine(move_max_affine(m, rotation, shift)?),
        F::Indicator(k) => F::Indicator(k.transform(rotation, shift)),
        F::Support(k) if shift.amax() == 0.0 => F::Support(k.transform(rotation, &Vector::zeros(n))),
        F::Support(_) => F::MaxAffine(move_max_affine(&u.as_max_affine().expect("support"), rotation, shift)?),
        F::Quadratic(q) => {
            let a = rotation * q.a() * rotation.transpose();
            let a = (&a + a.transpose()) * 0.5;
            let rb = rotation * q.b();
            let b = &rb - &a * shift;
            let c = 0.5 * shift.dot(&(&a * shift)) - rb.dot(shift) + q.c();
            F::Quadratic(Quadratic::new(a, b, c)?)
        }
        F::Grid(g) => {
            if (rotation - Matrix::identity(n, n)).amax() > 1e-12 {
                return Err(Error::UnsupportedTransform("grid-sampled functions only translate"));
            }
            let lo = g.lo().iter().zip(shift.iter()).map(|(l, s)| l + s).collect();
            F::Grid(GridSampled::new(lo, g.step(), g.counts().to_vec(), g.values().to_vec())?)
        }
    })
}

fn move_max_affine(m: &MaxAffine, rotation: &Matrix, shift: &Vector) -> Result<MaxAffine> {
    let pieces = m
        .pieces()
        .iter()
        .map(|p| {
            let slope = rotation * &p.slope;
            let intercept = p.intercept - slope.dot(shift);
            AffinePiece::new(slope, intercept)
        })
        .collect();
    MaxAffine::new(pieces, m.domain().transform(rotation, shift))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Polyhedron;
    use crate::linalg::vector;

    #[test]
    fn translate_interval_indicator() {
        let u = ConvexFunction::indicator(Polyhedron::interval(0.0, 1.0)).unwrap();
        let t = transform(&u, &Matrix::identity(1, 1), &vector(&[1.0])).unwrap();
        match t {
            ConvexFunction::Indicator(k) => assert!(k.same_set(&Polyhedron::interval(1.0, 2.0))),
            _ => panic!(),
        }
    }

    #[test]
    fn rotate_support_and_identity() {
        let u = ConvexFunction::support(Polyhedron::cube(2)).unwrap();
        let rot = rotation_2d(std::f64::consts::FRAC_PI_2);
        let t = transform(&u, &rot, &Vector::zeros(2)).unwrap();
        match &t {
            ConvexFunction::Support(k) => {
                let expect = Polyhedron::box_(&[-1.0, 0.0], &[0.0, 1.0]);
                assert!(k.same_set(&expect));
            }
            _ => panic!(),
        }
        assert_eq!(transform(&u, &Matrix::identity(2, 2), &Vector::zeros(2)).unwrap(), u);
    }

    #[test]
    fn values_move_with_the_motion() {
        let rot = rotation_3d(&vector(&[1.0, 2.0, -1.0]), 0.7);
        let shift = vector(&[0.3, -1.0, 2.0]);
        let q = ConvexFunction::Quadratic(
            Quadratic::new(Matrix::from_diagonal(&vector(&[1.0, 2.0, 3.0])), vector(&[0.1, 0.0, -0.4]), 1.0).unwrap(),
        );
        let s = ConvexFunction::support(Polyhedron::cube(3)).unwrap();
        for u in [q, s] {
            let t = transform(&u, &rot, &shift).unwrap();
            for x in [vector(&[0.0, 0.0, 0.0]), vector(&[1.0, -2.0, 0.5])] {
                let moved = &rot * &x + &shift;
                assert!((t.eval(&moved) - u.eval(&x)).abs() < 1e-12);
            }
        }
    }
}
