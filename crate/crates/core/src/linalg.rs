//! Small dense linear-algebra helpers shared by the geometry code.

use nalgebra::{DMatrix, DVector};

pub type Vector = DVector<f64>;
pub type Matrix = DMatrix<f64>;

pub fn vector(xs: &[f64]) -> Vector {
    DVector::from_column_slice(xs)
}

/// Unit basis vector `e_i` in `R^n`.
pub fn unit(n: usize, i: usize) -> Vector {
    let mut v = DVector::zeros(n);
    v[i] = 1.0;
    v
}

pub fn max_abs(v: &Vector) -> f64 {
    v.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

/// Orthonormal basis of the span of `vectors` (as columns of the result),
/// together with an orthonormal basis of its orthogonal complement.
pub fn span_basis(dim: usize, vectors: &[Vector]) -> (Vec<Vector>, Vec<Vector>) {
    let scale = vectors.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let mut span = Vec::new();
    if scale > 0.0 {
        // Gram-Schmidt with column pivoting. nalgebra's SVD mis-rotates some
        // near-singular 2x2 inputs, so it is not used here.
        let mut rest: Vec<Vector> = vectors.iter().map(|v| v / scale).collect();
        while span.len() < dim {
            let (idx, norm) = rest
                .iter()
                .enumerate()
                .map(|(i, v)| (i, v.norm()))
                .fold((0, 0.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if norm <= 1e-9 {
                break;
            }
            let q = rest.swap_remove(idx) / norm;
            for v in rest.iter_mut() {
                for _ in 0..2 {
                    let c = q.dot(v);
                    *v -= &q * c;
                }
            }
            span.push(q);
        }
    }
    let mut comp: Vec<Vector> = Vec::new();
    for i in 0..dim {
        if span.len() + comp.len() == dim {
            break;
        }
        let mut e = unit(dim, i);
        for _ in 0..2 {
            for q in span.iter().chain(comp.iter()) {
                let c = q.dot(&e);
                e -= q * c;
            }
        }
        let n = e.norm();
        if n > 1e-6 {
            comp.push(e / n);
        }
    }
    (span, comp)
}

/// Affine hull of a point set: origin, orthonormal direction basis, complement.
pub fn affine_hull(dim: usize, points: &[Vector]) -> (Vector, Vec<Vector>, Vec<Vector>) {
    let origin = centroid(dim, points);
    let diffs: Vec<Vector> = points.iter().map(|p| p - &origin).collect();
    let (span, comp) = span_basis(dim, &diffs);
    (origin, span, comp)
}

pub fn centroid(dim: usize, points: &[Vector]) -> Vector {
    if points.is_empty() {
        return DVector::zeros(dim);
    }
    let mut c = DVector::zeros(dim);
    for p in points {
        c += p;
    }
    c / points.len() as f64
}

/// Solve a square system; `None` when the matrix is numerically singular.
///
/// Rows are expected to be unit length so that the determinant test is scale-free.
pub fn solve_square(rows: &[&Vector], rhs: &[f64]) -> Option<Vector> {
    let m = rows.len();
    let a = Matrix::from_fn(m, m, |i, j| rows[i][j]);
    let lu = a.full_piv_lu();
    if lu.determinant().abs() < 1e-11 {
        return None;
    }
    lu.solve(&DVector::from_column_slice(rhs))
}

/// One-dimensional null space direction of `rows` (each of length `dim`,
/// `rows.len() == dim - 1`), if the rows are independent.
pub fn null_direction(dim: usize, rows: &[&Vector]) -> Option<Vector> {
    if rows.is_empty() {
        return if dim == 1 { Some(unit(1, 0)) } else { None };
    }
    let owned: Vec<Vector> = rows.iter().map(|r| (*r).clone()).collect();
    let (span, comp) = span_basis(dim, &owned);
    if span.len() == dim - 1 && comp.len() == 1 {
        Some(comp[0].clone())
    } else {
        None
    }
}

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let mut r = 1.0;
    for i in 0..k {
        r = r * (n - i) as f64 / (i + 1) as f64;
    }
    r
}

/// Volume of the unit ball in `R^n`.
pub fn unit_ball_volume(n: usize) -> f64 {
    use std::f64::consts::PI;
    match n {
        0 => 1.0,
        1 => 2.0,
        2 => PI,
        3 => 4.0 * PI / 3.0,
        _ => unit_ball_volume(n - 2) * 2.0 * PI / n as f64,
    }
}

/// Elementary symmetric polynomials e_0..e_n of `values`.
pub fn elementary_symmetric(values: &[f64]) -> Vec<f64> {
    let mut e = vec![0.0; values.len() + 1];
    e[0] = 1.0;
    for (k, &v) in values.iter().enumerate() {
        for j in (1..=k + 1).rev() {
            e[j] += v * e[j - 1];
        }
    }
    e
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn elementary_symmetric_of_ones_is_binomial() {
        let e = elementary_symmetric(&[1.0, 1.0, 1.0]);
        assert_eq!(e, vec![1.0, 3.0, 3.0, 1.0]);
    }

    #[test]
    fn ball_volumes() {
        assert_eq!(unit_ball_volume(1), 2.0);
        assert!((unit_ball_volume(4) - std::f64::consts::PI.powi(2) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn span_of_dependent_vectors() {
        let (s, c) = span_basis(3, &[vector(&[1.0, 0.0, 0.0]), vector(&[2.0, 0.0, 0.0])]);
        assert_eq!(s.len(), 1);
        assert_eq!(c.len(), 2);
    }
}
