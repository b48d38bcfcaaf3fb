//! Hessian measures of twice differentiable functions by quadrature.

use std::cell::Cell;

use nalgebra::SymmetricEigen;

use crate::convexfn::Quadratic;
use crate::error::{check_dim, Error, Result};
use crate::geometry::{integrate_product, simplices, Cubature, Polyhedron};
use crate::linalg::{binomial, elementary_symmetric, Matrix, Vector};

/// A convex `C^2` function with explicit derivatives.
pub trait SmoothConvex {
    fn dim(&self) -> usize;
    fn value(&self, x: &Vector) -> f64;
    fn gradient(&self, x: &Vector) -> Vector;
    fn hessian(&self, x: &Vector) -> Matrix;
}

impl SmoothConvex for Quadratic {
    fn dim(&self) -> usize {
        Quadratic::dim(self)
    }
    fn value(&self, x: &Vector) -> f64 {
        self.eval(x)
    }
    fn gradient(&self, x: &Vector) -> Vector {
        Quadratic::gradient(self, x)
    }
    fn hessian(&self, _: &Vector) -> Matrix {
        self.a().clone()
    }
}

type ScalarFn = Box<dyn Fn(&Vector) -> f64 + Send + Sync>;
type VectorFn = Box<dyn Fn(&Vector) -> Vector + Send + Sync>;
type MatrixFn = Box<dyn Fn(&Vector) -> Matrix + Send + Sync>;

/// Closure-backed smooth function.
pub struct SmoothFn {
    dim: usize,
    value: ScalarFn,
    gradient: VectorFn,
    hessian: MatrixFn,
}

impl SmoothFn {
    pub fn new(
        dim: usize,
        value: impl Fn(&Vector) -> f64 + Send + Sync + 'static,
        gradient: impl Fn(&Vector) -> Vector + Send + Sync + 'static,
        hessian: impl Fn(&Vector) -> Matrix + Send + Sync + 'static,
    ) -> Self {
        Self { dim, value: Box::new(value), gradient: Box::new(gradient), hessian: Box::new(hessian) }
    }
}

impl SmoothConvex for SmoothFn {
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, x: &Vector) -> f64 {
        (self.value)(x)
    }
    fn gradient(&self, x: &Vector) -> Vector {
        (self.gradient)(x)
    }
    fn hessian(&self, x: &Vector) -> Matrix {
        (self.hessian)(x)
    }
}

/// Normalized invariants `[A]_k = e_k(λ(A)) / C(n,k)`, k = 0..n.
pub fn normalized_invariants(a: &Matrix) -> Vec<f64> {
    let n = a.nrows();
    let eig: Vec<f64> = SymmetricEigen::new(a.clone()).eigenvalues.iter().copied().collect();
    elementary_symmetric(&eig).iter().enumerate().map(|(k, e)| e / binomial(n, k)).collect()
}

fn min_eigenvalue(a: &Matrix) -> f64 {
    SymmetricEigen::new(a.clone()).eigenvalues.iter().fold(f64::INFINITY, |m, &v| m.min(v))
}

/// `Θ_i(u, β × R^n) = ∫_β [D²u]_{n-i} dx`, by adaptive Gauss quadrature on a
/// triangulation of `β`.
pub fn measures_smooth(u: &dyn SmoothConvex, beta: &Polyhedron, i: usize, cfg: &Cubature) -> Result<f64> {
    let n = u.dim();
    check_dim(n, beta.dim())?;
    if i > n {
        return Err(Error::DimensionMismatch { expected: n, found: i });
    }
    if !beta.is_bounded() {
        return Err(Error::UnboundedPolyhedron);
    }
    if beta.dimension().is_none_or(|d| d < n) {
        return Ok(0.0);
    }
    let worst = Cell::new(f64::INFINITY);
    let integrand = |x: &Vector, _: &Vector| {
        let h = u.hessian(x);
        worst.set(worst.get().min(min_eigenvalue(&h)));
        normalized_invariants(&h)[n - i]
    };
    let origin = [Vector::zeros(0)];
    let mut total = 0.0;
    for s in simplices(beta)? {
        total += integrate_product(&s, &origin, &integrand, cfg).value;
    }
    if worst.get() < -1e-8 {
        return Err(Error::NonConvexHessian { eigenvalue: worst.get() });
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::vector;

    #[test]
    fn quadratic_oracle() {
        for n in 1..=3 {
            let q = Quadratic::half_norm_squared(n);
            for i in 0..=n {
                let v = measures_smooth(&q, &Polyhedron::cube(n), i, &Cubature::default()).unwrap();
                assert!((v - 1.0).abs() < 1e-12, "n={n} i={i} v={v}");
            }
        }
        let q = Quadratic::half_norm_squared(1);
        let beta = Polyhedron::interval(0.0, 2.0);
        assert!((measures_smooth(&q, &beta, 0, &Cubature::default()).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn quartic() {
        let u = SmoothFn::new(
            1,
            |x| x[0].powi(4) / 4.0,
            |x| vector(&[x[0].powi(3)]),
            |x| Matrix::from_element(1, 1, 3.0 * x[0] * x[0]),
        );
        let beta = Polyhedron::interval(0.0, 1.0);
        let cfg = Cubature::default();
        assert!((measures_smooth(&u, &beta, 0, &cfg).unwrap() - 1.0).abs() < 1e-12);
        assert!((measures_smooth(&u, &beta, 1, &cfg).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn concave_is_rejected() {
        let u = SmoothFn::new(1, |x| -x[0] * x[0], |x| vector(&[-2.0 * x[0]]), |_| Matrix::from_element(1, 1, -2.0));
        assert!(matches!(
            measures_smooth(&u, &Polyhedron::cube(1), 0, &Cubature::default()),
            Err(Error::NonConvexHessian { .. })
        ));
    }
}
