//! Recovering Hessian measures from parallel-set volumes.

use nalgebra::FullPivLU;

use crate::error::{Error, Result};
use crate::linalg::{binomial, Matrix, Vector};

/// `H^n(P_s) = sum_i coefficients[i] s^i`, with `coefficients[i] = C(n,i) Θ_{n-i}`.
#[derive(Clone, Debug, PartialEq)]
pub struct SteinerPolynomial {
    pub coefficients: Vec<f64>,
    /// `theta[k] = Θ_k`, k = 0..n.
    pub theta: Vec<f64>,
    /// Absolute misfit at the held-out node.
    pub residual: f64,
    /// Misfit relative to `max(1, |volume at the held-out node|)`.
    pub relative_residual: f64,
    pub nodes: Vec<f64>,
}

impl SteinerPolynomial {
    pub fn from_theta(theta: &[f64]) -> Self {
        let n = theta.len() - 1;
        let coefficients = (0..=n).map(|i| binomial(n, i) * theta[n - i]).collect();
        Self { coefficients, theta: theta.to_vec(), residual: 0.0, relative_residual: 0.0, nodes: Vec::new() }
    }

    pub fn eval(&self, s: f64) -> f64 {
        self.coefficients.iter().rev().fold(0.0, |acc, c| acc * s + c)
    }
}

/// Fits the degree-`n` polynomial through `s = k · scale`, k = 1..n+1, and
/// checks it at `s = (n+2) · scale`.
pub fn steiner_extract(volume: &dyn Fn(f64) -> Result<f64>, n: usize, scale: f64) -> Result<SteinerPolynomial> {
    let scale = if scale.is_finite() && scale > 0.0 { scale.clamp(1e-3, 1e3) } else { 1.0 };
    let nodes: Vec<f64> = (1..=n + 1).map(|k| k as f64 * scale).collect();
    let mut vander = Matrix::zeros(n + 1, n + 1);
    let mut rhs = Vector::zeros(n + 1);
    for (r, &s) in nodes.iter().enumerate() {
        for c in 0..=n {
            vander[(r, c)] = s.powi(c as i32);
        }
        rhs[r] = volume(s)?;
    }
    let coeffs = FullPivLU::new(vander)
        .solve(&rhs)
        .ok_or(Error::IllConditioned { residual: f64::INFINITY })?;
    let coefficients: Vec<f64> = coeffs.iter().copied().collect();
    let theta: Vec<f64> = (0..=n).map(|k| coefficients[n - k] / binomial(n, n - k)).collect();
    let held = (n + 2) as f64 * scale;
    let actual = volume(held)?;
    let mut poly = SteinerPolynomial { coefficients, theta, residual: 0.0, relative_residual: 0.0, nodes };
    poly.residual = (poly.eval(held) - actual).abs();
    poly.relative_residual = poly.residual / actual.abs().max(1.0);
    let cmax = poly.coefficients.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
    if poly.residual > 1e-7 * cmax.max(1.0) * held.max(1.0).powi(n as i32) {
        return Err(Error::IllConditioned { residual: poly.residual });
    }
    Ok(poly)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn close(a: &[f64], b: &[f64]) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-10)
    }

    #[test]
    fn examples() {
        let p = steiner_extract(&|s| Ok((1.0 + s) * (1.0 + s)), 2, 1.0).unwrap();
        assert!(close(&p.theta, &[1.0, 1.0, 1.0]));
        let p = steiner_extract(&|s| Ok(4.0 + 2.0 * s), 2, 1.0).unwrap();
        assert!(close(&p.theta, &[0.0, 1.0, 4.0]));
        let p = steiner_extract(&|s| Ok(PI + 4.0 * s + s * s), 2, 2.5).unwrap();
        assert!(close(&p.theta, &[1.0, 2.0, PI]));
    }

    #[test]
    fn rejects_non_polynomial() {
        assert!(matches!(steiner_extract(&|s: f64| Ok(s.exp()), 1, 1.0), Err(Error::IllConditioned { .. })));
    }

    #[test]
    fn from_theta_round_trip() {
        let p = SteinerPolynomial::from_theta(&[0.5, 2.0, 3.0]);
        assert!((p.eval(2.0) - (3.0 + 2.0 * 2.0 * 2.0 + 0.5 * 4.0)).abs() < 1e-14);
    }
}
