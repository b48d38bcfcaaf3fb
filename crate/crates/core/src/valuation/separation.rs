//! Least-squares tests of whether a Hessian valuation can be written through
//! level-set valuations on one-parameter families.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::kernel::{Arity, Kernel, Profile, Spatial};
use super::hessian_valuation;
use crate::convexfn::{AffinePiece, ConvexFunction, MaxAffine};
use crate::error::Result;
use crate::geometry::Polyhedron;
use crate::linalg::vector;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparationConfig {
    /// Kernel `ζ(t, y)` in one dimension.
    pub kernel: Kernel,
    pub t_grid: Vec<f64>,
    pub r_grid: Vec<f64>,
    pub s_grid: Vec<f64>,
    /// Knots of the piecewise-linear ansatz for the level-set profile.
    pub profile_knots: usize,
    pub fit_tolerance: f64,
}

fn grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (0..count).map(|k| lo + (hi - lo) * k as f64 / (count - 1) as f64).collect()
}

impl SeparationConfig {
    /// `ζ(t, y) = hat(t) · max(0, 1 - |y|)` with the hat on `[0, 2]`.
    pub fn bundled_hat() -> Kernel {
        Kernel {
            arity: Arity::TAbsY,
            profile: Profile::Hat { center: 1.0, half_width: 1.0, height: 1.0 },
            x: Spatial::One,
            y: Spatial::RadialHat { radius: 1.0 },
            scale: 1.0,
        }
    }
}

impl Default for SeparationConfig {
    fn default() -> Self {
        Self {
            kernel: Self::bundled_hat(),
            t_grid: grid(-0.5, 2.5, 13),
            r_grid: grid(0.25, 2.0, 8),
            s_grid: grid(0.25, 2.0, 8),
            profile_knots: 33,
            fit_tolerance: 1e-8,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparationReport {
    /// `(t, r, Z_0(t + I_[-r,r]))`.
    pub indicator_values: Vec<(f64, f64, f64)>,
    /// Max deviation of the fit `ξ_0(t) + 2r ξ_1(t)`.
    pub indicator_residual: f64,
    /// `max_t |ξ_1(t)|` of that fit.
    pub indicator_top_max: f64,
    /// `(t, s, Z_0(t + s|x|))`.
    pub cone_values: Vec<(f64, f64, f64)>,
    /// Max deviation of the best `s`-independent fit `ξ_0(t)`.
    pub cone_residual: f64,
    /// Pointwise misfit of that fit, aligned with `cone_values`.
    pub cone_misfit: Vec<f64>,
    /// `(s, r, Z_1(s|x| + I_[-r,r]))`.
    pub truncated_values: Vec<(f64, f64, f64)>,
    /// Max deviation of the best fit `∫ ξ(u(x)) dx`.
    pub truncated_residual: f64,
    /// Pointwise misfit, aligned with `truncated_values`.
    pub truncated_misfit: Vec<f64>,
    /// Whether a least-squares system was rank deficient.
    pub degenerate: bool,
    pub fit_tolerance: f64,
}

impl SeparationReport {
    pub fn indicator_fit_succeeds(&self) -> bool {
        self.indicator_residual < self.fit_tolerance
    }

    /// Residuals well above the fit tolerance on both families.
    pub fn separated(&self) -> bool {
        self.cone_residual > 10.0 * self.fit_tolerance && self.truncated_residual > 10.0 * self.fit_tolerance
    }
}

fn pieces(list: &[(f64, f64)]) -> Vec<AffinePiece> {
    list.iter().map(|&(a, c)| AffinePiece { slope: vector(&[a]), intercept: c }).collect()
}

/// Least squares; returns coefficients, pointwise misfit, rank deficiency.
fn fit(rows: &[Vec<f64>], rhs: &[f64]) -> (Vec<f64>, Vec<f64>, bool) {
    let cols = rows.first().map_or(0, Vec::len);
    let a = DMatrix::from_fn(rows.len(), cols, |i, j| rows[i][j]);
    let b = DVector::from_column_slice(rhs);
    let svd = a.clone().svd(true, true);
    let top = svd.singular_values.max();
    let cut = 1e-12 * top.max(f64::MIN_POSITIVE);
    let rank = svd.singular_values.iter().filter(|&&s| s > cut).count();
    let x = svd.solve(&b, cut).unwrap_or_else(|_| DVector::zeros(cols));
    let misfit = (&a * &x - &b).iter().map(|r| r.abs()).collect();
    (x.iter().copied().collect(), misfit, rank < cols)
}

/// `∫_0^end φ_m` for the hat basis on `knots`.
fn hat_integral(knots: &[f64], m: usize, end: f64) -> f64 {
    let phi = |t: f64| {
        let left = if m > 0 { knots[m - 1] } else { knots[0] };
        let right = if m + 1 < knots.len() { knots[m + 1] } else { knots[m] };
        if t < knots[m] && m > 0 {
            ((t - left) / (knots[m] - left)).max(0.0)
        } else if t > knots[m] && m + 1 < knots.len() {
            ((right - t) / (right - knots[m])).max(0.0)
        } else if t == knots[m] {
            1.0
        } else {
            0.0
        }
    };
    let mut total = 0.0;
    for w in knots.windows(2) {
        let (a, b) = (w[0].max(0.0), w[1].min(end));
        if b > a {
            total += (b - a) * (phi(a) + phi(b)) / 2.0;
        }
    }
    total
}

pub fn separation_experiment(cfg: &SeparationConfig) -> Result<SeparationReport> {
    let zeta = &cfg.kernel;
    let line = Polyhedron::whole(1);

    let indicator_values: Vec<(f64, f64, f64)> = cfg
        .t_grid
        .par_iter()
        .flat_map_iter(|&t| cfg.r_grid.iter().map(move |&r| (t, r)))
        .map(|(t, r)| {
            let u = ConvexFunction::MaxAffine(MaxAffine::new(pieces(&[(0.0, t)]), Polyhedron::interval(-r, r))?);
            Ok((t, r, hessian_valuation(zeta, 0, &u)?))
        })
        .collect::<Result<_>>()?;
    let mut indicator_residual: f64 = 0.0;
    let mut indicator_top_max: f64 = 0.0;
    let mut degenerate = false;
    for &t in &cfg.t_grid {
        let block: Vec<_> = indicator_values.iter().filter(|v| v.0 == t).collect();
        let rows: Vec<Vec<f64>> = block.iter().map(|v| vec![1.0, 2.0 * v.1]).collect();
        let rhs: Vec<f64> = block.iter().map(|v| v.2).collect();
        let (x, misfit, def) = fit(&rows, &rhs);
        indicator_residual = misfit.iter().copied().fold(indicator_residual, f64::max);
        indicator_top_max = indicator_top_max.max(x[1].abs());
        degenerate |= def;
    }

    let cone_values: Vec<(f64, f64, f64)> = cfg
        .t_grid
        .par_iter()
        .flat_map_iter(|&t| cfg.s_grid.iter().map(move |&s| (t, s)))
        .map(|(t, s)| {
            let u = ConvexFunction::MaxAffine(MaxAffine::new(pieces(&[(s, t), (-s, t)]), line.clone())?);
            Ok((t, s, hessian_valuation(zeta, 0, &u)?))
        })
        .collect::<Result<_>>()?;
    let mut cone_misfit = vec![0.0; cone_values.len()];
    for &t in &cfg.t_grid {
        let idx: Vec<usize> = (0..cone_values.len()).filter(|&k| cone_values[k].0 == t).collect();
        let vals: Vec<f64> = idx.iter().map(|&k| cone_values[k].2).collect();
        let (_, misfit, _) = fit(&vals.iter().map(|_| vec![1.0]).collect::<Vec<_>>(), &vals);
        for (&k, m) in idx.iter().zip(misfit) {
            cone_misfit[k] = m;
        }
    }
    let cone_residual = cone_misfit.iter().copied().fold(0.0, f64::max);

    let truncated_values: Vec<(f64, f64, f64)> = cfg
        .s_grid
        .par_iter()
        .flat_map_iter(|&s| cfg.r_grid.iter().map(move |&r| (s, r)))
        .map(|(s, r)| {
            let u = ConvexFunction::MaxAffine(MaxAffine::new(pieces(&[(s, 0.0), (-s, 0.0)]), Polyhedron::interval(-r, r))?);
            Ok((s, r, hessian_valuation(zeta, 1, &u)?))
        })
        .collect::<Result<_>>()?;
    // ∫_{-r}^{r} ξ(s|x|) dx = (2/s) ∫_0^{sr} ξ
    let reach = truncated_values.iter().map(|v| v.0 * v.1).fold(0.0, f64::max);
    let knots: Vec<f64> = grid(0.0, reach, cfg.profile_knots.max(2));
    let rows: Vec<Vec<f64>> = truncated_values
        .iter()
        .map(|&(s, r, _)| (0..knots.len()).map(|m| 2.0 / s * hat_integral(&knots, m, s * r)).collect())
        .collect();
    let rhs: Vec<f64> = truncated_values.iter().map(|v| v.2).collect();
    let (_, truncated_misfit, def) = fit(&rows, &rhs);
    let truncated_residual = truncated_misfit.iter().copied().fold(0.0, f64::max);
    degenerate |= def;

    Ok(SeparationReport {
        indicator_values,
        indicator_residual,
        indicator_top_max,
        cone_values,
        cone_residual,
        cone_misfit,
        truncated_values,
        truncated_residual,
        truncated_misfit,
        degenerate,
        fit_tolerance: cfg.fit_tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hat_basis_integrals_partition_unity() {
        let knots = grid(0.0, 2.0, 5);
        for end in [0.3, 1.0, 1.7, 2.0] {
            let s: f64 = (0..5).map(|m| hat_integral(&knots, m, end)).sum();
            assert!((s - end).abs() < 1e-14);
        }
    }

    #[test]
    fn bundled_hat_separates() {
        let r = separation_experiment(&SeparationConfig::default()).unwrap();
        assert!(r.indicator_fit_succeeds(), "{}", r.indicator_residual);
        assert!(r.indicator_top_max < 1e-8);
        assert!(r.cone_residual > 0.1 && r.truncated_residual > 0.1, "{} {}", r.cone_residual, r.truncated_residual);
        assert!(r.separated());
    }

    #[test]
    fn zero_kernel_gives_zero_residuals() {
        let cfg = SeparationConfig { kernel: Kernel::zero(Arity::TAbsY), ..Default::default() };
        let r = separation_experiment(&cfg).unwrap();
        assert_eq!((r.indicator_residual, r.cone_residual, r.truncated_residual), (0.0, 0.0, 0.0));
    }
}
