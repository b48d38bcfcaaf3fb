//! Discrete Legendre transform on uniform grids, linear time per axis.

use crate::convexfn::GridSampled;
use crate::error::{Error, Result};

/// Target grid for a discrete conjugate.
#[derive(Clone, Debug, PartialEq)]
pub struct DualGrid {
    pub lo: Vec<f64>,
    pub step: f64,
    pub counts: Vec<usize>,
}

impl DualGrid {
    pub fn of(g: &GridSampled) -> Self {
        Self { lo: g.lo().to_vec(), step: g.step(), counts: g.counts().to_vec() }
    }
}

/// Conjugate of the sampled function on the primal box and step.
pub fn conjugate_grid(g: &GridSampled) -> Result<GridSampled> {
    conjugate_grid_on(g, &DualGrid::of(g))
}

/// `max_i <x_i, y> - u(x_i)` over grid nodes, for every node `y` of `dual`.
///
/// Along a single axis this is the conjugate of the piecewise-linear
/// interpolant; higher dimensions are handled one axis at a time.
pub fn conjugate_grid_on(g: &GridSampled, dual: &DualGrid) -> Result<GridSampled> {
    let n = g.dim();
    if dual.counts.len() != n || dual.lo.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: dual.counts.len() });
    }
    if dual.counts.contains(&0) {
        return Err(Error::EmptyGrid);
    }
    if g.values().iter().all(|v| v.is_infinite()) {
        return Err(Error::EmptyGrid);
    }
    // `work` holds -h where h is the partial conjugate over the axes processed so far;
    // axes are processed from last to first, replacing primal counts by dual ones.
    let mut counts = g.counts().to_vec();
    let mut work: Vec<f64> = g.values().to_vec();
    for ax in (0..n).rev() {
        let inner: usize = counts[ax + 1..].iter().product();
        let outer: usize = counts[..ax].iter().product();
        let (m_in, m_out) = (counts[ax], dual.counts[ax]);
        let mut next = vec![0.0; outer * m_out * inner];
        let mut line = vec![0.0; m_in];
        let mut out = vec![0.0; m_out];
        for o in 0..outer {
            for i in 0..inner {
                for k in 0..m_in {
                    line[k] = work[(o * m_in + k) * inner + i];
                }
                legendre_1d(g.lo()[ax], g.step(), &line, dual.lo[ax], dual.step, &mut out);
                for k in 0..m_out {
                    next[(o * m_out + k) * inner + i] = -out[k];
                }
            }
        }
        work = next;
        counts[ax] = m_out;
    }
    for v in &mut work {
        *v = -*v;
    }
    GridSampled::new(dual.lo.clone(), dual.step, dual.counts.clone(), work)
}

/// `out[j] = max_i (x_i y_j - f_i)` with `x_i = x0 + i dx`, `y_j = y0 + j dy`.
/// Infinite `f_i` are skipped; an all-infinite line yields `-inf`.
fn legendre_1d(x0: f64, dx: f64, f: &[f64], y0: f64, dy: f64, out: &mut [f64]) {
    // Lower convex hull of the finite nodes (monotone chain).
    let mut hull: Vec<(f64, f64)> = Vec::new();
    for (i, &fi) in f.iter().enumerate() {
        if !fi.is_finite() {
            continue;
        }
        let p = (x0 + i as f64 * dx, fi);
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            // Remove b if it lies on or above segment a-p.
            if (b.1 - a.1) * (p.0 - a.0) >= (p.1 - a.1) * (b.0 - a.0) {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    if hull.is_empty() {
        out.iter_mut().for_each(|v| *v = f64::NEG_INFINITY);
        return;
    }
    let mut k = 0;
    for (j, o) in out.iter_mut().enumerate() {
        let y = y0 + j as f64 * dy;
        while k + 1 < hull.len() && hull[k + 1].0 * y - hull[k + 1].1 >= hull[k].0 * y - hull[k].1 {
            k += 1;
        }
        *o = hull[k].0 * y - hull[k].1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::vector;

    fn brute(g: &GridSampled, y: &[f64]) -> f64 {
        (0..g.values().len())
            .filter(|&i| g.values()[i].is_finite())
            .map(|i| g.node(i).dot(&vector(y)) - g.values()[i])
            .fold(f64::NEG_INFINITY, f64::max)
    }

    #[test]
    fn half_square_is_self_dual() {
        let g = GridSampled::sample(vec![-2.0], 1e-3, vec![4001], |x| 0.5 * x[0] * x[0]).unwrap();
        let c = conjugate_grid(&g).unwrap();
        for y in [-2.0, -1.3, 0.0, 0.77, 2.0] {
            assert!((c.eval(&vector(&[y])) - 0.5 * y * y).abs() < 1e-3);
        }
    }

    #[test]
    fn abs_and_affine() {
        let g = GridSampled::sample(vec![-2.0], 0.01, vec![401], |x| x[0].abs()).unwrap();
        let c = conjugate_grid(&g).unwrap();
        assert!(c.eval(&vector(&[0.5])).abs() < 1e-12);
        assert!(c.eval(&vector(&[1.5])) >= 2.0 * 0.5 - 1e-12);
        let g = GridSampled::sample(vec![-2.0], 0.01, vec![401], |x| 0.5 * x[0]).unwrap();
        let c = conjugate_grid(&g).unwrap();
        assert!(c.eval(&vector(&[0.5])).abs() < 1e-12);
        assert!(c.eval(&vector(&[1.5])) > 1.9);
    }

    #[test]
    fn two_dimensional_matches_brute_force() {
        let g = GridSampled::sample(vec![-1.0, -0.5], 0.25, vec![9, 7], |x| {
            (x[0] - 0.2).abs() + x[1] * x[1]
        })
        .unwrap();
        let dual = DualGrid { lo: vec![-1.5, -1.0], step: 0.125, counts: vec![25, 17] };
        let c = conjugate_grid_on(&g, &dual).unwrap();
        for flat in 0..c.values().len() {
            let y = c.node(flat);
            let b = brute(&g, &[y[0], y[1]]);
            assert!((c.values()[flat] - b).abs() < 1e-12, "{flat}");
        }
    }
}
