//! Gauss–Legendre rules on simplices and adaptive product cubature.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use crate::linalg::Vector;

/// Gauss–Legendre nodes and weights on `[0, 1]`.
pub fn gauss_legendre(q: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = cached_rule(q);
    (x.to_vec(), w.to_vec())
}

type Rule = (&'static [f64], &'static [f64]);

/// Rules are built once per order and kept for the life of the process.
fn cached_rule(q: usize) -> Rule {
    const FAST: usize = 65;
    static SMALL: [OnceLock<Rule>; FAST] = [const { OnceLock::new() }; FAST];
    if q < FAST {
        return *SMALL[q].get_or_init(|| leak_rule(q));
    }
    static RULES: OnceLock<Mutex<HashMap<usize, Rule>>> = OnceLock::new();
    let mut rules = RULES.get_or_init(Default::default).lock().unwrap_or_else(|e| e.into_inner());
    *rules.entry(q).or_insert_with(|| leak_rule(q))
}

fn leak_rule(q: usize) -> Rule {
    let (x, w) = compute_gauss_legendre(q);
    (Vec::leak(x), Vec::leak(w))
}

fn compute_gauss_legendre(q: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; q];
    let mut weights = vec![0.0; q];
    for i in 0..q {
        // Tricomi initial guess, then Newton on P_q.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (q as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=q {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pq = if q == 0 { 1.0 } else if q == 1 { x } else { p1 };
            let pqm1 = if q == 1 { 1.0 } else { p0 };
            dp = q as f64 * (x * pq - pqm1) / (x * x - 1.0);
            let dx = pq / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = 0.5 * (1.0 - x);
        weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// Collapsed-coordinate (Duffy) tensor Gauss rule on a simplex given by its
/// `k + 1` vertices in ambient coordinates.
pub fn simplex_rule(simplex: &[Vector], q: usize) -> Vec<(Vector, f64)> {
    let k = simplex.len() - 1;
    if k == 0 {
        return vec![(simplex[0].clone(), 1.0)];
    }
    let (gx, gw) = cached_rule(q);
    let scale = super::measure::simplex_volume(simplex) * (1..=k).map(|i| i as f64).product::<f64>();
    let edges: Vec<Vector> = (1..=k).map(|i| &simplex[i] - &simplex[i - 1]).collect();
    let mut out = Vec::with_capacity(q.pow(k as u32));
    let mut idx = vec![0usize; k];
    loop {
        let mut p = simplex[0].clone();
        let mut prod = 1.0;
        let mut w = scale;
        for (level, &i) in idx.iter().enumerate() {
            prod *= gx[i];
            p += &edges[level] * prod;
            w *= gw[i] * gx[i].powi((k - 1 - level) as i32);
        }
        out.push((p, w));
        let mut d = 0;
        loop {
            if d == k {
                return out;
            }
            idx[d] += 1;
            if idx[d] < q {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
    }
}

/// Parameters of the adaptive product cubature.
#[derive(Clone, Copy, Debug)]
pub struct Cubature {
    pub order: usize,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_depth: usize,
}

impl Default for Cubature {
    fn default() -> Self {
        Self { order: 16, rel_tol: 1e-11, abs_tol: 1e-13, max_depth: 12 }
    }
}

/// Integral estimate with an a-posteriori error bound from order doubling.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

impl std::ops::AddAssign for Estimate {
    fn add_assign(&mut self, o: Self) {
        self.value += o.value;
        self.error += o.error;
    }
}

fn diameter(s: &[Vector]) -> (f64, usize, usize) {
    let mut best = (0.0, 0, 0);
    for i in 0..s.len() {
        for j in i + 1..s.len() {
            let d = (&s[i] - &s[j]).norm();
            if d > best.0 {
                best = (d, i, j);
            }
        }
    }
    best
}

fn bisect(s: &[Vector], i: usize, j: usize) -> (Vec<Vector>, Vec<Vector>) {
    let mid = (&s[i] + &s[j]) * 0.5;
    let mut a = s.to_vec();
    let mut b = s.to_vec();
    a[j] = mid.clone();
    b[i] = mid;
    (a, b)
}

fn product_rule(sf: &[Vector], sg: &[Vector], q: usize, f: &dyn Fn(&Vector, &Vector) -> f64) -> f64 {
    let rf = simplex_rule(sf, q);
    let rg = simplex_rule(sg, q);
    let mut sum = 0.0;
    for (x, wx) in &rf {
        for (y, wy) in &rg {
            sum += wx * wy * f(x, y);
        }
    }
    sum
}

/// Adaptive integral of `f(x, y)` over the product of two simplices.
pub fn integrate_product(
    sf: &[Vector],
    sg: &[Vector],
    f: &dyn Fn(&Vector, &Vector) -> f64,
    cfg: &Cubature,
) -> Estimate {
    integrate_rec(sf, sg, f, cfg, 0)
}

fn integrate_rec(sf: &[Vector], sg: &[Vector], f: &dyn Fn(&Vector, &Vector) -> f64, cfg: &Cubature, depth: usize) -> Estimate {
    let coarse = product_rule(sf, sg, cfg.order, f);
    let fine = product_rule(sf, sg, 2 * cfg.order, f);
    let err = (coarse - fine).abs();
    if err <= cfg.abs_tol + cfg.rel_tol * fine.abs() || depth >= cfg.max_depth {
        return Estimate { value: fine, error: err };
    }
    let (df, fi, fj) = diameter(sf);
    let (dg, gi, gj) = diameter(sg);
    let mut out = Estimate::default();
    if df >= dg {
        let (a, b) = bisect(sf, fi, fj);
        out += integrate_rec(&a, sg, f, cfg, depth + 1);
        out += integrate_rec(&b, sg, f, cfg, depth + 1);
    } else {
        let (a, b) = bisect(sg, gi, gj);
        out += integrate_rec(sf, &a, f, cfg, depth + 1);
        out += integrate_rec(sf, &b, f, cfg, depth + 1);
    }
    out
}

/// Adaptive integral of a scalar function over `[a, b]`.
pub fn integrate_interval(a: f64, b: f64, f: &dyn Fn(f64) -> f64, cfg: &Cubature) -> Estimate {
    if !(b > a) {
        return Estimate::default();
    }
    interval_rec(a, b, f, cfg, 0)
}

fn interval_rule(a: f64, b: f64, q: usize, f: &dyn Fn(f64) -> f64) -> f64 {
    let (x, w) = cached_rule(q);
    let h = b - a;
    h * x.iter().zip(w).map(|(x, w)| w * f(a + h * x)).sum::<f64>()
}

fn interval_rec(a: f64, b: f64, f: &dyn Fn(f64) -> f64, cfg: &Cubature, depth: usize) -> Estimate {
    let coarse = interval_rule(a, b, cfg.order, f);
    let fine = interval_rule(a, b, 2 * cfg.order, f);
    let err = (coarse - fine).abs();
    if err <= cfg.abs_tol + cfg.rel_tol * fine.abs() || depth >= cfg.max_depth {
        return Estimate { value: fine, error: err };
    }
    let mid = 0.5 * (a + b);
    let mut out = interval_rec(a, mid, f, cfg, depth + 1);
    out += interval_rec(mid, b, f, cfg, depth + 1);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::vector;

    #[test]
    fn gauss_weights_sum_to_one_and_integrate_polynomials() {
        for q in [1, 2, 5, 16, 32] {
            let (x, w) = gauss_legendre(q);
            assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-13);
            let deg = 2 * q - 1;
            let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
            assert!((s - 1.0 / (deg as f64 + 1.0)).abs() < 1e-13, "q={q}");
        }
    }

    #[test]
    fn triangle_rule_moments() {
        let t = [vector(&[0.0, 0.0]), vector(&[1.0, 0.0]), vector(&[0.0, 1.0])];
        let r = simplex_rule(&t, 6);
        let area: f64 = r.iter().map(|(_, w)| w).sum();
        assert!((area - 0.5).abs() < 1e-14);
        // int x^2 y over the unit triangle = 2! 1! / 5! = 1/60
        let m: f64 = r.iter().map(|(p, w)| w * p[0] * p[0] * p[1]).sum();
        assert!((m - 1.0 / 60.0).abs() < 1e-14);
    }

    #[test]
    fn tetra_rule_volume() {
        let t = [vector(&[0.0, 0.0, 0.0]), vector(&[1.0, 0.0, 0.0]), vector(&[0.0, 1.0, 0.0]), vector(&[0.0, 0.0, 1.0])];
        let r = simplex_rule(&t, 4);
        let v: f64 = r.iter().map(|(_, w)| w).sum();
        assert!((v - 1.0 / 6.0).abs() < 1e-14);
    }

    #[test]
    fn adaptive_handles_kink() {
        let e = integrate_interval(-1.0, 1.0, &|x| x.abs(), &Cubature::default());
        assert!((e.value - 1.0).abs() < 1e-9, "{:?}", e);
    }
}
