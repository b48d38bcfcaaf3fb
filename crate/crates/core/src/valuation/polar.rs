//! Integration over an interval or a polygon whose integrand kinks across known
//! lines and quadrics. In the plane the integral runs along rays from an interior
//! point, where every kink is a root of a polynomial of degree at most two.

use std::cell::{Cell, RefCell};
use std::f64::consts::TAU;

use super::kernel::Quadric;
use crate::error::{Error, Result};
use crate::geometry::{integrate_interval, Cubature, Estimate, Polyhedron};
use crate::linalg::{centroid, vector, Vector};

/// Real roots of `a s² + b s + c`.
fn roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    let scale = a.abs().max(b.abs()).max(c.abs());
    if scale == 0.0 {
        return Vec::new();
    }
    if a.abs() <= 1e-14 * scale {
        return if b.abs() > 1e-14 * scale { vec![-c / b] } else { Vec::new() };
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return Vec::new();
    }
    let q = -0.5 * (b + b.signum() * disc.sqrt());
    if q == 0.0 {
        return vec![0.0];
    }
    vec![q / a, c / q]
}

/// Restriction of a quadric to the line `p + s d`, as coefficients in `s`.
fn along(q: &Quadric, p: &Vector, d: &Vector) -> (f64, f64, f64) {
    let md = &q.m * d;
    (0.5 * d.dot(&md), md.dot(p) + q.v.dot(d), 0.5 * p.dot(&(&q.m * p)) + q.v.dot(p) + q.c)
}

pub(crate) fn integrate_with_kinks(
    region: &Polyhedron,
    lines: &[(Vector, f64)],
    quadrics: &[Quadric],
    f: &dyn Fn(&Vector) -> f64,
    cfg: &Cubature,
) -> Result<Estimate> {
    match region.dim() {
        1 => Ok(interval(region, lines, quadrics, f, cfg)),
        2 => Ok(planar(region, lines, quadrics, f, cfg)),
        n => Err(Error::DegenerateInput(format!("ray integration in R^{n}"))),
    }
}

fn integrate_pieces(mut cuts: Vec<f64>, lo: f64, hi: f64, g: &dyn Fn(f64) -> f64, cfg: &Cubature) -> Estimate {
    cuts.retain(|&s| s > lo && s < hi);
    cuts.push(lo);
    cuts.push(hi);
    cuts.sort_by(f64::total_cmp);
    let mut out = Estimate::default();
    for w in cuts.windows(2) {
        out += integrate_interval(w[0], w[1], g, cfg);
    }
    out
}

fn interval(region: &Polyhedron, lines: &[(Vector, f64)], quadrics: &[Quadric], f: &dyn Fn(&Vector) -> f64, cfg: &Cubature) -> Estimate {
    let (lo, hi) = region.vertices().iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v[0]), hi.max(v[0])));
    let mut cuts: Vec<f64> = lines.iter().filter(|(w, _)| w[0] != 0.0).map(|(w, b)| b / w[0]).collect();
    for q in quadrics {
        cuts.extend(roots(0.5 * q.m[(0, 0)], q.v[0], q.c));
    }
    let point = RefCell::new(Vector::zeros(1));
    integrate_pieces(
        cuts,
        lo,
        hi,
        &|s| {
            let mut p = point.borrow_mut();
            p[0] = s;
            f(&p)
        },
        cfg,
    )
}

fn planar(region: &Polyhedron, lines: &[(Vector, f64)], quadrics: &[Quadric], f: &dyn Fn(&Vector) -> f64, cfg: &Cubature) -> Estimate {
    let center = centroid(2, region.vertices());
    let edges: Vec<(Vector, f64)> = region.halfspaces().iter().map(|h| (h.normal.clone(), h.offset)).collect();
    let all: Vec<&(Vector, f64)> = lines.iter().chain(edges.iter()).collect();
    let angle_of = |p: &Vector| (p[1] - center[1]).atan2(p[0] - center[0]);

    // Angles where the ordering of the radial breakpoints can change.
    let mut angles = Vec::new();
    for (i, (w1, b1)) in all.iter().map(|l| (&l.0, l.1)).enumerate() {
        for (w2, b2) in all[i + 1..].iter().map(|l| (&l.0, l.1)) {
            let det = w1[0] * w2[1] - w1[1] * w2[0];
            if det.abs() > 1e-14 * w1.norm() * w2.norm() {
                let p = vector(&[(b1 * w2[1] - b2 * w1[1]) / det, (w1[0] * b2 - w2[0] * b1) / det]);
                if region.contains(&p) {
                    angles.push(angle_of(&p));
                }
            }
        }
        let p0 = w1 * (b1 / w1.norm_squared());
        let d = vector(&[-w1[1], w1[0]]);
        for q in quadrics {
            let (a, b, c) = along(q, &p0, &d);
            for s in roots(a, b, c) {
                let p = &p0 + &d * s;
                if region.contains(&p) {
                    angles.push(angle_of(&p));
                }
            }
        }
    }
    // Rays tangent to a quadric, where a pair of radial roots appears.
    const SAMPLES: usize = 720;
    for q in quadrics {
        let disc = |th: f64| {
            let (a, b, c) = along(q, &center, &vector(&[th.cos(), th.sin()]));
            b * b - 4.0 * a * c
        };
        let mut prev = (0.0, disc(0.0));
        for k in 1..=SAMPLES {
            let th = TAU * k as f64 / SAMPLES as f64;
            let cur = (th, disc(th));
            if (prev.1 < 0.0) != (cur.1 < 0.0) {
                let (mut a, mut b) = (prev, cur);
                for _ in 0..60 {
                    let mid = 0.5 * (a.0 + b.0);
                    let m = (mid, disc(mid));
                    if (m.1 < 0.0) == (a.1 < 0.0) {
                        a = m;
                    } else {
                        b = m;
                    }
                }
                angles.push(0.5 * (a.0 + b.0));
            }
            prev = cur;
        }
    }
    let mut angles: Vec<f64> = angles.into_iter().map(|a| a.rem_euclid(TAU)).collect();
    angles.sort_by(f64::total_cmp);
    angles.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    let start = angles.first().copied().unwrap_or(0.0);
    let mut cuts = angles;
    cuts.push(start + TAU);

    let inner_rel = Cell::new(0.0_f64);
    let point = RefCell::new(Vector::zeros(2));
    let radial = |th: f64| {
        let e = vector(&[th.cos(), th.sin()]);
        let reach = edges
            .iter()
            .filter(|(w, _)| w.dot(&e) > 1e-15)
            .map(|(w, b)| (b - w.dot(&center)) / w.dot(&e))
            .fold(f64::INFINITY, f64::min)
            .max(0.0);
        let mut breaks: Vec<f64> = lines
            .iter()
            .filter(|(w, _)| w.dot(&e).abs() > 1e-15)
            .map(|(w, b)| (b - w.dot(&center)) / w.dot(&e))
            .collect();
        for q in quadrics {
            let (a, b, c) = along(q, &center, &e);
            breaks.extend(roots(a, b, c));
        }
        let est = integrate_pieces(
            breaks,
            0.0,
            reach,
            &|r| {
                let mut p = point.borrow_mut();
                p[0] = center[0] + r * e[0];
                p[1] = center[1] + r * e[1];
                r * f(&p)
            },
            cfg,
        );
        if est.value != 0.0 {
            inner_rel.set(inner_rel.get().max(est.error / est.value.abs()));
        }
        est.value
    };
    let mut out = integrate_pieces(cuts, start, start + TAU, &radial, cfg);
    out.error += inner_rel.get() * out.value.abs();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;

    #[test]
    fn disk_area_through_square_clip() {
        // Indicator of the unit disk inside [-2,2]^2, with the circle as a declared kink.
        let sq = Polyhedron::box_(&[-2.0, -2.0], &[2.0, 2.0]);
        let circle = Quadric { m: Matrix::identity(2, 2), v: Vector::zeros(2), c: -0.5 };
        let f = |x: &Vector| if x.norm() <= 1.0 { 1.0 } else { 0.0 };
        let e = integrate_with_kinks(&sq, &[], &[circle], &f, &Cubature::default()).unwrap();
        assert!((e.value - std::f64::consts::PI).abs() < 1e-10, "{}", e.value);
    }

    #[test]
    fn off_center_circle_and_lines() {
        // |x - (1,0)| <= 1 intersected with x_2 >= 0, inside [0,3]x[-1,1]: half disk.
        let region = Polyhedron::box_(&[0.0, -1.0], &[3.0, 1.0]);
        let circle = Quadric { m: Matrix::identity(2, 2), v: vector(&[-1.0, 0.0]), c: 0.0 };
        let line = (vector(&[0.0, 1.0]), 0.0);
        let f = |x: &Vector| if (x - vector(&[1.0, 0.0])).norm() <= 1.0 && x[1] >= 0.0 { x[0] } else { 0.0 };
        let e = integrate_with_kinks(&region, &[line], &[circle], &f, &Cubature::default()).unwrap();
        assert!((e.value - std::f64::consts::FRAC_PI_2).abs() < 1e-10, "{}", e.value);
    }

    #[test]
    fn interval_with_quadric() {
        let region = Polyhedron::box_(&[-1.0], &[2.0]);
        let q = Quadric { m: Matrix::from_element(1, 1, 2.0), v: Vector::zeros(1), c: -0.25 };
        let f = |x: &Vector| (x[0] * x[0] - 0.25).abs();
        let e = integrate_with_kinks(&region, &[], &[q], &f, &Cubature::default()).unwrap();
        // ∫_{-1}^{2} |x² - 1/4| dx
        let prim = |x: f64| x * x * x / 3.0 - 0.25 * x;
        let exact = (prim(-0.5) - prim(-1.0)) - (prim(0.5) - prim(-0.5)) + (prim(2.0) - prim(0.5));
        assert!((e.value - exact).abs() < 1e-12, "{} vs {exact}", e.value);
    }
}
