//! Seeded generators of pairs whose minimum is convex.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::lattice::affine;
use super::{AffinePiece, ConvexFunction, LatticePair, MaxAffine};
use crate::geometry::{Halfspace, Polyhedron};
use crate::linalg::Vector;
use crate::subdiff::{Region, Window};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairFamily {
    /// `(h_{K1}, h_{K2})` for a polytope cut in two by a hyperplane.
    SplitSupport,
    /// `(I_{K1}, I_{K2})` for the same kind of split.
    SplitIndicator,
    /// Two overlapping sub-envelopes of a 1D max-affine function.
    Breakpoint1D,
    /// `(u, u)`.
    Trivial,
}

impl PairFamily {
    pub const ALL: [PairFamily; 4] = [Self::SplitSupport, Self::SplitIndicator, Self::Breakpoint1D, Self::Trivial];
}

/// Random polytope containing a neighbourhood of the origin.
pub fn random_polytope(dim: usize, rng: &mut impl Rng) -> Polyhedron {
    match dim {
        1 => Polyhedron::interval(rng.gen_range(-2.0..-0.5), rng.gen_range(0.5..2.0)),
        2 => {
            let m = rng.gen_range(5..=7);
            let pts: Vec<Vector> = (0..m)
                .map(|k| {
                    let slot = std::f64::consts::TAU / m as f64;
                    let ang = slot * (k as f64 + rng.gen_range(-0.3..0.3));
                    let r = rng.gen_range(0.6..1.4);
                    Vector::from_vec(vec![r * ang.cos(), r * ang.sin()])
                })
                .collect();
            Polyhedron::from_points(2, &pts)
        }
        _ => {
            let mut pts = Vec::new();
            for axis in 0..3 {
                for sign in [-1.0, 1.0] {
                    let mut p = Vector::zeros(3);
                    p[axis] = sign * rng.gen_range(0.6..1.4);
                    for j in 0..3 {
                        if j != axis {
                            p[j] += rng.gen_range(-0.2..0.2);
                        }
                    }
                    pts.push(p);
                }
            }
            for _ in 0..2 {
                pts.push(Vector::from_fn(3, |_, _| rng.gen_range(-0.8..0.8)));
            }
            Polyhedron::from_points(3, &pts)
        }
    }
}

fn random_unit(dim: usize, rng: &mut impl Rng) -> Vector {
    loop {
        let v = Vector::from_fn(dim, |_, _| rng.gen_range(-1.0..1.0));
        let norm = v.norm();
        if norm > 0.1 && norm <= 1.0 {
            return v / norm;
        }
    }
}

fn split(dim: usize, rng: &mut impl Rng) -> (Polyhedron, Polyhedron, Polyhedron) {
    let k = random_polytope(dim, rng);
    let normal = random_unit(dim, rng);
    let through = Vector::from_fn(dim, |_, _| rng.gen_range(-0.1..0.1));
    let h = Halfspace::new(normal.clone(), normal.dot(&through)).expect("unit normal");
    let k1 = k.with_halfspace(h.clone());
    let k2 = k.with_halfspace(h.flipped());
    (k, k1, k2)
}

/// Deterministic in `(family, dim, seed)`. `Breakpoint1D` is always one-dimensional.
pub fn generate_pair(family: PairFamily, dim: usize, seed: u64) -> LatticePair {
    let dim = dim.clamp(1, 3);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (dim as u64) << 32);
    match family {
        PairFamily::SplitSupport => {
            let (k, k1, k2) = split(dim, &mut rng);
            let meet = k1.intersect(&k2).expect("same dimension");
            LatticePair {
                u: ConvexFunction::Support(k1),
                v: ConvexFunction::Support(k2),
                certificate: family,
                join: ConvexFunction::Support(k),
                meet: ConvexFunction::Support(meet),
            }
        }
        PairFamily::SplitIndicator => {
            let (k, k1, k2) = split(dim, &mut rng);
            let join = k1.intersect(&k2).expect("same dimension");
            LatticePair {
                u: ConvexFunction::Indicator(k1),
                v: ConvexFunction::Indicator(k2),
                certificate: family,
                join: ConvexFunction::Indicator(join),
                meet: ConvexFunction::Indicator(k),
            }
        }
        PairFamily::Breakpoint1D => {
            let m = rng.gen_range(4..=6);
            let mut slopes: Vec<f64> = (0..m).map(|_| rng.gen_range(-3.0..3.0)).collect();
            slopes.sort_by(|a, b| a.partial_cmp(b).unwrap());
            for j in 1..m {
                if slopes[j] - slopes[j - 1] < 0.2 {
                    slopes[j] = slopes[j - 1] + 0.2;
                }
            }
            let mut breaks: Vec<f64> = (0..m - 1).map(|_| rng.gen_range(-2.0..2.0)).collect();
            breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
            for j in 1..m - 1 {
                if breaks[j] - breaks[j - 1] < 0.2 {
                    breaks[j] = breaks[j - 1] + 0.2;
                }
            }
            let mut pieces = vec![affine(&[slopes[0]], rng.gen_range(-1.0..1.0))];
            for j in 1..m {
                // Continuity at breaks[j-1].
                let prev = &pieces[j - 1];
                let c = prev.intercept + (prev.slope[0] - slopes[j]) * breaks[j - 1];
                pieces.push(affine(&[slopes[j]], c));
            }
            let mid = rng.gen_range(1..m - 1);
            let mk = |ps: &[AffinePiece]| {
                ConvexFunction::MaxAffine(MaxAffine::on_whole_space(ps.to_vec()).expect("nonempty"))
            };
            LatticePair {
                u: mk(&pieces[..=mid]),
                v: mk(&pieces[mid..]),
                certificate: family,
                join: mk(&pieces),
                meet: mk(&pieces[mid..=mid]),
            }
        }
        PairFamily::Trivial => {
            let m = rng.gen_range(2..=5);
            let pieces: Vec<AffinePiece> = (0..m)
                .map(|_| {
                    AffinePiece::new(Vector::from_fn(dim, |_, _| rng.gen_range(-2.0..2.0)), rng.gen_range(-1.0..1.0))
                })
                .collect();
            let half = rng.gen_range(0.5..2.0);
            let domain = Polyhedron::box_(&vec![-half; dim], &vec![half; dim]);
            let u = ConvexFunction::MaxAffine(MaxAffine::new(pieces, domain).expect("nonempty"));
            LatticePair { v: u.clone(), join: u.clone(), meet: u.clone(), u, certificate: family }
        }
    }
}

/// Random max-affine function with 2 to 5 pieces on the whole space, a box
/// or a random polytope (chosen by the seed).
pub fn random_max_affine(dim: usize, seed: u64) -> ConvexFunction {
    let dim = dim.clamp(1, 3);
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ dim as u64);
    let m = rng.gen_range(2..=5);
    let pieces: Vec<AffinePiece> = (0..m)
        .map(|_| AffinePiece::new(Vector::from_fn(dim, |_, _| rng.gen_range(-2.0..2.0)), rng.gen_range(-1.0..1.0)))
        .collect();
    let domain = match seed % 3 {
        0 => Polyhedron::whole(dim),
        1 => {
            let lo: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.5..-0.3)).collect();
            let hi: Vec<f64> = (0..dim).map(|_| rng.gen_range(0.3..1.5)).collect();
            Polyhedron::box_(&lo, &hi)
        }
        _ => random_polytope(dim, &mut rng),
    };
    ConvexFunction::MaxAffine(MaxAffine::new(pieces, domain).expect("nonempty"))
}

/// Random bounded product window `[a, b] x [c, d]` (boxes in each factor).
pub fn random_window(dim: usize, seed: u64) -> Window {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0xD1B5_4A32_D192_ED03) ^ 0x5EED);
    let mut side = |reach: f64| {
        let lo: Vec<f64> = (0..dim).map(|_| rng.gen_range(-reach..0.0)).collect();
        let hi: Vec<f64> = lo.iter().map(|l| l + rng.gen_range(0.4 * reach..1.6 * reach)).collect();
        Region::Poly(Polyhedron::box_(&lo, &hi))
    };
    let x = side(2.0);
    let y = side(3.0);
    Window::new(x, y).expect("same dimension")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convexfn::lattice_ops;

    #[test]
    fn deterministic_in_seed() {
        for fam in PairFamily::ALL {
            assert_eq!(generate_pair(fam, 2, 7), generate_pair(fam, 2, 7));
        }
    }

    #[test]
    fn split_pieces_are_full_dimensional() {
        for dim in 1..=3 {
            for seed in 0..5 {
                let p = generate_pair(PairFamily::SplitIndicator, dim, seed);
                for f in [&p.u, &p.v] {
                    if let ConvexFunction::Indicator(k) = f {
                        assert_eq!(k.dimension(), Some(dim));
                    }
                }
            }
        }
    }

    #[test]
    fn constructive_matches_certified() {
        for fam in PairFamily::ALL {
            for seed in 0..3 {
                let p = generate_pair(fam, 2, seed);
                let r = lattice_ops(&p.u, &p.v).unwrap();
                for x in crate::convexfn::lattice::sample_box(p.u.dim(), 2.5).iter().step_by(97) {
                    for (a, b) in [(r.meet.eval(x), p.meet().eval(x)), (r.join.eval(x), p.join().eval(x))] {
                        assert!(a == b || (a - b).abs() < 1e-9 * (1.0 + a.abs()), "{fam:?} {seed}: {a} vs {b}");
                    }
                }
            }
        }
    }

    #[test]
    fn breakpoint_meet_is_shared_piece() {
        let p = generate_pair(PairFamily::Breakpoint1D, 1, 3);
        for x in [-3.0, -1.0, 0.0, 0.5, 2.0, 4.0] {
            let x = Vector::from_vec(vec![x]);
            let lhs = p.u.eval(&x).min(p.v.eval(&x));
            assert!((lhs - p.meet().eval(&x)).abs() < 1e-12);
        }
    }
}
