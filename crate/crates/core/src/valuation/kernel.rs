//! Integrands of Hessian, coercive and level-set valuations.

use serde::{Deserialize, Serialize};

use crate::convexfn::{AffinePiece, Quadratic};
use crate::error::{Error, Result};
use crate::geometry::Polyhedron;
use crate::linalg::{unit, Matrix, Vector};

/// Factor depending on the function value `t`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Profile {
    Const { value: f64 },
    /// `height · max(0, 1 - |t - center| / half_width)`.
    Hat { center: f64, half_width: f64, height: f64 },
    /// `max(0, end - t)`.
    Ramp { end: f64 },
    /// `sum_k coeffs[k] t^k`.
    Poly { coeffs: Vec<f64> },
    /// `cos(freq · t + phase)`.
    Cos { freq: f64, phase: f64 },
}

impl Profile {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Self::Const { value } => *value,
            Self::Hat { center, half_width, height } => height * (1.0 - (t - center).abs() / half_width).max(0.0),
            Self::Ramp { end } => (end - t).max(0.0),
            Self::Poly { coeffs } => coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c),
            Self::Cos { freq, phase } => (freq * t + phase).cos(),
        }
    }

    /// Points where the profile is not smooth.
    pub fn kinks(&self) -> Vec<f64> {
        match self {
            Self::Hat { center, half_width, .. } => vec![center - half_width, *center, center + half_width],
            Self::Ramp { end } => vec![*end],
            _ => Vec::new(),
        }
    }

    /// Closed interval outside of which the profile vanishes.
    pub fn support(&self) -> (f64, f64) {
        match self {
            Self::Hat { center, half_width, height } if *height != 0.0 => (center - half_width, center + half_width),
            Self::Ramp { end } => (f64::NEG_INFINITY, *end),
            Self::Const { value } if *value == 0.0 => (0.0, 0.0),
            Self::Hat { .. } => (0.0, 0.0),
            Self::Poly { coeffs } if coeffs.iter().all(|&c| c == 0.0) => (0.0, 0.0),
            _ => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.support() == (0.0, 0.0) && self.eval(0.0) == 0.0
    }
}

/// Factor depending on a point of `R^n` (the `x` or the `y` argument).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Spatial {
    One,
    /// `prod_i max(0, radius - |z_i|)`.
    TensorHat { radius: f64 },
    /// `max(0, 1 - |z| / radius)`.
    RadialHat { radius: f64 },
    /// `max(0, 1 - |z|^2 / radius^2)^power`.
    RadialPoly { radius: f64, power: u32 },
    /// `prod_i p(|z_i|)` with `p = 1` on `[0, inner]`, linear down to 0 at `outer`.
    Plateau { inner: f64, outer: f64 },
}

impl Spatial {
    pub fn eval(&self, z: &Vector) -> f64 {
        match self {
            Self::One => 1.0,
            Self::TensorHat { radius } => z.iter().map(|c| (radius - c.abs()).max(0.0)).product(),
            Self::RadialHat { radius } => (1.0 - z.norm() / radius).max(0.0),
            Self::RadialPoly { radius, power } => (1.0 - z.norm_squared() / (radius * radius)).max(0.0).powi(*power as i32),
            Self::Plateau { inner, outer } => z
                .iter()
                .map(|c| {
                    let a = c.abs();
                    if a <= *inner {
                        1.0
                    } else {
                        ((outer - a) / (outer - inner)).max(0.0)
                    }
                })
                .product(),
        }
    }

    /// Half-width of an origin-centred cube containing the support.
    pub fn radius(&self) -> Option<f64> {
        match self {
            Self::One => None,
            Self::TensorHat { radius } | Self::RadialHat { radius } | Self::RadialPoly { radius, .. } => Some(*radius),
            Self::Plateau { outer, .. } => Some(*outer),
        }
    }

    /// Coordinate values `c` such that the factor has a kink on `{z_i = c}`.
    pub fn axis_kinks(&self) -> Vec<f64> {
        match self {
            Self::TensorHat { radius } => vec![-radius, 0.0, *radius],
            Self::Plateau { inner, outer } => vec![-outer, -inner, *inner, *outer],
            _ => Vec::new(),
        }
    }

    /// Radius of the sphere where a radial factor stops being smooth.
    fn sphere_kink(&self) -> Option<f64> {
        match self {
            Self::RadialHat { radius } | Self::RadialPoly { radius, .. } => Some(*radius),
            _ => None,
        }
    }

    pub fn is_radial(&self) -> bool {
        matches!(self, Self::One | Self::RadialHat { .. } | Self::RadialPoly { .. })
    }

}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Arity {
    /// `ζ(t, x, y)`.
    Txy,
    /// `ζ(t, y)`.
    Ty,
    /// `ζ(t, |y|)`.
    TAbsY,
    /// `ω(t)`.
    Omega,
}

/// Separable kernel `scale · profile(t) · x_factor(x) · y_factor(y)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Kernel {
    pub arity: Arity,
    pub profile: Profile,
    #[serde(default = "one")]
    pub x: Spatial,
    #[serde(default = "one")]
    pub y: Spatial,
    #[serde(default = "unit_scale")]
    pub scale: f64,
}

fn one() -> Spatial {
    Spatial::One
}
fn unit_scale() -> f64 {
    1.0
}

impl Kernel {
    pub fn new(arity: Arity, profile: Profile, x: Spatial, y: Spatial) -> Result<Self> {
        let k = Self { arity, profile, x, y, scale: 1.0 };
        k.validate()?;
        Ok(k)
    }

    pub fn txy(profile: Profile, x: Spatial, y: Spatial) -> Self {
        Self { arity: Arity::Txy, profile, x, y, scale: 1.0 }
    }

    pub fn ty(profile: Profile, y: Spatial) -> Self {
        Self { arity: Arity::Ty, profile, x: Spatial::One, y, scale: 1.0 }
    }

    pub fn omega(profile: Profile) -> Self {
        Self { arity: Arity::Omega, profile, x: Spatial::One, y: Spatial::One, scale: 1.0 }
    }

    pub fn zero(arity: Arity) -> Self {
        Self { arity, profile: Profile::Const { value: 0.0 }, x: Spatial::One, y: Spatial::One, scale: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::DegenerateInput(m.to_string()));
        match self.arity {
            Arity::Txy => Ok(()),
            Arity::Ty if self.x != Spatial::One => bad("a kernel of arity ty cannot depend on x"),
            Arity::TAbsY if self.x != Spatial::One || !self.y.is_radial() => {
                bad("a kernel of arity t_abs_y must be radial in y and independent of x")
            }
            Arity::Omega if self.x != Spatial::One || self.y != Spatial::One => bad("ω depends on t only"),
            _ => Ok(()),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.scale == 0.0 || self.profile.is_zero()
    }

    pub fn omega_at(&self, t: f64) -> f64 {
        self.scale * self.profile.eval(t)
    }
}

/// Box `[-r, r]^n` as a polyhedron.
pub(crate) fn cube(n: usize, r: f64) -> Polyhedron {
    Polyhedron::box_(&vec![-r; n], &vec![r; n])
}

fn axis_planes(n: usize, values: &[f64]) -> Vec<(Vector, f64)> {
    (0..n).flat_map(|i| values.iter().map(move |&c| (unit(n, i), c))).collect()
}

/// The curve `½ xᵀ M x + ⟨v, x⟩ + c = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct Quadric {
    pub m: Matrix,
    pub v: Vector,
    pub c: f64,
}

impl Quadric {
    pub(crate) fn sphere(n: usize, r: f64) -> Self {
        Self { m: Matrix::identity(n, n), v: Vector::zeros(n), c: -0.5 * r * r }
    }

    /// `{x : |∇q(x)| = r}`.
    fn gradient_sphere(q: &Quadratic, r: f64) -> Self {
        let a = q.a();
        Self { m: a.transpose() * a, v: a.transpose() * q.b(), c: 0.5 * (q.b().norm_squared() - r * r) }
    }
}

/// What the integration engine needs from an integrand `ζ(t, x, y)`.
pub trait KernelFn: Sync {
    fn eval(&self, t: f64, x: &Vector, y: &Vector) -> f64;
    /// Closed set containing the x-support, `None` when unbounded.
    fn x_support(&self, n: usize) -> Option<Polyhedron>;
    fn y_support(&self, n: usize) -> Option<Polyhedron>;
    /// Hyperplanes `<w, x> = b` carrying kinks on a stratum where `u = piece`.
    fn x_planes(&self, n: usize, piece: &AffinePiece) -> Vec<(Vector, f64)>;
    /// Hyperplanes in `y` carrying kinks on a stratum through `x_ref` with `u = piece`.
    fn y_planes(&self, n: usize, piece: &AffinePiece, x_ref: &Vector) -> Vec<(Vector, f64)>;
    /// Radii `r` of spheres `|x| = r` carrying kinks in `x`.
    fn x_spheres(&self) -> Vec<f64> {
        Vec::new()
    }
    fn y_spheres(&self) -> Vec<f64> {
        Vec::new()
    }
    /// Curved kinks of `x ↦ ζ(q(x), x, ∇q(x))`; planar ones come from the plane methods.
    fn quadric_kinks(&self, _q: &Quadratic) -> Vec<Quadric> {
        Vec::new()
    }
}

impl KernelFn for Kernel {
    fn eval(&self, t: f64, x: &Vector, y: &Vector) -> f64 {
        if self.scale == 0.0 || !t.is_finite() {
            return 0.0;
        }
        let p = self.profile.eval(t);
        if p == 0.0 {
            return 0.0;
        }
        self.scale * p * self.x.eval(x) * self.y.eval(y)
    }

    fn x_support(&self, n: usize) -> Option<Polyhedron> {
        self.x.radius().map(|r| cube(n, r))
    }

    fn y_support(&self, n: usize) -> Option<Polyhedron> {
        self.y.radius().map(|r| cube(n, r))
    }

    fn x_planes(&self, n: usize, piece: &AffinePiece) -> Vec<(Vector, f64)> {
        let mut out = axis_planes(n, &self.x.axis_kinks());
        if piece.slope.amax() > 0.0 {
            for t in self.profile.kinks() {
                out.push((piece.slope.clone(), t - piece.intercept));
            }
        }
        out
    }

    fn y_planes(&self, n: usize, _: &AffinePiece, _: &Vector) -> Vec<(Vector, f64)> {
        axis_planes(n, &self.y.axis_kinks())
    }

    fn x_spheres(&self) -> Vec<f64> {
        self.x.sphere_kink().into_iter().collect()
    }

    fn y_spheres(&self) -> Vec<f64> {
        self.y.sphere_kink().into_iter().collect()
    }

    fn quadric_kinks(&self, q: &Quadratic) -> Vec<Quadric> {
        let n = q.dim();
        let mut out: Vec<Quadric> =
            self.profile.kinks().into_iter().map(|t| Quadric { m: q.a().clone(), v: q.b().clone(), c: q.c() - t }).collect();
        out.extend(self.x.sphere_kink().map(|r| Quadric::sphere(n, r)));
        out.extend(self.y.sphere_kink().map(|r| Quadric::gradient_sphere(q, r)));
        out
    }
}

/// `ζ̄(t, x, y) = ζ(<x, y> - t, y, x)`.
pub struct Conjugated<'a>(pub &'a Kernel);

impl KernelFn for Conjugated<'_> {
    fn eval(&self, t: f64, x: &Vector, y: &Vector) -> f64 {
        if !t.is_finite() {
            return 0.0;
        }
        self.0.eval(x.dot(y) - t, y, x)
    }

    fn x_support(&self, n: usize) -> Option<Polyhedron> {
        self.0.y_support(n)
    }

    fn y_support(&self, n: usize) -> Option<Polyhedron> {
        self.0.x_support(n)
    }

    fn x_planes(&self, n: usize, _: &AffinePiece) -> Vec<(Vector, f64)> {
        axis_planes(n, &self.0.y.axis_kinks())
    }

    /// On a stratum `<x, y> - u(x)` equals `u*(y) = <x_ref, y> - u(x_ref)`, so the
    /// profile kinks become hyperplanes in `y`.
    fn y_planes(&self, n: usize, piece: &AffinePiece, x_ref: &Vector) -> Vec<(Vector, f64)> {
        let mut out = axis_planes(n, &self.0.x.axis_kinks());
        if x_ref.amax() > 0.0 {
            let u_ref = piece.eval(x_ref);
            for t in self.0.profile.kinks() {
                out.push((x_ref.clone(), t + u_ref));
            }
        }
        out
    }

    fn x_spheres(&self) -> Vec<f64> {
        self.0.y_spheres()
    }

    fn y_spheres(&self) -> Vec<f64> {
        self.0.x_spheres()
    }

    // Here the profile sees `⟨x, ∇q(x)⟩ - q(x) = ½ xᵀAx - c`.
    fn quadric_kinks(&self, q: &Quadratic) -> Vec<Quadric> {
        let n = q.dim();
        let inner = self.0;
        let mut out: Vec<Quadric> = inner
            .profile
            .kinks()
            .into_iter()
            .map(|t| Quadric { m: q.a().clone(), v: Vector::zeros(n), c: -q.c() - t })
            .collect();
        out.extend(inner.x.sphere_kink().map(|r| Quadric::gradient_sphere(q, r)));
        out.extend(inner.y.sphere_kink().map(|r| Quadric::sphere(n, r)));
        out
    }
}

/// A kernel with its x-support replaced by a given bounded set.
pub(crate) struct WithXSupport<'a> {
    pub inner: &'a dyn KernelFn,
    pub support: Polyhedron,
}

impl KernelFn for WithXSupport<'_> {
    fn eval(&self, t: f64, x: &Vector, y: &Vector) -> f64 {
        self.inner.eval(t, x, y)
    }
    fn x_support(&self, _: usize) -> Option<Polyhedron> {
        Some(self.support.clone())
    }
    fn y_support(&self, n: usize) -> Option<Polyhedron> {
        self.inner.y_support(n)
    }
    fn x_planes(&self, n: usize, piece: &AffinePiece) -> Vec<(Vector, f64)> {
        self.inner.x_planes(n, piece)
    }
    fn y_planes(&self, n: usize, piece: &AffinePiece, x_ref: &Vector) -> Vec<(Vector, f64)> {
        self.inner.y_planes(n, piece, x_ref)
    }
    fn x_spheres(&self) -> Vec<f64> {
        self.inner.x_spheres()
    }
    fn y_spheres(&self) -> Vec<f64> {
        self.inner.y_spheres()
    }
    fn quadric_kinks(&self, q: &Quadratic) -> Vec<Quadric> {
        self.inner.quadric_kinks(q)
    }
}
