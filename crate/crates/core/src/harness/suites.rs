//! Property suites run by `verify`. Each case reports its largest deviation
//! against one tolerance from [`Tolerances`].

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::scene::Scene;
use super::tolerance::Tolerances;
use crate::convexfn::{
    generate_pair, random_max_affine, random_polytope, random_window, rotation_2d, transform, AffinePiece, ConvexFunction,
    MaxAffine, PairFamily, Quadratic,
};
use crate::error::{Error, Result};
use crate::fenchel::{conjugate, lipschitz_reg};
use crate::geometry::Polyhedron;
use crate::hessmeasure::{measure_distance, projection_measures, steiner_of, HessianMeasureAtlas};
use crate::linalg::{Matrix, Vector};
use crate::subdiff::{Region, Window};
use crate::valuation::{coercive_valuation, hessian_valuation, Arity, Kernel, Profile, Spatial};

pub const SUITES: [&str; 8] = ["lattice", "duality", "covariance", "continuity", "steiner", "extremes", "simplicity", "hadwiger"];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Case {
    pub label: String,
    pub deviation: f64,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Case {
    fn new(label: impl Into<String>, deviation: f64, tolerance: f64) -> Self {
        Self { label: label.into(), deviation, tolerance, note: None }
    }

    fn from_result(label: impl Into<String>, r: Result<f64>, tolerance: f64) -> Self {
        match r {
            Ok(d) => Self::new(label, d, tolerance),
            Err(e) => Self { label: label.into(), deviation: f64::INFINITY, tolerance, note: Some(e.to_string()) },
        }
    }

    pub fn passed(&self) -> bool {
        self.deviation <= self.tolerance
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub name: String,
    pub cases: Vec<Case>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.cases.iter().all(Case::passed)
    }

    pub fn max_deviation(&self) -> f64 {
        self.cases.iter().map(|c| c.deviation).fold(0.0, f64::max)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Case> {
        self.cases.iter().filter(|c| !c.passed())
    }
}

/// Kernels compactly supported in `(x, y)` used when a scene supplies none.
pub fn bundled_kernels() -> Vec<(String, Kernel)> {
    vec![
        (
            "tent".into(),
            Kernel::txy(Profile::Const { value: 1.0 }, Spatial::TensorHat { radius: 1.5 }, Spatial::TensorHat { radius: 2.5 }),
        ),
        (
            "hat_plateau".into(),
            Kernel::txy(
                Profile::Hat { center: 0.5, half_width: 1.5, height: 1.0 },
                Spatial::Plateau { inner: 0.5, outer: 2.0 },
                Spatial::TensorHat { radius: 3.0 },
            ),
        ),
        (
            "radial_cos".into(),
            Kernel::txy(
                Profile::Cos { freq: 1.0, phase: 0.3 },
                Spatial::RadialPoly { radius: 2.0, power: 3 },
                Spatial::RadialPoly { radius: 3.0, power: 3 },
            ),
        ),
    ]
}

/// Inputs shared by all suites.
#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Random functions per dimension.
    pub functions: usize,
    /// Generated lattice pairs.
    pub pairs: usize,
    /// Random motions per function.
    pub motions: usize,
    pub windows_per_function: usize,
    /// Regularization exponents `k` with `r = 2^-k`, in increasing order.
    pub schedule: Vec<i32>,
    pub kernels: Vec<(String, Kernel)>,
    pub functions_extra: Vec<(String, ConvexFunction)>,
    pub windows_extra: Vec<(String, Window)>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            functions: 6,
            pairs: 12,
            motions: 4,
            windows_per_function: 2,
            schedule: (4..=12).collect(),
            kernels: bundled_kernels(),
            functions_extra: Vec::new(),
            windows_extra: Vec::new(),
        }
    }
}

impl SuiteConfig {
    pub fn from_scene(scene: &Scene, seed: u64) -> Self {
        let mut kernels: Vec<(String, Kernel)> =
            scene.kernels.iter().filter(|(_, k)| k.arity == Arity::Txy).map(|(n, k)| (n.clone(), k.clone())).collect();
        if kernels.is_empty() {
            kernels = bundled_kernels();
        }
        Self {
            seed,
            kernels,
            functions_extra: scene.functions.iter().map(|(n, f)| (n.clone(), f.clone())).collect(),
            windows_extra: scene.windows.iter().map(|(n, w)| (n.clone(), w.clone())).collect(),
            ..Default::default()
        }
    }

    fn mix(&self, salt: u64, k: usize) -> u64 {
        self.seed.wrapping_mul(1_000_003).wrapping_add(salt.wrapping_mul(10_007)).wrapping_add(k as u64)
    }

    /// Random piecewise-linear functions in dimensions one and two, followed by
    /// the scene's piecewise-linear functions.
    fn pl_functions(&self, salt: u64) -> Vec<(String, ConvexFunction)> {
        let mut out = Vec::new();
        for dim in 1..=2 {
            for k in 0..self.functions {
                let s = self.mix(salt, k + 100 * dim);
                out.push((format!("random{dim}d#{k}"), random_max_affine(dim, s)));
            }
        }
        out.extend(self.functions_extra.iter().filter(|(_, f)| f.is_piecewise_linear() && f.dim() <= 2).cloned());
        out
    }

    /// Bounded windows for a function: random boxes plus the scene's bounded windows.
    fn windows(&self, dim: usize, salt: u64) -> Vec<(String, Window)> {
        let mut out: Vec<(String, Window)> =
            (0..self.windows_per_function).map(|w| (format!("box#{w}"), random_window(dim, self.mix(salt, w)))).collect();
        out.extend(
            self.windows_extra.iter().filter(|(_, w)| w.dim() == dim && w.x.is_bounded() && w.y.is_bounded()).cloned(),
        );
        out
    }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn measures(u: &ConvexFunction, w: &Window) -> Result<Vec<f64>> {
    HessianMeasureAtlas::new(u)?.measures(w)
}

pub fn run_suite(name: &str, cfg: &SuiteConfig, tol: &Tolerances) -> Result<SuiteReport> {
    let cases = match name {
        "lattice" => lattice(cfg, tol),
        "duality" => duality(cfg, tol),
        "covariance" => covariance(cfg, tol),
        "continuity" => continuity(cfg, tol),
        "steiner" => steiner(cfg, tol),
        "extremes" => extremes(cfg, tol),
        "simplicity" => simplicity(cfg, tol),
        "hadwiger" => hadwiger(cfg, tol),
        other => return Err(Error::SchemaError { path: "suite".into(), message: format!("unknown suite {other:?}") }),
    };
    Ok(SuiteReport { name: name.to_string(), cases })
}

fn additivity(values: [&[f64]; 4]) -> f64 {
    let [join, meet, u, v] = values;
    (0..join.len()).map(|i| (join[i] + meet[i] - u[i] - v[i]).abs()).fold(0.0, f64::max)
}

pub fn lattice(cfg: &SuiteConfig, tol: &Tolerances) -> Vec<Case> {
    let jobs: Vec<(usize, PairFamily, usize)> = (0..cfg.pairs)
        .map(|k| {
            let fam = PairFamily::ALL[k % 4];
            let dim = if fam == PairFamily::Breakpoint1D { 1 } else { 1 + (k / 4) % 2 };
            (k, fam, dim)
        })
        .collect();
    jobs.par_iter()
        .flat_map_iter(|&(k, fam, dim)| {
            let pair = generate_pair(fam, dim, cfg.mix(1, k));
            let fs = [pair.join().clone(), pair.meet().clone(), pair.u.clone(), pair.v.clone()];
            let label = format!("pair#{k} {fam:?} n={dim}");
            let mut cases = Vec::new();
            for (wname, w) in cfg.windows(dim, cfg.mix(2, k)) {
                let r = (|| {
                    let t: Vec<Vec<f64>> = fs.iter().map(|f| measures(f, &w)).collect::<Result<_>>()?;
                    Ok(additivity([&t[0], &t[1], &t[2], &t[3]]))
                })();
                cases.push(Case::from_result(format!("{label} Θ on {wname}"), r, tol.lattice_measure));
            }
            for (kname, kernel) in &cfg.kernels {
                let r = (|| {
                    let z: Vec<Vec<f64>> = fs
                        .iter()
                        .map(|f| (0..=dim).map(|i| hessian_valuation(kernel, i, f)).collect::<Result<Vec<f64>>>())
                        .collect::<Result<_>>()?;
                    Ok(additivity([&z[0], &z[1], &z[2], &z[3]]))
                })();
                cases.push(Case::from_result(format!("{label} Z[{kname}]"), r, tol.lattice_valuation));
            }
            cases
        })
        .collect()
}

pub fn duality(cfg: &SuiteConfig, tol: &Tolerances) -> Vec<Case> {
    cfg.pl_functions(3)
        .par_iter()
        .enumerate()
        .flat_map_iter(|(k, (name, u))| {
            let n = u.dim();
            cfg.windows(n, cfg.mix(4, k))
                .into_iter()
                .map(|(wname, w)| {
                    let r = (|| {
                        let a = measures(u, &w)?;
                        let b = measures(&conjugate(u)?, &w.swapped())?;
                        Ok((0..=n).map(|i| (a[i] - b[n - i]).abs()).fold(0.0, f64::max))
                    })();
                    Case::from_result(format!("{name} on {wname}"), r, tol.duality)
                })
                .collect::<Vec<_>>()
        })
        .collect()
}

fn random_shift(n: usize, rng: &mut impl Rng) -> Vector {
    Vector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0))
}

fn radial_kernel() -> Kernel {
    Kernel::txy(
        Profile::Hat { center: 0.5, half_width: 1.5, height: 1.0 },
        Spatial::RadialPoly { radius: 1.5, power: 3 },
        Spatial::RadialPoly { radius: 2.5, power: 3 },
    )
}

/// Half-width of the slope window in the continuity suite. It exceeds the
/// Lipschitz bound `1/r` at the start of the schedule, so early steps truncate
/// part of the measure inside the window.
pub const CONTINUITY_REACH: f64 = 40.0;

pub fn continuity_kernel() -> Kernel {
    Kernel::txy(
        Profile::Hat { center: 1.0, half_width: 3.0, height: 1.0 },
        Spatial::TensorHat { radius: 2.0 },
        Spatial::RadialPoly { radius: CONTINUITY_REACH, power: 3 },
    )
}

fn coercive_kernel() -> Kernel {
    Kernel::ty(Profile::Hat { center: 1.0, half_width: 1.0, height: 1.0 }, Spatial::TensorHat { radius: 2.0 })
}

fn valuations(k: &Kernel, u: &ConvexFunction, coercive: bool) -> Result<Vec<f64>> {
    (0..=u.dim())
        .map(|i| if coercive { coercive_valuation(k, i, u) } else { hessian_valuation(k, i, u) })
        .collect()
}

pub fn covariance(cfg: &SuiteConfig, tol: &Tolerances) -> Vec<Case> {
    let fs = cfg.pl_functions(5);
    let mut cases: Vec<Case> = fs
        .par_iter()
        .enumerate()
        .flat_map_iter(|(k, (name, u))| {
            let n = u.dim();
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.mix(6, k));
            let (_, w) = cfg.windows(n, cfg.mix(7, k)).swap_remove(0);
            let mut out = Vec::new();
            for m in 0..cfg.motions {
                let shift = random_shift(n, &mut rng);
                let id = Matrix::identity(n, n);
                let r = (|| {
                    let moved = transform(u, &id, &shift)?;
                    let wm = Window::new(w.x.transform(&id, &shift), w.y.clone())?;
                    Ok(max_abs_diff(&measures(&moved, &wm)?, &measures(u, &w)?))
                })();
                out.push(Case::from_result(format!("{name} Θ translation #{m}"), r, tol.covariance_measure));
                if n == 2 {
                    let rot = rotation_2d(rng.gen_range(0.0..std::f64::consts::TAU));
                    let zero = Vector::zeros(n);
                    let r = (|| {
                        let moved = transform(u, &rot, &zero)?;
                        let wm = Window::new(w.x.transform(&rot, &zero), w.y.transform(&rot, &zero))?;
                        Ok(max_abs_diff(&measures(&moved, &wm)?, &measures(u, &w)?))
                    })();
                    out.push(Case::from_result(format!("{name} Θ rotation #{m}"), r, tol.covariance_measure));
                    let r = (|| {
                        let k = radial_kernel();
                        Ok(max_abs_diff(&valuations(&k, &transform(u, &rot, &zero)?, false)?, &valuations(&k, u, false)?))
                    })();
                    out.push(Case::from_result(format!("{name} radial Z rotation #{m}"), r, tol.covariance_valuation));
                }
            }
            out
        })
        .collect();
    // Coercive functions: support functions of bodies around the origin and quadratics.
    let coercive: Vec<(String, ConvexFunction)> = (0..cfg.functions)
        .flat_map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.mix(8, k));
            let dim = 1 + k % 2;
            let h = ConvexFunction::Support(random_polytope(dim, &mut rng));
            let l = Matrix::from_fn(dim, dim, |_, _| rng.gen_range(-0.5..0.5));
            let a = Matrix::identity(dim, dim) * 0.5 + &l * l.transpose();
            let q = ConvexFunction::Quadratic(Quadratic::new(a, random_shift(dim, &mut rng), rng.gen_range(-0.5..0.5)).expect("positive definite"));
            [(format!("support{dim}d#{k}"), h), (format!("quadratic{dim}d#{k}"), q)]
        })
        .collect();
    cases.extend(
        coercive
            .par_iter()
            .enumerate()
            .flat_map_iter(|(k, (name, u))| {
                let n = u.dim();
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.mix(9, k));
                let kernel = coercive_kernel();
                (0..cfg.motions)
                    .map(|m| {
                        let shift = random_shift(n, &mut rng);
                        let r = (|| {
                            let moved = transform(u, &Matrix::identity(n, n), &shift)?;
                            Ok(max_abs_diff(&valuations(&kernel, &moved, true)?, &valuations(&kernel, u, true)?))
                        })();
                        Case::from_result(format!("{name} coercive Z translation #{m}"), r, tol.covariance_valuation)
                    })
                    .collect::<Vec<_>>()
            })
            .collect::<Vec<_>>(),
    );
    cases
}

/// Distances along the regularization schedule; also used by the acceptance tests.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContinuityTrace {
    pub exponents: Vec<i32>,
    pub measure_distance: Vec<f64>,
    pub valuation_error: Vec<f64>,
}

impl ContinuityTrace {
    /// Largest increase between consecutive entries of a sequence.
    pub fn worst_increase(values: &[f64]) -> f64 {
        values.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    }
}

pub fn continuity_trace(u: &ConvexFunction, w: &Window, kernel: &Kernel, exponents: &[i32], resolution: usize) -> Result<ContinuityTrace> {
    let base = HessianMeasureAtlas::new(u)?;
    let z0 = valuations(kernel, u, false)?;
    let rows: Vec<(f64, f64)> = exponents
        .par_iter()
        .map(|&k| {
            let reg = lipschitz_reg(u, 2f64.powi(-k))?;
            let d = measure_distance(&HessianMeasureAtlas::new(&reg)?, &base, w, resolution)?;
            let z = valuations(kernel, &reg, false)?;
            Ok((d.iter().copied().fold(0.0, f64::max), max_abs_diff(&z, &z0)))
        })
        .collect::<Result<_>>()?;
    Ok(ContinuityTrace {
        exponents: exponents.to_vec(),
        measure_distance: rows.iter().map(|r| r.0).collect(),
        valuation_error: rows.iter().map(|r| r.1).collect(),
    })
}

/// Piecewise-linear functions with bounded domain in `R^n`, so regularization
/// changes them near every boundary point.
pub fn continuity_functions(n: usize, count: usize, seed: u64) -> Vec<ConvexFunction> {
    (0..count)
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(31 * k as u64 + n as u64));
            let pieces: Vec<AffinePiece> = (0..rng.gen_range(2..=4))
                .map(|_| AffinePiece::new(Vector::from_fn(n, |_, _| rng.gen_range(-1.5..1.5)), rng.gen_range(-0.5..0.5)))
                .collect();
            ConvexFunction::MaxAffine(MaxAffine::new(pieces, random_polytope(n, &mut rng)).expect("nonempty"))
        })
        .collect()
}

pub fn continuity(cfg: &SuiteConfig, tol: &Tolerances) -> Vec<Case> {
    let kernel = continuity_kernel();
    let mut fs: Vec<(String, ConvexFunction)> = Vec::new();
    for n in 1..=2 {
        for (k, f) in continuity_functions(n, if n == 1 { 2 } else { 1 }, cfg.mix(10, n)).into_iter().enumerate() {
            fs.push((format!("bounded{n}d#{k}"), f));
        }
    }
    fs.iter()
        .flat_map(|(name, u)| {
            let w = Window::new(
                Region::Poly(Polyhedron::box_(&vec![-2.0; u.dim()], &vec![2.0; u.dim()])),
                Region::Poly(Polyhedron::box_(&vec![-CONTINUITY_REACH; u.dim()], &vec![CONTINUITY_REACH; u.dim()])),
            )
            .expect("same dimension");
            match continuity_trace(u, &w, &kernel, &cfg.schedule, 32) {
                Ok(t) => vec![
                    Case::new(format!("{name} measure distance at k={}", t.exponents.last().unwrap_or(&0)), *t.measure_distance.last().unwrap_or(&f64::INFINITY), tol.continuity_measure),
                    Case::new(format!("{name} |ΔZ| at k={}", t.exponents.last().unwrap_or(&0)), *t.valuation_error.last().unwrap_or(&f64::INFINITY), tol.continuity_valuation),
                    Case::new(format!("{name} measure distance increase"), ContinuityTrace::worst_increase(&t.measure_distance), 1e-12),
                    Case::new(format!("{name} |ΔZ| increase"), ContinuityTrace::worst_increase(&t.valuation_error), 1e-9),
                ],
                Err(e) => vec![Case::from_result(name.clone(), Err(e), tol.continuity_measure)],
            }
        })
        .collect()
}

pub fn steiner(cfg: &SuiteConfig, tol: &Tolerances) -> Vec<Case> {
    cfg.pl_functions(11)
        .par_iter()
        .enumerate()
        .flat_map_iter(|(k, (name, u))| {
            cfg.windows(u.dim(), cfg.mix(12, k))
                .into_iter()
                .map(|(wname, w)| {
                    let r = (|| {
                        let poly = steiner_of(u, &w)?;
                        let exact = measures(u, &w)?;
                        let rel = poly.theta.iter().zip(&exact).map(|(a, b)| (a - b).abs() / b.abs().max(1.0)).fold(0.0, f64::max);
                        Ok(rel.max(poly.relative_residual))
                    })();
                    Case::from_result(format!("{name} on {wname}"), r, tol.steiner)
                })
                .collect::<Vec<_>>()
        })
        .collect()
}

pub fn extremes(cfg: &SuiteConfig, tol: &Tolerances) -> Vec<Case> {
    cfg.pl_functions(13)
        .par_iter()
        .enumerate()
        .flat_map_iter(|(k, (name, u))| {
            let n = u.dim();
            cfg.windows(n, cfg.mix(14, k))
                .into_iter()
                .map(|(wname, w)| {
                    let r = (|| {
                        let t = measures(u, &w)?;
                        let (px, py) = projection_measures(u, &w)?;
                        Ok((t[n] - px).abs().max((t[0] - py).abs()))
                    })();
                    Case::from_result(format!("{name} on {wname}"), r, tol.extremes)
                })
                .collect::<Vec<_>>()
        })
        .collect()
}

/// Max-affine functions on a random segment in the plane.
pub fn segment_functions(count: usize, seed: u64) -> Vec<ConvexFunction> {
    (0..count)
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(k as u64));
            let p = Vector::from_fn(2, |_, _| rng.gen_range(-1.0..1.0));
            let q = &p + Vector::from_fn(2, |_, _| rng.gen_range(-1.0..1.0)) + Vector::from_element(2, 0.2);
            let pieces: Vec<AffinePiece> = (0..rng.gen_range(1..=3))
                .map(|_| AffinePiece::new(Vector::from_fn(2, |_, _| rng.gen_range(-1.5..1.5)), rng.gen_range(-0.5..0.5)))
                .collect();
            ConvexFunction::MaxAffine(MaxAffine::new(pieces, Polyhedron::from_points(2, &[p, q])).expect("nonempty"))
        })
        .collect()
}

pub fn simplicity(cfg: &SuiteConfig, tol: &Tolerances) -> Vec<Case> {
    segment_functions(cfg.functions.max(1), cfg.mix(15, 0))
        .par_iter()
        .enumerate()
        .map(|(k, u)| {
            let r = (|| {
                let mut worst: f64 = 0.0;
                for (_, w) in cfg.windows(2, cfg.mix(16, k)) {
                    worst = worst.max(measures(u, &w)?[2].abs());
                }
                for (_, kernel) in &cfg.kernels {
                    worst = worst.max(hessian_valuation(kernel, 2, u)?.abs());
                }
                Ok(worst)
            })();
            Case::from_result(format!("segment#{k}"), r, tol.simplicity)
        })
        .collect()
}

pub fn hadwiger(cfg: &SuiteConfig, tol: &Tolerances) -> Vec<Case> {
    let jobs: Vec<(usize, usize)> = (0..cfg.functions.max(1)).flat_map(|k| (1..=3).map(move |d| (k, d))).collect();
    jobs.par_iter()
        .map(|&(k, dim)| {
            let pair = generate_pair(PairFamily::SplitSupport, dim, cfg.mix(17, k));
            let sides = if dim == 3 { 12 } else { 64 };
            let w = Window::new(Region::Ball { center: Vector::zeros(dim), radius: 1.0, sides }, Region::All(dim)).expect("same dimension");
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.mix(18, k));
            let coeffs: Vec<f64> = (0..=dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let r = (|| {
                let fs = [pair.join(), pair.meet(), &pair.u, &pair.v];
                let t: Vec<f64> = fs
                    .iter()
                    .map(|f| Ok(measures(f, &w)?.iter().zip(&coeffs).map(|(a, c)| a * c).sum()))
                    .collect::<Result<_>>()?;
                Ok((t[0] + t[1] - t[2] - t[3]).abs())
            })();
            Case::from_result(format!("split body #{k} n={dim}"), r, tol.hadwiger)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SuiteConfig {
        SuiteConfig { functions: 2, pairs: 4, motions: 2, windows_per_function: 1, schedule: vec![4, 8], ..Default::default() }
    }

    #[test]
    fn exact_suites_pass_on_small_inputs() {
        let tol = Tolerances::default();
        for name in ["duality", "steiner", "extremes", "simplicity", "hadwiger"] {
            let r = run_suite(name, &small(), &tol).unwrap();
            assert!(r.passed(), "{name}: {:?}", r.failures().collect::<Vec<_>>());
        }
    }

    #[test]
    fn unknown_suite() {
        assert!(run_suite("nope", &small(), &Tolerances::default()).is_err());
    }
}
