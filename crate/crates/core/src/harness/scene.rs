//! Scene documents: named functions, kernels and windows plus a list of
//! experiments, stored as JSON with schema tag `hessval/1`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::canonical::canonical;
use super::tolerance::Tolerances;
use crate::convexfn::{AffinePiece, ConvexFunction, GridSampled, MaxAffine, Quadratic};
use crate::error::{Error, Result};
use crate::geometry::Polyhedron;
use crate::linalg::{Matrix, Vector};
use crate::subdiff::{Region, Window, DEFAULT_BALL_SIDES};
use crate::valuation::{Arity, Kernel};

pub const SCHEMA: &str = "hessval/1";

/// A subset of `R^n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SetRecord {
    Box { lo: Vec<f64>, hi: Vec<f64> },
    Points { points: Vec<Vec<f64>> },
    /// Rows `[n_1, ..., n_d, b]` meaning `<n, x> <= b`.
    Halfspaces { dim: usize, rows: Vec<Vec<f64>> },
    Ball {
        center: Vec<f64>,
        radius: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        sides: Option<usize>,
    },
    All { dim: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceRecord {
    pub slope: Vec<f64>,
    pub intercept: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctionRecord {
    MaxAffine {
        pieces: Vec<PieceRecord>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        domain: Option<SetRecord>,
    },
    Quadratic {
        a: Vec<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        b: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        c: Option<f64>,
    },
    Indicator { set: SetRecord },
    Support { set: SetRecord },
    Grid { lo: Vec<f64>, step: f64, counts: Vec<usize>, values: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowRecord {
    pub x: SetRecord,
    pub y: SetRecord,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ValuationKind {
    #[default]
    Hessian,
    Coercive,
    Conjugate,
    Levelset,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case", deny_unknown_fields)]
pub enum Experiment {
    Measures { function: String, window: String },
    Valuation {
        function: String,
        kernel: String,
        index: usize,
        #[serde(default)]
        kind: ValuationKind,
    },
    Verify {
        #[serde(default)]
        suites: Vec<String>,
    },
    Separation {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        kernel: Option<String>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneDoc {
    pub schema: String,
    #[serde(default)]
    pub functions: BTreeMap<String, FunctionRecord>,
    #[serde(default)]
    pub kernels: BTreeMap<String, Kernel>,
    #[serde(default)]
    pub windows: BTreeMap<String, WindowRecord>,
    #[serde(default)]
    pub experiments: Vec<Experiment>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub tolerances: BTreeMap<String, f64>,
}

/// A validated scene.
#[derive(Clone, Debug, PartialEq)]
pub struct Scene {
    pub doc: SceneDoc,
    pub functions: BTreeMap<String, ConvexFunction>,
    pub kernels: BTreeMap<String, Kernel>,
    pub windows: BTreeMap<String, Window>,
    pub tolerances: Tolerances,
}

fn schema_err(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::SchemaError { path: path.into(), message: message.into() }
}

/// Prefixes the location of an error raised while building a node.
fn at(path: &str, e: Error) -> Error {
    match e {
        Error::NonConvexInput { path: inner, message } => Error::NonConvexInput { path: format!("{path}.{}", inner.to_lowercase()), message },
        Error::SchemaError { path: inner, message } => Error::SchemaError { path: format!("{path}.{inner}"), message },
        Error::DimensionMismatch { .. } => e,
        other => schema_err(path, other.to_string()),
    }
}

fn vector(xs: &[f64]) -> Vector {
    Vector::from_column_slice(xs)
}

impl SetRecord {
    pub fn dim(&self) -> usize {
        match self {
            Self::Box { lo, .. } => lo.len(),
            Self::Points { points } => points.first().map_or(0, Vec::len),
            Self::Halfspaces { dim, .. } | Self::All { dim } => *dim,
            Self::Ball { center, .. } => center.len(),
        }
    }

    pub fn to_region(&self, path: &str) -> Result<Region> {
        let region = match self {
            Self::Box { lo, hi } => {
                if lo.len() != hi.len() {
                    return Err(schema_err(format!("{path}.hi"), "lo and hi differ in length"));
                }
                if lo.iter().zip(hi).any(|(a, b)| !(a <= b)) {
                    return Err(schema_err(path, "box is empty"));
                }
                Region::Poly(Polyhedron::box_(lo, hi))
            }
            Self::Points { points } => {
                let n = self.dim();
                if n == 0 {
                    return Err(schema_err(format!("{path}.points"), "need at least one point"));
                }
                if let Some(k) = points.iter().position(|p| p.len() != n) {
                    return Err(schema_err(format!("{path}.points[{k}]"), format!("expected {n} coordinates")));
                }
                let pts: Vec<Vector> = points.iter().map(|p| vector(p)).collect();
                Region::Poly(Polyhedron::from_points(n, &pts))
            }
            Self::Halfspaces { dim, rows } => {
                if let Some(k) = rows.iter().position(|r| r.len() != dim + 1) {
                    return Err(schema_err(format!("{path}.rows[{k}]"), format!("expected {} entries", dim + 1)));
                }
                Region::Poly(Polyhedron::from_rows(*dim, rows).map_err(|e| at(path, e))?)
            }
            Self::Ball { center, radius, sides } => {
                if !(*radius > 0.0) {
                    return Err(schema_err(format!("{path}.radius"), "radius must be positive"));
                }
                Region::Ball { center: vector(center), radius: *radius, sides: sides.unwrap_or(DEFAULT_BALL_SIDES) }
            }
            Self::All { dim } => Region::All(*dim),
        };
        if region.dim() == 0 || region.dim() > 3 {
            return Err(schema_err(path, "dimension must be 1, 2 or 3"));
        }
        if region.polytope().is_empty() {
            return Err(schema_err(path, "set is empty"));
        }
        Ok(region)
    }

    pub fn to_polyhedron(&self, path: &str) -> Result<Polyhedron> {
        self.to_region(path).map(|r| r.polytope())
    }
}

impl FunctionRecord {
    pub fn build(&self, path: &str) -> Result<ConvexFunction> {
        match self {
            Self::MaxAffine { pieces, domain } => {
                let n = pieces.first().map(|p| p.slope.len()).ok_or_else(|| schema_err(format!("{path}.pieces"), "need at least one piece"))?;
                if let Some(k) = pieces.iter().position(|p| p.slope.len() != n) {
                    return Err(schema_err(format!("{path}.pieces[{k}].slope"), format!("expected {n} entries")));
                }
                let domain = match domain {
                    Some(d) => d.to_polyhedron(&format!("{path}.domain"))?,
                    None => Polyhedron::whole(n),
                };
                if domain.dim() != n {
                    return Err(Error::DimensionMismatch { expected: n, found: domain.dim() });
                }
                let pieces = pieces.iter().map(|p| AffinePiece::new(vector(&p.slope), p.intercept)).collect();
                MaxAffine::new(pieces, domain).map(ConvexFunction::MaxAffine).map_err(|e| at(path, e))
            }
            Self::Quadratic { a, b, c } => {
                let n = a.len();
                if n == 0 {
                    return Err(schema_err(format!("{path}.a"), "matrix is empty"));
                }
                if let Some(k) = a.iter().position(|row| row.len() != n) {
                    return Err(schema_err(format!("{path}.a[{k}]"), format!("expected {n} entries")));
                }
                let m = Matrix::from_fn(n, n, |i, j| a[i][j]);
                let b = b.as_ref().map_or_else(|| Vector::zeros(n), |b| vector(b));
                Quadratic::new(m, b, c.unwrap_or(0.0)).map(ConvexFunction::Quadratic).map_err(|e| at(path, e))
            }
            Self::Indicator { set } => {
                ConvexFunction::indicator(set.to_polyhedron(&format!("{path}.set"))?).map_err(|e| at(path, e))
            }
            Self::Support { set } => ConvexFunction::support(set.to_polyhedron(&format!("{path}.set"))?).map_err(|e| at(path, e)),
            Self::Grid { lo, step, counts, values } => GridSampled::new(lo.clone(), *step, counts.clone(), values.clone())
                .map(ConvexFunction::Grid)
                .map_err(|e| at(path, e)),
        }
    }
}

impl SceneDoc {
    pub fn new() -> Self {
        Self {
            schema: SCHEMA.to_string(),
            functions: BTreeMap::new(),
            kernels: BTreeMap::new(),
            windows: BTreeMap::new(),
            experiments: Vec::new(),
            tolerances: BTreeMap::new(),
        }
    }
}

impl Default for SceneDoc {
    fn default() -> Self {
        Self::new()
    }
}

fn lookup<'a, T>(map: &'a BTreeMap<String, T>, name: &str, path: String, what: &str) -> Result<&'a T> {
    map.get(name).ok_or_else(|| schema_err(path, format!("unknown {what} {name:?}")))
}

impl Scene {
    pub fn from_doc(doc: SceneDoc) -> Result<Self> {
        if doc.schema != SCHEMA {
            return Err(schema_err("schema", format!("expected {SCHEMA:?}, found {:?}", doc.schema)));
        }
        let mut functions = BTreeMap::new();
        for (name, rec) in &doc.functions {
            functions.insert(name.clone(), rec.build(&format!("functions.{name}"))?);
        }
        for (name, k) in &doc.kernels {
            k.validate().map_err(|e| at(&format!("kernels.{name}"), e))?;
        }
        let mut windows = BTreeMap::new();
        for (name, rec) in &doc.windows {
            let path = format!("windows.{name}");
            let x = rec.x.to_region(&format!("{path}.x"))?;
            let y = rec.y.to_region(&format!("{path}.y"))?;
            windows.insert(name.clone(), Window::new(x, y)?);
        }
        let mut tolerances = Tolerances::default();
        for (k, v) in &doc.tolerances {
            tolerances.set(k, *v)?;
        }
        for (idx, exp) in doc.experiments.iter().enumerate() {
            let path = |field: &str| format!("experiments[{idx}].{field}");
            match exp {
                Experiment::Measures { function, window } => {
                    let f = lookup(&functions, function, path("function"), "function")?;
                    let w = lookup(&windows, window, path("window"), "window")?;
                    if f.dim() != w.dim() {
                        return Err(Error::DimensionMismatch { expected: f.dim(), found: w.dim() });
                    }
                }
                Experiment::Valuation { function, kernel, index, kind } => {
                    let f = lookup(&functions, function, path("function"), "function")?;
                    let k = lookup(&doc.kernels, kernel, path("kernel"), "kernel")?;
                    if *index > f.dim() {
                        return Err(schema_err(path("index"), format!("index exceeds dimension {}", f.dim())));
                    }
                    let wants_omega = *kind == ValuationKind::Levelset;
                    if wants_omega != (k.arity == Arity::Omega) {
                        return Err(schema_err(path("kernel"), format!("kernel {kernel:?} has the wrong arity for a {kind:?} valuation")));
                    }
                }
                Experiment::Verify { suites } => {
                    for (s, name) in suites.iter().enumerate() {
                        if !super::suites::SUITES.contains(&name.as_str()) {
                            return Err(schema_err(format!("experiments[{idx}].suites[{s}]"), format!("unknown suite {name:?}")));
                        }
                    }
                }
                Experiment::Separation { kernel } => {
                    if let Some(k) = kernel {
                        lookup(&doc.kernels, k, path("kernel"), "kernel")?;
                    }
                }
            }
        }
        let kernels = doc.kernels.clone();
        Ok(Self { doc, functions, kernels, windows, tolerances })
    }

    /// Canonical JSON text of the scene document.
    pub fn to_canonical(&self) -> String {
        canonical(&self.doc)
    }
}

pub fn parse_scene(text: &str) -> Result<Scene> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let doc: SceneDoc = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        schema_err(if path == "." { String::new() } else { path }, e.into_inner().to_string())
    })?;
    Scene::from_doc(doc)
}

pub fn load_scene(path: &std::path::Path) -> Result<Scene> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_scene(&text)
}

pub fn serialize_scene(scene: &Scene) -> String {
    scene.to_canonical()
}

/// The demo scene shipped with the command-line tool.
pub const DEMO_SCENE: &str = include_str!("demo_scene.json");

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_scene() {
        let s = parse_scene(
            r#"{"schema": "hessval/1",
                "functions": {"q": {"type": "quadratic", "a": [[1.0]]}},
                "windows": {"w": {"x": {"kind": "box", "lo": [-1], "hi": [1]}, "y": {"kind": "all", "dim": 1}}}}"#,
        )
        .unwrap();
        assert_eq!(s.functions.len(), 1);
    }

    #[test]
    fn negative_eigenvalue_rejected() {
        let e = parse_scene(r#"{"schema": "hessval/1", "functions": {"q": {"type": "quadratic", "a": [[1.0, 0.0], [0.0, -0.1]]}}}"#).unwrap_err();
        assert!(matches!(e, Error::NonConvexInput { ref path, .. } if path == "functions.q.a"), "{e:?}");
    }

    #[test]
    fn schema_errors_carry_paths() {
        let e = parse_scene(r#"{"schema": "hessval/1", "functions": {"f": {"type": "max_affine", "pieces": [{"slope": [1], "intercpt": 0}]}}}"#).unwrap_err();
        match e {
            Error::SchemaError { path, .. } => assert!(path.starts_with("functions.f"), "{path}"),
            other => panic!("{other:?}"),
        }
        let e = parse_scene(r#"{"schema": "hessval/1", "experiments": [{"command": "measures", "function": "nope", "window": "w"}]}"#).unwrap_err();
        assert!(matches!(e, Error::SchemaError { ref path, .. } if path == "experiments[0].function"), "{e:?}");
        assert!(matches!(parse_scene(r#"{"schema": "other"}"#), Err(Error::SchemaError { .. })));
    }

    #[test]
    fn demo_scene_is_canonical() {
        let s = parse_scene(DEMO_SCENE).unwrap();
        assert_eq!(serialize_scene(&s), DEMO_SCENE);
        assert_eq!(parse_scene(&serialize_scene(&s)).unwrap(), s);
    }
}
