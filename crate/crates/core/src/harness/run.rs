//! Command dispatch: each command writes its artifacts into an output directory.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use super::canonical::canonical;
use super::report::{heatmap, line_plot, num, Table};
use super::scene::{Experiment, Scene, ValuationKind};
use super::suites::{run_suite, SuiteConfig, SuiteReport, SUITES};
use crate::error::{Error, Result};
use crate::hessmeasure::{steiner_of, HessianMeasureAtlas};
use crate::subdiff::parallel_set_volume;
use crate::valuation::{
    coercive_valuation, conjugate_valuation, hessian_valuation, levelset_valuation, separation_experiment, SeparationConfig,
    SeparationReport,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Measures,
    Valuation,
    Verify,
    Separation,
    Report,
}

impl FromStr for Command {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "measures" => Self::Measures,
            "valuation" => Self::Valuation,
            "verify" => Self::Verify,
            "separation" => Self::Separation,
            "report" => Self::Report,
            other => return Err(Error::UnknownCommand(other.to_string())),
        })
    }
}

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub suites: Vec<String>,
    pub out: PathBuf,
    pub seed: u64,
    /// `key=value` tolerance overrides, applied after the scene's own.
    pub tolerances: Vec<String>,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { suites: Vec::new(), out: PathBuf::from("hessval-out"), seed: 0, tolerances: Vec::new() }
    }
}

#[derive(Clone, Debug, Default)]
pub struct RunOutcome {
    /// 0 when every selected suite passed, 1 otherwise.
    pub exit_code: i32,
    pub artifacts: Vec<PathBuf>,
    /// Human-readable lines.
    pub summary: Vec<String>,
}

struct Out<'a> {
    dir: &'a Path,
    outcome: RunOutcome,
}

impl Out<'_> {
    fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        std::fs::create_dir_all(self.dir).map_err(|e| Error::Io(format!("{}: {e}", self.dir.display())))?;
        let path = self.dir.join(name);
        std::fs::write(&path, contents).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        self.outcome.artifacts.push(path);
        Ok(())
    }

    fn say(&mut self, line: String) {
        self.outcome.summary.push(line);
    }
}

pub fn run(command: Command, scene: &Scene, opts: &RunOptions) -> Result<RunOutcome> {
    let mut tol = scene.tolerances.clone();
    for t in &opts.tolerances {
        tol.apply(t)?;
    }
    for s in &opts.suites {
        if !SUITES.contains(&s.as_str()) {
            return Err(Error::SchemaError { path: "--suite".into(), message: format!("unknown suite {s:?}") });
        }
    }
    let mut out = Out { dir: &opts.out, outcome: RunOutcome::default() };
    match command {
        Command::Measures => measures(scene, &mut out, false)?,
        Command::Valuation => valuation(scene, &mut out)?,
        Command::Verify => verify(scene, opts, &tol, &mut out)?,
        Command::Separation => separation(scene, &mut out, false)?,
        Command::Report => {
            measures(scene, &mut out, true)?;
            valuation(scene, &mut out)?;
            let has_verify = !opts.suites.is_empty() || scene.doc.experiments.iter().any(|e| matches!(e, Experiment::Verify { .. }));
            if has_verify {
                verify(scene, opts, &tol, &mut out)?;
            }
            if scene.doc.experiments.iter().any(|e| matches!(e, Experiment::Separation { .. })) {
                separation(scene, &mut out, true)?;
            }
            let names: Vec<String> =
                out.outcome.artifacts.iter().filter_map(|p| p.file_name().map(|f| f.to_string_lossy().into_owned())).collect();
            #[derive(Serialize)]
            struct Summary<'a> {
                artifacts: &'a [String],
                exit_code: i32,
                lines: &'a [String],
            }
            let text = canonical(&Summary { artifacts: &names, exit_code: out.outcome.exit_code, lines: &out.outcome.summary });
            out.write("summary.json", &text)?;
        }
    }
    Ok(out.outcome)
}

fn measure_pairs(scene: &Scene) -> Vec<(String, String)> {
    let listed: Vec<(String, String)> = scene
        .doc
        .experiments
        .iter()
        .filter_map(|e| match e {
            Experiment::Measures { function, window } => Some((function.clone(), window.clone())),
            _ => None,
        })
        .collect();
    if !listed.is_empty() {
        return listed;
    }
    let mut all = Vec::new();
    for (f, u) in &scene.functions {
        for (w, win) in &scene.windows {
            if u.dim() == win.dim() {
                all.push((f.clone(), w.clone()));
            }
        }
    }
    all
}

fn measures(scene: &Scene, out: &mut Out, plots: bool) -> Result<()> {
    let mut table = Table::new(&["function", "window", "dim", "theta_0", "theta_1", "theta_2", "theta_3", "error"]);
    for (f, w) in measure_pairs(scene) {
        let (u, win) = (&scene.functions[&f], &scene.windows[&w]);
        let n = u.dim();
        let mut row = vec![f.clone(), w.clone(), n.to_string()];
        match HessianMeasureAtlas::new(u).and_then(|a| a.measures(win)) {
            Ok(theta) => {
                row.extend((0..4).map(|i| theta.get(i).map_or(String::new(), |&v| num(v))));
                row.push(String::new());
                out.say(format!("measures {f} on {w}: {}", theta.iter().map(|&v| num(v)).collect::<Vec<_>>().join(", ")));
            }
            Err(e) => {
                row.extend((0..4).map(|_| String::new()));
                row.push(e.to_string());
                out.say(format!("measures {f} on {w}: error: {e}"));
            }
        }
        table.push(row);
        if plots && u.is_piecewise_linear() {
            if let Ok(poly) = steiner_of(u, win) {
                let top = 1.5 * poly.nodes.last().copied().unwrap_or(1.0);
                let curve: Vec<(f64, f64)> = (0..=60).map(|k| top * k as f64 / 60.0).map(|s| (s, poly.eval(s))).collect();
                let samples: Vec<(f64, f64)> = poly
                    .nodes
                    .iter()
                    .filter_map(|&s| parallel_set_volume(u, win, s).ok().map(|v| (s, v)))
                    .collect();
                let svg = line_plot(
                    &format!("Steiner polynomial of {f} on {w}"),
                    &[("fitted polynomial".into(), curve), ("parallel-set volume".into(), samples)],
                );
                out.write(&format!("steiner_{f}_{w}.svg"), &svg)?;
            }
        }
    }
    out.write("measures.csv", &table.to_csv()?)
}

fn valuation(scene: &Scene, out: &mut Out) -> Result<()> {
    let mut table = Table::new(&["function", "kernel", "kind", "index", "value", "dual_path_value", "error"]);
    for e in &scene.doc.experiments {
        let Experiment::Valuation { function, kernel, index, kind } = e else { continue };
        let (u, k, i) = (&scene.functions[function], &scene.kernels[kernel], *index);
        let result: Result<(f64, Option<f64>)> = match kind {
            ValuationKind::Hessian => hessian_valuation(k, i, u).map(|v| (v, None)),
            ValuationKind::Coercive => coercive_valuation(k, i, u).map(|v| (v, None)),
            ValuationKind::Conjugate => conjugate_valuation(k, i, u).map(|c| (c.via_conjugate, Some(c.via_kernel))),
            ValuationKind::Levelset => levelset_valuation(k, i, u).map(|v| (v, None)),
        };
        let kind_name = serde_json::to_value(kind).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default();
        let mut row = vec![function.clone(), kernel.clone(), kind_name.clone(), i.to_string()];
        match result {
            Ok((v, dual)) => {
                row.extend([num(v), dual.map(num).unwrap_or_default(), String::new()]);
                out.say(format!("{kind_name} valuation {kernel}[{i}]({function}) = {}", num(v)));
            }
            Err(err) => {
                row.extend([String::new(), String::new(), err.to_string()]);
                out.say(format!("{kind_name} valuation {kernel}[{i}]({function}): error: {err}"));
            }
        }
        table.push(row);
    }
    out.write("valuations.csv", &table.to_csv()?)
}

fn selected_suites(scene: &Scene, opts: &RunOptions) -> Vec<String> {
    if !opts.suites.is_empty() {
        return opts.suites.clone();
    }
    let mut from_scene: Vec<String> = Vec::new();
    for e in &scene.doc.experiments {
        if let Experiment::Verify { suites } = e {
            let chosen: Vec<String> = if suites.is_empty() { SUITES.iter().map(|s| s.to_string()).collect() } else { suites.clone() };
            for s in chosen {
                if !from_scene.contains(&s) {
                    from_scene.push(s);
                }
            }
        }
    }
    if from_scene.is_empty() {
        SUITES.iter().map(|s| s.to_string()).collect()
    } else {
        from_scene
    }
}

fn verify(scene: &Scene, opts: &RunOptions, tol: &super::tolerance::Tolerances, out: &mut Out) -> Result<()> {
    let cfg = SuiteConfig::from_scene(scene, opts.seed);
    let reports: Vec<SuiteReport> = selected_suites(scene, opts).iter().map(|s| run_suite(s, &cfg, tol)).collect::<Result<_>>()?;
    let mut table = Table::new(&["suite", "case", "deviation", "tolerance", "status", "note"]);
    for r in &reports {
        for c in &r.cases {
            table.push(vec![
                r.name.clone(),
                c.label.clone(),
                num(c.deviation),
                num(c.tolerance),
                if c.passed() { "pass" } else { "fail" }.into(),
                c.note.clone().unwrap_or_default(),
            ]);
        }
        let status = if r.passed() { "pass" } else { "FAIL" };
        out.say(format!("verify {}: {status} ({} cases, max deviation {})", r.name, r.cases.len(), num(r.max_deviation())));
        for c in r.failures() {
            out.say(format!("  failed {}: deviation {} > {}{}", c.label, num(c.deviation), num(c.tolerance), c.note.as_ref().map(|n| format!(" ({n})")).unwrap_or_default()));
        }
        if !r.passed() {
            out.outcome.exit_code = 1;
        }
    }
    out.write("verify.csv", &table.to_csv()?)?;
    #[derive(Serialize)]
    struct Row<'a> {
        suite: &'a str,
        passed: bool,
        max_deviation: String,
        cases: usize,
        failures: Vec<&'a str>,
    }
    let rows: Vec<Row> = reports
        .iter()
        .map(|r| Row {
            suite: &r.name,
            passed: r.passed(),
            max_deviation: num(r.max_deviation()),
            cases: r.cases.len(),
            failures: r.failures().map(|c| c.label.as_str()).collect(),
        })
        .collect();
    out.write("verify.json", &canonical(&rows))
}

fn separation(scene: &Scene, out: &mut Out, plots: bool) -> Result<()> {
    let kernel = scene.doc.experiments.iter().find_map(|e| match e {
        Experiment::Separation { kernel: Some(k) } => Some(scene.kernels[k].clone()),
        _ => None,
    });
    let cfg = SeparationConfig { kernel: kernel.unwrap_or_else(SeparationConfig::bundled_hat), ..Default::default() };
    let r = separation_experiment(&cfg)?;
    let mut table = Table::new(&["experiment", "param_1", "param_2", "value", "residual"]);
    for &(t, rr, v) in &r.indicator_values {
        table.push(vec!["indicator_family".into(), num(t), num(rr), num(v), num(r.indicator_residual)]);
    }
    for (k, &(t, s, v)) in r.cone_values.iter().enumerate() {
        table.push(vec!["cone_family".into(), num(t), num(s), num(v), num(r.cone_misfit[k])]);
    }
    for (k, &(s, rr, v)) in r.truncated_values.iter().enumerate() {
        table.push(vec!["truncated_cone_family".into(), num(s), num(rr), num(v), num(r.truncated_misfit[k])]);
    }
    out.write("separation.csv", &table.to_csv()?)?;
    out.write("separation.json", &canonical(&SeparationSummary::from(&r)))?;
    out.say(format!(
        "separation: indicator fit residual {}, |xi_1| <= {}, cone residual {}, truncated-cone residual {}, separated: {}",
        num(r.indicator_residual),
        num(r.indicator_top_max),
        num(r.cone_residual),
        num(r.truncated_residual),
        r.separated()
    ));
    if plots {
        let ss = &cfg.s_grid;
        let rs = &cfg.r_grid;
        let grid: Vec<Vec<f64>> = ss
            .iter()
            .map(|&s| rs.iter().map(|&rr| r.truncated_values.iter().zip(&r.truncated_misfit).find(|(v, _)| v.0 == s && v.1 == rr).map_or(f64::NAN, |(_, m)| *m)).collect())
            .collect();
        out.write("separation_residuals.svg", &heatmap("level-set fit misfit over (s, r)", ss, rs, &grid))?;
    }
    Ok(())
}

#[derive(Serialize)]
struct SeparationSummary {
    indicator_residual: String,
    indicator_top_max: String,
    cone_residual: String,
    truncated_residual: String,
    degenerate: bool,
    separated: bool,
}

impl From<&SeparationReport> for SeparationSummary {
    fn from(r: &SeparationReport) -> Self {
        Self {
            indicator_residual: num(r.indicator_residual),
            indicator_top_max: num(r.indicator_top_max),
            cone_residual: num(r.cone_residual),
            truncated_residual: num(r.truncated_residual),
            degenerate: r.degenerate,
            separated: r.separated(),
        }
    }
}
