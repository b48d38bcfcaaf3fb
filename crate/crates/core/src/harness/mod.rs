//! Scene files, property suites and report emission behind the command-line tool.

pub mod canonical;
pub mod report;
pub mod run;
pub mod scene;
pub mod suites;
pub mod tolerance;

pub use run::{run, Command, RunOptions, RunOutcome};
pub use scene::{load_scene, parse_scene, serialize_scene, Experiment, Scene, SceneDoc, DEMO_SCENE, SCHEMA};
pub use suites::{run_suite, Case, SuiteConfig, SuiteReport, SUITES};
pub use tolerance::Tolerances;
