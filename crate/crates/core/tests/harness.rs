use hessval::harness::{parse_scene, run_suite, serialize_scene, SuiteConfig, Tolerances, DEMO_SCENE, SUITES};
use hessval::Error;

#[test]
fn demo_scene_round_trips_canonically() {
    let scene = parse_scene(DEMO_SCENE).unwrap();
    let text = serialize_scene(&scene);
    assert_eq!(text, DEMO_SCENE);
    assert_eq!(serialize_scene(&parse_scene(&text).unwrap()), text);
}

#[test]
fn schema_errors_carry_a_path() {
    let broken = DEMO_SCENE.replacen("\"window\": \"unit_1d\"", "\"window\": 17", 1);
    match parse_scene(&broken) {
        Err(Error::SchemaError { path, .. }) => assert!(path.starts_with("experiments[0]"), "{path}"),
        other => panic!("expected a schema error, got {other:?}"),
    }
}

#[test]
fn cheap_suites_pass_on_the_demo_scene() {
    let scene = parse_scene(DEMO_SCENE).unwrap();
    let cfg = SuiteConfig::from_scene(&scene, 3);
    for name in ["duality", "extremes", "simplicity", "steiner"] {
        assert!(SUITES.contains(&name));
        let report = run_suite(name, &cfg, &Tolerances::default()).unwrap();
        assert!(!report.cases.is_empty(), "{name} ran no cases");
        assert!(report.passed(), "{name}: max deviation {}", report.max_deviation());
    }
}

#[test]
fn suite_reports_are_seed_deterministic() {
    let scene = parse_scene(DEMO_SCENE).unwrap();
    let run = |seed| run_suite("duality", &SuiteConfig::from_scene(&scene, seed), &Tolerances::default()).unwrap().max_deviation();
    assert_eq!(run(5).to_bits(), run(5).to_bits());
}
