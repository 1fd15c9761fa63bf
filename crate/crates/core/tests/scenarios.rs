use std::path::{Path, PathBuf};

use packet_entropy::scenario::{format_csv, run_scenario, ScenarioConfig};

fn bundled() -> Vec<PathBuf> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios");
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "toml"))
        .collect();
    paths.sort();
    paths
}

#[test]
fn every_bundled_scenario_verifies() {
    let paths = bundled();
    assert!(paths.len() >= 4);
    for path in paths {
        let cfg = ScenarioConfig::load(&path).unwrap();
        assert!(!cfg.verify.is_empty(), "{}", path.display());
        let run = run_scenario(&cfg).unwrap();
        for o in &run.outcomes {
            assert!(o.passed, "{}: {o:?}", path.display());
        }
    }
}

#[test]
fn runs_are_deterministic() {
    for path in bundled() {
        let cfg = ScenarioConfig::load(&path).unwrap();
        let a = run_scenario(&cfg).unwrap();
        let b = run_scenario(&cfg).unwrap();
        assert_eq!(
            format_csv(&a.reports, cfg.output.precision).unwrap(),
            format_csv(&b.reports, cfg.output.precision).unwrap()
        );
        assert_eq!(a.outcomes, b.outcomes);
    }
}
