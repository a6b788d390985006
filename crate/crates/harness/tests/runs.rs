use std::fs;
use std::path::Path;
use std::process::Command;

use nsk_harness::run::{read_report, read_series, series_header, TerminationRecord};
use nsk_harness::{load_config, parse_config, run_scenario};

const SMALL_1D: &str = r#"{
  "domain": {"dim": 1, "n": 64},
  "time": {"t_end": 0.25, "cfl": 0.5, "output_interval": 0.1},
  "scenario": {"id": "large-data-1d", "amplitude": 0.2, "wavenumber": 2, "seed": 9},
  "diagnostics": {"s": 0.4}
}"#;

fn configs_dir() -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

#[test]
fn row_count_matches_output_interval() {
    let dir = tempfile::tempdir().unwrap();
    let report = run_scenario(&parse_config(SMALL_1D).unwrap(), dir.path(), false).unwrap();
    assert!(report.passed, "{:#?}", report.checks);
    assert!(matches!(report.termination, TerminationRecord::Completed { .. }));
    let (header, rows) = read_series(dir.path()).unwrap();
    assert_eq!(header, series_header(1));
    // floor(0.25 / 0.1) + 1
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[0][0], 0.0);
    assert!((rows[2][0] - 0.2).abs() < 1e-12);
    assert_eq!(read_report(dir.path()).unwrap(), report);
}

#[test]
fn reruns_are_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let config = parse_config(SMALL_1D).unwrap();
    run_scenario(&config, a.path(), false).unwrap();
    run_scenario(&config, b.path(), false).unwrap();
    for f in ["series.csv", "report.json"] {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap(), "{f}");
    }
}

#[test]
fn dry_run_only_echoes() {
    let dir = tempfile::tempdir().unwrap();
    let report = run_scenario(&parse_config(SMALL_1D).unwrap(), dir.path(), true).unwrap();
    assert_eq!(report.termination, TerminationRecord::NotRun);
    assert!(report.final_diagnostics.is_none() && report.checks.is_empty());
    assert_eq!(report.config.time.output_interval, Some(0.1));
    assert_eq!(report.config.diagnostics.delta_orlicz, Some(1.0));
    assert!(!dir.path().join("series.csv").exists());
}

#[test]
fn two_dimensional_series_has_both_momentum_columns() {
    let text = r#"{"domain":{"dim":2,"n":16},"time":{"t_end":0.1,"output_interval":0.05},
                   "scenario":{"id":"small-data-2d"}}"#;
    let dir = tempfile::tempdir().unwrap();
    run_scenario(&parse_config(text).unwrap(), dir.path(), false).unwrap();
    let (header, rows) = read_series(dir.path()).unwrap();
    assert_eq!(header[..4], ["t", "mass", "mom_x", "mom_y"]);
    assert_eq!(header.len(), 13);
    assert!(rows.iter().all(|r| r.len() == 13));
}

#[test]
fn vacuum_scenario_reports_the_guard() {
    let config = load_config(&configs_dir().join("vacuum-approach.json")).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let report = run_scenario(&config, dir.path(), false).unwrap();
    match report.termination {
        TerminationRecord::VacuumApproached { rho_min, floor, .. } => assert!(rho_min < floor),
        other => panic!("expected vacuum approach, got {other:?}"),
    }
    assert!(report.passed, "{:#?}", report.checks);
}

#[test]
fn shipped_configs_are_valid() {
    let mut n = 0;
    for entry in fs::read_dir(configs_dir()).unwrap() {
        let path = entry.unwrap().path();
        load_config(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        n += 1;
    }
    assert_eq!(n, 6);
}

#[test]
fn manufactured_run_tracks_the_exact_solution() {
    let config = load_config(&configs_dir().join("manufactured.json")).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let report = run_scenario(&config, dir.path(), false).unwrap();
    let err = report.final_diagnostics.unwrap().manufactured_error.unwrap();
    assert!(err < 1e-8, "{err:e}");
    assert!(report.passed);
}

fn nsk(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_nsk")).args(args).output().unwrap()
}

#[test]
fn cli_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    fs::write(&cfg, SMALL_1D).unwrap();
    let out = dir.path().join("out");
    let o = nsk(&["run", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let o = nsk(&["report", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stdout).contains("columns ok"));

    let bad = dir.path().join("bad.json");
    fs::write(&bad, SMALL_1D.replace("\"s\": 0.4", "\"s\": 1.0")).unwrap();
    let o = nsk(&["run", bad.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("diagnostics.s"));

    let o = nsk(&["tensor-check", "--alpha", "-3"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    let o = nsk(&["dispersion", "--k", "1", "--n", "32"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
}
