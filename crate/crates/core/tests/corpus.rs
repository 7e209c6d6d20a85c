mod common;

use knead::cli_harness::{self, corpus, run_map, Command, OutputFormat, RunConfig, Status};
use knead::pm_domain::MapError;
use knead::spectra;
use serde_json::Value;

fn quick() -> RunConfig {
    RunConfig { degree: 32, max_iter: 10, identity_degree: 12, jobs: 1, ..RunConfig::default() }
}

#[test]
fn every_command_runs_on_every_bundled_map() {
    let config = quick();
    for def in corpus::all() {
        for command in [Command::Check, Command::Laps, Command::Fix, Command::Kneading, Command::Zeta, Command::Entropy]
        {
            let out = run_map(command, &def, &config);
            assert_eq!(out.status, Status::Ok, "{} {}: {:?}", command.name(), def.name, out.diagnostics);
            assert!(out.report.is_some());
        }
    }
}

#[test]
fn rotated_doubling_verifies_below_the_budget_horizon() {
    let def = common::definition("circle_rotated_doubling");
    let out = run_map(Command::Verify, &def, &RunConfig { identity_degree: 16, jobs: 1, ..RunConfig::default() });
    assert_eq!(out.status, Status::Ok, "{:?}", out.diagnostics);
    let checks = out.report.unwrap()["checks"].as_array().unwrap().clone();
    assert!(checks.iter().all(|c| c["passed"] == Value::Bool(true)));
    assert!(checks.iter().any(|c| c["name"] == "expected-fix_neg"));
}

#[test]
fn rotated_doubling_exceeds_the_default_budget() {
    let b = common::built("circle_rotated_doubling");
    // ℓ(F^n) = 2^(n+1) − 1 for this map
    assert_eq!(b.map.lap_count(10, 1 << 20).unwrap(), 2047);
    let err = knead::census::census(&b.map, 20, knead::pm_domain::DEFAULT_LAP_BUDGET).unwrap_err();
    assert_eq!(err, MapError::LapBudgetExceeded { n: 20, budget: 2_000_000 });
    let def = common::definition("circle_rotated_doubling");
    let out = run_map(Command::Verify, &def, &RunConfig { jobs: 1, ..RunConfig::default() });
    assert_eq!(out.status, Status::BudgetExceeded);
    assert_eq!(out.status.exit_code(), 3);
    // commands that only need low iterates fall back instead of failing
    let out = run_map(Command::Entropy, &def, &RunConfig { jobs: 1, ..RunConfig::default() });
    assert_eq!(out.status, Status::Ok, "{:?}", out.diagnostics);
}

#[test]
fn rotated_doubling_has_no_periodic_critical_points() {
    let b = common::built("circle_rotated_doubling");
    let a = common::analyse(&b, 12, 32);
    assert!(a.counts.periodic_points.is_empty());
    assert!(a.counts.graph.iter().all(|c| c == &0.into()));
    let e = &a.entropy;
    assert!((e.h_kneading.unwrap() - std::f64::consts::LN_2).abs() < 1e-3);
    assert!((e.h_hom - std::f64::consts::LN_2).abs() < 1e-9);
    assert!(spectra::check_factorization(&b.induced, 12).holds);
}

#[test]
fn reports_are_deterministic_across_job_counts() {
    let names = ["tent", "wedge", "circle_flip", "markov_eight"];
    let inputs = || names.iter().map(|n| corpus::get(n)).collect::<Vec<_>>();
    let one = cli_harness::run(Command::Zeta, inputs(), &RunConfig { jobs: 1, ..quick() }).unwrap();
    let four = cli_harness::run(Command::Zeta, inputs(), &RunConfig { jobs: 4, ..quick() }).unwrap();
    for format in [OutputFormat::Json, OutputFormat::Csv, OutputFormat::Text] {
        assert_eq!(one.render(format), four.render(format));
    }
    let again = cli_harness::run(Command::Zeta, inputs(), &RunConfig { jobs: 1, ..quick() }).unwrap();
    assert_eq!(one.render(OutputFormat::Json), again.render(OutputFormat::Json));
}

#[test]
fn json_reports_carry_schema_and_config() {
    let report = cli_harness::run(Command::Entropy, vec![corpus::get("contraction")], &quick()).unwrap();
    let v: Value = serde_json::from_str(&report.render(OutputFormat::Json)).unwrap();
    assert_eq!(v["schema"], cli_harness::SCHEMA);
    assert_eq!(v["config"]["degree"], 32);
    assert!(v["config"].get("jobs").is_none());
    assert_eq!(v["exit_code"], 0);
}

#[test]
fn input_errors_do_not_stop_other_maps() {
    let text = "name = \"x\"\nintervals = [[\"0\", \"1/0\"]]\ncritical = [\"0\", \"1\"]\n\n[[branch]]\nleft = \"0\"\nright = \"1\"\nslope = \"1/2\"\nintercept = \"0\"\n";
    let bad = cli_harness::parse_map_str(text, "inline");
    assert!(matches!(bad, Err(cli_harness::HarnessError::Parse { line: 2, .. })), "{bad:?}");
    let report = cli_harness::run(Command::Check, vec![bad, corpus::get("tent")], &quick()).unwrap();
    assert_eq!(report.maps.len(), 2);
    assert_eq!(report.maps[0].status, Status::InputError);
    assert_eq!(report.maps[1].status, Status::Ok);
    assert_eq!(report.exit_code, 2);
}
