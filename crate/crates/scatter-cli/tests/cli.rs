use kdv_scatter::scenario::{Pattern, Scenario};
use proptest::prelude::*;
use scatter_cli::export::{envelope, export_plots, read_report};
use scatter_cli::stage::plan;
use scatter_cli::table::{self, Table};
use scatter_cli::{run_pipeline, CliError, Stage};
use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::OnceLock;

const BIN: &str = env!("CARGO_BIN_EXE_scatter");

fn scenario_file(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
}

fn load(name: &str) -> Scenario {
    Scenario::load(&scenario_file(name)).unwrap()
}

fn write_json(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

/// A full run of the trivial scenario, shared by the tests that only read it.
fn trivial_run() -> &'static Path {
    static DIR: OnceLock<tempfile::TempDir> = OnceLock::new();
    DIR.get_or_init(|| {
        let d = tempfile::tempdir().unwrap();
        let r = run_pipeline(&load("trivial.json"), &Stage::ALL, d.path()).unwrap();
        assert!(r.passed(), "{:?}", r.failed_checks().collect::<Vec<_>>());
        d
    })
    .path()
}

fn csvs(dir: &Path) -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).filter(|p| p.extension().is_some_and(|e| e == "csv")).collect();
    v.sort();
    v
}

#[test]
fn stage_dependencies() {
    assert!(matches!(plan(&[Stage::Scattering]), Err(CliError::Dependency { stage: Stage::Scattering, needs: Stage::Jost })));
    assert!(matches!(plan(&[Stage::Background, Stage::Scattering]), Err(CliError::Dependency { needs: Stage::Jost, .. })));
    let p = plan(&[Stage::Jost, Stage::Background, Stage::Jost]).unwrap();
    assert_eq!(p, vec![Stage::Background, Stage::Jost]);
    let d = tempfile::tempdir().unwrap();
    let err = run_pipeline(&load("trivial.json"), &[Stage::Scattering], d.path()).unwrap_err();
    assert_eq!(err.exit_code(), 3);
    assert!(!d.path().join("report.json").exists());
}

#[test]
fn background_stage_alone() {
    let d = tempfile::tempdir().unwrap();
    let r = run_pipeline(&load("pattern_iii.json"), &[Stage::Background], d.path()).unwrap();
    assert!(r.passed());
    assert!(r.checks.iter().all(|c| c.stage == Stage::Background));
    assert!(r.checks.iter().any(|c| c.check.name.contains("KdV residual") && c.check.passed));
    let t = Table::read(&d.path().join("u_profile_left.csv")).unwrap();
    assert_eq!(t.columns, ["x", "u_theta", "u_dn"]);
    assert_eq!(t.rows.len(), 401);
    assert_eq!(r.artifacts, ["u_profile_left.csv", "u_profile_right.csv"]);
}

#[test]
fn trivial_run_passes_with_unit_a() {
    let r = read_report(trivial_run()).unwrap();
    assert_eq!(r.pattern, "identical");
    assert_eq!(r.exit_code(), 0);
    assert_eq!(r.stages, Stage::ALL);
    assert!(r.checks.iter().any(|c| c.check.name.starts_with("a e^{−iΔλ} = 1") && c.check.passed));
    assert_eq!(r.tolerances, r.scenario.tolerances);
    assert_eq!(r.timing.len(), 5);
    // every check appears once
    let names: HashSet<(Stage, &str)> = r.checks.iter().map(|c| (c.stage, c.check.name.as_str())).collect();
    assert_eq!(names.len(), r.checks.len());
}

#[test]
fn every_table_carries_the_hash_and_units() {
    let dir = trivial_run();
    let hash = read_report(dir).unwrap().scenario_hash;
    let files = csvs(dir);
    assert_eq!(files.len(), 6);
    for f in files {
        let text = fs::read_to_string(&f).unwrap();
        let header = text.lines().next().unwrap();
        assert!(header.starts_with(&format!("# scenario {hash}; units ")), "{}", f.display());
        let t = Table::read(&f).unwrap();
        for c in &t.columns {
            assert!(header.contains(&format!("{c}=")), "{c} has no unit in {}", f.display());
        }
    }
}

#[test]
fn runs_are_bit_identical() {
    let d = tempfile::tempdir().unwrap();
    run_pipeline(&load("trivial.json"), &Stage::ALL, d.path()).unwrap();
    let (a, b) = (csvs(trivial_run()), csvs(d.path()));
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(fs::read(x).unwrap(), fs::read(y).unwrap(), "{}", x.display());
    }
}

#[test]
fn export_writes_plot_tables() {
    let d = tempfile::tempdir().unwrap();
    for f in csvs(trivial_run()).into_iter().chain([trivial_run().join("report.json")]) {
        fs::copy(&f, d.path().join(f.file_name().unwrap())).unwrap();
    }
    let names = export_plots(d.path()).unwrap();
    for want in ["bands.csv", "rho.csv", "rho_envelope.csv", "r_bands.csv", "residuals.csv", "profile_left.csv", "profile_right.csv"] {
        assert!(names.iter().any(|n| n == want), "{want}");
    }
    let p = d.path().join("plots");
    let env = Table::read(&p.join("rho_envelope.csv")).unwrap();
    let col = |t: &Table, row: &Vec<String>, c: &str| row[t.col(c).unwrap()].parse::<f64>().unwrap();
    let ls: Vec<f64> = env.rows.iter().map(|r| col(&env, r, "lambda")).collect();
    assert_eq!((ls[0], *ls.last().unwrap()), (5.0, 80.0));
    for w in env.rows.windows(2) {
        assert!(col(&env, &w[1], "envelope") <= col(&env, &w[0], "envelope"));
    }
    // no reflection from identical backgrounds
    assert!(env.rows.iter().all(|r| col(&env, r, "abs_rho") < 1e-9));
    let prof = Table::read(&p.join("profile_left.csv")).unwrap();
    assert_eq!(prof.columns, ["x", "u_theta", "u_dn"]);
    let res = Table::read(&p.join("residuals.csv")).unwrap();
    assert_eq!(res.rows.len(), read_report(d.path()).unwrap().checks.len());

    // a run dir without the reflection table cannot be exported
    fs::remove_file(d.path().join("reflection.csv")).unwrap();
    assert!(matches!(export_plots(d.path()), Err(CliError::Missing(_))));
}

#[test]
fn band_diagram_has_four_labelled_segments() {
    let d = tempfile::tempdir().unwrap();
    let scn = write_json(d.path(), "s.json", r#"{"left": {"eta1": 1, "eta2": 2, "x0": 0}, "right": {"eta1": 1.2, "eta2": 1.8, "x0": 0}}"#);
    let scn = Scenario::load(&scn).unwrap();
    assert_eq!(scn.geometry().pattern, Pattern::IV);
    // export needs only the report and the tables it reads
    let run = d.path().join("run");
    run_pipeline(&scn, &[Stage::Background], &run).unwrap();
    let hash = scn.hash();
    let cols = [("lambda_re", "1/length"), ("lambda_im", "1/length"), ("side", "label"), ("region", "label"), ("rho_re", "1"), ("rho_im", "1")];
    table::write(&run.join("reflection.csv"), &hash, &cols, &[]).unwrap();
    export_plots(&run).unwrap();
    let t = Table::read(&run.join("plots/bands.csv")).unwrap();
    let rows: Vec<Vec<&str>> = t.rows.iter().map(|r| r.iter().map(String::as_str).collect()).collect();
    assert_eq!(
        rows,
        [
            ["left", "upper", "1e0", "2e0"],
            ["left", "lower", "-2e0", "-1e0"],
            ["right", "upper", "1.2e0", "1.8e0"],
            ["right", "lower", "-1.8e0", "-1.2e0"],
        ]
    );
}

#[test]
fn stale_tables_are_rejected() {
    let d = tempfile::tempdir().unwrap();
    for f in csvs(trivial_run()).into_iter().chain([trivial_run().join("report.json")]) {
        fs::copy(&f, d.path().join(f.file_name().unwrap())).unwrap();
    }
    table::write(&d.path().join("u_profile_right.csv"), "0000000000000000", &[("x", "length")], &[]).unwrap();
    assert!(matches!(export_plots(d.path()), Err(CliError::Malformed { .. })));
}

#[test]
fn table_round_trip() {
    let d = tempfile::tempdir().unwrap();
    let p = d.path().join("t.csv");
    let rows = vec![vec!["1e0".to_string(), "a,b".to_string()], vec!["-2.5e-3".into(), String::new()]];
    table::write(&p, "abc", &[("x", "length"), ("label", "label")], &rows).unwrap();
    let t = Table::read(&p).unwrap();
    assert_eq!(t.hash(), "abc");
    assert_eq!(t.rows, rows);
    assert!(matches!(Table::read(&d.path().join("none.csv")), Err(CliError::Missing(_))));
}

fn scatter(args: &[&str], env: Option<(&str, &Path)>) -> (i32, String, String) {
    let mut c = Command::new(BIN);
    c.args(args).env_remove("SCATTER_OUT");
    if let Some((k, v)) = env {
        c.env(k, v);
    }
    let o = c.output().unwrap();
    (o.status.code().unwrap(), String::from_utf8_lossy(&o.stdout).into(), String::from_utf8_lossy(&o.stderr).into())
}

#[test]
fn validate_classifies_and_rejects() {
    let d = tempfile::tempdir().unwrap();
    let ok = write_json(d.path(), "a.json", r#"{"left": {"eta1": 0.8, "eta2": 1.5, "x0": 0}, "right": {"eta1": 1.7, "eta2": 2.3, "x0": 0}}"#);
    let (code, out, err) = scatter(&["validate", ok.to_str().unwrap()], None);
    assert_eq!(code, 0, "{err}");
    assert!(err.starts_with("pattern i,"), "{err}");
    assert!(out.contains("\"tolerances\"") && out.contains("\"theta_t_coefficient\": 4.0"));

    let shared = write_json(d.path(), "b.json", r#"{"left": {"eta1": 1, "eta2": 2, "x0": 0}, "right": {"eta1": 1, "eta2": 2.5, "x0": 0}}"#);
    let (code, _, err) = scatter(&["validate", shared.to_str().unwrap()], None);
    assert_eq!(code, 3);
    assert!(err.contains("shared"), "{err}");

    let order = write_json(d.path(), "c.json", r#"{"left": {"eta1": 2, "eta2": 1, "x0": 0}, "right": {"eta1": 0.5, "eta2": 0.7, "x0": 0}}"#);
    let (code, _, err) = scatter(&["validate", order.to_str().unwrap()], None);
    assert_eq!(code, 3);
    assert!(err.contains("left.eta2"), "{err}");

    let unknown = write_json(d.path(), "d.json", r#"{"left": {"eta1": 1, "eta2": 2, "x0": 0}, "right": {"eta1": 0.5, "eta2": 0.7, "x0": 0}, "bump": 1}"#);
    assert_eq!(scatter(&["validate", unknown.to_str().unwrap()], None).0, 3);
    assert_eq!(scatter(&["validate", "/nonexistent.json"], None).0, 3);
}

#[test]
fn exit_codes() {
    let d = tempfile::tempdir().unwrap();
    let trivial = scenario_file("trivial.json");
    let t = trivial.to_str().unwrap();
    assert_eq!(scatter(&["run", t, "--stages", "scattering"], None).0, 3);
    assert_eq!(scatter(&["run", t, "--stages", "background,bogus"], None).0, 3);
    assert_eq!(scatter(&["frobnicate"], None).0, 3);
    assert_eq!(scatter(&["--help"], None).0, 0);

    // default output directory from the environment
    let (code, out, err) = scatter(&["run", t, "--stages", "background", "--threads", "1"], Some(("SCATTER_OUT", d.path())));
    assert_eq!(code, 0, "{out}{err}");
    let hash = load("trivial.json").hash();
    assert!(d.path().join(&hash).join("report.json").exists());

    let strict = write_json(
        d.path(),
        "strict.json",
        r#"{"left": {"eta1": 1, "eta2": 2, "x0": 0}, "right": {"eta1": 0.5, "eta2": 0.7, "x0": 0}, "tolerances": {"dual_formula": 1e-30}}"#,
    );
    let out_dir = d.path().join("strict");
    let (code, out, _) = scatter(&["run", strict.to_str().unwrap(), "--stages", "background", "--out", out_dir.to_str().unwrap()], None);
    assert_eq!(code, 2);
    assert!(out.contains("FAIL [background]"), "{out}");
    assert!(!read_report(&out_dir).unwrap().passed());
}

#[test]
fn stage_errors_are_attributed() {
    // zero-free data whose band log-jump winds: the reflection stage cannot build h
    let d = tempfile::tempdir().unwrap();
    let scn = write_json(
        d.path(),
        "wind.json",
        r#"{"left": {"eta1": 1, "eta2": 2, "x0": 0}, "right": {"eta1": 1.2, "eta2": 1.8, "x0": -0.3},
            "perturbation": {"kind": "gaussian_bump", "amplitude": 0.05}}"#,
    );
    let out = d.path().join("run");
    let (code, _, err) = scatter(&["run", scn.to_str().unwrap(), "--out", out.to_str().unwrap()], None);
    assert_eq!(code, 4, "{err}");
    assert!(err.contains("reflection stage"), "{err}");
    let r = read_report(&out).unwrap();
    let f = r.failure.unwrap();
    assert_eq!(f.stage, Stage::Reflection);
    assert!(f.numerical);
    assert!(r.checks.iter().any(|c| c.stage == Stage::Scattering));
    assert!(r.checks.iter().all(|c| c.stage < Stage::Reflection));
}

proptest! {
    #[test]
    fn plans_accept_exactly_the_closed_sets(mask in 0u8..32) {
        let chosen: Vec<Stage> = Stage::ALL.into_iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, s)| s).collect();
        let closed = chosen.iter().all(|s| s.needs().is_none_or(|n| chosen.contains(&n)));
        match plan(&chosen) {
            Ok(p) => {
                prop_assert!(closed);
                prop_assert!(p.windows(2).all(|w| w[0] < w[1]));
                prop_assert_eq!(p.len(), chosen.len());
            }
            Err(_) => prop_assert!(!closed),
        }
    }

    #[test]
    fn envelope_is_a_nonincreasing_majorant(v in prop::collection::vec(0.0f64..1.0, 0..40)) {
        let e = envelope(&v);
        prop_assert_eq!(e.len(), v.len());
        for (a, b) in e.iter().zip(&v) {
            prop_assert!(a >= b);
        }
        prop_assert!(e.windows(2).all(|w| w[1] <= w[0]));
        if let Some(l) = v.last() {
            prop_assert_eq!(e.last(), Some(l));
        }
    }

    #[test]
    fn stage_names_round_trip(i in 0usize..5) {
        let s = Stage::ALL[i];
        prop_assert_eq!(s.name().parse::<Stage>().unwrap(), s);
        prop_assert_eq!(serde_json::to_string(&s).unwrap(), format!("\"{}\"", s.name()));
    }
}
