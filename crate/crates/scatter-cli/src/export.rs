//! Plot-ready tables derived from a completed run directory.

use crate::error::CliError;
use crate::report::RunReport;
use crate::run::REPORT;
use crate::table::{self, num, Table, LENGTH, NONE, POTENTIAL, TEXT, WAVENUMBER};
use std::fs;
use std::path::Path;

pub const PLOTS: &str = "plots";

pub fn read_report(run_dir: &Path) -> Result<RunReport, CliError> {
    let path = run_dir.join(REPORT);
    if !path.exists() {
        return Err(CliError::Missing(path));
    }
    let text = fs::read_to_string(&path).map_err(CliError::io(&path))?;
    serde_json::from_str(&text).map_err(|e| CliError::Malformed { path, msg: e.to_string() })
}

/// Reads `name` from the run directory and checks it belongs to `hash`.
fn artifact(run_dir: &Path, name: &str, hash: &str) -> Result<Table, CliError> {
    let path = run_dir.join(name);
    let t = Table::read(&path)?;
    if t.hash() != hash {
        return Err(CliError::Malformed { path, msg: format!("scenario {} does not match the report ({hash})", t.hash()) });
    }
    Ok(t)
}

fn field(t: &Table, row: &[String], col: &str) -> Option<f64> {
    t.col(col).and_then(|i| row.get(i)).and_then(|s| s.parse().ok())
}

fn text<'a>(t: &Table, row: &'a [String], col: &str) -> &'a str {
    t.col(col).and_then(|i| row.get(i)).map_or("", |s| s.as_str())
}

/// `max_{μ ≥ λ} |ρ(μ)|` over the rows, which must ascend in `λ`.
pub fn envelope(abs: &[f64]) -> Vec<f64> {
    let mut env = abs.to_vec();
    for k in (0..env.len().saturating_sub(1)).rev() {
        env[k] = env[k].max(env[k + 1]);
    }
    env
}

/// Writes the plot tables into `<run_dir>/plots` and returns their names.
pub fn export_plots(run_dir: &Path) -> Result<Vec<String>, CliError> {
    let report = read_report(run_dir)?;
    let hash = report.scenario_hash.as_str();
    let refl = artifact(run_dir, "reflection.csv", hash)?;
    let profiles = [artifact(run_dir, "u_profile_left.csv", hash)?, artifact(run_dir, "u_profile_right.csv", hash)?];
    let rec = match artifact(run_dir, "reconstruction.csv", hash) {
        Ok(t) => Some(t),
        Err(CliError::Missing(_)) => None,
        Err(e) => return Err(e),
    };

    let dir = run_dir.join(PLOTS);
    fs::create_dir_all(&dir).map_err(CliError::io(&dir))?;
    let mut written = Vec::new();
    let mut put = |name: &str, cols: &[(&str, &str)], rows: &[Vec<String>]| -> Result<(), CliError> {
        table::write(&dir.join(name), hash, cols, rows)?;
        written.push(name.to_string());
        Ok(())
    };

    let scn = &report.scenario;
    let mut rows = Vec::new();
    for (side, b) in [("left", scn.left), ("right", scn.right)] {
        rows.push(vec![side.into(), "upper".into(), num(b.eta1), num(b.eta2)]);
        rows.push(vec![side.into(), "lower".into(), num(-b.eta2), num(-b.eta1)]);
    }
    put("bands.csv", &[("side", TEXT), ("sheet", TEXT), ("lo_im", WAVENUMBER), ("hi_im", WAVENUMBER)], &rows)?;

    let mut real = Vec::new();
    let mut bands = Vec::new();
    for row in &refl.rows {
        if text(&refl, row, "region") == "real_line" {
            let (re, im) = (field(&refl, row, "rho_re"), field(&refl, row, "rho_im"));
            let l = field(&refl, row, "lambda_re");
            if let (Some(l), Some(re), Some(im)) = (l, re, im) {
                real.push((l, re.hypot(im), im.atan2(re)));
            }
        } else {
            let abs = |c: &str| match (field(&refl, row, &format!("{c}_re")), field(&refl, row, &format!("{c}_im"))) {
                (Some(a), Some(b)) => num(a.hypot(b)),
                _ => String::new(),
            };
            let y = text(&refl, row, "lambda_im");
            bands.push(vec![y.to_string(), text(&refl, row, "side").into(), text(&refl, row, "region").into(), abs("r1"), abs("r2")]);
        }
    }
    real.sort_by(|a, b| a.0.total_cmp(&b.0));
    let rows: Vec<Vec<String>> = real.iter().map(|&(l, a, p)| vec![num(l), num(a), num(p)]).collect();
    put("rho.csv", &[("lambda", WAVENUMBER), ("abs_rho", NONE), ("arg_rho", "rad")], &rows)?;

    let tail: Vec<(f64, f64)> = real.iter().filter(|r| (5.0..=80.0).contains(&r.0)).map(|r| (r.0, r.1)).collect();
    let env = envelope(&tail.iter().map(|r| r.1).collect::<Vec<_>>());
    let rows: Vec<Vec<String>> = tail.iter().zip(&env).map(|(&(l, a), &e)| vec![num(l), num(a), num(e)]).collect();
    put("rho_envelope.csv", &[("lambda", WAVENUMBER), ("abs_rho", NONE), ("envelope", NONE)], &rows)?;

    let cols = [("lambda_im", WAVENUMBER), ("side", TEXT), ("region", TEXT), ("abs_r1", NONE), ("abs_r2", NONE)];
    put("r_bands.csv", &cols, &bands)?;

    let rows: Vec<Vec<String>> = report
        .checks
        .iter()
        .map(|c| vec![c.stage.name().into(), c.check.name.clone(), num(c.check.residual), num(c.check.tolerance), c.check.passed.to_string()])
        .collect();
    put("residuals.csv", &[("stage", TEXT), ("check", TEXT), ("residual", NONE), ("tolerance", NONE), ("passed", TEXT)], &rows)?;

    for (name, t) in ["profile_left.csv", "profile_right.csv"].into_iter().zip(&profiles) {
        let rows: Vec<Vec<String>> =
            t.rows.iter().map(|r| ["x", "u_theta", "u_dn"].iter().map(|c| text(t, r, c).to_string()).collect()).collect();
        put(name, &[("x", LENGTH), ("u_theta", POTENTIAL), ("u_dn", POTENTIAL)], &rows)?;
    }
    if let Some(t) = rec {
        let cols = [("x", LENGTH), ("u0", POTENTIAL), ("u_x1", POTENTIAL), ("u_x2", POTENTIAL)];
        let rows: Vec<Vec<String>> = t.rows.iter().map(|r| cols.iter().map(|c| text(&t, r, c.0).to_string()).collect()).collect();
        put("profile_reconstruction.csv", &cols, &rows)?;
    }
    Ok(written)
}
