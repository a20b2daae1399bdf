use crate::error::CliError;
use crate::report::{RunReport, StageCheck, StageFailure, StageTiming};
use crate::stage::{self, Stage};
use crate::table::{self, num, opt, LENGTH, NONE, POTENTIAL, TEXT, WAVENUMBER};
use kdv_scatter::jost::Jost;
use kdv_scatter::reflection::{PhaseTheta, Reflection};
use kdv_scatter::scattering::{piece_points, Scattering};
use kdv_scatter::scenario::{Pattern, Scenario};
use kdv_scatter::surface::{Pt, Side};
use kdv_scatter::verify::{self, Check};
use kdv_scatter::C64;
use rayon::prelude::*;
use std::fs;
use std::path::Path;
use std::time::Instant;

pub const REPORT: &str = "report.json";

/// Real spectral grid: fine near 0, coarse out to 80, symmetric about 0 below 5.
pub fn real_grid() -> Vec<f64> {
    let near: Vec<f64> = (1..=100).map(|k| 0.05 * k as f64).collect();
    let mut v: Vec<f64> = near.iter().rev().map(|l| -l).collect();
    v.extend(&near);
    v.extend((1..=150).map(|k| 5.0 + 0.5 * k as f64));
    v
}

/// Upper-axis points on both sides of every band piece.
pub fn band_points(scn: &Scenario, n: usize) -> Vec<Pt> {
    let mut v = Vec::new();
    for piece in scn.geometry().pieces {
        for y in piece_points(piece.lo, piece.hi, n) {
            v.push(Pt::axis(y, Side::Plus));
            v.push(Pt::axis(y, Side::Minus));
        }
    }
    v
}

fn spectral_points(scn: &Scenario) -> Vec<Pt> {
    let mut pts: Vec<Pt> = real_grid().into_iter().map(|l| Pt::real(l, Side::Off)).collect();
    pts.extend(band_points(scn, 12));
    pts
}

fn cplx(v: Option<C64>) -> [String; 2] {
    [opt(v.map(|z| z.re)), opt(v.map(|z| z.im))]
}

fn point_cols(p: Pt, region: &str) -> Vec<String> {
    vec![num(p.z.re), num(p.z.im), p.side.label().to_string(), region.to_string()]
}

#[derive(Default)]
struct State {
    jost: Option<Jost>,
    scat: Option<Scattering>,
    refl: Option<Reflection>,
}

struct Ctx<'a> {
    scn: &'a Scenario,
    hash: String,
    out: &'a Path,
    artifacts: Vec<String>,
}

impl Ctx<'_> {
    fn write(&mut self, name: &str, cols: &[(&str, &str)], rows: &[Vec<String>]) -> Result<(), CliError> {
        table::write(&self.out.join(name), &self.hash, cols, rows)?;
        self.artifacts.push(name.to_string());
        Ok(())
    }
}

fn stage_err(stage: Stage) -> impl Fn(kdv_scatter::Error) -> CliError {
    move |source| CliError::Stage { stage, source }
}

fn background(ctx: &mut Ctx) -> Result<Vec<Check>, CliError> {
    let e = stage_err(Stage::Background);
    let checks = verify::background_checks(ctx.scn).map_err(&e)?;
    let (l, r) = ctx.scn.backgrounds().map_err(&e)?;
    let xs: Vec<f64> = (0..=400).map(|k| -10.0 + 0.05 * k as f64).collect();
    for (name, b) in [("u_profile_left.csv", &l), ("u_profile_right.csv", &r)] {
        let rows: Vec<Vec<String>> = xs.iter().map(|&x| vec![num(x), num(b.u_theta(x, 0.0)), num(b.u_dn(x, 0.0))]).collect();
        ctx.write(name, &[("x", LENGTH), ("u_theta", POTENTIAL), ("u_dn", POTENTIAL)], &rows)?;
    }
    Ok(checks)
}

fn jost(ctx: &mut Ctx, st: &mut State) -> Result<Vec<Check>, CliError> {
    let e = stage_err(Stage::Jost);
    let j = Jost::new(ctx.scn).map_err(&e)?;
    let checks = verify::jost_checks(ctx.scn, &j).map_err(&e)?;
    st.jost = Some(j);
    Ok(checks)
}

fn scattering(ctx: &mut Ctx, st: &mut State) -> Result<Vec<Check>, CliError> {
    let e = stage_err(Stage::Scattering);
    let s = Scattering::from_jost(st.jost.take().expect("jost stage ran"), ctx.scn);
    let mut checks = Vec::new();
    if s.geom.pattern == Pattern::Identical && ctx.scn.perturbation.is_zero() {
        checks.extend(verify::trivial_checks(ctx.scn, &s).map_err(&e)?);
    }
    checks.extend(verify::scattering_checks(ctx.scn, &s).map_err(&e)?);
    let pts = spectral_points(ctx.scn);
    let samples = s.table(&pts).into_iter().collect::<Result<Vec<_>, _>>().map_err(&e)?;
    let rows: Vec<Vec<String>> = samples
        .iter()
        .map(|q| {
            let mut r = point_cols(q.lambda, q.region.label());
            for v in [q.a, q.b, q.b1] {
                r.extend(cplx(v));
            }
            r.push(num(q.est_error));
            r
        })
        .collect();
    let cols = [
        ("lambda_re", WAVENUMBER),
        ("lambda_im", WAVENUMBER),
        ("side", TEXT),
        ("region", TEXT),
        ("a_re", NONE),
        ("a_im", NONE),
        ("b_re", NONE),
        ("b_im", NONE),
        ("b1_re", NONE),
        ("b1_im", NONE),
        ("est_error", NONE),
    ];
    ctx.write("scattering.csv", &cols, &rows)?;
    st.scat = Some(s);
    Ok(checks)
}

fn reflection(ctx: &mut Ctx, st: &mut State) -> Result<Vec<Check>, CliError> {
    let e = stage_err(Stage::Reflection);
    let r = Reflection::from_scattering(st.scat.take().expect("scattering stage ran"), ctx.scn).map_err(&e)?;
    let checks = verify::factor_checks(ctx.scn, &r).map_err(&e)?;
    let pts = spectral_points(ctx.scn);
    let samples = pts.par_iter().map(|&p| r.reflection_coeffs(p)).collect::<Result<Vec<_>, _>>().map_err(&e)?;
    let rows: Vec<Vec<String>> = samples
        .iter()
        .map(|q| {
            let mut row = point_cols(q.lambda, q.region.label());
            for v in [q.r1, q.r2, q.rho] {
                row.extend(cplx(v));
            }
            row
        })
        .collect();
    let cols = [
        ("lambda_re", WAVENUMBER),
        ("lambda_im", WAVENUMBER),
        ("side", TEXT),
        ("region", TEXT),
        ("r1_re", NONE),
        ("r1_im", NONE),
        ("r2_re", NONE),
        ("r2_im", NONE),
        ("rho_re", NONE),
        ("rho_im", NONE),
    ];
    ctx.write("reflection.csv", &cols, &rows)?;
    st.refl = Some(r);
    Ok(checks)
}

fn verification(ctx: &mut Ctx, st: &mut State) -> Result<Vec<Check>, CliError> {
    let e = stage_err(Stage::Verification);
    let r = st.refl.as_ref().expect("reflection stage ran");
    let rhp = verify::rhp_residuals(r).map_err(&e)?;
    let mut checks = verify::rhp_checks_of(ctx.scn, &rhp);
    let xs = verify::reconstruction_points(41);
    let rec = r.reconstruct_u(&xs).map_err(&e)?;
    checks.extend(verify::reconstruction_checks_of(ctx.scn, &rec));
    checks.extend(verify::endpoint_checks(ctx.scn, r).map_err(&e)?);

    let phase = PhaseTheta::new(0.7, 0.0, r.theta_coefficient);
    let mut rows: Vec<Vec<String>> = rhp
        .m_jumps
        .iter()
        .map(|(x, m)| vec!["M".into(), num(*x), m.region.label().into(), m.relation.clone(), m.points.to_string(), num(m.max)])
        .collect();
    rows.extend(rhp.v.iter().map(|v| vec!["V".into(), num(phase.x), v.region.label().into(), v.relation.clone(), v.points.to_string(), num(v.max)]));
    let cols = [("problem", TEXT), ("x", LENGTH), ("region", TEXT), ("relation", TEXT), ("points", NONE), ("max", NONE)];
    ctx.write("jumps.csv", &cols, &rows)?;

    let rows: Vec<Vec<String>> = rec.iter().map(|q| vec![num(q.x), num(q.u0), num(q.u_left), num(q.u_right)]).collect();
    let cols = [("x", LENGTH), ("u0", POTENTIAL), ("u_x1", POTENTIAL), ("u_x2", POTENTIAL)];
    ctx.write("reconstruction.csv", &cols, &rows)?;
    Ok(checks)
}

/// Runs `stages` in dependency order, writing artifacts and `report.json` to
/// `out`. A stage that errors ends the run; the report records it.
pub fn run_pipeline(scn: &Scenario, stages: &[Stage], out: &Path) -> Result<RunReport, CliError> {
    let plan = stage::plan(stages)?;
    scn.validate().map_err(CliError::Scenario)?;
    fs::create_dir_all(out).map_err(CliError::io(out))?;
    let mut ctx = Ctx { scn, hash: scn.hash(), out, artifacts: Vec::new() };
    let mut st = State::default();
    let mut checks = Vec::new();
    let mut timing = Vec::new();
    let mut failure = None;
    for &s in &plan {
        let t = Instant::now();
        let res = match s {
            Stage::Background => background(&mut ctx),
            Stage::Jost => jost(&mut ctx, &mut st),
            Stage::Scattering => scattering(&mut ctx, &mut st),
            Stage::Reflection => reflection(&mut ctx, &mut st),
            Stage::Verification => verification(&mut ctx, &mut st),
        };
        timing.push(StageTiming { stage: s, seconds: t.elapsed().as_secs_f64() });
        match res {
            Ok(cs) => checks.extend(cs.into_iter().map(|check| StageCheck { stage: s, check })),
            Err(CliError::Stage { stage, source }) => {
                failure = Some(StageFailure { stage, message: source.to_string(), numerical: source.is_numerical() });
                break;
            }
            Err(other) => return Err(other),
        }
    }
    let report = RunReport {
        scenario_hash: ctx.hash.clone(),
        pattern: scn.geometry().pattern.label().to_string(),
        scenario: scn.clone(),
        stages: plan,
        tolerances: scn.tolerances.clone(),
        checks,
        timing,
        failure,
        artifacts: ctx.artifacts,
    };
    let path = out.join(REPORT);
    let text = serde_json::to_string_pretty(&report).expect("report serializes");
    fs::write(&path, text + "\n").map_err(CliError::io(&path))?;
    Ok(report)
}
