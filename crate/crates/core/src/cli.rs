//! Command-line frontend: build and verify families, reproduce figure sweeps.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::contour::{write_atomic, BoundaryCurve};
use crate::lqd::{build_family, direct_problem, FamilyKind, FamilySpec, LQDInstance, SolvedParams};
use crate::maps::svg_curves;
use crate::verify::{
    default_battery, exterior_grid, field_grid, lambda_max, verify_coincidence, verify_quadrature,
    VerificationReport,
};
use crate::{Error, Result, C64};

pub const DEFAULT_N: usize = 1024;
pub const DEFAULT_TOL: f64 = 1e-6;
pub const ENV_N: &str = "LQDLAB_N";
const STEPS: usize = 8;
const FIELD_POINTS: usize = 400;
const FIELD_TOL: f64 = 1e-5;

#[derive(Parser, Debug)]
#[command(name = "lqdlab", version, about = "Build and verify log-weighted quadrature domains")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Build a family from a JSON spec, verify it and write the results.
    Build {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Re-verify a saved instance; prints the reports as JSON.
    Verify {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Sweep the parameters of a figure and write curves, SVG and a summary.
    Figure {
        #[arg(long)]
        id: FigureId,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Largest |λ| keeping b_z0(z)·exp(λz) univalent, for a given arg λ.
    LambdaMax {
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        z0: C64,
        #[arg(long, allow_hyphen_values = true)]
        arg: f64,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FigureId {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
    Fig5,
}

impl FigureId {
    pub fn name(&self) -> &'static str {
        match self {
            FigureId::Fig1 => "fig1",
            FigureId::Fig2 => "fig2",
            FigureId::Fig3 => "fig3",
            FigureId::Fig4 => "fig4",
            FigureId::Fig5 => "fig5",
        }
    }
}

/// Resolved command with sample count and tolerance filled in.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub n: usize,
    pub tol: f64,
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> Result<Self> {
        let env = std::env::var(ENV_N).ok();
        let (n, tol) = match &cli.command {
            Command::Build { n, tol, .. } | Command::Verify { n, tol, .. } | Command::Figure { n, tol, .. } => {
                (*n, *tol)
            }
            Command::LambdaMax { .. } => (None, None),
        };
        let n = resolve_n(n, env.as_deref())?;
        let tol = tol.unwrap_or(DEFAULT_TOL);
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(Error::RangeError(format!("tolerance must be positive, got {tol}")));
        }
        Ok(RunConfig { command: cli.command, n, tol })
    }
}

/// Sample count from the flag, then the environment, then the default.
pub fn resolve_n(flag: Option<usize>, env: Option<&str>) -> Result<usize> {
    let n = match (flag, env) {
        (Some(n), _) => n,
        (None, Some(s)) => s
            .trim()
            .parse()
            .map_err(|_| Error::RangeError(format!("{ENV_N} is not an integer: {s:?}")))?,
        (None, None) => DEFAULT_N,
    };
    if n < 256 || !n.is_power_of_two() {
        return Err(Error::RangeError(format!("n must be a power of two >= 256, got {n}")));
    }
    Ok(n)
}

/// Parses `re,im` or a bare real number.
pub fn parse_complex(s: &str) -> std::result::Result<C64, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |t: &str| t.parse::<f64>().map_err(|e| format!("bad number {t:?}: {e}"));
    match parts.as_slice() {
        [re] => Ok(C64::new(num(re)?, 0.0)),
        [re, im] => Ok(C64::new(num(re)?, num(im)?)),
        _ => Err(format!("expected `re,im`, got {s:?}")),
    }
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let cfg = match RunConfig::from_cli(cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let res = match &cfg.command {
        Command::Build { spec, out, .. } => cmd_build_verify(spec, out, cfg.n, cfg.tol),
        Command::Verify { instance, .. } => cmd_verify(instance, cfg.n, cfg.tol),
        Command::Figure { id, out, .. } => cmd_figure(*id, out, cfg.n, cfg.tol),
        Command::LambdaMax { z0, arg } => cmd_lambda_max(*z0, *arg),
    };
    match res {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

/// Quadrature identity, direct-problem roundtrip, coincidence and lift.
pub fn verify_instance(inst: &LQDInstance, n: usize, tol: f64) -> Result<Vec<VerificationReport>> {
    let battery = default_battery(&inst.map);
    let mut out = vec![verify_quadrature(inst, &battery, n, tol)?];
    let start = Instant::now();
    let d = direct_problem(&inst.map)?;
    let r = d.h.distance(&inst.quad.h).max((d.q - inst.quad.q).norm());
    out.push(VerificationReport::new("direct_problem", r, tol, start));
    out.extend(verify_coincidence(inst, n, tol)?);
    Ok(out)
}

fn log_solved(s: &SolvedParams, q: C64) {
    eprintln!("q = {q}");
    for (name, v) in [("z0", s.z0), ("z1", s.z1), ("lambda", s.lambda), ("beta", s.beta), ("alpha", s.alpha), ("q_alt", s.q_alt)] {
        if let Some(v) = v {
            eprintln!("{name} = {v}");
        }
    }
    if let Some(z) = s.z_plus {
        eprintln!("z+ = {z}");
    }
    if let Some(b) = s.branch {
        eprintln!("branch = {b}");
    }
    eprintln!("solutions = {} ({} univalent)", s.solutions, s.univalent_solutions);
}

fn to_json<T: Serialize>(v: &T) -> Result<Vec<u8>> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s.into_bytes())
}

fn print_reports(reports: &[VerificationReport]) {
    for r in reports {
        eprintln!(
            "{:<16} residual {:.3e}  tol {:.1e}  {}",
            r.check,
            r.residual,
            r.tol,
            if r.pass { "PASS" } else { "FAIL" }
        );
    }
}

/// `build`: writes instance.json, boundary.csv and report.json into `out`.
pub fn cmd_build_verify(spec_path: &Path, out: &Path, n: usize, tol: f64) -> Result<bool> {
    let text = std::fs::read_to_string(spec_path)?;
    let spec: FamilySpec = serde_json::from_str(&text)?;
    let inst = build_family(&spec)?;
    eprintln!("built {} ({})", spec.kind.name(), inst.origin);
    log_solved(&inst.solved, inst.quad.q);
    std::fs::create_dir_all(out)?;
    write_atomic(&out.join("instance.json"), &to_json(&inst)?)?;
    inst.map.boundary(n).write_csv(&out.join("boundary.csv"))?;
    let reports = verify_instance(&inst, n, tol)?;
    write_atomic(&out.join("report.json"), &to_json(&reports)?)?;
    print_reports(&reports);
    Ok(reports.iter().all(|r| r.pass))
}

/// `verify`: reloads an instance and prints the reports to stdout.
pub fn cmd_verify(path: &Path, n: usize, tol: f64) -> Result<bool> {
    let text = std::fs::read_to_string(path)?;
    let inst: LQDInstance = serde_json::from_str(&text)?;
    let reports = verify_instance(&inst, n, tol)?;
    println!("{}", serde_json::to_string_pretty(&reports)?);
    Ok(reports.iter().all(|r| r.pass))
}

pub fn cmd_lambda_max(z0: C64, arg: f64) -> Result<bool> {
    let (value, theta) = lambda_max(z0, arg)?;
    let v = serde_json::json!({ "z0": [z0.re, z0.im], "arg": arg, "lambda_max": value, "theta": theta });
    println!("{}", serde_json::to_string_pretty(&v)?);
    Ok(true)
}

// ---------------------------------------------------------------- figures

/// One parameter sweep of a figure.
#[derive(Clone, Debug)]
pub struct Panel {
    pub name: &'static str,
    pub steps: Vec<FamilySpec>,
}

fn cr(re: f64) -> Option<C64> {
    Some(C64::new(re, 0.0))
}

fn sweep(name: &'static str, f: impl Fn(usize) -> FamilySpec) -> Panel {
    Panel { name, steps: (0..STEPS).map(f).collect() }
}

/// Captioned parameter sweeps for each figure.
pub fn figure_panels(id: FigureId) -> Vec<Panel> {
    use FamilyKind::*;
    let base = FamilySpec::new;
    match id {
        FigureId::Fig1 => vec![Panel {
            name: "exp_image",
            steps: vec![FamilySpec { center: cr(-1.0), r: Some(2.0), ..base(ExpImage) }],
        }],
        FigureId::Fig2 => vec![Panel {
            name: "field",
            steps: vec![FamilySpec { w0: cr(1.0), alpha: cr(2.0), ..base(OneptBoundedNonsingular) }],
        }],
        FigureId::Fig3 => {
            let mono = |alpha: f64, c: f64| FamilySpec { alpha: cr(alpha), c: Some(c), q: cr(-2.0), ..base(MonomialSingularK2) };
            vec![
                sweep("alpha_neg2", |j| mono(-2.0, 0.3 * (j + 1) as f64 / STEPS as f64)),
                sweep("alpha_1", |j| mono(1.0, 0.25 * (j + 1) as f64 / (STEPS + 1) as f64)),
            ]
        }
        FigureId::Fig4 => {
            let c_step = |j: usize| 0.5 + 1.5 * j as f64 / (STEPS - 1) as f64;
            let top_right = |alpha: C64, j: usize| FamilySpec {
                w0: cr(1.9),
                alpha: Some(alpha),
                c: Some(c_step(j)),
                ..base(OneptUnboundedNonsingular)
            };
            vec![
                sweep("top_left", |j| FamilySpec {
                    w0: cr(0.25),
                    alpha: cr(2.0 + (PI * PI - 2.0) * j as f64 / (STEPS - 1) as f64),
                    ..base(OneptBoundedNonsingular)
                }),
                sweep("bottom_left", |j| FamilySpec {
                    w0: cr(1.0),
                    alpha: cr(0.7),
                    q: cr(-1.6 + 4.1 * (j as f64 + 0.5) / STEPS as f64),
                    ..base(OneptBoundedSingular)
                }),
                sweep("top_right_real", |j| top_right(C64::new(1.5, 0.0), j)),
                sweep("top_right_complex", |j| top_right(C64::new(1.5, 0.3), j)),
                Panel {
                    name: "bottom_right",
                    steps: vec![FamilySpec {
                        w0: cr(2.0),
                        c: Some(0.389),
                        z0: cr(-3.13),
                        z1: cr(2.28),
                        ..base(OneptUnboundedSingular)
                    }],
                },
            ]
        }
        FigureId::Fig5 => vec![sweep("alpha", |j| FamilySpec {
            alpha: cr((j + 1) as f64 / (STEPS + 1) as f64),
            q: cr(0.0),
            ..base(TwopointSymmetric)
        })],
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckRecord {
    pub check: String,
    pub residual: f64,
    pub tol: f64,
    pub pass: bool,
}

impl From<&VerificationReport> for CheckRecord {
    fn from(r: &VerificationReport) -> Self {
        CheckRecord { check: r.check.clone(), residual: r.residual, tol: r.tol, pass: r.pass }
    }
}

/// Outcome of one sweep step. Contains no timings so summaries are byte-stable.
#[derive(Clone, Debug, Serialize)]
pub struct StepRecord {
    pub panel: String,
    pub index: usize,
    pub spec: FamilySpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub file: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<C64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solved: Option<SolvedParams>,
    pub checks: Vec<CheckRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct FigureSummary {
    pub figure: FigureId,
    pub n: usize,
    pub tol: f64,
    pub pass: bool,
    pub steps: Vec<StepRecord>,
}

struct StepOutput {
    record: StepRecord,
    inst: Option<LQDInstance>,
}

fn run_step(panel: &str, index: usize, spec: &FamilySpec, n: usize, tol: f64) -> StepOutput {
    let mut record = StepRecord {
        panel: panel.to_string(),
        index,
        spec: spec.clone(),
        file: None,
        q: None,
        solved: None,
        checks: Vec::new(),
        error: None,
        pass: false,
    };
    let inst = match build_family(spec) {
        Ok(i) => i,
        Err(e) => {
            record.error = Some(e.to_string());
            return StepOutput { record, inst: None };
        }
    };
    record.q = Some(inst.quad.q);
    record.solved = Some(inst.solved.clone());
    let battery = default_battery(&inst.map);
    match verify_quadrature(&inst, &battery, n, tol) {
        Ok(r) => {
            record.pass = r.pass;
            record.checks.push((&r).into());
        }
        Err(e) => record.error = Some(e.to_string()),
    }
    StepOutput { record, inst: Some(inst) }
}

/// Runs every step on its own thread; results come back in sweep order.
fn run_panels(panels: &[Panel], n: usize, tol: f64) -> Vec<StepOutput> {
    std::thread::scope(|s| {
        let handles: Vec<_> = panels
            .iter()
            .flat_map(|p| p.steps.iter().enumerate().map(move |(j, spec)| (p.name, j, spec)))
            .map(|(name, j, spec)| s.spawn(move || run_step(name, j, spec, n, tol)))
            .collect();
        handles.into_iter().map(|h| h.join().expect("sweep step panicked")).collect()
    })
}

fn circle_curve(center: C64, r: f64, n: usize) -> BoundaryCurve {
    let (w, dw) = (0..n)
        .map(|k| {
            let e = C64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64);
            (center + r * e, C64::i() * r * e * 2.0 * PI)
        })
        .unzip();
    BoundaryCurve::new(w, dw, 1.0)
}

/// `figure`: per-step boundary CSVs, `<id>.svg` and `<id>_summary.json`.
pub fn cmd_figure(id: FigureId, out: &Path, n: usize, tol: f64) -> Result<bool> {
    std::fs::create_dir_all(out)?;
    let fig = id.name();
    let panels = figure_panels(id);
    let mut steps = run_panels(&panels, n, tol);
    let mut curves = Vec::new();
    if id == FigureId::Fig1 {
        let c = circle_curve(C64::new(-1.0, 0.0), 2.0, n);
        c.write_csv(&out.join(format!("{fig}_circle.csv")))?;
        curves.push(c.w);
    }
    for s in &mut steps {
        let Some(inst) = &s.inst else { continue };
        let name = format!("{fig}_{}_{:02}.csv", s.record.panel, s.record.index);
        let bc = inst.map.boundary(n);
        bc.write_csv(&out.join(&name))?;
        s.record.file = Some(name);
        // rotated so the positive real axis points up
        let rot = if id == FigureId::Fig3 { C64::i() } else { C64::new(1.0, 0.0) };
        curves.push(bc.w.iter().map(|w| rot * w).collect());
    }
    if id == FigureId::Fig2 {
        if let Some(s) = steps.first_mut() {
            if let Some(inst) = &s.inst {
                let start = Instant::now();
                let grid = field_grid(inst, &exterior_grid(&inst.map, FIELD_POINTS), n)?;
                grid.write_csv(&out.join(format!("{fig}_field.csv")))?;
                let r = VerificationReport::new("field", grid.max_diff(), FIELD_TOL, start);
                s.record.pass &= r.pass;
                s.record.checks.push((&r).into());
            }
        }
    }
    write_atomic(&out.join(format!("{fig}.svg")), svg_curves(&curves).as_bytes())?;
    let records: Vec<StepRecord> = steps.into_iter().map(|s| s.record).collect();
    for r in records.iter().filter(|r| !r.pass) {
        match &r.error {
            Some(e) => eprintln!("{fig} {} #{}: FAIL ({e})", r.panel, r.index),
            None => eprintln!(
                "{fig} {} #{}: FAIL (residual {:.3e})",
                r.panel,
                r.index,
                r.checks.iter().map(|c| c.residual).fold(0.0, f64::max)
            ),
        }
    }
    eprintln!("{fig}: {} of {} steps pass", records.iter().filter(|r| r.pass).count(), records.len());
    let pass = records.iter().all(|r| r.pass);
    let summary = FigureSummary { figure: id, n, tol, pass, steps: records };
    write_atomic(&out.join(format!("{fig}_summary.json")), &to_json(&summary)?)?;
    Ok(pass)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sample_count_resolution() {
        assert_eq!(resolve_n(None, None).unwrap(), DEFAULT_N);
        assert_eq!(resolve_n(None, Some("512")).unwrap(), 512);
        assert_eq!(resolve_n(Some(2048), Some("512")).unwrap(), 2048);
        assert!(resolve_n(Some(128), None).is_err());
        assert!(resolve_n(Some(1000), None).is_err());
        assert!(resolve_n(None, Some("x")).is_err());
    }

    #[test]
    fn complex_arguments() {
        assert_eq!(parse_complex("0.5,-0.25").unwrap(), C64::new(0.5, -0.25));
        assert_eq!(parse_complex("-2").unwrap(), C64::new(-2.0, 0.0));
        assert!(parse_complex("1,2,3").is_err());
    }

    #[test]
    fn sweeps_have_eight_steps() {
        for id in [FigureId::Fig3, FigureId::Fig4, FigureId::Fig5] {
            for p in figure_panels(id) {
                assert!(p.steps.len() == STEPS || p.steps.len() == 1, "{}", p.name);
            }
        }
    }
}
