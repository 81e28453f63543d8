//! Command-line frontend: profile curves, spectra, bifurcation scans, family sweeps, meshes
//! and the verification suite.

pub mod mesh;
pub mod verify;

use crate::elastica::{homogeneous_torus, Branch, TorusImmersion, TwoLobeSolver};
use crate::error::{Error, Result};
use crate::stability::bifurcation::SCAN_SAMPLES as SCAN_SAMPLES_DEFAULT;
use crate::stability::{bifurcation_scan_with, full_hessian, KERNEL_TOL_SCALE};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use std::io::Write;
use std::path::{Path, PathBuf};

/// Exit code for a failed verification.
pub const EXIT_VERIFY: i32 = 1;

#[derive(Parser, Debug)]
#[command(name = "tori", about = "Constrained Willmore tori of revolution: construction and stability")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Profile curve samples and parameters.
    Curve(TorusArgs),
    /// Spectrum of the constrained second variation.
    Spectrum(TorusArgs),
    /// Zero crossings along the homogeneous family.
    Bifurcations(RangeArgs),
    /// Energy and multiplier along a family.
    Family(RangeArgs),
    /// OBJ mesh of a torus.
    ExportMesh(TorusArgs),
    /// Runs the acceptance checks.
    Verify(VerifyArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Homogeneous,
    TwoLobe,
}

impl From<FamilyArg> for Branch {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Homogeneous => Branch::Homogeneous,
            FamilyArg::TwoLobe => Branch::TwoLobe,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Obj,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// x-cutoff J.
    #[arg(long = "grid-x", default_value_t = 64)]
    pub grid_x: usize,
    /// y-cutoff M; for meshes, the number of angular samples.
    #[arg(long = "grid-y", default_value_t = 16)]
    pub grid_y: usize,
    /// Kernel tolerance scale relative to the spectral norm.
    #[arg(long, default_value_t = KERNEL_TOL_SCALE)]
    pub tol: f64,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Negates the multiplier term of the Hessian (test hook).
    #[arg(long = "inject-q2-flip", hide = true)]
    pub inject_q2_flip: bool,
}

#[derive(Args, Debug, Clone)]
pub struct TorusArgs {
    #[arg(long, value_enum, default_value_t = FamilyArg::TwoLobe)]
    pub family: FamilyArg,
    #[arg(long)]
    pub b: f64,
    /// Profile samples.
    #[arg(long, default_value_t = 2048)]
    pub samples: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone)]
pub struct RangeArgs {
    #[arg(long, value_enum, default_value_t = FamilyArg::TwoLobe)]
    pub family: FamilyArg,
    #[arg(long = "b-min")]
    pub b_min: f64,
    #[arg(long = "b-max")]
    pub b_max: f64,
    #[arg(long = "b-step", default_value_t = 0.05)]
    pub b_step: f64,
    #[arg(long, default_value_t = 512)]
    pub samples: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    /// Coarse cutoffs and fewer random fields.
    #[arg(long)]
    pub quick: bool,
    #[command(flatten)]
    pub common: Common,
}

/// Parses `args` (including the program name), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cmd: Command) -> Result<i32> {
    match cmd {
        Command::Curve(a) => cmd_curve(&a),
        Command::Spectrum(a) => cmd_spectrum(&a),
        Command::Bifurcations(a) => cmd_bifurcations(&a),
        Command::Family(a) => cmd_family(&a),
        Command::ExportMesh(a) => cmd_export_mesh(&a),
        Command::Verify(a) => cmd_verify(&a),
    }
}

fn check_common(c: &Common) -> Result<()> {
    if !(c.tol > 0.0) || !c.tol.is_finite() {
        return Err(Error::Input(format!("tolerance {} must be positive", c.tol)));
    }
    Ok(())
}

pub fn build_torus(family: FamilyArg, b: f64, samples: usize) -> Result<TorusImmersion> {
    match family {
        FamilyArg::Homogeneous => homogeneous_torus(b, samples),
        FamilyArg::TwoLobe => TwoLobeSolver::default().torus(b, samples),
    }
}

fn write_out(path: Option<&Path>, text: &str) -> Result<()> {
    let io = |e: std::io::Error| Error::Input(format!("cannot write output: {e}"));
    match path {
        Some(p) => std::fs::write(p, text).map_err(io),
        None => std::io::stdout().lock().write_all(text.as_bytes()).map_err(io),
    }
}

fn csv_text(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| Error::Input(format!("csv: {e}"));
    w.write_record(header).map_err(err)?;
    for r in rows {
        w.write_record(&r).map_err(err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Input(format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::Input(format!("csv: {e}")))
}

/// 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn json_text(v: &impl serde::Serialize) -> Result<String> {
    serde_json::to_string_pretty(v).map(|s| s + "\n").map_err(|e| Error::Input(format!("json: {e}")))
}

fn torus_params(t: &TorusImmersion) -> serde_json::Value {
    json!({
        "family": t.branch.name(), "b": t.b, "mu": t.params.mu, "nu": t.params.nu, "beta": t.beta,
        "energy": t.energy, "kappa_lo": t.kappa_lo, "kappa_hi": t.kappa_hi, "lobes": t.curve.lobes,
        "samples": t.curve.n_samples,
        "closure": { "translation": t.closure.gap_translation, "frame": t.closure.gap_frame,
                     "periodicity": t.curve.periodicity_gap() }
    })
}

fn sidecar(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".params.json");
    PathBuf::from(s)
}

fn cmd_curve(a: &TorusArgs) -> Result<i32> {
    check_common(&a.common)?;
    let t = build_torus(a.family, a.b, a.samples)?;
    let c = &t.curve;
    match a.common.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let rows = (0..c.n_samples)
                .map(|i| vec![num(c.x[i]), num(c.kappa[i]), num(c.u[i]), num(c.v[i]), num(c.du[i]), num(c.dv[i])]);
            write_out(a.common.out.as_deref(), &csv_text(&["x", "kappa", "u", "v", "du", "dv"], rows)?)?;
            if let Some(out) = &a.common.out {
                write_out(Some(&sidecar(out)), &json_text(&torus_params(&t))?)?;
            }
        }
        Format::Json => {
            let v = json!({ "params": torus_params(&t), "x": c.x, "kappa": c.kappa, "u": c.u, "v": c.v, "du": c.du, "dv": c.dv });
            write_out(a.common.out.as_deref(), &json_text(&v)?)?;
        }
        Format::Obj => return Err(Error::Input("curves are written as csv or json".into())),
    }
    Ok(0)
}

fn mutate(mut t: TorusImmersion, c: &Common) -> TorusImmersion {
    if c.inject_q2_flip {
        t.beta = -t.beta;
    }
    t
}

fn cmd_spectrum(a: &TorusArgs) -> Result<i32> {
    check_common(&a.common)?;
    if (a.common.tol - KERNEL_TOL_SCALE).abs() > 0.0 {
        eprintln!("note: spectra are classified with the fixed kernel scale {KERNEL_TOL_SCALE:e}");
    }
    let t = mutate(build_torus(a.family, a.b, a.samples)?, &a.common);
    let r = full_hessian(&t, a.common.grid_y, a.common.grid_x)?;
    match a.common.format.unwrap_or(Format::Json) {
        Format::Json => write_out(a.common.out.as_deref(), &json_text(&r)?)?,
        Format::Csv => {
            let rows = r.modes.iter().flat_map(|m| {
                m.eigenvalues
                    .iter()
                    .zip(&m.scaled_eigenvalues)
                    .map(move |(e, s)| vec![m.mode.to_string(), m.multiplicity.to_string(), num(*e), num(*s)])
            });
            write_out(a.common.out.as_deref(), &csv_text(&["mode", "multiplicity", "eigenvalue", "scaled"], rows)?)?;
        }
        Format::Obj => return Err(Error::Input("spectra are written as csv or json".into())),
    }
    eprintln!("verdict {:?}: index {}, kernel {} ({} beyond invariance)", r.verdict, r.index, r.kernel_dim, r.kernel_beyond_invariance);
    Ok(0)
}

fn grid_of(a: &RangeArgs) -> Result<Vec<f64>> {
    if !(a.b_step > 0.0) || !(a.b_max >= a.b_min) || !a.b_min.is_finite() || !a.b_max.is_finite() {
        return Err(Error::Input(format!("invalid range [{}, {}] step {}", a.b_min, a.b_max, a.b_step)));
    }
    let n = ((a.b_max - a.b_min) / a.b_step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| a.b_min + a.b_step * i as f64).collect())
}

fn cmd_bifurcations(a: &RangeArgs) -> Result<i32> {
    check_common(&a.common)?;
    if a.family != FamilyArg::Homogeneous {
        eprintln!("note: crossings are located along the homogeneous family");
    }
    let resolution = (((a.b_max - a.b_min) / a.b_step).ceil() as usize).max(1);
    let cs = if a.b_max > a.b_min {
        bifurcation_scan_with(a.b_min, a.b_max, resolution, SCAN_SAMPLES_DEFAULT)?
    } else {
        grid_of(a)?;
        Vec::new()
    };
    match a.common.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let rows = cs.iter().map(|c| vec![num(c.b_star), c.mode.clone(), num(c.predicted), num((c.b_star - c.predicted).abs())]);
            write_out(a.common.out.as_deref(), &csv_text(&["b_star", "mode", "predicted", "deviation"], rows)?)?;
        }
        Format::Json => write_out(
            a.common.out.as_deref(),
            &json_text(&json!({ "b_min": a.b_min, "b_max": a.b_max, "resolution": resolution, "crossings": cs }))?,
        )?,
        Format::Obj => return Err(Error::Input("crossings are written as csv or json".into())),
    }
    Ok(0)
}

fn cmd_family(a: &RangeArgs) -> Result<i32> {
    check_common(&a.common)?;
    let bs = grid_of(a)?;
    let mut solver = TwoLobeSolver::default();
    let mut tori = Vec::new();
    let mut failure = None;
    for &b in &bs {
        let t = match a.family {
            FamilyArg::Homogeneous => homogeneous_torus(b, a.samples),
            FamilyArg::TwoLobe => solver.torus(b, a.samples),
        };
        match t {
            Ok(t) => tori.push(t),
            Err(e) => {
                failure = Some((b, e));
                break;
            }
        }
    }
    let energy_increasing = tori.windows(2).all(|w| w[1].energy > w[0].energy);
    let beta_decreasing = tori.windows(2).all(|w| w[1].beta < w[0].beta);
    let rows: Vec<Vec<String>> = tori
        .iter()
        .map(|t| {
            let closure = t.closure.gap_translation.max(t.closure.gap_frame);
            vec![num(t.b), num(t.energy), num(t.beta), num(t.kappa_hi), num(closure)]
        })
        .collect();
    let header = ["b", "energy", "beta", "kappa_max", "closure_residual"];
    let summary = json!({
        "family": Branch::from(a.family).name(), "b_min": a.b_min, "b_max": a.b_max, "b_step": a.b_step,
        "samples": a.samples, "rows": tori.len(), "energy_increasing": energy_increasing,
        "beta_decreasing": beta_decreasing,
        "failed_at": failure.as_ref().map(|(b, e)| json!({ "b": b, "error": e.to_string() })),
        "table": tori.iter().map(|t| json!({ "b": t.b, "energy": t.energy, "beta": t.beta, "kappa_max": t.kappa_hi,
            "closure_residual": t.closure.gap_translation.max(t.closure.gap_frame) })).collect::<Vec<_>>(),
    });
    match a.common.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            write_out(a.common.out.as_deref(), &csv_text(&header, rows)?)?;
            if let Some(out) = &a.common.out {
                write_out(Some(&sidecar(out)), &json_text(&summary)?)?;
            } else {
                eprintln!("energy increasing: {energy_increasing}, beta decreasing: {beta_decreasing}");
            }
        }
        Format::Json => write_out(a.common.out.as_deref(), &json_text(&summary)?)?,
        Format::Obj => return Err(Error::Input("sweeps are written as csv or json".into())),
    }
    match failure {
        Some((b, e)) => {
            eprintln!("error: sweep stopped at b = {b}: {e}");
            Ok(e.exit_code())
        }
        None => Ok(0),
    }
}

fn cmd_export_mesh(a: &TorusArgs) -> Result<i32> {
    check_common(&a.common)?;
    if let Some(f) = a.common.format {
        if f != Format::Obj {
            return Err(Error::Input("meshes are written as obj".into()));
        }
    }
    let t = build_torus(a.family, a.b, a.samples)?;
    let m = mesh::torus_mesh(&t, a.common.grid_y.max(3))?;
    write_out(a.common.out.as_deref(), &m.to_obj())?;
    eprintln!(
        "V = {}, F = {}, chi = {}, self-intersections = {}",
        m.vertices.len(),
        m.quads.len(),
        m.euler_characteristic(),
        m.self_intersections()
    );
    Ok(0)
}

fn cmd_verify(a: &VerifyArgs) -> Result<i32> {
    check_common(&a.common)?;
    let mut cfg = if a.quick { verify::VerifyConfig::quick() } else { verify::VerifyConfig::standard() };
    cfg.flip_q2 = a.common.inject_q2_flip;
    let checks = verify::run_all(cfg.clone())?;
    let failed: Vec<String> = checks.iter().filter(|c| !c.passed).map(|c| format!("{} {}", c.id, c.name)).collect();
    for c in &checks {
        eprintln!("{} {:>2} {}", if c.passed { "PASS" } else { "FAIL" }, c.id, c.name);
    }
    let report = json!({ "config": cfg, "passed": failed.is_empty(), "failed": failed, "checks": checks });
    write_out(a.common.out.as_deref(), &json_text(&report)?)?;
    if failed.is_empty() {
        Ok(0)
    } else {
        eprintln!("failing checks: {}", failed.join(", "));
        Ok(EXIT_VERIFY)
    }
}
