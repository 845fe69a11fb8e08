//! The `cmc` command line: surface meshes, spectral checks, deformation flows, trace scans and the acceptance suite.

use crate::error::{Error, Result};
use crate::families::{
    clifford_data, clifford_marked, clifford_periods, delaunay_v, delaunay_xi_metric, flat_family, flat_xi, revolution_family,
    revolution_xi, sphere_xi, DelaunayParams, RevolutionParams,
};
use crate::flow::{b_root_delta, flow_integrate, CField, FlowControls, Trajectory};
use crate::immersion::{
    find_period, periodicity_check, sample_surface, summarize_geometry, write_field_csv, GridSpec, MarkedPoints, PeriodicityReport,
    DEFAULT_PERIOD_TOL,
};
use crate::iwasawa::{FactorDiagnostics, IwasawaConfig};
use crate::loop_algebra::LaurentMatrix;
use crate::mat2::C64;
use crate::mesh::{auto_pole, build_mesh, detect_wrap};
use crate::output::write_atomic;
use crate::poly::{PolyRole, RealPolynomial};
use crate::spectral::{check_conditions, delta, g_invariant, real_branch_points, SpectralData, CHECK_TOL};
use crate::verify::{run_all, run_criterion, CRITERIA};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

#[derive(Parser, Debug)]
#[command(name = "cmc", version, about = "Constant mean curvature tori and cylinders in the 3-sphere")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Sample a surface, project it to R^3 and write an OBJ mesh with a JSON report.
    Surface(SurfaceArgs),
    /// Check the closing conditions, real branch points and G invariant of spectral data.
    Check(CheckArgs),
    /// Integrate a deformation of spectral data and write the trajectory as CSV.
    Flow(FlowArgs),
    /// Sample the trace function on a real window and list its branch points.
    Delta(DeltaArgs),
    /// Run the acceptance suite.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Sphere,
    Flat,
    Clifford,
    Delaunay,
    Revolution,
}

#[derive(Args, Debug, Clone)]
pub struct FamilyArgs {
    #[arg(long, value_enum)]
    pub family: Option<Family>,
    /// Flat family angle.
    #[arg(long, default_value_t = PI / 6.0)]
    pub t0: f64,
    /// Delaunay parameters.
    #[arg(long = "a_r", default_value_t = 0.3)]
    pub a_r: f64,
    #[arg(long = "b_r", default_value_t = 0.5)]
    pub b_r: f64,
    /// Revolution family mean curvature.
    #[arg(long = "H", default_value_t = 0.0, allow_hyphen_values = true)]
    pub h: f64,
    #[arg(long, default_value_t = 0.25)]
    pub alpha: f64,
}

#[derive(Args, Debug, Clone)]
pub struct DataArgs {
    /// Spectral data JSON `{"a": [...], "b": [...], "kappa0": k0, "kappa1": k1}`.
    #[arg(long, conflicts_with = "family")]
    pub data: Option<PathBuf>,
    #[command(flatten)]
    pub family: FamilyArgs,
    /// Moebius rotation applied to the data before use.
    #[arg(long, allow_hyphen_values = true)]
    pub mobius: Option<f64>,
}

#[derive(Args, Debug)]
pub struct SurfaceArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    /// Initial value JSON `{"g": g, "coeffs": [...]}` used instead of a family.
    #[arg(long, conflicts_with = "family")]
    pub xi: Option<PathBuf>,
    /// Marked points in the real parameter, used with `--xi`.
    #[arg(long, num_args = 2, value_names = ["K0", "K1"], allow_hyphen_values = true, default_values_t = [1.0, -1.0])]
    pub marked: Vec<f64>,
    #[arg(long, num_args = 2, value_names = ["NX", "NY"], default_values_t = [64, 64])]
    pub grid: Vec<usize>,
    /// Half-open parameter rectangle `[X0, X1) x [Y0, Y1)`.
    #[arg(long, num_args = 4, value_names = ["X0", "Y0", "X1", "Y1"], allow_hyphen_values = true)]
    pub domain: Option<Vec<f64>>,
    /// Translation checked for periodicity.
    #[arg(long, num_args = 2, value_names = ["RE", "IM"], allow_hyphen_values = true)]
    pub period: Option<Vec<f64>>,
    /// OBJ mesh path; the report goes beside it with extension `json`.
    #[arg(long)]
    pub out: PathBuf,
    /// Per-vertex CSV of position, metric and invariants.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Delaunay metric profile CSV.
    #[arg(long)]
    pub profile: Option<PathBuf>,
    /// `auto` or four comma-separated coordinates in R^4.
    #[arg(long, default_value = "auto")]
    pub pole: String,
    #[arg(long, default_value_t = 0.01)]
    pub tol_h: f64,
    /// Relative spread of Q over the sample.
    #[arg(long, default_value_t = 0.01)]
    pub tol_q: f64,
    #[arg(long, default_value_t = 1e-4)]
    pub tol_conformal: f64,
    #[arg(long, default_value_t = DEFAULT_PERIOD_TOL)]
    pub tol_period: f64,
    #[arg(long, default_value_t = 1e-10)]
    pub tol_reality: f64,
    #[arg(long, default_value_t = 1e-5)]
    pub tol_profile: f64,
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    #[command(flatten)]
    pub source: DataArgs,
    #[arg(long, default_value_t = CHECK_TOL)]
    pub tol: f64,
    /// Real window of the branch-point table.
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_hyphen_values = true, default_values_t = [-10.0, 10.0])]
    pub window: Vec<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct FlowArgs {
    #[command(flatten)]
    pub source: DataArgs,
    /// `zero`, `mobius` or comma-separated coefficients of c, lowest degree first.
    #[arg(long, default_value = "zero", allow_hyphen_values = true, conflicts_with = "target_branch")]
    pub c: String,
    /// Drive `Delta` at the given real root of b with unit rate.
    #[arg(long)]
    pub target_branch: Option<usize>,
    #[arg(long, default_value_t = 0.1, allow_hyphen_values = true)]
    pub t_final: f64,
    /// Number of equally spaced sample rows besides the accepted steps.
    #[arg(long, default_value_t = 10)]
    pub samples: usize,
    #[arg(long)]
    pub out: PathBuf,
    /// Final state JSON; defaults to the CSV path with extension `json`.
    #[arg(long)]
    pub state: Option<PathBuf>,
    #[arg(long, default_value_t = 1e-8)]
    pub rtol: f64,
    #[arg(long, default_value_t = 1e-10)]
    pub atol: f64,
    #[arg(long, default_value_t = 0.05)]
    pub dt_max: f64,
    #[arg(long, default_value_t = 1e-6)]
    pub tol_monitor: f64,
    #[arg(long)]
    pub no_period_monitor: bool,
}

#[derive(Args, Debug)]
pub struct DeltaArgs {
    #[command(flatten)]
    pub source: DataArgs,
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_hyphen_values = true, default_values_t = [-3.0, 3.0])]
    pub window: Vec<f64>,
    #[arg(long, default_value_t = 601)]
    pub samples: usize,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long)]
    pub out: PathBuf,
    /// Branch-point report; defaults to the CSV path with extension `json`.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 20240601)]
    pub seed: u64,
    /// Criteria to run; all by default.
    #[arg(long, num_args = 1..)]
    pub only: Vec<u8>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Outcome of a command that ran to completion.
pub struct Outcome {
    pub pass: bool,
    pub summary: String,
}

pub fn run(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Surface(a) => cmd_surface(&a),
        Command::Check(a) => cmd_check(&a),
        Command::Flow(a) => cmd_flow(&a),
        Command::Delta(a) => cmd_delta(&a),
        Command::Verify(a) => cmd_verify(&a),
    }
}

/// Parses arguments, runs and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 3 } else { 0 };
        }
    };
    match run(cli) {
        Ok(o) => {
            println!("{}", o.summary);
            if o.pass {
                0
            } else {
                eprintln!("cmc: check failed");
                1
            }
        }
        Err(e) => {
            eprintln!("cmc: {e}");
            e.exit_code()
        }
    }
}

fn read_input(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Schema(format!("cannot read {}: {e}", path.display())))
}

fn with_extension(path: &Path, ext: &str) -> PathBuf {
    path.with_extension(ext)
}

fn write_json(path: &Path, v: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(v).map_err(|e| Error::Schema(e.to_string()))?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

fn pair(z: C64) -> Value {
    json!([z.re, z.im])
}

fn diagnostics_json(d: &FactorDiagnostics) -> Value {
    json!({
        "unitarity_defect": d.unitarity_defect,
        "reconstruction_defect": d.reconstruction_defect,
        "plus_defect": d.plus_defect,
        "b0_lower": d.b0_lower,
        "b0_min_diagonal": d.b0_min_diagonal,
        "b0_max_diag_imag": d.b0_max_diag_imag,
    })
}

fn periodicity_json(r: &PeriodicityReport) -> Value {
    json!({"tau": pair(r.tau), "pass": r.pass, "sign": r.sign, "defects": r.defects})
}

fn parse_pole(s: &str) -> Result<Option<[f64; 4]>> {
    if s == "auto" {
        return Ok(None);
    }
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|e| Error::Schema(format!("pole coordinate {x:?}: {e}"))))
        .collect::<Result<_>>()?;
    <[f64; 4]>::try_from(v).map(Some).map_err(|_| Error::Schema("pole needs four coordinates".into()))
}

struct SurfaceSource {
    name: String,
    xi: LaurentMatrix,
    marked: MarkedPoints,
    domain: [f64; 4],
    delaunay: Option<DelaunayParams>,
}

fn surface_source(a: &SurfaceArgs) -> Result<SurfaceSource> {
    if let Some(path) = &a.xi {
        let xi: LaurentMatrix = serde_json::from_str(&read_input(path)?).map_err(|e| Error::Schema(e.to_string()))?;
        let marked = MarkedPoints::from_kappas(a.marked[0], a.marked[1])?;
        return Ok(SurfaceSource { name: format!("xi {}", path.display()), xi, marked, domain: [0.0, 0.0, 1.0, 1.0], delaunay: None });
    }
    let f = &a.family;
    let family = f.family.ok_or_else(|| Error::Schema("either --family or --xi is required".into()))?;
    let cfg = IwasawaConfig::default();
    Ok(match family {
        Family::Sphere => {
            SurfaceSource { name: "sphere".into(), xi: sphere_xi(), marked: clifford_marked(), domain: [-1.0, -1.0, 1.0, 1.0], delaunay: None }
        }
        Family::Flat => {
            let (xi, marked) = flat_family(f.t0)?;
            SurfaceSource { name: format!("flat t0 = {}", f.t0), xi, marked, domain: [0.0, 0.0, 2.0, 2.0], delaunay: None }
        }
        Family::Clifford => {
            let (w1, w2) = clifford_periods();
            SurfaceSource { name: "clifford".into(), xi: flat_xi(), marked: clifford_marked(), domain: [0.0, 0.0, w1.re, w2.im], delaunay: None }
        }
        Family::Delaunay => {
            let p = DelaunayParams::new(f.a_r, f.b_r)?;
            SurfaceSource {
                name: format!("delaunay a_r = {}, b_r = {}", f.a_r, f.b_r),
                xi: delaunay_xi_metric(&p),
                marked: clifford_marked(),
                domain: [0.0, 0.0, 1.0, p.period()],
                delaunay: Some(p),
            }
        }
        Family::Revolution => {
            let p = RevolutionParams::new(f.h, f.alpha)?;
            let (xi, marked) = revolution_xi(&p)?;
            let tau = find_period(&xi, &marked, C64::new(3.0, 0.0), 1e-10, &cfg)?;
            SurfaceSource { name: format!("revolution H = {}, alpha = {}", f.h, f.alpha), xi, marked, domain: [0.0, 0.0, tau.re, 2.0], delaunay: None }
        }
    })
}

fn cmd_surface(a: &SurfaceArgs) -> Result<Outcome> {
    let (nx, ny) = (a.grid[0], a.grid[1]);
    if nx < 8 || ny < 8 {
        return Err(Error::Schema(format!("grid must be at least 8 x 8, got {nx} x {ny}")));
    }
    for (name, t) in [("tol-h", a.tol_h), ("tol-q", a.tol_q), ("tol-conformal", a.tol_conformal), ("tol-period", a.tol_period), ("tol-reality", a.tol_reality)] {
        if !(t > 0.0) {
            return Err(Error::Schema(format!("--{name} must be positive")));
        }
    }
    let src = surface_source(a)?;
    let reality = src.xi.reality_check(a.tol_reality);
    if !reality.ok {
        eprintln!("loop_algebra: initial value violates the reality condition by {:.3e}", reality.max_violation);
        let report = json!({"source": src.name, "reality": {"pass": false, "max_violation": reality.max_violation}, "pass": false});
        write_json(&with_extension(&a.out, "json"), &report)?;
        return Ok(Outcome { pass: false, summary: format!("reality violation {:.3e}", reality.max_violation) });
    }
    if !src.xi.semisimplicity_check(1e-12) {
        eprintln!("loop_algebra: warning: initial value is not semisimple");
    }
    let d = a.domain.clone().map(|v| [v[0], v[1], v[2], v[3]]).unwrap_or(src.domain);
    let (wx, wy) = (d[2] - d[0], d[3] - d[1]);
    if !(wx > 0.0 && wy > 0.0) {
        return Err(Error::Schema("domain must have X1 > X0 and Y1 > Y0".into()));
    }
    let grid = GridSpec::new(C64::new(d[0], d[1]), wx / nx as f64, wy / ny as f64, nx, ny)?;
    let cfg = IwasawaConfig::default();
    let mut sample = sample_surface(&src.xi, &src.marked, &grid, &cfg)?;
    let (rx, ry) = detect_wrap(&mut sample, &src.xi, &cfg, a.tol_period)?;
    let extra = match &a.period {
        Some(p) => Some(periodicity_check(&src.xi, &src.marked, C64::new(p[0], p[1]), a.tol_period, &cfg)?),
        None => None,
    };
    let pole = match parse_pole(&a.pole)? {
        Some(p) => p,
        None => auto_pole(&sample),
    };
    let mesh = build_mesh(&sample, &pole)?;
    let sum = summarize_geometry(&sample);
    let ex = src.marked.expected_invariants();
    let h_ok = sum.max_h_error < a.tol_h * ex.h.abs().max(1.0);
    let q_ok = sum.q_spread < a.tol_q * sum.mean_q.norm().max(1e-6);
    let conformal_ok = sum.max_conformality < a.tol_conformal;
    let period_ok = extra.as_ref().is_none_or(|r| r.pass);
    let mut profile_error = None;
    if let Some(p) = &src.delaunay {
        let mut worst: f64 = 0.0;
        let mut rows = String::from("x,y,v,v_formula\n");
        for k in 0..grid.ny {
            for j in 0..grid.nx {
                if let Some(g) = sample.geometry[grid.index(j, k)] {
                    let z = grid.z(j, k);
                    let want = delaunay_v(z.im, p)?;
                    worst = worst.max((g.v - want).abs());
                    rows.push_str(&format!("{:.9e},{:.9e},{:.9e},{:.9e}\n", z.re, z.im, g.v, want));
                }
            }
        }
        if let Some(path) = &a.profile {
            write_atomic(path, rows.as_bytes())?;
        }
        profile_error = Some(worst);
    }
    let profile_ok = profile_error.is_none_or(|e| e < a.tol_profile);
    let pass = h_ok && q_ok && conformal_ok && period_ok && profile_ok;
    write_atomic(&a.out, mesh.to_obj().as_bytes())?;
    if let Some(path) = &a.csv {
        let mut buf = Vec::new();
        write_field_csv(&sample, &mut buf)?;
        write_atomic(path, &buf)?;
    }
    let report = json!({
        "source": src.name,
        "grid": {"nx": nx, "ny": ny, "domain": d},
        "reality": {"pass": true, "max_violation": reality.max_violation},
        "H_num": sum.mean_h,
        "H_expected": ex.h,
        "H_max_error": sum.max_h_error,
        "Q_num": pair(sum.mean_q),
        "Q_expected": pair(ex.q),
        "Q_max_error": sum.max_q_error,
        "Q_spread": sum.q_spread,
        "conformality_max": sum.max_conformality,
        "profile_max_error": profile_error,
        "factorization": diagnostics_json(&sample.diagnostics),
        "degenerate_vertices": sample.degenerate,
        "wrap": {"x": periodicity_json(&rx), "y": periodicity_json(&ry)},
        "periodicity": extra.as_ref().map(periodicity_json),
        "mesh": {
            "vertices": mesh.vertices.len(),
            "faces": mesh.faces.len(),
            "euler_characteristic": mesh.euler_characteristic(),
            "boundary_edges": mesh.boundary_edges(),
            "stitched": [mesh.stitched.0, mesh.stitched.1],
            "pole": pole,
        },
        "checks": {"H": h_ok, "Q": q_ok, "conformality": conformal_ok, "periodicity": period_ok, "profile": profile_ok},
        "pass": pass,
    });
    write_json(&with_extension(&a.out, "json"), &report)?;
    Ok(Outcome {
        pass,
        summary: format!(
            "{}: H {:.6} (expected {:.6}), {} vertices, {} faces, chi = {}, stitched {:?}",
            src.name,
            sum.mean_h,
            ex.h,
            mesh.vertices.len(),
            mesh.faces.len(),
            mesh.euler_characteristic(),
            mesh.stitched
        ),
    })
}

fn spectral_source(a: &DataArgs) -> Result<SpectralData> {
    let data = if let Some(path) = &a.data {
        SpectralData::from_json(&read_input(path)?)?
    } else {
        match a.family.family {
            Some(Family::Clifford) => clifford_data(),
            Some(Family::Revolution) => revolution_family(&RevolutionParams::new(a.family.h, a.family.alpha)?)?,
            Some(f) => return Err(Error::Schema(format!("no spectral data for family {f:?}; use clifford, revolution or --data"))),
            None => return Err(Error::Schema("either --data or --family is required".into())),
        }
    };
    match a.mobius {
        Some(phi) => data.mobius(phi),
        None => Ok(data),
    }
}

fn cmd_check(a: &CheckArgs) -> Result<Outcome> {
    if !(a.tol > 0.0) {
        return Err(Error::Schema("--tol must be positive".into()));
    }
    let data = spectral_source(&a.source)?;
    let report = check_conditions(&data, a.tol)?;
    let branches = real_branch_points(&data, (a.window[0], a.window[1]), 1e-10)?;
    let g = if report.b.pass { Some(g_invariant(&data)?) } else { None };
    let mut v = report.to_json();
    v["data"] = serde_json::to_value(&data).map_err(|e| Error::Schema(e.to_string()))?;
    v["genus"] = json!(data.genus());
    v["H"] = json!(data.mean_curvature());
    v["branch_points"] = serde_json::to_value(&branches).map_err(|e| Error::Schema(e.to_string()))?;
    v["G"] = serde_json::to_value(g).map_err(|e| Error::Schema(e.to_string()))?;
    match &a.out {
        Some(p) => write_json(p, &v)?,
        None => println!("{}", serde_json::to_string_pretty(&v).map_err(|e| Error::Schema(e.to_string()))?),
    }
    Ok(Outcome {
        pass: report.pass(),
        summary: format!(
            "A {} B {} C {} (residuals {:.2e}, {:.2e}); {} real branch points in [{}, {}]",
            report.a.pass,
            report.b.pass,
            report.c.pass,
            report.c.residual0,
            report.c.residual1,
            branches.points.len(),
            a.window[0],
            a.window[1]
        ),
    })
}

fn parse_c(s: &str) -> Result<CField> {
    match s {
        "zero" => Ok(CField::Fixed(RealPolynomial::new(vec![0.0]).with_role(PolyRole::C))),
        "mobius" => Ok(CField::Mobius),
        _ => {
            let coeffs = s
                .split(',')
                .map(|x| x.trim().parse::<f64>().map_err(|e| Error::Schema(format!("coefficient {x:?}: {e}"))))
                .collect::<Result<Vec<_>>>()?;
            Ok(CField::Fixed(RealPolynomial::new(coeffs).with_role(PolyRole::C)))
        }
    }
}

fn trajectory_csv(traj: &Trajectory, target: Option<usize>) -> Result<String> {
    let csv = traj.to_csv();
    let Some(i) = target else { return Ok(csv) };
    let mut out = String::with_capacity(csv.len() + 48 * traj.states.len());
    for (k, line) in csv.lines().enumerate() {
        out.push_str(line);
        if k == 0 {
            out.push_str(",beta,delta_beta\n");
        } else {
            let (beta, d) = b_root_delta(&traj.states[k - 1].data, i)?;
            out.push_str(&format!(",{beta:.12e},{d:.12e}\n"));
        }
    }
    Ok(out)
}

fn cmd_flow(a: &FlowArgs) -> Result<Outcome> {
    for (name, t) in [("rtol", a.rtol), ("atol", a.atol), ("dt-max", a.dt_max), ("tol-monitor", a.tol_monitor)] {
        if !(t > 0.0) {
            return Err(Error::Schema(format!("--{name} must be positive")));
        }
    }
    let data = spectral_source(&a.source)?;
    let field = match a.target_branch {
        Some(i) => CField::BranchTarget(i),
        None => parse_c(&a.c)?,
    };
    let controls = FlowControls {
        rtol: a.rtol,
        atol: a.atol,
        dt_max: a.dt_max,
        monitor_tol: a.tol_monitor,
        monitor_periods: !a.no_period_monitor,
        ..FlowControls::default()
    };
    let samples: Vec<f64> = (1..=a.samples).map(|k| a.t_final * k as f64 / a.samples as f64).collect();
    let traj = flow_integrate(&data, &field, a.t_final, &samples, &controls)?;
    write_atomic(&a.out, trajectory_csv(&traj, a.target_branch)?.as_bytes())?;
    let last = traj.last();
    let closing = traj.max_closing_residual();
    let drift = traj.max_period_drift();
    let pass = traj.stop.is_none() && closing < a.tol_monitor && (a.no_period_monitor || drift < a.tol_monitor);
    let state = json!({
        "t": last.t,
        "data": serde_json::to_value(&last.data).map_err(|e| Error::Schema(e.to_string()))?,
        "H": last.mean_curvature,
        "lnmu0": pair(last.lnmu0),
        "lnmu1": pair(last.lnmu1),
        "max_closing_residual": closing,
        "max_period_drift": drift,
        "rows": traj.states.len(),
        "rejected_steps": traj.rejected,
        "stop": traj.stop,
        "pass": pass,
    });
    write_json(&a.state.clone().unwrap_or_else(|| with_extension(&a.out, "json")), &state)?;
    Ok(Outcome {
        pass,
        summary: format!(
            "t = {:.6} after {} rows; closing residual {:.2e}, period drift {:.2e}{}",
            last.t,
            traj.states.len(),
            closing,
            drift,
            traj.stop.as_ref().map(|s| format!("; stopped: {s}")).unwrap_or_default()
        ),
    })
}

fn cmd_delta(a: &DeltaArgs) -> Result<Outcome> {
    let (lo, hi) = (a.window[0], a.window[1]);
    if !(lo < hi) || a.samples < 2 {
        return Err(Error::Schema("need LO < HI and at least two samples".into()));
    }
    let data = spectral_source(&a.source)?;
    let mut csv = String::from("kappa,delta,delta_im,in_band\n");
    let mut all_in_band = true;
    for k in 0..a.samples {
        let x = lo + (hi - lo) * k as f64 / (a.samples - 1) as f64;
        let d = delta(&data, C64::new(x, 0.0))?;
        let in_band = d.re.abs() <= 2.0 + 1e-9;
        all_in_band &= in_band;
        csv.push_str(&format!("{x:.12e},{:.12e},{:.3e},{in_band}\n", d.re, d.im));
    }
    let branches = real_branch_points(&data, (lo, hi), a.tol)?;
    write_atomic(&a.out, csv.as_bytes())?;
    let mut v = serde_json::to_value(&branches).map_err(|e| Error::Schema(e.to_string()))?;
    v["all_in_band"] = json!(all_in_band);
    write_json(&a.report.clone().unwrap_or_else(|| with_extension(&a.out, "json")), &v)?;
    let list: Vec<String> = branches.points.iter().map(|p| format!("{:.9} (Delta {:.6})", p.kappa, p.delta)).collect();
    Ok(Outcome {
        pass: all_in_band,
        summary: format!("{} branch points in [{lo}, {hi}]: {}; |Delta| <= 2 on all samples: {all_in_band}", list.len(), list.join(", ")),
    })
}

fn cmd_verify(a: &VerifyArgs) -> Result<Outcome> {
    let results = if a.only.is_empty() {
        run_all(a.seed)
    } else {
        a.only.iter().map(|id| run_criterion(*id, a.seed)).collect()
    };
    for r in &results {
        println!("{r}");
    }
    let pass = results.iter().all(|r| r.pass);
    if let Some(p) = &a.out {
        write_json(p, &json!({"seed": a.seed, "criteria": results, "pass": pass}))?;
    }
    let passed = results.iter().filter(|r| r.pass).count();
    Ok(Outcome { pass, summary: format!("{passed}/{} criteria pass (suite has {})", results.len(), CRITERIA.len()) })
}
