//! Surfaces from frames: the Sym-Bobenko formula, normals, conformal factor, mean curvature,
//! Hopf differential, sinh-Gordon residual, periodicity and parallel surfaces.

use crate::error::{Error, Result};
use crate::iwasawa::{frame, monodromy, FactorDiagnostics, IwasawaConfig};
use crate::loop_algebra::{mobius_to_kappa, LaurentMatrix};
use crate::mat2::{Mat2, C64, I, ZERO};
use rayon::prelude::*;
use serde::Serialize;
use std::io::Write;

const MODULE: &str = "immersion";

/// Sign relating `tr(I^{-1} II)` with `II = <f_ij, N>` to the mean curvature `i(l0 + l1)/(l0 - l1)`.
pub const H_SIGN: f64 = 1.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MarkedPoints {
    pub lambda0: C64,
    pub lambda1: C64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ExpectedInvariants {
    pub h: f64,
    pub q: C64,
    /// `sqrt(H^2 + 1)`, so that `v = e^u / v_scale`.
    pub v_scale: f64,
}

impl MarkedPoints {
    pub fn new(lambda0: C64, lambda1: C64) -> Result<Self> {
        for l in [lambda0, lambda1] {
            if (l.norm() - 1.0).abs() > 1e-12 {
                return Err(Error::domain(MODULE, format!("marked point {l} is not unimodular")));
            }
        }
        if (lambda0 - lambda1).norm() < 1e-12 {
            return Err(Error::domain(MODULE, "coincident marked points (H = infinity)"));
        }
        let m = MarkedPoints { lambda0, lambda1 };
        let hl = I * (lambda0 + lambda1) / (lambda0 - lambda1);
        if hl.im.abs() > 1e-10 * hl.norm().max(1.0) {
            return Err(Error::domain(MODULE, "mean curvature is not real"));
        }
        if let Some((k0, k1)) = m.kappas() {
            let hk = (1.0 + k0 * k1) / (k0 - k1);
            if (hk - hl.re).abs() > 1e-10 * hk.abs().max(1.0) {
                return Err(Error::domain(MODULE, "kappa and lambda forms of H disagree"));
            }
        }
        Ok(m)
    }

    pub fn from_kappas(kappa0: f64, kappa1: f64) -> Result<Self> {
        let l0 = crate::loop_algebra::mobius_to_lambda(C64::new(kappa0, 0.0))?;
        let l1 = crate::loop_algebra::mobius_to_lambda(C64::new(kappa1, 0.0))?;
        MarkedPoints::new(l0 / l0.norm(), l1 / l1.norm())
    }

    /// Real kappa values, unless a marked point sits at `lambda = -1`.
    pub fn kappas(&self) -> Option<(f64, f64)> {
        let k0 = mobius_to_kappa(self.lambda0).ok()?;
        let k1 = mobius_to_kappa(self.lambda1).ok()?;
        if !(k0.is_finite() && k1.is_finite()) || k0.norm() > 1e12 || k1.norm() > 1e12 {
            return None;
        }
        Some((k0.re, k1.re))
    }

    /// Angles with `lambda_j = e^{2 i t_j}`.
    pub fn angles(&self) -> (f64, f64) {
        (0.5 * self.lambda0.arg(), 0.5 * self.lambda1.arg())
    }

    pub fn h(&self) -> f64 {
        (I * (self.lambda0 + self.lambda1) / (self.lambda0 - self.lambda1)).re
    }

    pub fn q(&self) -> C64 {
        I * (self.lambda1.inv() - self.lambda0.inv()) / 4.0
    }

    pub fn expected_invariants(&self) -> ExpectedInvariants {
        let h = self.h();
        ExpectedInvariants { h, q: self.q(), v_scale: (h * h + 1.0).sqrt() }
    }

    /// Simultaneous rotation `lambda_j -> e^{i phi} lambda_j` within the associated family.
    pub fn rotated(&self, phi: f64) -> Result<Self> {
        let r = C64::from_polar(1.0, phi);
        MarkedPoints::new(self.lambda0 * r, self.lambda1 * r)
    }
}

pub fn expected_invariants(m: &MarkedPoints) -> ExpectedInvariants {
    m.expected_invariants()
}

fn check_unitary(f: &Mat2) -> Result<()> {
    let d = (*f * f.adjoint() - Mat2::identity()).max_abs();
    if d > 1e-8 {
        return Err(Error::geometry(MODULE, format!("frame is not unitary (defect {d:.3e})")));
    }
    Ok(())
}

/// `f = F_{lambda_1} F_{lambda_0}^{-1}`.
pub fn sym_bobenko(f_at_lambda1: &Mat2, f_at_lambda0: &Mat2) -> Result<Mat2> {
    check_unitary(f_at_lambda0)?;
    check_unitary(f_at_lambda1)?;
    Ok(*f_at_lambda1 * f_at_lambda0.adjoint())
}

/// `N = F_{lambda_1} diag(i, -i) F_{lambda_0}^{-1}`.
pub fn normal(f_at_lambda1: &Mat2, f_at_lambda0: &Mat2) -> Result<Mat2> {
    check_unitary(f_at_lambda0)?;
    check_unitary(f_at_lambda1)?;
    Ok(*f_at_lambda1 * Mat2::epsilon() * f_at_lambda0.adjoint())
}

/// Coordinates of `[[x0 + i x1, x2 + i x3], [-x2 + i x3, x0 - i x1]]`.
pub fn to_r4(m: &Mat2) -> [f64; 4] {
    [m[(0, 0)].re, m[(0, 0)].im, m[(0, 1)].re, m[(0, 1)].im]
}

pub fn from_r4(x: &[f64; 4]) -> Mat2 {
    Mat2::new(C64::new(x[0], x[1]), C64::new(x[2], x[3]), C64::new(-x[2], x[3]), C64::new(x[0], -x[1]))
}

pub(crate) fn dot4(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3]
}

#[cfg(test)]
fn sub4(a: &[f64; 4], b: &[f64; 4]) -> [f64; 4] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]]
}

fn lin4(a: &[f64; 4], s: f64, b: &[f64; 4], t: f64) -> [f64; 4] {
    [s * a[0] + t * b[0], s * a[1] + t * b[1], s * a[2] + t * b[2], s * a[3] + t * b[3]]
}

/// Rectangular parameter domain `z0 + j hx + i k hy`, `0 <= j < nx`, `0 <= k < ny`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GridSpec {
    pub z0: C64,
    pub hx: f64,
    pub hy: f64,
    pub nx: usize,
    pub ny: usize,
}

impl GridSpec {
    pub fn new(z0: C64, hx: f64, hy: f64, nx: usize, ny: usize) -> Result<Self> {
        if !(hx > 0.0 && hy > 0.0) || nx < 5 || ny < 5 {
            return Err(Error::domain(MODULE, "grid needs positive spacing and at least 5x5 vertices"));
        }
        Ok(GridSpec { z0, hx, hy, nx, ny })
    }

    /// Grid whose spacings tile the rectangle `[0, wx) x [0, wy)` exactly.
    pub fn periodic(wx: f64, wy: f64, nx: usize, ny: usize) -> Result<Self> {
        GridSpec::new(ZERO, wx / nx as f64, wy / ny as f64, nx, ny)
    }

    pub fn z(&self, j: usize, k: usize) -> C64 {
        self.z0 + C64::new(j as f64 * self.hx, k as f64 * self.hy)
    }

    pub fn index(&self, j: usize, k: usize) -> usize {
        k * self.nx + j
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct VertexGeometry {
    pub v: f64,
    pub u: f64,
    pub h: f64,
    pub q: C64,
    /// `|<Omega', Omega'>| / v^2`.
    pub conformality: f64,
    /// Principal curvatures with respect to `II = <f_ij, N>`.
    pub principal: [f64; 2],
    pub metric_det: f64,
}

#[derive(Clone, Debug)]
pub struct SurfaceSample {
    pub grid: GridSpec,
    pub marked: MarkedPoints,
    pub f: Vec<[f64; 4]>,
    pub n: Vec<[f64; 4]>,
    /// Present at interior vertices with nondegenerate metric.
    pub geometry: Vec<Option<VertexGeometry>>,
    pub diagnostics: FactorDiagnostics,
    /// Vertices skipped because the metric degenerated.
    pub degenerate: usize,
    /// Wrap-around periods in x and y when verified.
    pub wrap: (bool, bool),
}

/// Immersion and normal at `z`.
pub fn surface_point(xi: &LaurentMatrix, marked: &MarkedPoints, z: C64, cfg: &IwasawaConfig) -> Result<(Mat2, Mat2, FactorDiagnostics)> {
    let fp = frame(xi, z, cfg)?;
    let f0 = fp.f.eval(marked.lambda0);
    let f1 = fp.f.eval(marked.lambda1);
    Ok((sym_bobenko(&f1, &f0)?, normal(&f1, &f0)?, fp.diagnostics))
}

/// Frames over the grid (in parallel), Sym-Bobenko points, normals and derived fields.
pub fn sample_surface(xi: &LaurentMatrix, marked: &MarkedPoints, grid: &GridSpec, cfg: &IwasawaConfig) -> Result<SurfaceSample> {
    let points: Vec<Result<(Mat2, Mat2, FactorDiagnostics)>> = (0..grid.len())
        .into_par_iter()
        .map(|idx| surface_point(xi, marked, grid.z(idx % grid.nx, idx / grid.nx), cfg))
        .collect();
    let mut f = Vec::with_capacity(grid.len());
    let mut n = Vec::with_capacity(grid.len());
    let mut diag = FactorDiagnostics::empty();
    for p in points {
        let (fm, nm, d) = p?;
        f.push(to_r4(&fm));
        n.push(to_r4(&nm));
        diag = diag.worst(&d);
    }
    Ok(sample_from_fields(*grid, *marked, f, n, diag))
}

/// Assemble a sample from precomputed immersion and normal fields.
pub fn sample_from_fields(grid: GridSpec, marked: MarkedPoints, f: Vec<[f64; 4]>, n: Vec<[f64; 4]>, diagnostics: FactorDiagnostics) -> SurfaceSample {
    let h_scale = marked.expected_invariants().v_scale;
    let (geometry, degenerate) = geometry_fields(&grid, &f, &n, h_scale);
    SurfaceSample { grid, marked, f, n, geometry, diagnostics, degenerate, wrap: (false, false) }
}

/// Boundary vertices without a full fourth-order stencil.
pub const RING: usize = 2;

fn geometry_fields(grid: &GridSpec, f: &[[f64; 4]], n: &[[f64; 4]], v_scale: f64) -> (Vec<Option<VertexGeometry>>, usize) {
    let (hx, hy) = (grid.hx, grid.hy);
    let out: Vec<Option<VertexGeometry>> = (0..grid.len())
        .into_par_iter()
        .map(|idx| {
            let (j, k) = (idx % grid.nx, idx / grid.nx);
            if j < RING || k < RING || j + RING >= grid.nx || k + RING >= grid.ny {
                return None;
            }
            let at = |dj: i64, dk: i64| grid.index((j as i64 + dj) as usize, (k as i64 + dk) as usize);
            let c = &f[idx];
            let d1 = |field: &[[f64; 4]], dx: i64, dy: i64, h: f64| {
                let mut out = [0.0; 4];
                for (s, w) in [(1i64, 8.0), (2, -1.0)] {
                    let (p, m) = (&field[at(s * dx, s * dy)], &field[at(-s * dx, -s * dy)]);
                    for i in 0..4 {
                        out[i] += w * (p[i] - m[i]) / (12.0 * h);
                    }
                }
                out
            };
            let d2 = |dx: i64, dy: i64, h: f64| {
                let mut out = [0.0; 4];
                for i in 0..4 {
                    out[i] = (-f[at(2 * dx, 2 * dy)][i] + 16.0 * f[at(dx, dy)][i] - 30.0 * c[i] + 16.0 * f[at(-dx, -dy)][i]
                        - f[at(-2 * dx, -2 * dy)][i])
                        / (12.0 * h * h);
                }
                out
            };
            let fx = d1(f, 1, 0, hx);
            let fy = d1(f, 0, 1, hy);
            let nx_ = d1(n, 1, 0, hx);
            let ny_ = d1(n, 0, 1, hy);
            let fxx = d2(1, 0, hx);
            let fyy = d2(0, 1, hy);
            let mut fxy = [0.0; 4];
            for (a, wa) in [(1i64, 8.0), (2, -1.0)] {
                for (b, wb) in [(1i64, 8.0), (2, -1.0)] {
                    for i in 0..4 {
                        fxy[i] += wa * wb * (f[at(a, b)][i] - f[at(a, -b)][i] - f[at(-a, b)][i] + f[at(-a, -b)][i])
                            / (144.0 * hx * hy);
                    }
                }
            }
            let nn = &n[idx];
            let (e, ff, g) = (dot4(&fx, &fx), dot4(&fx, &fy), dot4(&fy, &fy));
            let det = e * g - ff * ff;
            let v2 = 0.5 * (e + g);
            if det <= 1e-14 * (e + g).powi(2).max(1e-300) || v2 <= 1e-300 {
                return None;
            }
            let (l, m, nq) = (dot4(&fxx, nn), dot4(&fxy, nn), dot4(&fyy, nn));
            // shape operator I^{-1} II
            let s11 = (g * l - ff * m) / det;
            let s12 = (g * m - ff * nq) / det;
            let s21 = (e * m - ff * l) / det;
            let s22 = (e * nq - ff * m) / det;
            let tr = s11 + s22;
            let dsh = s11 * s22 - s12 * s21;
            let disc = (0.25 * tr * tr - dsh).max(0.0).sqrt();
            let principal = [0.5 * tr - disc, 0.5 * tr + disc];
            let q = C64::new(dot4(&fx, &nx_) - dot4(&fy, &ny_), -(dot4(&fx, &ny_) + dot4(&fy, &nx_))) * 0.25;
            let iso = C64::new(e - g, -2.0 * ff) * 0.25;
            let v = v2.sqrt();
            Some(VertexGeometry {
                v,
                u: (v * v_scale).ln(),
                h: H_SIGN * 0.5 * tr,
                q,
                conformality: iso.norm() / v2,
                principal,
                metric_det: det,
            })
        })
        .collect();
    let mut degenerate = 0;
    for (idx, g) in out.iter().enumerate() {
        let (j, k) = (idx % grid.nx, idx / grid.nx);
        let interior = j >= RING && k >= RING && j + RING < grid.nx && k + RING < grid.ny;
        if interior && g.is_none() {
            degenerate += 1;
        }
    }
    (out, degenerate)
}

#[derive(Clone, Debug, Serialize)]
pub struct Residual {
    pub field: Vec<Option<f64>>,
    pub max: f64,
}

impl Residual {
    /// Largest `|R|` over vertices with `lo.re <= x <= hi.re` and `lo.im <= y <= hi.im`.
    pub fn max_in_window(&self, grid: &GridSpec, lo: C64, hi: C64) -> f64 {
        let eps = 1e-9 * grid.hx.max(grid.hy);
        self.field
            .iter()
            .enumerate()
            .filter_map(|(idx, r)| {
                let z = grid.z(idx % grid.nx, idx / grid.nx);
                let inside = z.re >= lo.re - eps && z.re <= hi.re + eps && z.im >= lo.im - eps && z.im <= hi.im + eps;
                r.filter(|_| inside).map(f64::abs)
            })
            .fold(0.0, f64::max)
    }
}

/// `R = (u_xx + u_yy)/2 + sinh(2u)` on vertices whose four neighbours carry `u`.
pub fn sinh_gordon_residual(s: &SurfaceSample) -> Residual {
    let g = &s.grid;
    let mut field = vec![None; g.len()];
    let mut max: f64 = 0.0;
    for k in 1..g.ny.saturating_sub(1) {
        for j in 1..g.nx.saturating_sub(1) {
            let get = |j: usize, k: usize| s.geometry[g.index(j, k)].map(|x| x.u);
            let (Some(c), Some(e), Some(w), Some(nn), Some(so)) =
                (get(j, k), get(j + 1, k), get(j - 1, k), get(j, k + 1), get(j, k - 1))
            else {
                continue;
            };
            let lap = (e - 2.0 * c + w) / (g.hx * g.hx) + (nn - 2.0 * c + so) / (g.hy * g.hy);
            let r = 0.5 * lap + (2.0 * c).sinh();
            max = max.max(r.abs());
            field[g.index(j, k)] = Some(r);
        }
    }
    Residual { field, max }
}

#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct GeometrySummary {
    pub vertices: usize,
    pub mean_h: f64,
    pub max_h_error: f64,
    pub mean_h_error: f64,
    pub mean_q: C64,
    pub max_q_error: f64,
    pub q_spread: f64,
    pub max_conformality: f64,
}

/// Compare numeric H and Q with the marked-point predictions.
pub fn summarize_geometry(s: &SurfaceSample) -> GeometrySummary {
    let ex = s.marked.expected_invariants();
    let pts: Vec<&VertexGeometry> = s.geometry.iter().flatten().collect();
    if pts.is_empty() {
        return GeometrySummary::default();
    }
    let nv = pts.len() as f64;
    let mean_h = pts.iter().map(|p| p.h).sum::<f64>() / nv;
    let mean_q = pts.iter().map(|p| p.q).sum::<C64>() / nv;
    GeometrySummary {
        vertices: pts.len(),
        mean_h,
        max_h_error: pts.iter().map(|p| (p.h - ex.h).abs()).fold(0.0, f64::max),
        mean_h_error: pts.iter().map(|p| (p.h - ex.h).abs()).sum::<f64>() / nv,
        mean_q,
        max_q_error: pts.iter().map(|p| (p.q - ex.q).norm()).fold(0.0, f64::max),
        q_spread: pts.iter().map(|p| (p.q - mean_q).norm()).fold(0.0, f64::max),
        max_conformality: pts.iter().map(|p| p.conformality).fold(0.0, f64::max),
    }
}

/// Invariants every sample must satisfy: unit points, unit normals, `<f, N> = 0`.
pub fn sample_invariant_defect(s: &SurfaceSample) -> f64 {
    s.f.iter()
        .zip(&s.n)
        .map(|(f, n)| {
            (dot4(f, f) - 1.0).abs().max((dot4(n, n) - 1.0).abs()).max(dot4(f, n).abs())
        })
        .fold(0.0, f64::max)
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct PeriodicityReport {
    pub tau: C64,
    pub pass: bool,
    /// Common sign of `M_{lambda_j}` when the check passes.
    pub sign: Option<i8>,
    /// `|M_0 - I|, |M_0 + I|, |M_1 - I|, |M_1 + I|`.
    pub defects: [f64; 4],
    pub delta0: C64,
    pub delta1: C64,
}

pub const DEFAULT_PERIOD_TOL: f64 = 1e-6;

pub fn periodicity_check(xi: &LaurentMatrix, marked: &MarkedPoints, tau: C64, tol: f64, cfg: &IwasawaConfig) -> Result<PeriodicityReport> {
    if tau.norm() == 0.0 {
        return Err(Error::domain(MODULE, "period must be nonzero"));
    }
    let m = monodromy(xi, tau, cfg)?;
    let m0 = m.at(marked.lambda0);
    let m1 = m.at(marked.lambda1);
    let id = Mat2::identity();
    let defects = [(m0 - id).max_abs(), (m0 + id).max_abs(), (m1 - id).max_abs(), (m1 + id).max_abs()];
    let sign = if defects[0] < tol && defects[2] < tol {
        Some(1)
    } else if defects[1] < tol && defects[3] < tol {
        Some(-1)
    } else {
        None
    };
    Ok(PeriodicityReport { tau, pass: sign.is_some(), sign, defects, delta0: m0.trace(), delta1: m1.trace() })
}

fn period_residual(xi: &LaurentMatrix, marked: &MarkedPoints, tau: C64, sign: f64, cfg: &IwasawaConfig) -> Result<Vec<f64>> {
    let m = monodromy(xi, tau, cfg)?;
    let mut r = Vec::with_capacity(16);
    for l in [marked.lambda0, marked.lambda1] {
        let d = m.at(l) - Mat2::scalar(C64::new(sign, 0.0));
        for e in d.entries() {
            r.push(e.re);
            r.push(e.im);
        }
    }
    Ok(r)
}

/// Gauss-Newton on complex `tau` for `M_{lambda_0}(tau) = M_{lambda_1}(tau) = +-I`, both signs tried.
pub fn find_period(xi: &LaurentMatrix, marked: &MarkedPoints, guess: C64, tol: f64, cfg: &IwasawaConfig) -> Result<C64> {
    let floor = 1e-3 * guess.norm().max(1e-3);
    let mut best: Option<(f64, C64)> = None;
    for sign in [1.0, -1.0] {
        let mut tau = guess;
        let mut r = period_residual(xi, marked, tau, sign, cfg)?;
        let mut obj: f64 = r.iter().map(|x| x * x).sum();
        let mut mu = 1e-3;
        for _ in 0..60 {
            if obj < tol * tol {
                break;
            }
            let h = 1e-6 * tau.norm().max(1.0);
            let rx = period_residual(xi, marked, tau + h, sign, cfg)?;
            let ry = period_residual(xi, marked, tau + I * h, sign, cfg)?;
            let jx: Vec<f64> = rx.iter().zip(&r).map(|(a, b)| (a - b) / h).collect();
            let jy: Vec<f64> = ry.iter().zip(&r).map(|(a, b)| (a - b) / h).collect();
            let a11: f64 = jx.iter().map(|x| x * x).sum();
            let a12: f64 = jx.iter().zip(&jy).map(|(x, y)| x * y).sum();
            let a22: f64 = jy.iter().map(|x| x * x).sum();
            let g1: f64 = jx.iter().zip(&r).map(|(x, y)| x * y).sum();
            let g2: f64 = jy.iter().zip(&r).map(|(x, y)| x * y).sum();
            let mut accepted = false;
            for _ in 0..20 {
                let (b11, b22) = (a11 * (1.0 + mu), a22 * (1.0 + mu));
                let det = b11 * b22 - a12 * a12;
                if det.abs() < 1e-300 {
                    mu *= 10.0;
                    continue;
                }
                let dx = -(b22 * g1 - a12 * g2) / det;
                let dy = -(b11 * g2 - a12 * g1) / det;
                let cand = tau + C64::new(dx, dy);
                let rc = period_residual(xi, marked, cand, sign, cfg)?;
                let oc: f64 = rc.iter().map(|x| x * x).sum();
                if oc < obj {
                    tau = cand;
                    r = rc;
                    obj = oc;
                    mu = (mu * 0.1).max(1e-12);
                    accepted = true;
                    break;
                }
                mu *= 10.0;
            }
            if !accepted {
                break;
            }
        }
        if tau.norm() < floor {
            continue;
        }
        let converged = obj.sqrt() < tol;
        let better = match best {
            None => true,
            Some((b, t)) => {
                let bc = b.sqrt() < tol;
                if converged && bc { (tau - guess).norm() < (t - guess).norm() } else { converged || (!bc && obj < b) }
            }
        };
        if better {
            best = Some((obj, tau));
        }
    }
    match best {
        Some((obj, tau)) if obj.sqrt() < tol => Ok(tau),
        Some((obj, _)) => Err(Error::convergence(MODULE, format!("no period near {guess}"), obj.sqrt())),
        None => Err(Error::convergence(MODULE, format!("iteration from {guess} collapsed to the trivial period"), f64::NAN)),
    }
}

#[derive(Clone, Debug)]
pub struct ParallelSurface {
    pub t: f64,
    pub sample: SurfaceSample,
    /// Predicted `1/2 (cot(theta_1 - t) + cot(theta_2 - t))` per vertex, `cot theta_i` the principal curvatures.
    pub expected_h: Vec<Option<f64>>,
    /// Smallest `theta_i` over the sample.
    pub focal_distance: f64,
    /// Largest relative error between numeric and predicted H on vertices present in both.
    pub max_relative_error: f64,
}

pub fn focal_distance(s: &SurfaceSample) -> f64 {
    s.geometry
        .iter()
        .flatten()
        .flat_map(|g| g.principal.iter().map(|k| 1f64.atan2(*k)))
        .fold(f64::INFINITY, f64::min)
}

/// Parallel surface `cos(t) f + sin(t) N` with normal `-sin(t) f + cos(t) N`.
pub fn parallel_surface(s: &SurfaceSample, t: f64) -> Result<ParallelSurface> {
    let tf = focal_distance(s);
    if t < 0.0 || t >= tf {
        return Err(Error::geometry(MODULE, format!("t = {t} is beyond the focal distance {tf:.6}")));
    }
    let (st, ct) = t.sin_cos();
    let f: Vec<[f64; 4]> = s.f.iter().zip(&s.n).map(|(f, n)| lin4(f, ct, n, st)).collect();
    let n: Vec<[f64; 4]> = s.f.iter().zip(&s.n).map(|(f, n)| lin4(f, -st, n, ct)).collect();
    let mut sample = sample_from_fields(s.grid, s.marked, f, n, s.diagnostics);
    let expected_h: Vec<Option<f64>> = s
        .geometry
        .iter()
        .map(|g| {
            g.map(|g| {
                H_SIGN * 0.5 * g.principal.iter().map(|k| 1.0 / (1f64.atan2(*k) - t).tan()).sum::<f64>()
            })
        })
        .collect();
    let mut worst: f64 = 0.0;
    for (g, e) in sample.geometry.iter().zip(&expected_h) {
        if let (Some(g), Some(e)) = (g, e) {
            worst = worst.max((g.h - e).abs() / e.abs().max(1.0));
        }
    }
    sample.wrap = s.wrap;
    Ok(ParallelSurface { t, sample, expected_h, focal_distance: tf, max_relative_error: worst })
}

/// CSV field dump with header `x,y,f0,f1,f2,f3,u,v,H,Q_re,Q_im`.
pub fn write_field_csv<W: Write>(s: &SurfaceSample, w: &mut W) -> std::io::Result<()> {
    writeln!(w, "x,y,f0,f1,f2,f3,u,v,H,Q_re,Q_im")?;
    for k in 0..s.grid.ny {
        for j in 0..s.grid.nx {
            let idx = s.grid.index(j, k);
            let z = s.grid.z(j, k);
            let f = s.f[idx];
            write!(w, "{:.9e},{:.9e},{:.9e},{:.9e},{:.9e},{:.9e}", z.re, z.im, f[0], f[1], f[2], f[3])?;
            match s.geometry[idx] {
                Some(g) => writeln!(w, ",{:.9e},{:.9e},{:.9e},{:.9e},{:.9e}", g.u, g.v, g.h, g.q.re, g.q.im)?,
                None => writeln!(w, ",,,,,")?,
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families;
    use std::f64::consts::PI;

    fn cfg() -> IwasawaConfig {
        IwasawaConfig::default()
    }

    #[test]
    fn marked_points_and_invariants() {
        let m = MarkedPoints::new(I, -I).unwrap();
        let ex = m.expected_invariants();
        assert!(ex.h.abs() < 1e-15);
        assert!((ex.q - C64::new(-0.5, 0.0)).norm() < 1e-15);
        let (k0, k1) = m.kappas().unwrap();
        assert!((k0 - 1.0).abs() < 1e-15 && (k1 + 1.0).abs() < 1e-15);
        assert!(MarkedPoints::new(I, I).is_err());
        assert!(MarkedPoints::new(I * 1.1, -I).is_err());
        let m = MarkedPoints::from_kappas(2.0, -0.5).unwrap();
        assert!((m.h() - (1.0 - 1.0) / 2.5).abs() < 1e-12);
        let (t0, t1) = families::flat_marked(0.3).unwrap().angles();
        assert!((t0 - 0.3).abs() < 1e-15 && (t1 + 0.3).abs() < 1e-15);
    }

    #[test]
    fn sym_and_normal_at_origin() {
        let id = Mat2::identity();
        assert_eq!(sym_bobenko(&id, &id).unwrap(), id);
        assert_eq!(normal(&id, &id).unwrap(), Mat2::epsilon());
        assert!(sym_bobenko(&(id * 2.0), &id).is_err());
        let (f, n, _) = surface_point(&families::flat_xi(), &families::clifford_marked(), ZERO, &cfg()).unwrap();
        assert!((f - id).max_abs() < 1e-14 && (n - Mat2::epsilon()).max_abs() < 1e-14);
    }

    #[test]
    fn r4_identification() {
        let x = [0.5, -0.1, 0.7, 0.3];
        let m = from_r4(&x);
        assert!((m.det().re - dot4(&x, &x)).abs() < 1e-15);
        assert_eq!(to_r4(&m), x);
    }

    #[test]
    fn flat_sym_matches_closed_form() {
        let m = families::flat_marked(0.4).unwrap();
        let z = C64::new(0.6, -1.3);
        let (f, _, _) = surface_point(&families::flat_xi(), &m, z, &cfg()).unwrap();
        let want = families::flat_frame(z, m.lambda1) * families::flat_frame(z, m.lambda0).adjoint();
        assert!((f - want).max_abs() < 1e-10);
    }

    #[test]
    fn flat_geometry() {
        let (xi, m) = families::flat_family(PI / 6.0).unwrap();
        let grid = GridSpec::new(C64::new(-0.5, -0.5), 0.05, 0.05, 21, 21).unwrap();
        let s = sample_surface(&xi, &m, &grid, &cfg()).unwrap();
        assert!(sample_invariant_defect(&s) < 1e-10);
        let sum = summarize_geometry(&s);
        let ex = m.expected_invariants();
        assert!(sum.mean_h_error < 0.01 * ex.h.abs().max(1.0), "{sum:?} vs {ex:?}");
        assert!(sum.max_q_error < 0.01 * ex.q.norm(), "{sum:?} vs {ex:?}");
        assert!(sum.max_conformality < 1e-5, "{sum:?}");
        for g in s.geometry.iter().flatten() {
            assert!(g.u.abs() < 1e-5, "{}", g.u);
        }
        let r = sinh_gordon_residual(&s);
        assert!(r.max < 1e-4, "{}", r.max);
        for (idx, f) in s.f.iter().enumerate() {
            let j = idx % grid.nx;
            if j > 0 && j + 1 < grid.nx {
                let fx = lin4(&sub4(&s.f[idx + 1], &s.f[idx - 1]), 0.5 / grid.hx, f, 0.0);
                assert!(dot4(&s.n[idx], &fx).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn clifford_geometry_and_periods() {
        let xi = families::flat_xi();
        let m = families::clifford_marked();
        let grid = GridSpec::new(C64::new(0.3, 0.2), 0.05, 0.05, 11, 11).unwrap();
        let s = sample_surface(&xi, &m, &grid, &cfg()).unwrap();
        let sum = summarize_geometry(&s);
        assert!(sum.mean_h.abs() < 1e-2);
        assert!((sum.mean_q - C64::new(-0.5, 0.0)).norm() < 5e-3, "{:?}", sum.mean_q);
        let (w1, w2) = families::clifford_periods();
        let r = periodicity_check(&xi, &m, w1, 1e-6, &cfg()).unwrap();
        assert!(r.pass && r.sign == Some(-1));
        assert!(periodicity_check(&xi, &m, w2, 1e-6, &cfg()).unwrap().pass);
        assert!(!periodicity_check(&xi, &m, w1 * 0.5, 1e-6, &cfg()).unwrap().pass);
        let tau = find_period(&xi, &m, C64::new(4.0, 0.0), 1e-10, &cfg()).unwrap();
        assert!((tau - w1).norm() < 1e-8, "{tau}");
    }

    #[test]
    fn parallel_surfaces() {
        let xi = families::flat_xi();
        let grid = GridSpec::new(C64::new(0.1, 0.1), 0.04, 0.04, 11, 11).unwrap();
        let s = sample_surface(&xi, &families::clifford_marked(), &grid, &cfg()).unwrap();
        assert!((focal_distance(&s) - PI / 4.0).abs() < 1e-3);
        let p0 = parallel_surface(&s, 0.0).unwrap();
        assert!(p0.sample.f.iter().zip(&s.f).all(|(a, b)| sub4(a, b).iter().all(|x| x.abs() < 1e-15)));
        assert!(parallel_surface(&s, PI / 4.0 + 1e-3).is_err());
        let det0 = s.geometry.iter().flatten().map(|g| g.metric_det).sum::<f64>();
        let near = parallel_surface(&s, PI / 4.0 - 0.02).unwrap();
        let det1 = near.sample.geometry.iter().flatten().map(|g| g.metric_det).sum::<f64>();
        assert!(det1 < 0.01 * det0);

        let (xi, m) = families::flat_family(PI / 6.0).unwrap();
        let s = sample_surface(&xi, &m, &grid, &cfg()).unwrap();
        let mut last = f64::NEG_INFINITY;
        for t in [0.0, 0.05, 0.1, 0.15] {
            let p = parallel_surface(&s, t).unwrap();
            assert!(p.max_relative_error < 0.02, "t={t}: {}", p.max_relative_error);
            let h = summarize_geometry(&p.sample).mean_h;
            assert!(h > last);
            last = h;
        }
    }

    #[test]
    fn field_csv_header() {
        let xi = families::flat_xi();
        let grid = GridSpec::new(ZERO, 0.1, 0.1, 5, 5).unwrap();
        let s = sample_surface(&xi, &families::clifford_marked(), &grid, &cfg()).unwrap();
        let mut out = Vec::new();
        write_field_csv(&s, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.starts_with("x,y,f0,f1,f2,f3,u,v,H,Q_re,Q_im\n"));
        assert_eq!(text.lines().count(), 26);
    }
}
