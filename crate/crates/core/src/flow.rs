//! Deformations of spectral data preserving the closing conditions: the linear integrability system for
//! `(a', b')` given a polynomial `c`, the motion of the marked points and an adaptive Runge-Kutta integrator
//! with closing-condition monitors.

use crate::error::{Error, Result};
use crate::mat2::{C64, I};
use crate::poly::{normalized_resultant, PolyRole, RealPolynomial};
use crate::roots::find_roots;
use crate::spectral::{check_conditions, delta, ln_mu, periods, CurvePoint, SpectralData, CHECK_TOL};
use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use std::f64::consts::PI;
use std::fmt::Write as _;

const MODULE: &str = "flow";

/// Threshold of the normalized resultant below which `a` and `b` count as sharing a root.
pub const COPRIME_THRESHOLD: f64 = 1e-12;
/// Largest admissible residual of the integrability identity.
pub const IDENTITY_TOL: f64 = 1e-10;

/// Time derivatives of `a` and `b`.
#[derive(Clone, Debug, PartialEq)]
pub struct AbDot {
    /// Degree at most `2g - 1`.
    pub a_dot: RealPolynomial,
    /// Degree at most `g + 1`.
    pub b_dot: RealPolynomial,
    /// Coefficient norm of `2 b' a - b a' - (2(k^2+1) a c_k - 2 k a c - (k^2+1) a_k c)`.
    pub residual: f64,
}

fn kappa2_plus_1() -> RealPolynomial {
    RealPolynomial::new(vec![1.0, 0.0, 1.0])
}

/// `2(k^2+1) a c' - 2 k a c - (k^2+1) a' c`.
pub fn integrability_rhs(a: &RealPolynomial, c: &RealPolynomial) -> RealPolynomial {
    let q = kappa2_plus_1();
    let k = RealPolynomial::new(vec![0.0, 1.0]);
    let t1 = q.mul(a).mul(&c.derivative()).scale(2.0);
    let t2 = k.mul(a).mul(c).scale(-2.0);
    let t3 = q.mul(&a.derivative()).mul(c).scale(-1.0);
    t1.add(&t2).add(&t3)
}

/// Residual of the integrability identity for given rates.
pub fn integrability_residual(a: &RealPolynomial, b: &RealPolynomial, c: &RealPolynomial, a_dot: &RealPolynomial, b_dot: &RealPolynomial) -> f64 {
    let lhs = b_dot.mul(a).scale(2.0).add(&b.mul(a_dot).scale(-1.0));
    lhs.add(&integrability_rhs(a, c).scale(-1.0)).norm()
}

/// Solves `2 b' a - b a' = 2(k^2+1) a c' - 2 k a c - (k^2+1) a' c` by matching the coefficients of `k^0 ... k^{3g+1}`.
pub fn solve_ab_dot(a: &RealPolynomial, b: &RealPolynomial, c: &RealPolynomial) -> Result<AbDot> {
    let da = a.degree().ok_or_else(|| Error::domain(MODULE, "a is zero"))?;
    if da % 2 != 0 {
        return Err(Error::domain(MODULE, "deg a is odd"));
    }
    let g = da / 2;
    if b.degree().is_none_or(|d| d > g + 1) {
        return Err(Error::domain(MODULE, format!("b must be nonzero of degree <= {}", g + 1)));
    }
    if c.degree().is_some_and(|d| d > g + 1) {
        return Err(Error::domain(MODULE, format!("c must have degree <= {}", g + 1)));
    }
    let res = normalized_resultant(a, b);
    if res <= COPRIME_THRESHOLD {
        return Err(Error::conditioning(MODULE, format!("a and b share a root (normalized resultant {res:.3e})")));
    }
    let n_a = 2 * g;
    let n_b = g + 2;
    let rows = 3 * g + 2;
    let mut m = DMatrix::<f64>::zeros(rows, n_a + n_b);
    for j in 0..n_a {
        for (k, bk) in b.coeffs.iter().enumerate() {
            if j + k < rows {
                m[(j + k, j)] -= bk;
            }
        }
    }
    for j in 0..n_b {
        for (k, ak) in a.coeffs.iter().enumerate() {
            if j + k < rows {
                m[(j + k, n_a + j)] += 2.0 * ak;
            }
        }
    }
    let rhs_poly = integrability_rhs(a, c);
    if rhs_poly.coeffs.iter().skip(rows).any(|x| x.abs() > 1e-12 * rhs_poly.norm().max(1.0)) {
        return Err(Error::domain(MODULE, "right-hand side exceeds degree 3g + 1"));
    }
    let rhs = DVector::from_iterator(rows, (0..rows).map(|k| rhs_poly.coeff(k)));
    let x = m
        .clone()
        .qr()
        .solve(&rhs)
        .ok_or_else(|| Error::conditioning(MODULE, "singular integrability system"))?;
    let a_dot = RealPolynomial::new(x.iter().take(n_a).copied().collect()).with_role(PolyRole::A);
    let b_dot = RealPolynomial::new(x.iter().skip(n_a).copied().collect()).with_role(PolyRole::B);
    let residual = integrability_residual(a, b, c, &a_dot, &b_dot);
    if !(residual < IDENTITY_TOL * rhs_poly.norm().max(1.0)) {
        return Err(Error::convergence(MODULE, "integrability identity not met", residual));
    }
    Ok(AbDot { a_dot, b_dot, residual })
}

/// `k_j' = -(k_j^2 + 1) c(k_j)/b(k_j)`.
pub fn kappa_dot(data: &SpectralData, c: &RealPolynomial) -> Result<(f64, f64)> {
    let rate = |k: f64| {
        let bk = data.b.eval(k);
        if bk.abs() < 1e-14 * data.b.norm().max(1.0) {
            return Err(Error::geometry(MODULE, format!("b vanishes at the marked point {k}")));
        }
        Ok(-(k * k + 1.0) * c.eval(k) / bk)
    };
    Ok((rate(data.kappa0)?, rate(data.kappa1)?))
}

/// `d/dt ln mu = 2 pi i c / nu` at a fixed curve point.
pub fn ln_mu_rate(data: &SpectralData, c: &RealPolynomial, p: &CurvePoint) -> C64 {
    2.0 * PI * I * c.eval_c(p.kappa) / data.nu(p)
}

/// `d/dt Delta = 2 sinh(ln mu) 2 pi i c / nu`, equal to `(k^2+1) c Delta'/b`.
pub fn delta_rate(data: &SpectralData, c: &RealPolynomial, kappa: C64) -> Result<C64> {
    let p = CurvePoint::new(kappa, 1);
    Ok(2.0 * ln_mu(data, &p)?.sinh() * ln_mu_rate(data, c, &p))
}

fn real_simple_roots(p: &RealPolynomial) -> Result<Vec<f64>> {
    let roots = find_roots(&p.to_complex(), 1e-9)?;
    if roots.iter().any(|r| r.multiplicity > 1) {
        return Err(Error::precondition(MODULE, "b has a multiple root"));
    }
    if roots.iter().any(|r| r.value.im.abs() > 1e-9 * r.value.norm().max(1.0)) {
        return Err(Error::precondition(MODULE, "b has non-real roots"));
    }
    let mut v: Vec<f64> = roots.iter().map(|r| r.value.re).collect();
    v.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
    Ok(v)
}

/// `c` vanishing at every root of `b` except `beta_i`, scaled so that `d/dt Delta(beta_i) = 1`.
pub fn build_c_branch_target(data: &SpectralData, index: usize) -> Result<RealPolynomial> {
    if normalized_resultant(&data.a, &data.b) <= COPRIME_THRESHOLD {
        return Err(Error::precondition(MODULE, "a and b share a root"));
    }
    let roots = real_simple_roots(&data.b)?;
    let beta = *roots
        .get(index)
        .ok_or_else(|| Error::domain(MODULE, format!("b has {} real roots, index {index} out of range", roots.len())))?;
    let mut c = RealPolynomial::new(vec![1.0]);
    for (k, r) in roots.iter().enumerate() {
        if k != index {
            c = c.mul(&RealPolynomial::new(vec![-r, 1.0]));
        }
    }
    let rate = delta_rate(data, &c, C64::new(beta, 0.0))?;
    if rate.norm() < 1e-12 {
        return Err(Error::geometry(MODULE, format!("Delta is stationary in t at beta = {beta} (Delta = +-2)")));
    }
    Ok(c.scale(1.0 / rate.re).with_role(PolyRole::C))
}

/// The `index`-th real root `beta` of `b` in increasing order and `Delta(beta)`.
pub fn b_root_delta(data: &SpectralData, index: usize) -> Result<(f64, f64)> {
    let roots = real_simple_roots(&data.b)?;
    let beta = *roots
        .get(index)
        .ok_or_else(|| Error::domain(MODULE, format!("b has {} real roots, index {index} out of range", roots.len())))?;
    Ok((beta, delta(data, C64::new(beta, 0.0))?.re))
}

/// Deformation field as a function of the current data.
#[derive(Clone, Debug, PartialEq)]
pub enum CField {
    Fixed(RealPolynomial),
    /// `c = b`, the infinitesimal Moebius reparametrization.
    Mobius,
    /// [`build_c_branch_target`] with the given root index, rebuilt along the flow.
    BranchTarget(usize),
}

impl CField {
    pub fn eval(&self, data: &SpectralData) -> Result<RealPolynomial> {
        match self {
            CField::Fixed(c) => Ok(c.clone()),
            CField::Mobius => Ok(data.b.clone()),
            CField::BranchTarget(i) => build_c_branch_target(data, *i),
        }
    }
}

/// Packed state `(a_0 .. a_{2g-1}, b_0 .. b_{g+1}, k0, k1)`; the leading coefficient of `a` stays 1.
fn pack(data: &SpectralData) -> Vec<f64> {
    let g = data.genus();
    let mut y: Vec<f64> = (0..2 * g).map(|k| data.a.coeff(k)).collect();
    y.extend((0..g + 2).map(|k| data.b.coeff(k)));
    y.push(data.kappa0);
    y.push(data.kappa1);
    y
}

fn unpack(g: usize, y: &[f64]) -> Result<SpectralData> {
    let mut a: Vec<f64> = y[..2 * g].to_vec();
    a.push(1.0);
    let b = y[2 * g..3 * g + 2].to_vec();
    SpectralData::new(RealPolynomial::new(a), RealPolynomial::new(b), y[3 * g + 2], y[3 * g + 3])
}

fn rate(data: &SpectralData, field: &CField) -> Result<Vec<f64>> {
    let c = field.eval(data)?;
    let d = solve_ab_dot(&data.a, &data.b, &c)?;
    let g = data.genus();
    let (k0, k1) = kappa_dot(data, &c)?;
    let mut y: Vec<f64> = (0..2 * g).map(|k| d.a_dot.coeff(k)).collect();
    y.extend((0..g + 2).map(|k| d.b_dot.coeff(k)));
    y.push(k0);
    y.push(k1);
    Ok(y)
}

fn axpy(y: &[f64], h: f64, terms: &[(&[f64], f64)]) -> Vec<f64> {
    let mut out = y.to_vec();
    for (k, v) in terms {
        for (o, x) in out.iter_mut().zip(k.iter()) {
            *o += h * v * x;
        }
    }
    out
}

/// One Dormand-Prince 5(4) step of signed size `h`; returns the 5th-order state and the error estimate vector.
fn dp45(g: usize, y: &[f64], h: f64, field: &CField) -> Result<(Vec<f64>, Vec<f64>)> {
    let f = |v: &[f64]| rate(&unpack(g, v)?, field);
    let k1 = f(y)?;
    let k2 = f(&axpy(y, h, &[(&k1, 1.0 / 5.0)]))?;
    let k3 = f(&axpy(y, h, &[(&k1, 3.0 / 40.0), (&k2, 9.0 / 40.0)]))?;
    let k4 = f(&axpy(y, h, &[(&k1, 44.0 / 45.0), (&k2, -56.0 / 15.0), (&k3, 32.0 / 9.0)]))?;
    let k5 = f(&axpy(y, h, &[(&k1, 19372.0 / 6561.0), (&k2, -25360.0 / 2187.0), (&k3, 64448.0 / 6561.0), (&k4, -212.0 / 729.0)]))?;
    let k6 = f(&axpy(
        y,
        h,
        &[(&k1, 9017.0 / 3168.0), (&k2, -355.0 / 33.0), (&k3, 46732.0 / 5247.0), (&k4, 49.0 / 176.0), (&k5, -5103.0 / 18656.0)],
    ))?;
    let y5 = axpy(
        y,
        h,
        &[(&k1, 35.0 / 384.0), (&k3, 500.0 / 1113.0), (&k4, 125.0 / 192.0), (&k5, -2187.0 / 6784.0), (&k6, 11.0 / 84.0)],
    );
    let k7 = f(&y5)?;
    let e = [71.0 / 57600.0, 0.0, -71.0 / 16695.0, 71.0 / 1920.0, -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0];
    let ks = [&k1, &k2, &k3, &k4, &k5, &k6, &k7];
    let err: Vec<f64> = (0..y.len()).map(|i| h * ks.iter().zip(e).map(|(k, w)| k[i] * w).sum::<f64>()).collect();
    Ok((y5, err))
}

/// One explicit step of signed size `h` without error control.
pub fn step(data: &SpectralData, field: &CField, h: f64) -> Result<SpectralData> {
    let (y, _) = dp45(data.genus(), &pack(data), h, field)?;
    unpack(data.genus(), &y)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FlowControls {
    pub dt0: f64,
    pub rtol: f64,
    pub atol: f64,
    pub dt_min: f64,
    pub dt_max: f64,
    /// Largest admissible `|mu(k_j) - s|` with `s` the initial sign.
    pub monitor_tol: f64,
    /// Evaluate the period drift on every accepted step.
    pub monitor_periods: bool,
    pub max_steps: usize,
}

impl Default for FlowControls {
    fn default() -> Self {
        FlowControls {
            dt0: 1e-3,
            rtol: 1e-8,
            atol: 1e-10,
            dt_min: 1e-10,
            dt_max: 0.05,
            monitor_tol: 1e-6,
            monitor_periods: true,
            max_steps: 100_000,
        }
    }
}

/// Spectral data at a flow time with its monitors.
#[derive(Clone, Debug, PartialEq)]
pub struct DeformationState {
    pub data: SpectralData,
    pub t: f64,
    pub lnmu0: C64,
    pub lnmu1: C64,
    /// `|mu(k_j) - s|` with `s` the initial sign.
    pub residual0: f64,
    pub residual1: f64,
    /// Largest change of a period integral since `t = 0` (zero when not monitored).
    pub period_drift: f64,
    pub mean_curvature: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub states: Vec<DeformationState>,
    pub sign: i8,
    pub initial_periods: Vec<C64>,
    /// Why integration ended before `t_final`.
    pub stop: Option<String>,
    pub rejected: usize,
}

impl Trajectory {
    pub fn last(&self) -> &DeformationState {
        self.states.last().expect("trajectory has an initial state")
    }

    pub fn completed(&self) -> bool {
        self.stop.is_none()
    }

    pub fn max_closing_residual(&self) -> f64 {
        self.states.iter().map(|s| s.residual0.max(s.residual1)).fold(0.0, f64::max)
    }

    pub fn max_period_drift(&self) -> f64 {
        self.states.iter().map(|s| s.period_drift).fold(0.0, f64::max)
    }

    /// Columns `t, a0.., b0.., kappa0, kappa1, H, res_C0, res_C1, res_B`.
    pub fn to_csv(&self) -> String {
        let first = &self.states[0].data;
        let (na, nb) = (2 * first.genus() + 1, first.genus() + 2);
        let mut out = String::from("t");
        for k in 0..na {
            let _ = write!(out, ",a{k}");
        }
        for k in 0..nb {
            let _ = write!(out, ",b{k}");
        }
        out.push_str(",kappa0,kappa1,H,res_C0,res_C1,res_B\n");
        for s in &self.states {
            let _ = write!(out, "{:.12e}", s.t);
            for k in 0..na {
                let _ = write!(out, ",{:.12e}", s.data.a.coeff(k));
            }
            for k in 0..nb {
                let _ = write!(out, ",{:.12e}", s.data.b.coeff(k));
            }
            let _ = writeln!(
                out,
                ",{:.12e},{:.12e},{:.12e},{:.6e},{:.6e},{:.6e}",
                s.data.kappa0, s.data.kappa1, s.mean_curvature, s.residual0, s.residual1, s.period_drift
            );
        }
        out
    }
}

fn monitor(data: &SpectralData, t: f64, sign: i8, base: &[C64], with_periods: bool) -> Result<DeformationState> {
    let lnmu0 = ln_mu(data, &CurvePoint::real(data.kappa0))?;
    let lnmu1 = ln_mu(data, &CurvePoint::real(data.kappa1))?;
    let s = sign as f64;
    let period_drift = if with_periods {
        let p = periods(data)?;
        if p.len() != base.len() {
            return Err(Error::geometry(MODULE, "branch point configuration changed along the flow"));
        }
        p.iter().zip(base).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    } else {
        0.0
    };
    Ok(DeformationState {
        data: data.clone(),
        t,
        lnmu0,
        lnmu1,
        residual0: (lnmu0.exp() - s).norm(),
        residual1: (lnmu1.exp() - s).norm(),
        period_drift,
        mean_curvature: data.mean_curvature(),
    })
}

/// Adaptive Dormand-Prince integration from `t = 0` to `t_final` (either sign), with rows at the accepted steps and
/// at every time in `samples`. Steps are also rejected when a closing residual exceeds `monitor_tol`.
/// Loss of coprimality of `a, b` or a collision of the marked points ends integration with the last accepted state.
pub fn flow_integrate(initial: &SpectralData, field: &CField, t_final: f64, samples: &[f64], controls: &FlowControls) -> Result<Trajectory> {
    let report = check_conditions(initial, CHECK_TOL)?;
    if !report.pass() {
        return Err(Error::precondition(MODULE, "initial data fail the closing conditions"));
    }
    let sign = report.c.sign.unwrap_or(1);
    let g = initial.genus();
    let base = if controls.monitor_periods { periods(initial)? } else { vec![] };
    let mut states = vec![monitor(initial, 0.0, sign, &base, controls.monitor_periods)?];
    let dir = if t_final < 0.0 { -1.0 } else { 1.0 };
    let mut stops: Vec<f64> = samples.iter().copied().filter(|s| s * dir > 0.0 && s * dir < t_final * dir).collect();
    stops.push(t_final);
    stops.sort_by(|x, y| (x * dir).partial_cmp(&(y * dir)).unwrap_or(std::cmp::Ordering::Equal));
    let mut y = pack(initial);
    let mut t = 0.0;
    let mut h = controls.dt0.min(controls.dt_max);
    let mut rejected = 0;
    let mut stop = None;
    let mut next = 0;
    let mut steps = 0;
    while next < stops.len() {
        if steps >= controls.max_steps {
            stop = Some(format!("step budget exhausted at t = {t}"));
            break;
        }
        steps += 1;
        let target = stops[next];
        let mut dt = h.min((target - t) * dir);
        let hits = (target - t) * dir <= h * (1.0 + 1e-12);
        if hits {
            dt = (target - t) * dir;
        }
        let attempt = dp45(g, &y, dt * dir, field).and_then(|(y5, err)| {
            let scale: f64 = y
                .iter()
                .zip(&y5)
                .zip(&err)
                .map(|((a, b), e)| (e / (controls.atol + controls.rtol * a.abs().max(b.abs()))).powi(2))
                .sum::<f64>()
                / y.len() as f64;
            Ok((y5, scale.sqrt()))
        });
        let (y5, err_norm) = match attempt {
            Ok(v) => v,
            Err(e @ (Error::Conditioning { .. } | Error::Geometry { .. } | Error::Domain { .. })) => {
                if dt * 0.5 < controls.dt_min {
                    stop = Some(format!("{e} at t = {t}"));
                    break;
                }
                h = 0.5 * dt;
                rejected += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        let t_new = if hits { target } else { t + dir * dt };
        let accepted = if err_norm <= 1.0 {
            match unpack(g, &y5).and_then(|d| {
                if (d.kappa0 - d.kappa1).abs() < 1e-6 {
                    return Err(Error::geometry(MODULE, "marked points collide (H -> infinity)"));
                }
                if normalized_resultant(&d.a, &d.b) <= COPRIME_THRESHOLD {
                    return Err(Error::conditioning(MODULE, "a and b develop a common root"));
                }
                monitor(&d, t_new, sign, &base, controls.monitor_periods)
            }) {
                Ok(s) if s.residual0 <= controls.monitor_tol && s.residual1 <= controls.monitor_tol => Some(s),
                Ok(_) => None,
                Err(e) => {
                    stop = Some(format!("{e} at t = {t}"));
                    break;
                }
            }
        } else {
            None
        };
        match accepted {
            Some(s) => {
                y = y5;
                t = t_new;
                states.push(s);
                if hits {
                    next += 1;
                }
                let grow = if err_norm == 0.0 { 5.0 } else { (0.9 * err_norm.powf(-0.2)).clamp(0.2, 5.0) };
                h = (dt * grow).min(controls.dt_max).max(controls.dt_min);
                if hits && h < controls.dt0 {
                    h = h.max(dt);
                }
            }
            None => {
                rejected += 1;
                let shrink = if err_norm > 1.0 { (0.9 * err_norm.powf(-0.2)).clamp(0.1, 0.5) } else { 0.5 };
                h = dt * shrink;
                if h < controls.dt_min {
                    stop = Some(format!("step size underflow at t = {t}"));
                    break;
                }
            }
        }
    }
    Ok(Trajectory { states, sign, initial_periods: base, stop, rejected })
}
