//! Spectral data in the kappa parameter: the curve `nu^2 = (kappa^2 + 1) a(kappa)`, the differential
//! `d ln mu = 2 pi i b dkappa / ((kappa^2 + 1) nu)`, conditions A to C, the trace function `Delta`,
//! real branch points, the G invariant and branch weights.

use crate::error::{Error, Result};
use crate::loop_algebra::{rotate_kappa, rotate_kappa_poly};
use crate::mat2::{C64, I, ONE, ZERO};
use crate::poly::{CPoly, PolyRole, RealPolynomial};
use crate::quad;
use crate::roots::find_roots;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::f64::consts::PI;

const MODULE: &str = "spectral";

/// Quadrature tolerance for every integral of `d ln mu`.
pub const QUAD_TOL: f64 = 1e-12;
/// Default tolerance of the condition checks.
pub const CHECK_TOL: f64 = 1e-8;
const ROOT_TOL: f64 = 1e-9;
const SCAN_SAMPLES: usize = 2000;
const PSI_EDGE: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "SpectralJson", try_from = "SpectralJson")]
pub struct SpectralData {
    pub a: RealPolynomial,
    pub b: RealPolynomial,
    pub kappa0: f64,
    pub kappa1: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpectralJson {
    a: Vec<f64>,
    b: Vec<f64>,
    kappa0: f64,
    kappa1: f64,
}

impl From<SpectralData> for SpectralJson {
    fn from(d: SpectralData) -> Self {
        SpectralJson { a: d.a.coeffs, b: d.b.coeffs, kappa0: d.kappa0, kappa1: d.kappa1 }
    }
}

impl TryFrom<SpectralJson> for SpectralData {
    type Error = Error;
    fn try_from(j: SpectralJson) -> Result<Self> {
        SpectralData::new(RealPolynomial::new(j.a), RealPolynomial::new(j.b), j.kappa0, j.kappa1)
    }
}

impl SpectralData {
    /// Checks shape only: `a` monic of even degree `2g`, `deg b <= g + 1`, distinct finite marked points.
    pub fn new(a: RealPolynomial, b: RealPolynomial, kappa0: f64, kappa1: f64) -> Result<Self> {
        let a = a.trimmed(0.0).with_role(PolyRole::A);
        let b = b.trimmed(0.0).with_role(PolyRole::B);
        if a.coeffs.iter().chain(&b.coeffs).any(|c| !c.is_finite()) || !kappa0.is_finite() || !kappa1.is_finite() {
            return Err(Error::domain(MODULE, "non-finite spectral data"));
        }
        let da = a.degree().ok_or_else(|| Error::domain(MODULE, "a is the zero polynomial"))?;
        if da % 2 != 0 {
            return Err(Error::domain(MODULE, format!("deg a = {da} is odd")));
        }
        if (a.coeffs[da] - 1.0).abs() > 1e-10 {
            return Err(Error::domain(MODULE, format!("a has leading coefficient {} instead of 1", a.coeffs[da])));
        }
        let g = da / 2;
        if b.degree().is_some_and(|d| d > g + 1) {
            return Err(Error::domain(MODULE, format!("deg b exceeds g + 1 = {}", g + 1)));
        }
        if b.degree().is_none() {
            return Err(Error::domain(MODULE, "b is the zero polynomial"));
        }
        if kappa0 == kappa1 {
            return Err(Error::domain(MODULE, "coincident marked points (H = infinity)"));
        }
        Ok(SpectralData { a, b, kappa0, kappa1 })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("spectral data serializes")
    }

    pub fn genus(&self) -> usize {
        self.a.degree().unwrap_or(0) / 2
    }

    /// `H = (1 + kappa0 kappa1)/(kappa0 - kappa1)`.
    pub fn mean_curvature(&self) -> f64 {
        (1.0 + self.kappa0 * self.kappa1) / (self.kappa0 - self.kappa1)
    }

    pub fn nu_squared(&self, kappa: C64) -> C64 {
        (kappa * kappa + 1.0) * self.a.eval_c(kappa)
    }

    pub fn nu(&self, p: &CurvePoint) -> C64 {
        self.nu_squared(p.kappa).sqrt() * p.sheet as f64
    }

    fn nu_squared_poly(&self) -> CPoly {
        CPoly::from_real(&[1.0, 0.0, 1.0]).mul(&self.a.to_complex())
    }

    /// Integrand of `d ln mu` along `dkappa`.
    fn form(&self, kappa: C64, nu: C64) -> C64 {
        2.0 * PI * I * self.b.eval_c(kappa) / ((kappa * kappa + 1.0) * nu)
    }

    /// Joint action of `kappa -> (sin phi + kappa cos phi)/(cos phi - kappa sin phi)` on `(a, b, kappa0, kappa1)`,
    /// renormalizing `a` to be monic.
    pub fn mobius(&self, phi: f64) -> Result<SpectralData> {
        let g = self.genus();
        let a = rotate_kappa_poly(&self.a, 2 * g, phi);
        let lead = a.coeff(2 * g);
        if !(lead > 1e-12) {
            return Err(Error::domain(MODULE, format!("rotation by {phi} moves a root of a to infinity")));
        }
        let b = rotate_kappa_poly(&self.b, g + 1, phi).scale(1.0 / lead.sqrt());
        let k0 = rotate_kappa(C64::new(self.kappa0, 0.0), phi);
        let k1 = rotate_kappa(C64::new(self.kappa1, 0.0), phi);
        if !(k0.re.is_finite() && k1.re.is_finite()) || k0.norm() > 1e12 || k1.norm() > 1e12 {
            return Err(Error::domain(MODULE, format!("rotation by {phi} moves a marked point to infinity")));
        }
        SpectralData::new(a.scale(1.0 / lead), b, k0.re, k1.re)
    }

    /// Zeros of `nu^2` split into branch points (odd order) and nodes (even order), each sorted by real then imaginary part.
    pub fn singular_points(&self) -> Result<SingularPoints> {
        let roots = find_roots(&self.nu_squared_poly(), ROOT_TOL)?;
        let mut branch = Vec::new();
        let mut nodes = Vec::new();
        for r in roots {
            if r.multiplicity % 2 == 1 {
                branch.push(r.value);
            } else {
                nodes.push(r.value);
            }
        }
        let key = |z: &C64| (z.re, z.im);
        branch.sort_by(|x, y| key(x).partial_cmp(&key(y)).unwrap_or(std::cmp::Ordering::Equal));
        nodes.sort_by(|x, y| key(x).partial_cmp(&key(y)).unwrap_or(std::cmp::Ordering::Equal));
        let all: Vec<C64> = branch.iter().chain(&nodes).copied().collect();
        let mut gap = f64::INFINITY;
        for i in 0..all.len() {
            for j in i + 1..all.len() {
                gap = gap.min((all[i] - all[j]).norm());
            }
        }
        if !gap.is_finite() {
            gap = 1.0;
        }
        Ok(SingularPoints { branch, nodes, gap })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SingularPoints {
    pub branch: Vec<C64>,
    /// Even-order zeros of `nu^2`.
    pub nodes: Vec<C64>,
    /// Smallest distance between two singular points.
    pub gap: f64,
}

impl SingularPoints {
    fn all(&self) -> impl Iterator<Item = &C64> {
        self.branch.iter().chain(&self.nodes)
    }

    /// Hard standoff below which a path is rejected.
    pub fn offset(&self) -> f64 {
        1e-3 * self.gap
    }

    fn planning_clearance(&self) -> f64 {
        0.2 * self.gap
    }

    fn distance_to_segment(&self, seg: &Segment, skip: Option<C64>) -> f64 {
        self.all()
            .filter(|p| skip.is_none_or(|s| (**p - s).norm() > 1e-12))
            .map(|p| seg.distance(*p))
            .fold(f64::INFINITY, f64::min)
    }

    /// Finite branch point of smallest modulus, the base of `ln mu`.
    pub fn base(&self) -> Option<C64> {
        self.branch
            .iter()
            .filter(|z| (**z - I).norm() > 1e-9 && (**z + I).norm() > 1e-9)
            .min_by(|x, y| {
                let kx = ((x.norm() * 1e10).round(), x.im, x.re);
                let ky = ((y.norm() * 1e10).round(), y.im, y.re);
                kx.partial_cmp(&ky).unwrap_or(std::cmp::Ordering::Equal)
            })
            .copied()
    }
}

/// A point of the curve: `nu = sheet * sqrt((kappa^2 + 1) a(kappa))` with the principal square root.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CurvePoint {
    pub kappa: C64,
    pub sheet: i8,
}

impl CurvePoint {
    pub fn new(kappa: C64, sheet: i8) -> Self {
        CurvePoint { kappa, sheet: if sheet < 0 { -1 } else { 1 } }
    }

    pub fn real(kappa: f64) -> Self {
        CurvePoint::new(C64::new(kappa, 0.0), 1)
    }

    /// Hyperelliptic involution.
    pub fn sigma(&self) -> Self {
        CurvePoint { kappa: self.kappa, sheet: -self.sheet }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Segment {
    Line { from: C64, to: C64 },
    Arc { center: C64, radius: f64, start: f64, sweep: f64 },
}

impl Segment {
    pub fn point(&self, t: f64) -> C64 {
        match *self {
            Segment::Line { from, to } => from + (to - from) * t,
            Segment::Arc { center, radius, start, sweep } => center + C64::from_polar(radius, start + sweep * t),
        }
    }

    pub fn tangent(&self, t: f64) -> C64 {
        match *self {
            Segment::Line { from, to } => to - from,
            Segment::Arc { radius, start, sweep, .. } => I * C64::from_polar(radius, start + sweep * t) * sweep,
        }
    }

    pub fn length(&self) -> f64 {
        match *self {
            Segment::Line { from, to } => (to - from).norm(),
            Segment::Arc { radius, sweep, .. } => radius * sweep.abs(),
        }
    }

    pub fn distance(&self, p: C64) -> f64 {
        match *self {
            Segment::Line { from, to } => {
                let d = to - from;
                let l2 = d.norm_sqr();
                let t = if l2 == 0.0 { 0.0 } else { (((p - from) * d.conj()).re / l2).clamp(0.0, 1.0) };
                (from + d * t - p).norm()
            }
            Segment::Arc { .. } => (0..=256).map(|k| (self.point(k as f64 / 256.0) - p).norm()).fold(f64::INFINITY, f64::min),
        }
    }
}

/// Piecewise path starting at a curve point; the sheet is carried by continuation.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvePath {
    pub start: CurvePoint,
    pub segments: Vec<Segment>,
}

impl CurvePath {
    pub fn line(start: CurvePoint, to: C64) -> Self {
        CurvePath { start, segments: vec![Segment::Line { from: start.kappa, to }] }
    }

    pub fn circle(center: C64, radius: f64, turns: f64, sheet: i8) -> Self {
        let start = CurvePoint::new(center + radius, sheet);
        CurvePath { start, segments: vec![Segment::Arc { center, radius, start: 0.0, sweep: 2.0 * PI * turns }] }
    }

    pub fn end(&self) -> C64 {
        self.segments.last().map_or(self.start.kappa, |s| s.point(1.0))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SheetTrack {
    pub kappa: Vec<C64>,
    pub nu: Vec<C64>,
    pub end: CurvePoint,
    /// Largest step of `nu` relative to `max(|nu|, 1)`.
    pub max_jump: f64,
}

fn nearest_sign(w: C64, guess: C64) -> C64 {
    if (w - guess).norm() <= (w + guess).norm() {
        w
    } else {
        -w
    }
}

fn sheet_of(data: &SpectralData, kappa: C64, nu: C64) -> i8 {
    let w = data.nu_squared(kappa).sqrt();
    if (nu - w).norm() <= (nu + w).norm() {
        1
    } else {
        -1
    }
}

/// Continuation of `nu` along `path` with `steps` samples per segment.
pub fn continue_nu(data: &SpectralData, path: &CurvePath, steps: usize) -> Result<SheetTrack> {
    let sp = data.singular_points()?;
    for seg in &path.segments {
        let d = sp.distance_to_segment(seg, None);
        if d < sp.offset() {
            return Err(Error::path(MODULE, format!("path passes within {d:.3e} of a branch point")));
        }
    }
    let steps = steps.max(2);
    let mut kappa = vec![path.start.kappa];
    let mut nu = vec![data.nu(&path.start)];
    let mut max_jump: f64 = 0.0;
    for seg in &path.segments {
        for k in 1..=steps {
            let z = seg.point(k as f64 / steps as f64);
            let prev = *nu.last().expect("nonempty");
            let guess = if nu.len() >= 2 { prev * 2.0 - nu[nu.len() - 2] } else { prev };
            let next = nearest_sign(data.nu_squared(z).sqrt(), guess);
            max_jump = max_jump.max((next - prev).norm() / prev.norm().max(1.0));
            kappa.push(z);
            nu.push(next);
        }
    }
    let z = *kappa.last().expect("nonempty");
    let end = CurvePoint::new(z, sheet_of(data, z, *nu.last().expect("nonempty")));
    Ok(SheetTrack { kappa, nu, end, max_jump })
}

/// Samples of a function that take values in the square roots of `sq(t)`, continued from `start`.
struct Guide {
    values: Vec<C64>,
}

impl Guide {
    fn build(sq: &dyn Fn(f64) -> C64, start: C64, n: usize) -> Guide {
        let mut values = Vec::with_capacity(n + 1);
        values.push(start);
        for k in 1..=n {
            let prev = values[k - 1];
            let guess = if k >= 2 { prev * 2.0 - values[k - 2] } else { prev };
            values.push(nearest_sign(sq(k as f64 / n as f64).sqrt(), guess));
        }
        Guide { values }
    }

    fn select(&self, t: f64, w: C64) -> C64 {
        let n = self.values.len() - 1;
        let x = (t * n as f64).clamp(0.0, n as f64);
        let i = (x.floor() as usize).min(n - 1);
        let f = x - i as f64;
        nearest_sign(w, self.values[i] * (1.0 - f) + self.values[i + 1] * f)
    }

    fn last(&self) -> C64 {
        *self.values.last().expect("nonempty")
    }
}

fn guide_resolution(length: f64, clearance: f64) -> usize {
    ((length / (0.05 * clearance.max(1e-300))).ceil() as usize).clamp(32, 400_000)
}

/// Integral of `d ln mu` along one segment with `nu` continued from `nu_start`; returns `(value, nu_end)`.
fn integrate_segment(data: &SpectralData, sp: &SingularPoints, seg: &Segment, nu_start: C64) -> Result<(C64, C64)> {
    let clearance = sp.distance_to_segment(seg, None);
    if clearance < sp.offset() {
        return Err(Error::path(MODULE, format!("path passes within {clearance:.3e} of a branch point")));
    }
    let sq = |t: f64| data.nu_squared(seg.point(t));
    let guide = Guide::build(&sq, nu_start, guide_resolution(seg.length(), clearance));
    let f = |t: f64| {
        let z = seg.point(t);
        let nu = guide.select(t, data.nu_squared(z).sqrt());
        data.form(z, nu) * seg.tangent(t)
    };
    let r = quad::adaptive(f, 0.0, 1.0, QUAD_TOL)?;
    Ok((r.value, guide.last()))
}

/// Integral from the branch point `e` to `w` along the straight line, using `kappa = e + (w - e) s^2`
/// and `nu = s phi(s)`; returns `(value, nu(w))` with an arbitrary initial sign of `phi`.
fn integrate_from_branch(data: &SpectralData, sp: &SingularPoints, e: C64, w: C64) -> Result<(C64, C64)> {
    let seg = Segment::Line { from: e, to: w };
    let clearance = sp.distance_to_segment(&seg, Some(e));
    if clearance < sp.offset() {
        return Err(Error::path(MODULE, format!("path passes within {clearance:.3e} of a branch point")));
    }
    let (rest, _) = data.nu_squared_poly().div_rem(&CPoly::linear(-e, ONE));
    let d = w - e;
    let sq = |s: f64| d * rest.eval(e + d * s * s);
    let guide = Guide::build(&sq, sq(0.0).sqrt(), guide_resolution(seg.length(), clearance.min(d.norm())));
    let f = |s: f64| {
        let z = e + d * s * s;
        let phi = guide.select(s, sq(s).sqrt());
        4.0 * PI * I * d * data.b.eval_c(z) / ((z * z + 1.0) * phi)
    };
    let r = quad::adaptive(f, 0.0, 1.0, QUAD_TOL)?;
    Ok((r.value, guide.last()))
}

/// `integral of d ln mu` along a path on the curve.
pub fn integrate_dlnmu(data: &SpectralData, path: &CurvePath) -> Result<C64> {
    let sp = data.singular_points()?;
    integrate_path(data, &sp, path).map(|r| r.0)
}

fn integrate_path(data: &SpectralData, sp: &SingularPoints, path: &CurvePath) -> Result<(C64, C64)> {
    let mut nu = data.nu(&path.start);
    let mut total = ZERO;
    for seg in &path.segments {
        let (v, end) = integrate_segment(data, sp, seg, nu)?;
        total += v;
        nu = end;
    }
    Ok((total, nu))
}

fn is_marked_singular(kappa: C64) -> bool {
    (kappa - I).norm() < 1e-12 || (kappa + I).norm() < 1e-12
}

/// `ln mu` at a curve point, normalized by `ln mu = 0` at the base branch point; closed form in genus zero.
pub fn ln_mu(data: &SpectralData, p: &CurvePoint) -> Result<C64> {
    let sp = data.singular_points()?;
    ln_mu_with(data, &sp, p)
}

fn ln_mu_with(data: &SpectralData, sp: &SingularPoints, p: &CurvePoint) -> Result<C64> {
    if is_marked_singular(p.kappa) {
        return Err(Error::domain(MODULE, "ln mu has essential singularities at kappa = +-i"));
    }
    if data.genus() == 0 {
        return Ok(2.0 * PI * I * (p.kappa * data.b.coeff(0) - data.b.coeff(1)) / data.nu(p));
    }
    let e = sp
        .base()
        .ok_or_else(|| Error::geometry(MODULE, "no finite branch point to normalize ln mu"))?;
    if (p.kappa - e).norm() < 1e-14 {
        return Ok(ZERO);
    }
    let near = sp.all().map(|z| (*z - p.kappa).norm()).fold(f64::INFINITY, f64::min);
    if near < sp.offset() {
        return Err(Error::path(MODULE, format!("point within {near:.3e} of a branch point")));
    }
    let via = plan_from_branch(sp, e, p.kappa)?;
    let (mut total, mut nu) = integrate_from_branch(data, sp, e, via.first().copied().unwrap_or(p.kappa))?;
    if !via.is_empty() {
        let mut from = via[0];
        for to in via[1..].iter().copied().chain(std::iter::once(p.kappa)) {
            let (v, end) = integrate_segment(data, sp, &Segment::Line { from, to }, nu)?;
            total += v;
            nu = end;
            from = to;
        }
    }
    let target = data.nu(p);
    Ok(if (nu - target).norm() <= (nu + target).norm() { total } else { -total })
}

/// Waypoints (possibly none) of a polygon from the branch point `e` to `target` keeping clear of singular points.
fn plan_from_branch(sp: &SingularPoints, e: C64, target: C64) -> Result<Vec<C64>> {
    let clear = sp.planning_clearance();
    let ok = |seg: Segment, skip: Option<C64>| sp.distance_to_segment(&seg, skip) > clear.min(0.5 * seg.length());
    if ok(Segment::Line { from: e, to: target }, Some(e)) {
        return Ok(vec![]);
    }
    let d = target - e;
    for off in [0.5, -0.5, 1.0, -1.0, 2.0, -2.0] {
        for frac in [0.5, 0.25, 0.75] {
            let w = e + d * C64::new(frac, off);
            if ok(Segment::Line { from: e, to: w }, Some(e)) && ok(Segment::Line { from: w, to: target }, None) {
                return Ok(vec![w]);
            }
        }
    }
    Err(Error::path(MODULE, "no clear path from the base branch point"))
}

/// `Delta = 2 cosh(ln mu)`, evaluated on both sheets.
pub fn delta(data: &SpectralData, kappa: C64) -> Result<C64> {
    let sp = data.singular_points()?;
    delta_with(data, &sp, kappa)
}

fn delta_with(data: &SpectralData, sp: &SingularPoints, kappa: C64) -> Result<C64> {
    let p = CurvePoint::new(kappa, 1);
    let up = 2.0 * ln_mu_with(data, sp, &p)?.cosh();
    let down = 2.0 * ln_mu_with(data, sp, &p.sigma())?.cosh();
    if (up - down).norm() > 1e-8 * up.norm().max(1.0) {
        return Err(Error::geometry(MODULE, format!("Delta differs between sheets: {up} vs {down}")));
    }
    Ok(up)
}

/// `ln mu` on the positive sheet at `kappa = tan(psi)` for increasing `psi`, by cumulative integration along the real axis.
pub fn ln_mu_real_scan(data: &SpectralData, psi: &[f64]) -> Result<Vec<C64>> {
    let sp = data.singular_points()?;
    ln_mu_real_scan_with(data, &sp, psi)
}

fn real_integrand(data: &SpectralData) -> impl Fn(f64) -> C64 + '_ {
    move |psi: f64| {
        let k = psi.tan();
        let nu2 = (k * k + 1.0) * data.a.eval(k);
        2.0 * PI * I * data.b.eval(k) / nu2.max(0.0).sqrt()
    }
}

fn ln_mu_real_scan_with(data: &SpectralData, sp: &SingularPoints, psi: &[f64]) -> Result<Vec<C64>> {
    if psi.iter().any(|p| p.abs() >= 0.5 * PI) || psi.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::domain(MODULE, "scan angles must increase inside (-pi/2, pi/2)"));
    }
    if psi.is_empty() {
        return Ok(vec![]);
    }
    for z in sp.all() {
        if z.im.abs() < sp.offset().max(1e-9) {
            return Err(Error::path(MODULE, format!("real axis meets the singular point {z}")));
        }
    }
    if data.genus() == 0 {
        return psi.iter().map(|p| ln_mu_with(data, sp, &CurvePoint::real(p.tan()))).collect();
    }
    let f = real_integrand(data);
    let mut out = Vec::with_capacity(psi.len());
    let mut current = ln_mu_with(data, sp, &CurvePoint::real(psi[0].tan()))?;
    out.push(current);
    for w in psi.windows(2) {
        current += quad::adaptive(&f, w[0], w[1], QUAD_TOL)?.value;
        out.push(current);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConditionA {
    pub pass: bool,
    /// Smallest sampled value of `a` on the scan window.
    pub min_value: f64,
    /// Real roots of `a` with odd multiplicity.
    pub odd_real_roots: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConditionB {
    pub pass: bool,
    /// Integrals of `d ln mu` around consecutive pairs of branch points.
    pub periods: Vec<C64>,
    /// Largest distance of a period from `2 pi i Z`.
    pub period_defect: f64,
    /// Largest defect of `ln mu(rho P) = -conj(ln mu(P))` modulo `2 pi i` over the samples.
    pub involution_defect: f64,
    /// Integrals of `d ln mu` over double loops around `kappa = i` and `kappa = -i`.
    pub residues: [C64; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConditionC {
    pub pass: bool,
    pub lnmu0: C64,
    pub lnmu1: C64,
    /// `|mu(kappa_j)^2 - 1|`.
    pub residual0: f64,
    pub residual1: f64,
    /// Common value of `mu(kappa_j)` when it is `+-1`.
    pub sign: Option<i8>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConditionReport {
    pub a: ConditionA,
    pub b: ConditionB,
    pub c: ConditionC,
}

impl ConditionReport {
    pub fn pass(&self) -> bool {
        self.a.pass && self.b.pass && self.c.pass
    }

    /// `{"A": bool, "B": {"pass", "periods"}, "C": {"pass", "lnmu0", "lnmu1"}}` with additional diagnostics.
    pub fn to_json(&self) -> Value {
        let pair = |z: C64| json!([z.re, z.im]);
        json!({
            "A": self.a.pass,
            "B": {
                "pass": self.b.pass,
                "periods": self.b.periods.iter().map(|z| pair(*z)).collect::<Vec<_>>(),
                "period_defect": self.b.period_defect,
                "involution_defect": self.b.involution_defect,
                "residues": self.b.residues.iter().map(|z| pair(*z)).collect::<Vec<_>>(),
            },
            "C": {
                "pass": self.c.pass,
                "lnmu0": pair(self.c.lnmu0),
                "lnmu1": pair(self.c.lnmu1),
                "residual0": self.c.residual0,
                "residual1": self.c.residual1,
            },
            "A_min_value": self.a.min_value,
            "pass": self.pass(),
        })
    }
}

fn check_a(data: &SpectralData) -> Result<ConditionA> {
    let roots = find_roots(&data.a.to_complex(), ROOT_TOL)?;
    let odd_real_roots: Vec<f64> = roots
        .iter()
        .filter(|r| r.value.im.abs() < 1e-7 * r.value.norm().max(1.0) && r.multiplicity % 2 == 1)
        .map(|r| r.value.re)
        .collect();
    let radius = 2.0 * (1.0 + roots.iter().map(|r| r.value.norm()).fold(0.0, f64::max));
    let scale = data.a.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let min_value = (0..1000)
        .map(|k| data.a.eval(-radius + 2.0 * radius * k as f64 / 999.0))
        .fold(f64::INFINITY, f64::min);
    let pass = odd_real_roots.is_empty() && min_value >= -1e-12 * scale;
    Ok(ConditionA { pass, min_value, odd_real_roots })
}

/// Closed contour around the segment from `p` to `q` at distance `r`.
pub fn stadium(p: C64, q: C64, r: f64) -> Vec<Segment> {
    let d = (q - p) / (q - p).norm();
    let n = I * d;
    let th = d.arg();
    vec![
        Segment::Line { from: p + n * r, to: q + n * r },
        Segment::Arc { center: q, radius: r, start: th + 0.5 * PI, sweep: -PI },
        Segment::Line { from: q - n * r, to: p - n * r },
        Segment::Arc { center: p, radius: r, start: th - 0.5 * PI, sweep: -PI },
    ]
}

/// Pairs of branch points joined by a spanning tree of shortest admissible segments, with the stadium radius of each.
pub fn cycle_pairs(sp: &SingularPoints) -> Result<Vec<(C64, C64, f64)>> {
    let n = sp.branch.len();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let (p, q) = (sp.branch[i], sp.branch[j]);
            let axis = Segment::Line { from: p, to: q };
            let intruder = sp
                .all()
                .filter(|z| (**z - p).norm() > 1e-12 && (**z - q).norm() > 1e-12)
                .map(|z| axis.distance(*z))
                .fold(f64::INFINITY, f64::min);
            let r = (0.5 * sp.gap).min(0.4 * intruder);
            if r > 10.0 * sp.offset() {
                edges.push(((q - p).norm(), i, j, r));
            }
        }
    }
    edges.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap_or(std::cmp::Ordering::Equal));
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    let mut out = Vec::new();
    for (_, i, j, r) in edges {
        let (ri, rj) = (root(&mut parent, i), root(&mut parent, j));
        if ri != rj {
            parent[ri] = rj;
            out.push((sp.branch[i], sp.branch[j], r));
        }
    }
    if n > 0 && out.len() + 1 != n {
        return Err(Error::geometry(MODULE, "cannot isolate the branch points by stadium cycles"));
    }
    Ok(out)
}

/// Period integrals over stadium cycles around the pairs of [`cycle_pairs`].
pub fn periods(data: &SpectralData) -> Result<Vec<C64>> {
    let sp = data.singular_points()?;
    periods_with(data, &sp)
}

fn periods_with(data: &SpectralData, sp: &SingularPoints) -> Result<Vec<C64>> {
    let mut out = Vec::new();
    for (p, q, r) in cycle_pairs(sp)? {
        let segments = stadium(p, q, r);
        let path = CurvePath { start: CurvePoint::new(segments[0].point(0.0), 1), segments };
        let (v, nu_end) = integrate_path(data, sp, &path)?;
        let nu0 = data.nu(&path.start);
        if (nu_end - nu0).norm() > (nu_end + nu0).norm() {
            return Err(Error::geometry(MODULE, "cycle does not close on the curve"));
        }
        out.push(v);
    }
    Ok(out)
}

fn distance_to_integer(x: f64) -> f64 {
    (x - x.round()).abs()
}

fn check_b(data: &SpectralData, sp: &SingularPoints, tol: f64) -> Result<ConditionB> {
    let periods = periods_with(data, sp)?;
    let period_defect = periods
        .iter()
        .map(|z| {
            let x = *z / (2.0 * PI * I);
            2.0 * PI * (distance_to_integer(x.re).powi(2) + x.im.powi(2)).sqrt()
        })
        .fold(0.0, f64::max);
    let mut involution_defect: f64 = 0.0;
    let mut sampled = 0;
    for k in 0..40 {
        if sampled == 20 {
            break;
        }
        let x = -2.0 + 4.0 * ((k * 7) % 20) as f64 / 19.0;
        let y = 0.1 + 0.5 * (k % 20) as f64 / 19.0;
        let z = C64::new(x, y * if k % 2 == 0 { 1.0 } else { -1.0 });
        if sp.all().any(|s| (*s - z).norm() < 0.05 * sp.gap.min(1.0)) {
            continue;
        }
        let p = CurvePoint::new(z, 1);
        let nu_p = data.nu(&p);
        let rho = CurvePoint::new(z.conj(), sheet_of(data, z.conj(), nu_p.conj()));
        let l = ln_mu_with(data, sp, &p)?;
        let lr = ln_mu_with(data, sp, &rho)?;
        let x = (lr + l.conj()) / (2.0 * PI * I);
        involution_defect = involution_defect.max(2.0 * PI * (distance_to_integer(x.re).powi(2) + x.im.powi(2)).sqrt());
        sampled += 1;
    }
    let mut residues = [ZERO; 2];
    for (j, c) in [I, -I].into_iter().enumerate() {
        let r = 0.25 * sp.gap.min(1.0);
        let path = CurvePath::circle(c, r, 2.0, 1);
        residues[j] = integrate_path(data, sp, &path)?.0;
    }
    let residue_defect = residues.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let pass = period_defect < tol && involution_defect < tol && residue_defect < tol;
    Ok(ConditionB { pass, periods, period_defect, involution_defect, residues })
}

fn check_c(data: &SpectralData, sp: &SingularPoints, tol: f64) -> Result<ConditionC> {
    let lnmu0 = ln_mu_with(data, sp, &CurvePoint::real(data.kappa0))?;
    let lnmu1 = ln_mu_with(data, sp, &CurvePoint::real(data.kappa1))?;
    let (m0, m1) = (lnmu0.exp(), lnmu1.exp());
    let residual0 = (m0 * m0 - 1.0).norm();
    let residual1 = (m1 * m1 - 1.0).norm();
    let sign = if residual0 < tol && residual1 < tol && (m0 - m1).norm() < tol {
        Some(if m0.re > 0.0 { 1 } else { -1 })
    } else {
        None
    };
    Ok(ConditionC { pass: sign.is_some(), lnmu0, lnmu1, residual0, residual1, sign })
}

/// Conditions A (positivity of `a` on the real line), B (periods in `2 pi i Z`, the involution rule, no residues at `+-i`)
/// and C (`mu(kappa0) = mu(kappa1) = +-1`).
pub fn check_conditions(data: &SpectralData, tol: f64) -> Result<ConditionReport> {
    let sp = data.singular_points()?;
    Ok(ConditionReport { a: check_a(data)?, b: check_b(data, &sp, tol)?, c: check_c(data, &sp, tol)? })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BranchKind {
    /// Real root of `b`.
    BRoot,
    /// Real solution of `mu = +-1`.
    UnitMu,
    /// Both at once.
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BranchPoint {
    pub kappa: f64,
    pub delta: f64,
    /// Order of vanishing of `Delta'`.
    pub order: usize,
    pub kind: BranchKind,
    pub real: bool,
}

impl BranchPoint {
    pub fn at_unit(&self, tol: f64) -> bool {
        (self.delta.abs() - 2.0).abs() < tol
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BranchPointReport {
    pub window: (f64, f64),
    pub points: Vec<BranchPoint>,
    /// Largest `|Delta|` over the scan samples.
    pub max_abs_delta: f64,
    /// Largest `|Re ln mu|` over the scan samples.
    pub max_real_part: f64,
}

impl BranchPointReport {
    /// Points with `Delta = +-2`.
    pub fn double_point_candidates(&self, tol: f64) -> Vec<BranchPoint> {
        self.points.iter().filter(|p| p.at_unit(tol)).copied().collect()
    }
}

/// Real zeros of `Delta' = 2 sinh(ln mu) (ln mu)'`: real roots of `b` and real solutions of `mu = +-1`, scanned uniformly in `atan(kappa)`.
pub fn real_branch_points(data: &SpectralData, window: (f64, f64), tol: f64) -> Result<BranchPointReport> {
    let (lo, hi) = window;
    if !(lo < hi) {
        return Err(Error::domain(MODULE, "empty window"));
    }
    scan_branch_points(data, (lo.atan(), hi.atan()), tol, window)
}

fn scan_branch_points(data: &SpectralData, psi_window: (f64, f64), tol: f64, window: (f64, f64)) -> Result<BranchPointReport> {
    let sp = data.singular_points()?;
    let (p0, p1) = psi_window;
    let psi: Vec<f64> = (0..=SCAN_SAMPLES).map(|k| p0 + (p1 - p0) * k as f64 / SCAN_SAMPLES as f64).collect();
    let lm = ln_mu_real_scan_with(data, &sp, &psi)?;
    let theta: Vec<f64> = lm.iter().map(|z| z.im).collect();
    let max_real_part = lm.iter().map(|z| z.re.abs()).fold(0.0, f64::max);
    let max_abs_delta = lm.iter().map(|z| (2.0 * z.cosh()).norm()).fold(0.0, f64::max);
    let f = real_integrand(data);
    let theta_at = |i: usize, x: f64| -> Result<f64> { Ok(theta[i] + quad::adaptive(&f, psi[i], x, QUAD_TOL)?.value.im) };

    let mut unit: Vec<f64> = Vec::new();
    for i in 0..SCAN_SAMPLES {
        let (t0, t1) = (theta[i] / PI, theta[i + 1] / PI);
        if (t0 - t0.round()).abs() < 1e-13 {
            unit.push(psi[i]);
        }
        let (kmin, kmax) = (t0.min(t1).floor() as i64 + 1, t0.max(t1).ceil() as i64 - 1);
        for k in kmin..=kmax {
            let target = k as f64;
            if (t0 - target).abs() < 1e-13 || (t1 - target).abs() < 1e-13 {
                continue;
            }
            let (mut a, mut b) = (psi[i], psi[i + 1]);
            let sa = t0 - target;
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                if m <= a || m >= b {
                    break;
                }
                let sm = theta_at(i, m)? / PI - target;
                if sm == 0.0 {
                    a = m;
                    b = m;
                    break;
                }
                if (sm > 0.0) == (sa > 0.0) {
                    a = m;
                } else {
                    b = m;
                }
            }
            unit.push(0.5 * (a + b));
        }
    }
    if (theta[SCAN_SAMPLES] / PI - (theta[SCAN_SAMPLES] / PI).round()).abs() < 1e-13 {
        unit.push(psi[SCAN_SAMPLES]);
    }
    let unit: Vec<f64> = unit.into_iter().map(f64::tan).collect();

    let b_roots: Vec<(f64, usize)> = find_roots(&data.b.to_complex(), ROOT_TOL)?
        .into_iter()
        .filter(|r| r.value.im.abs() < 1e-9 * r.value.norm().max(1.0))
        .map(|r| (r.value.re, r.multiplicity))
        .filter(|(x, _)| *x >= window.0 && *x <= window.1)
        .collect();

    let mut points: Vec<BranchPoint> = Vec::new();
    for (x, m) in &b_roots {
        let l = ln_mu_with(data, &sp, &CurvePoint::real(*x))?;
        let touches = l.sin().norm() < 1e-7 || (l.im / PI - (l.im / PI).round()).abs() < 1e-9;
        let (kind, order) = if touches { (BranchKind::Both, 2 * m + 1) } else { (BranchKind::BRoot, *m) };
        points.push(BranchPoint { kappa: *x, delta: (2.0 * l.cosh()).re, order, kind, real: true });
    }
    for x in unit {
        if points.iter().any(|p| (p.kappa - x).abs() < tol.max(1e-9) * x.abs().max(1.0)) {
            continue;
        }
        let l = ln_mu_with(data, &sp, &CurvePoint::real(x))?;
        points.push(BranchPoint { kappa: x, delta: (2.0 * l.cosh()).re, order: 1, kind: BranchKind::UnitMu, real: true });
    }
    points.sort_by(|a, b| a.kappa.partial_cmp(&b.kappa).unwrap_or(std::cmp::Ordering::Equal));
    Ok(BranchPointReport { window, points, max_abs_delta, max_real_part })
}

/// Branch points over the whole real line except a neighbourhood of infinity of size `1/PSI_EDGE`.
pub fn all_real_branch_points(data: &SpectralData, tol: f64) -> Result<BranchPointReport> {
    let e = 0.5 * PI - PSI_EDGE;
    scan_branch_points(data, (-e, e), tol, (-e.tan(), e.tan()))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GInvariant {
    /// `1/2 #{non-real roots of d ln mu} + #{real branch points of Delta} - 1`.
    pub g: i64,
    /// Curve points over non-real roots of `b` (a root at a branch point counts once).
    pub nonreal_roots: usize,
    pub real_branch_points: usize,
    /// Real branch points with `Delta = +-2` (the real double points).
    pub real_double_points: usize,
}

/// Curve points over non-real roots of `b`: two per root, one when the root is a branch point of the curve.
pub fn nonreal_root_points(data: &SpectralData, sp: &SingularPoints) -> Result<usize> {
    let mut n = 0;
    for r in find_roots(&data.b.to_complex(), ROOT_TOL)? {
        if r.value.im.abs() < 1e-9 * r.value.norm().max(1.0) {
            continue;
        }
        let on_branch = sp.branch.iter().any(|e| (*e - r.value).norm() < 1e-8);
        n += r.multiplicity * if on_branch { 1 } else { 2 };
    }
    Ok(n)
}

pub fn g_invariant(data: &SpectralData) -> Result<GInvariant> {
    let sp = data.singular_points()?;
    let b = check_b(data, &sp, CHECK_TOL)?;
    if !b.pass {
        return Err(Error::precondition(MODULE, "condition B fails; the G invariant is undefined"));
    }
    let nonreal_roots = nonreal_root_points(data, &sp)?;
    let report = all_real_branch_points(data, 1e-9)?;
    let real_branch_points = report.points.len();
    let real_double_points = report.double_point_candidates(1e-7).len();
    Ok(GInvariant {
        g: nonreal_roots as i64 / 2 + real_branch_points as i64 - 1,
        nonreal_roots,
        real_branch_points,
        real_double_points,
    })
}

/// Sum of weights: the order at `Delta != +-2`; half the order at `Delta = +-2` for even order; half of order minus one for odd order.
pub fn weighted_genus(report: &BranchPointReport) -> i64 {
    report
        .points
        .iter()
        .map(|p| {
            let o = p.order as i64;
            if !p.at_unit(1e-7) {
                o
            } else if o % 2 == 0 {
                o / 2
            } else {
                (o - 1) / 2
            }
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{clifford_data, revolution_family, RevolutionParams};
    use proptest::prelude::*;

    fn revolution(h: f64, alpha: f64) -> SpectralData {
        revolution_family(&RevolutionParams::new(h, alpha).unwrap()).unwrap()
    }

    #[test]
    fn shape_validation_and_json() {
        assert!(SpectralData::new(RealPolynomial::new(vec![0.0, 1.0]), RealPolynomial::new(vec![1.0]), 1.0, -1.0).is_err());
        assert!(SpectralData::new(RealPolynomial::new(vec![1.0, 0.0, 2.0]), RealPolynomial::new(vec![1.0]), 1.0, -1.0).is_err());
        assert!(SpectralData::new(RealPolynomial::new(vec![1.0]), RealPolynomial::new(vec![1.0, 1.0, 1.0]), 1.0, -1.0).is_err());
        assert!(SpectralData::new(RealPolynomial::new(vec![1.0]), RealPolynomial::new(vec![1.0]), 1.0, 1.0).is_err());
        let d = revolution(0.0, 0.25);
        let text = d.to_json();
        assert!(text.starts_with("{\"a\":[0.25,0.0,1.0],\"b\":"));
        assert_eq!(SpectralData::from_json(&text).unwrap(), d);
        assert!(matches!(SpectralData::from_json("{\"a\": [1], \"b\": }"), Err(Error::Schema(_))));
        assert!(matches!(SpectralData::from_json("{\"a\": [1, 2], \"b\": [1], \"kappa0\": 1, \"kappa1\": -1}"), Err(Error::Schema(_))));
    }

    #[test]
    fn nu_positive_branch_on_real_axis() {
        let d = revolution(0.0, 0.25);
        for x in [-3.0, -0.2, 0.0, 1.7] {
            let nu = d.nu(&CurvePoint::real(x));
            let want = ((x * x + 1.0) * (x * x + 0.25)).sqrt();
            assert!(nu.im == 0.0 && (nu.re - want).abs() < 1e-14);
        }
    }

    #[test]
    fn sheet_monodromy_around_branch_points() {
        let d = revolution(0.0, 0.25);
        let e = C64::new(0.0, 0.5);
        let one = continue_nu(&d, &CurvePath::circle(e, 0.1, 1.0, 1), 400).unwrap();
        assert!((one.nu.last().unwrap() + one.nu[0]).norm() < 1e-9);
        let pair = CurvePath { start: CurvePoint::new(C64::new(0.3, 0.0), 1), segments: stadium(C64::new(0.0, -0.5), e, 0.2) };
        let pair = CurvePath { start: CurvePoint::new(pair.segments[0].point(0.0), 1), ..pair };
        let two = continue_nu(&d, &pair, 400).unwrap();
        assert!((two.nu.last().unwrap() - two.nu[0]).norm() < 1e-9);
        assert!(continue_nu(&d, &CurvePath::line(CurvePoint::real(0.0), C64::new(0.0, 0.6)), 10).is_err());
    }

    #[test]
    fn genus_zero_integral_matches_closed_form() {
        let d = SpectralData::new(RealPolynomial::new(vec![1.0]), RealPolynomial::new(vec![0.4, -0.3]), 1.0, -1.0).unwrap();
        let (b0, b1) = (0.4, -0.3);
        for x in [0.5, 2.0, -1.5] {
            let v = integrate_dlnmu(&d, &CurvePath::line(CurvePoint::real(0.0), C64::new(x, 0.0))).unwrap();
            let want = 2.0 * PI * I * ((b0 * x - b1) / (x * x + 1.0f64).sqrt() + b1);
            assert!((v - want).norm() < 1e-10, "{v} vs {want}");
        }
    }

    #[test]
    fn revolution_ln_mu_matches_closed_form() {
        let d = revolution(0.0, 0.25);
        let p = RevolutionParams::new(0.0, 0.25).unwrap();
        for x in [-4.0, -1.0, 0.0, 0.3, 2.5] {
            let l = ln_mu(&d, &CurvePoint::real(x)).unwrap();
            let want = crate::families::revolution_ln_mu(&p, x);
            assert!(l.re.abs() < 1e-10 && (l.im - want).abs() < 1e-10, "x={x}: {l} vs {want}");
        }
        let z = C64::new(0.7, 0.45);
        let closed = 2.0 * PI * I * p.b2() * (z * z + 0.25) / d.nu(&CurvePoint::new(z, 1));
        assert!((ln_mu(&d, &CurvePoint::new(z, 1)).unwrap() - closed).norm() < 1e-10);
        assert!((ln_mu(&d, &CurvePoint::new(z, -1)).unwrap() + closed).norm() < 1e-10);
    }

    #[test]
    fn sigma_reflected_path_negates() {
        let d = revolution(0.5, 0.75);
        let start = CurvePoint::new(C64::new(-1.0, 0.3), 1);
        let path = CurvePath {
            start,
            segments: vec![
                Segment::Line { from: start.kappa, to: C64::new(0.4, -0.2) },
                Segment::Arc { center: C64::new(0.4, 0.3), radius: 0.5, start: -0.5 * PI, sweep: 1.0 },
            ],
        };
        let v = integrate_dlnmu(&d, &path).unwrap();
        let w = integrate_dlnmu(&d, &CurvePath { start: start.sigma(), ..path }).unwrap();
        assert!((v + w).norm() < 1e-10);
    }

    #[test]
    fn revolution_conditions_pass() {
        let d = revolution(0.0, 0.25);
        let r = check_conditions(&d, CHECK_TOL).unwrap();
        assert!(r.pass(), "{r:?}");
        assert!((r.c.lnmu0 - PI * I).norm() < 1e-10 || (r.c.lnmu0 + PI * I).norm() < 1e-10);
        let j = r.to_json();
        assert_eq!(j["A"], json!(true));
        assert_eq!(j["B"]["periods"].as_array().unwrap().len(), 3);
        assert!(j["C"]["lnmu0"].is_array());
    }

    #[test]
    fn clifford_conditions_pass_with_minus_one() {
        let d = clifford_data();
        let r = check_conditions(&d, CHECK_TOL).unwrap();
        assert!(r.pass() && r.c.sign == Some(-1), "{r:?}");
        assert!((delta(&d, C64::new(1.0, 0.0)).unwrap() + 2.0).norm() < 1e-12);
        assert!((delta(&d, ZERO).unwrap() - 2.0).norm() < 1e-12);
    }

    #[test]
    fn perturbed_b_fails_condition_c() {
        let d = revolution(0.0, 0.25);
        let bad = SpectralData::new(d.a.clone(), d.b.scale(1.01), d.kappa0, d.kappa1).unwrap();
        let r = check_conditions(&bad, CHECK_TOL).unwrap();
        assert!(r.a.pass && r.b.pass && !r.c.pass);
        let want = (C64::from_polar(1.0, 0.02 * PI) - 1.0).norm();
        assert!((r.c.residual0 - want).abs() < 1e-9, "{} vs {want}", r.c.residual0);
    }

    #[test]
    fn condition_a_detects_negative_values() {
        let d = SpectralData::new(RealPolynomial::new(vec![-1.0, 0.0, 1.0]), RealPolynomial::new(vec![0.0, 1.0]), 2.0, -2.0).unwrap();
        assert!(!check_a(&d).unwrap().pass);
        let d = SpectralData::new(RealPolynomial::new(vec![0.25, -1.0, 1.0]), RealPolynomial::new(vec![0.0, 1.0]), 2.0, -2.0).unwrap();
        let a = check_a(&d).unwrap();
        assert!(a.pass && a.odd_real_roots.is_empty());
    }

    #[test]
    fn delta_real_scan_bounded() {
        for d in [clifford_data(), revolution(0.0, 0.25), revolution(2.0, 0.75)] {
            let psi: Vec<f64> = (0..400).map(|k| -1.5 + 3.0 * k as f64 / 399.0).collect();
            for l in ln_mu_real_scan(&d, &psi).unwrap() {
                assert!(l.re.abs() < 1e-9);
                assert!((2.0 * l.cosh()).re.abs() <= 2.0 + 1e-9);
            }
        }
    }

    #[test]
    fn clifford_branch_points() {
        let r = real_branch_points(&clifford_data(), (-3.0, 3.0), 1e-10).unwrap();
        let ks: Vec<f64> = r.points.iter().map(|p| p.kappa).collect();
        assert_eq!(ks.len(), 3, "{r:?}");
        for (p, (k, dl)) in r.points.iter().zip([(-1.0, -2.0), (0.0, 2.0), (1.0, -2.0)]) {
            assert!((p.kappa - k).abs() < 1e-8 && (p.delta - dl).abs() < 1e-8 && p.order == 1);
        }
        assert_eq!(weighted_genus(&r), 0);
        let empty = real_branch_points(&clifford_data(), (0.2, 0.8), 1e-10).unwrap();
        assert!(empty.points.is_empty());
    }

    #[test]
    fn revolution_has_no_real_double_points_besides_marked() {
        for alpha in [0.25, 0.75] {
            let d = revolution(0.0, alpha);
            let r = real_branch_points(&d, (-10.0, 10.0), 1e-10).unwrap();
            let dp = r.double_point_candidates(1e-8);
            assert_eq!(dp.len(), 2, "{r:?}");
            assert!((dp[0].kappa + 1.0).abs() < 1e-8 && (dp[1].kappa - 1.0).abs() < 1e-8);
            let others: Vec<_> = r.points.iter().filter(|p| !p.at_unit(1e-8)).collect();
            assert_eq!(others.len(), 1);
            assert!(others[0].kappa.abs() < 1e-12 && others[0].kind == BranchKind::BRoot);
        }
    }

    #[test]
    fn constructed_b_root_reported() {
        let d = SpectralData::new(RealPolynomial::new(vec![0.5, 0.0, 1.0]), RealPolynomial::new(vec![-0.3, 0.0, 0.2]), 0.1, -0.1).unwrap();
        let r = real_branch_points(&d, (-3.0, 3.0), 1e-10).unwrap();
        let want = (1.5f64).sqrt();
        assert!(r.points.iter().any(|p| (p.kappa - want).abs() < 1e-9 && p.kind != BranchKind::UnitMu));
    }

    #[test]
    fn g_invariant_counts() {
        let c = g_invariant(&clifford_data()).unwrap();
        assert_eq!((c.g, c.real_branch_points, c.nonreal_roots), (2, 3, 0));
        let r = g_invariant(&revolution(0.0, 0.25)).unwrap();
        assert_eq!((r.real_double_points, r.nonreal_roots), (2, 0));
        assert_eq!(r.g, 2);
    }

    #[test]
    fn conjugate_b_roots_count_four_curve_points() {
        let d = SpectralData::new(RealPolynomial::new(vec![0.25, 0.0, 1.0]), RealPolynomial::new(vec![0.5, 0.0, 1.0]), 1.0, -1.0).unwrap();
        let sp = d.singular_points().unwrap();
        assert_eq!(nonreal_root_points(&d, &sp).unwrap(), 4);
        let on_branch = SpectralData::new(RealPolynomial::new(vec![0.25, 0.0, 1.0]), RealPolynomial::new(vec![0.25, 0.0, 1.0]), 1.0, -1.0).unwrap();
        assert_eq!(nonreal_root_points(&on_branch, &on_branch.singular_points().unwrap()).unwrap(), 2);
    }

    #[test]
    fn revolution_cut_cycle_vanishes() {
        let d = revolution(0.5, 0.25);
        let sp = d.singular_points().unwrap();
        let segments = stadium(C64::new(0.0, 0.5), I, 0.2);
        let path = CurvePath { start: CurvePoint::new(segments[0].point(0.0), 1), segments };
        assert!(integrate_path(&d, &sp, &path).unwrap().0.norm() < 1e-10);
        assert!(periods(&d).unwrap().iter().all(|z| z.norm() < 1e-9));
    }

    #[test]
    fn weighted_genus_table() {
        let mk = |delta: f64, order: usize| BranchPoint { kappa: 0.0, delta, order, kind: BranchKind::UnitMu, real: true };
        let rep = |pts: Vec<BranchPoint>| BranchPointReport { window: (0.0, 1.0), points: pts, max_abs_delta: 0.0, max_real_part: 0.0 };
        assert_eq!(weighted_genus(&rep(vec![])), 0);
        assert_eq!(weighted_genus(&rep(vec![mk(0.0, 1)])), 1);
        assert_eq!(weighted_genus(&rep(vec![mk(2.0, 3)])), 1);
        assert_eq!(weighted_genus(&rep(vec![mk(-2.0, 2)])), 1);
    }

    #[test]
    fn residues_vanish() {
        let r = check_conditions(&revolution(0.5, 0.25), CHECK_TOL).unwrap();
        assert!(r.b.residues.iter().all(|z| z.norm() < 1e-9), "{:?}", r.b.residues);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(5))]
        #[test]
        fn condition_b_invariant_under_mobius(phi in -0.6f64..0.6) {
            let d = revolution(0.0, 0.25).mobius(phi).unwrap();
            let r = check_conditions(&d, CHECK_TOL).unwrap();
            prop_assert!(r.b.pass, "{:?}", r.b);
            prop_assert!(r.c.pass, "{:?}", r.c);
            let dm = d.mean_curvature();
            prop_assert!(dm.abs() < 1e-9);
        }
    }
}
