//! Fourier loops, the loop exponential, the Iwasawa factorization `exp(z xi) = F B`,
//! frames, polynomial Killing fields along the surface and monodromy.

use crate::error::{Error, Result};
use crate::loop_algebra::LaurentMatrix;
use crate::mat2::{Mat2, C64, ONE, ZERO};
use nalgebra::DMatrix;
use rustfft::{Fft, FftPlanner};
use std::cell::RefCell;
use std::collections::HashMap;
use std::io::Write;
use std::sync::Arc;

const MODULE: &str = "iwasawa";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LoopClass {
    Unitary,
    Plus,
    General,
}

/// `sum_{k=-n}^{n} coeffs[k + n] lambda^k`.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierLoop {
    pub n: usize,
    pub coeffs: Vec<Mat2>,
    pub class: LoopClass,
}

#[derive(Clone, Copy, Debug)]
pub struct IwasawaConfig {
    pub n_init: usize,
    pub n_max: usize,
    /// Relative size of the discarded Fourier tail.
    pub tail_tol: f64,
    /// Target unitarity defect of the factorization.
    pub factor_tol: f64,
    pub max_passes: usize,
    /// Largest allowed `max |Re eig(z xi(lambda))|` on the circle for a single factorization;
    /// longer paths are split and the frames composed.
    pub max_growth: f64,
}

impl Default for IwasawaConfig {
    fn default() -> Self {
        IwasawaConfig {
            n_init: 32,
            n_max: 1024,
            tail_tol: 1e-15,
            factor_tol: 1e-12,
            max_passes: 4,
            max_growth: 3.0,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct FactorDiagnostics {
    /// `max |F F* - I|` over the samples.
    pub unitarity_defect: f64,
    /// `max |F B - Phi| / max(1, |Phi|)` over the samples.
    pub reconstruction_defect: f64,
    /// Largest negative-index coefficient of `B`, relative.
    pub plus_defect: f64,
    /// `|B(0)_{10}|` together with the smallest diagonal entry check.
    pub b0_lower: f64,
    pub b0_min_diagonal: f64,
    pub b0_max_diag_imag: f64,
    pub passes: usize,
    pub n: usize,
}

impl FactorDiagnostics {
    pub fn worst(&self, o: &FactorDiagnostics) -> FactorDiagnostics {
        FactorDiagnostics {
            unitarity_defect: self.unitarity_defect.max(o.unitarity_defect),
            reconstruction_defect: self.reconstruction_defect.max(o.reconstruction_defect),
            plus_defect: self.plus_defect.max(o.plus_defect),
            b0_lower: self.b0_lower.max(o.b0_lower),
            b0_min_diagonal: self.b0_min_diagonal.min(o.b0_min_diagonal),
            b0_max_diag_imag: self.b0_max_diag_imag.max(o.b0_max_diag_imag),
            passes: self.passes.max(o.passes),
            n: self.n.max(o.n),
        }
    }

    pub fn empty() -> FactorDiagnostics {
        FactorDiagnostics { b0_min_diagonal: f64::INFINITY, ..Default::default() }
    }

    pub fn meets(&self, tol: f64) -> bool {
        self.unitarity_defect < tol
            && self.reconstruction_defect < tol
            && self.b0_lower < tol
            && self.b0_min_diagonal > 0.0
            && self.b0_max_diag_imag < tol
    }
}

#[derive(Clone, Debug)]
pub struct Factorization {
    pub f: FourierLoop,
    pub b: FourierLoop,
    pub diagnostics: FactorDiagnostics,
}

#[derive(Clone, Debug)]
pub struct FramePoint {
    pub z: C64,
    pub f: FourierLoop,
    pub b: FourierLoop,
    /// Worst diagnostics over the factorizations composed into this frame.
    pub diagnostics: FactorDiagnostics,
    /// Number of composed factorizations along the path from 0.
    pub segments: usize,
}

thread_local! {
    static PLANNER: RefCell<(FftPlanner<f64>, HashMap<(usize, bool), Arc<dyn Fft<f64>>>)> =
        RefCell::new((FftPlanner::new(), HashMap::new()));
}

fn fft_plan(m: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if let Some(f) = p.1.get(&(m, inverse)) {
            return f.clone();
        }
        let f = if inverse { p.0.plan_fft_inverse(m) } else { p.0.plan_fft_forward(m) };
        p.1.insert((m, inverse), f.clone());
        f
    })
}

fn circle_point(j: usize, m: usize) -> C64 {
    C64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / m as f64)
}

/// Coefficients in FFT order (`index k mod m`) of a loop sampled at the `m` roots of unity.
fn analyse(samples: &[Mat2]) -> Vec<Mat2> {
    let m = samples.len();
    let plan = fft_plan(m, false);
    let mut out = vec![Mat2::zero(); m];
    let mut buf = vec![ZERO; m];
    for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
        for (b, s) in buf.iter_mut().zip(samples) {
            *b = s[(i, j)];
        }
        plan.process(&mut buf);
        let scale = 1.0 / m as f64;
        for (o, b) in out.iter_mut().zip(&buf) {
            o[(i, j)] = *b * scale;
        }
    }
    out
}

/// Inverse of [`analyse`].
fn synthesise(coeffs: &[Mat2]) -> Vec<Mat2> {
    let m = coeffs.len();
    let plan = fft_plan(m, true);
    let mut out = vec![Mat2::zero(); m];
    let mut buf = vec![ZERO; m];
    for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
        for (b, s) in buf.iter_mut().zip(coeffs) {
            *b = s[(i, j)];
        }
        plan.process(&mut buf);
        for (o, b) in out.iter_mut().zip(&buf) {
            o[(i, j)] = *b;
        }
    }
    out
}

impl FourierLoop {
    pub fn identity() -> Self {
        FourierLoop { n: 0, coeffs: vec![Mat2::identity()], class: LoopClass::Unitary }
    }

    pub fn constant(m: Mat2, class: LoopClass) -> Self {
        FourierLoop { n: 0, coeffs: vec![m], class }
    }

    pub fn coeff(&self, k: i64) -> Mat2 {
        if k.unsigned_abs() as usize > self.n {
            Mat2::zero()
        } else {
            self.coeffs[(k + self.n as i64) as usize]
        }
    }

    pub fn eval(&self, lambda: C64) -> Mat2 {
        let n = self.n;
        let mut pos = Mat2::zero();
        for k in (0..=n).rev() {
            pos = pos * lambda + self.coeffs[n + k];
        }
        if n == 0 {
            return pos;
        }
        let inv = lambda.inv();
        let mut neg = Mat2::zero();
        for k in (1..=n).rev() {
            neg = neg * inv + self.coeffs[n - k];
        }
        pos + neg * inv
    }

    /// Build from FFT-ordered coefficients, trimming negligible high orders.
    fn from_fft(c: &[Mat2], class: LoopClass) -> Self {
        let m = c.len();
        let half = (m / 2).saturating_sub(1);
        let at = |k: i64| c[k.rem_euclid(m as i64) as usize];
        let scale = c.iter().map(|x| x.max_abs()).fold(0.0, f64::max).max(1e-300);
        let mut n = 0;
        for k in (1..=half).rev() {
            if at(k as i64).max_abs().max(at(-(k as i64)).max_abs()) > 1e-17 * scale {
                n = k;
                break;
            }
        }
        let coeffs = (-(n as i64)..=n as i64).map(at).collect();
        FourierLoop { n, coeffs, class }
    }

    pub fn from_samples(samples: &[Mat2], class: LoopClass) -> Self {
        FourierLoop::from_fft(&analyse(samples), class)
    }

    /// Values at the `m` roots of unity, `m > 2n`.
    pub fn samples(&self, m: usize) -> Vec<Mat2> {
        assert!(m > 2 * self.n, "sampling below the Nyquist rate");
        let mut c = vec![Mat2::zero(); m];
        for k in -(self.n as i64)..=self.n as i64 {
            c[k.rem_euclid(m as i64) as usize] = self.coeff(k);
        }
        synthesise(&c)
    }

    /// Norm of the outermost coefficients relative to the largest.
    pub fn tail(&self) -> f64 {
        let scale = self.coeffs.iter().map(|x| x.max_abs()).fold(0.0, f64::max).max(1e-300);
        self.coeff(self.n as i64).max_abs().max(self.coeff(-(self.n as i64)).max_abs()) / scale
    }

    pub fn mul_pointwise(&self, o: &FourierLoop, class: LoopClass) -> FourierLoop {
        let m = sample_count(self.n + o.n);
        let a = self.samples(m);
        let b = o.samples(m);
        let p: Vec<Mat2> = a.iter().zip(&b).map(|(x, y)| *x * *y).collect();
        FourierLoop::from_samples(&p, class)
    }

    /// CSV dump with columns `k, entry, re, im`.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        writeln!(w, "k,entry,re,im")?;
        for k in -(self.n as i64)..=self.n as i64 {
            let c = self.coeff(k);
            for (name, (i, j)) in [("00", (0, 0)), ("01", (0, 1)), ("10", (1, 0)), ("11", (1, 1))] {
                writeln!(w, "{k},{name},{:e},{:e}", c[(i, j)].re, c[(i, j)].im)?;
            }
        }
        Ok(())
    }
}

fn sample_count(bandwidth: usize) -> usize {
    ((4 * bandwidth).max(16)).next_power_of_two()
}

fn sample_laurent(xi: &LaurentMatrix, m: usize) -> Vec<Mat2> {
    (0..m).map(|j| xi.eval_unchecked(circle_point(j, m))).collect()
}

/// Largest real part of the eigenvalues of `z xi(lambda)` over circle samples.
fn growth(xi: &LaurentMatrix, z: C64, m: usize) -> f64 {
    sample_laurent(xi, m)
        .iter()
        .map(|x| {
            let s = (-(x.det()) * z * z).sqrt();
            s.re.abs()
        })
        .fold(0.0, f64::max)
}

/// Fourier coefficients of `lambda -> exp(z xi(lambda))`.
pub fn exp_loop(xi: &LaurentMatrix, z: C64, cfg: &IwasawaConfig) -> Result<FourierLoop> {
    let mut n = cfg.n_init.max(4).next_power_of_two();
    loop {
        let m = 4 * n;
        let samples: Vec<Mat2> = sample_laurent(xi, m).iter().map(|x| (*x * z).exp()).collect();
        let det_err = samples.iter().map(|s| (s.det() - ONE).norm()).fold(0.0, f64::max);
        let c = analyse(&samples);
        let scale = c.iter().map(|x| x.max_abs()).fold(0.0, f64::max);
        let tail = (n..2 * n)
            .map(|k| c[k].max_abs().max(c[m - k].max_abs()))
            .fold(0.0, f64::max)
            / scale;
        if tail < cfg.tail_tol {
            if det_err > 1e-12 * scale.max(1.0).powi(2) {
                return Err(Error::convergence(MODULE, "exp loop determinant drift", det_err));
            }
            let mut lp = FourierLoop::from_fft(&c, LoopClass::General);
            if lp.n > n {
                lp = truncate(&lp, n);
            }
            return Ok(lp);
        }
        if 2 * n > cfg.n_max {
            return Err(Error::convergence(MODULE, format!("Fourier tail above tolerance at N = {n}"), tail));
        }
        n *= 2;
    }
}

fn truncate(lp: &FourierLoop, n: usize) -> FourierLoop {
    let coeffs = (-(n as i64)..=n as i64).map(|k| lp.coeff(k)).collect();
    FourierLoop { n, coeffs, class: lp.class }
}

/// One block-Toeplitz solve: returns samples of `P = B^{-1}` and `B(0)`.
fn toeplitz_pass(phi: &[Mat2], l: usize) -> Result<(Vec<Mat2>, Mat2)> {
    let m = phi.len();
    let w: Vec<Mat2> = phi.iter().map(|p| p.adjoint() * *p).collect();
    let wc = analyse(&w);
    let wk = |k: i64| wc[k.rem_euclid(m as i64) as usize];
    let size = 2 * (l + 1);
    let mut t = DMatrix::<C64>::zeros(size, size);
    for r in 0..=l {
        for c in 0..=l {
            let blk = wk(r as i64 - c as i64);
            for i in 0..2 {
                for j in 0..2 {
                    t[(2 * r + i, 2 * c + j)] = blk[(i, j)];
                }
            }
        }
    }
    // enforce exact hermitian symmetry
    let t = (&t + t.adjoint()) * C64::new(0.5, 0.0);
    let chol = t
        .cholesky()
        .ok_or_else(|| Error::conditioning(MODULE, "Toeplitz matrix of Phi* Phi is not positive definite"))?;
    let mut rhs = DMatrix::<C64>::zeros(size, 2);
    rhs[(0, 0)] = ONE;
    rhs[(1, 1)] = ONE;
    let y = chol.solve(&rhs);
    let yk = |k: usize| Mat2::new(y[(2 * k, 0)], y[(2 * k, 1)], y[(2 * k + 1, 0)], y[(2 * k + 1, 1)]);
    let y0 = yk(0);
    let y0inv = ((y0 + y0.adjoint()) * 0.5)
        .inverse()
        .ok_or_else(|| Error::conditioning(MODULE, "singular leading block"))?;
    let b0 = upper_cholesky(&y0inv)?;
    let mut c = vec![Mat2::zero(); m];
    for k in 0..=l.min(m - 1) {
        c[k] = yk(k) * b0.adjoint();
    }
    let p = synthesise(&c);
    Ok((p, b0))
}

fn unitarity(samples: &[Mat2]) -> f64 {
    samples.iter().map(|f| (*f * f.adjoint() - Mat2::identity()).max_abs()).fold(0.0, f64::max)
}

/// Upper triangular `R` with positive diagonal and `R* R = h`.
fn upper_cholesky(h: &Mat2) -> Result<Mat2> {
    let h00 = h[(0, 0)].re;
    if h00 <= 0.0 {
        return Err(Error::conditioning(MODULE, "leading block not positive"));
    }
    let r00 = h00.sqrt();
    let r01 = h[(0, 1)] / r00;
    let r11sq = h[(1, 1)].re - r01.norm_sqr();
    if r11sq <= 0.0 {
        return Err(Error::conditioning(MODULE, "leading block not positive"));
    }
    Ok(Mat2::new(C64::new(r00, 0.0), r01, ZERO, C64::new(r11sq.sqrt(), 0.0)))
}

/// Factor `Phi = F B` with `F` unitary on the circle and `B` a plus loop normalized at 0.
pub fn iwasawa_factor(phi: &FourierLoop, cfg: &IwasawaConfig) -> Result<Factorization> {
    let nb = phi.n.max(4);
    let m = (8 * nb).next_power_of_two();
    let l = 2 * nb;
    let phi_s = phi.samples(m);
    let mut f_s = phi_s.clone();
    let mut b_s = vec![Mat2::identity(); m];
    let mut b0 = Mat2::identity();
    let mut passes = 0;
    let mut unit = unitarity(&f_s);
    while passes < cfg.max_passes && (passes == 0 || unit > cfg.factor_tol) {
        let (p, b0_pass) = toeplitz_pass(&f_s, l)?;
        for j in 0..m {
            f_s[j] = f_s[j] * p[j];
            let binv = p[j]
                .inverse()
                .ok_or_else(|| Error::conditioning(MODULE, "singular plus factor sample"))?;
            b_s[j] = binv * b_s[j];
        }
        b0 = b0_pass * b0;
        passes += 1;
        let next = unitarity(&f_s);
        if passes > 1 && next > 0.5 * unit && next > cfg.factor_tol {
            unit = next;
            break;
        }
        unit = next;
    }
    let f = FourierLoop::from_samples(&f_s, LoopClass::Unitary);
    let b = FourierLoop::from_samples(&b_s, LoopClass::Plus);
    let recon = (0..m)
        .map(|j| (f_s[j] * b_s[j] - phi_s[j]).max_abs() / phi_s[j].max_abs().max(1.0))
        .fold(0.0, f64::max);
    let bscale = b.coeffs.iter().map(|c| c.max_abs()).fold(0.0, f64::max);
    let plus_defect = (1..=b.n as i64).map(|k| b.coeff(-k).max_abs()).fold(0.0, f64::max) / bscale;
    let b0c = b.coeff(0);
    let diagnostics = FactorDiagnostics {
        unitarity_defect: unit,
        reconstruction_defect: recon,
        plus_defect,
        b0_lower: b0c[(1, 0)].norm().max((b0c - b0).max_abs()),
        b0_min_diagonal: b0c[(0, 0)].re.min(b0c[(1, 1)].re),
        b0_max_diag_imag: b0c[(0, 0)].im.abs().max(b0c[(1, 1)].im.abs()),
        passes,
        n: phi.n,
    };
    if unit > cfg.factor_tol.max(1e-9) {
        return Err(Error::convergence(MODULE, "unitary factor not converged", unit));
    }
    Ok(Factorization { f, b, diagnostics })
}

/// Frame at `z`: the unitary Iwasawa factor of `exp(z xi)`.
pub fn frame(xi: &LaurentMatrix, z: C64, cfg: &IwasawaConfig) -> Result<FramePoint> {
    let g = growth(xi, z, 64);
    let steps = ((g / cfg.max_growth).ceil() as usize).max(1);
    if steps == 1 {
        let phi = exp_loop(xi, z, cfg)?;
        let fac = iwasawa_factor(&phi, cfg)?;
        return Ok(FramePoint { z, f: fac.f, b: fac.b, diagnostics: fac.diagnostics, segments: 1 });
    }
    // compose along the segment: exp((w1 + w2) xi) = F1 exp(w2 zeta1) B1
    let w = z / steps as f64;
    let mut zeta = xi.clone();
    let mut f = FourierLoop::identity();
    let mut b = FourierLoop::identity();
    let mut diag = FactorDiagnostics::empty();
    for s in 0..steps {
        let phi = exp_loop(&zeta, w, cfg)?;
        let fac = iwasawa_factor(&phi, cfg)?;
        diag = diag.worst(&fac.diagnostics);
        if s + 1 < steps {
            zeta = conjugate_project(&zeta, &fac.f)?.0;
        }
        f = f.mul_pointwise(&fac.f, LoopClass::Unitary);
        b = fac.b.mul_pointwise(&b, LoopClass::Plus);
    }
    Ok(FramePoint { z, f, b, diagnostics: diag, segments: steps })
}

/// `F^{-1} xi F` re-projected onto Laurent degrees `-1..=g`; returns the projection residual.
fn conjugate_project(xi: &LaurentMatrix, f: &FourierLoop) -> Result<(LaurentMatrix, f64)> {
    let m = sample_count(f.n + xi.g + 2);
    let fs = f.samples(m);
    let xs = sample_laurent(xi, m);
    let conj: Vec<Mat2> = fs.iter().zip(&xs).map(|(f, x)| f.adjoint() * *x * *f).collect();
    let c = analyse(&conj);
    let scale = c.iter().map(|x| x.max_abs()).fold(0.0, f64::max).max(1e-300);
    let g = xi.g as i64;
    let mut resid: f64 = 0.0;
    for k in 0..m as i64 {
        let kk = if k > m as i64 / 2 { k - m as i64 } else { k };
        if kk < -1 || kk > g {
            resid = resid.max(c[k as usize].max_abs());
        }
    }
    let coeffs = (-1..=g).map(|d| c[d.rem_euclid(m as i64) as usize]).collect();
    let mut zeta = LaurentMatrix { g: xi.g, coeffs };
    // the leading coefficient is strictly upper triangular by construction
    let lead = zeta.coeffs[0];
    resid = resid.max(lead[(1, 0)].norm().max(lead[(0, 0)].norm()));
    zeta.coeffs[0] = Mat2::eps_plus() * lead[(0, 1)];
    for c in zeta.coeffs.iter_mut() {
        *c = c.traceless_part();
    }
    Ok((zeta, resid / scale))
}

#[derive(Clone, Debug)]
pub struct KillingField {
    pub zeta: LaurentMatrix,
    pub projection_residual: f64,
    pub diagnostics: FactorDiagnostics,
}

/// Polynomial Killing field `zeta(z) = F^{-1} xi F`.
pub fn killing_field(xi: &LaurentMatrix, z: C64, cfg: &IwasawaConfig) -> Result<KillingField> {
    let fp = frame(xi, z, cfg)?;
    killing_field_from_frame(xi, &fp)
}

pub fn killing_field_from_frame(xi: &LaurentMatrix, fp: &FramePoint) -> Result<KillingField> {
    let (zeta, resid) = conjugate_project(xi, &fp.f)?;
    if resid > 1e-8 {
        return Err(Error::Truncation {
            module: MODULE,
            msg: format!("Killing field projection residual {resid:.3e}"),
        });
    }
    Ok(KillingField { zeta, projection_residual: resid, diagnostics: fp.diagnostics })
}

#[derive(Clone, Debug)]
pub struct Monodromy {
    pub tau: C64,
    pub m: FourierLoop,
    pub diagnostics: FactorDiagnostics,
}

impl Monodromy {
    pub fn at(&self, lambda: C64) -> Mat2 {
        self.m.eval(lambda)
    }

    /// Trace function `Delta(lambda) = tr M_lambda`.
    pub fn delta(&self, lambda: C64) -> C64 {
        self.m.eval(lambda).trace()
    }
}

/// Monodromy with base point 0: `M_lambda(tau) = F_lambda(tau)`.
pub fn monodromy(xi: &LaurentMatrix, tau: C64, cfg: &IwasawaConfig) -> Result<Monodromy> {
    let fp = frame(xi, tau, cfg)?;
    Ok(Monodromy { tau, m: fp.f, diagnostics: fp.diagnostics })
}

/// Largest condition number of `Phi* Phi` over circle samples.
pub fn toeplitz_condition_estimate(phi: &FourierLoop) -> f64 {
    let m = sample_count(phi.n);
    let s = phi.samples(m);
    s.iter()
        .map(|p| {
            let w = p.adjoint() * *p;
            let tr = w.trace().re;
            let det = w.det().re.max(1e-300);
            let disc = (tr * tr / 4.0 - det).max(0.0).sqrt();
            (tr / 2.0 + disc) / (tr / 2.0 - disc).max(1e-300)
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families;
    use crate::mat2::I;

    fn cfg() -> IwasawaConfig {
        IwasawaConfig::default()
    }

    /// Closed-form frame of the flat family evaluated directly.
    fn flat_closed(z: C64, lam: C64) -> Mat2 {
        let a = Mat2::new(ZERO, z / lam + z.conj(), z + z.conj() * lam, ZERO) * (I * 0.5);
        a.exp()
    }

    #[test]
    fn exp_loop_at_zero_is_identity() {
        let lp = exp_loop(&families::flat_xi(), ZERO, &cfg()).unwrap();
        assert!((lp.coeff(0) - Mat2::identity()).max_abs() < 1e-15);
        for k in 1..=lp.n as i64 {
            assert!(lp.coeff(k).max_abs() < 1e-15 && lp.coeff(-k).max_abs() < 1e-15);
        }
    }

    #[test]
    fn exp_loop_matches_pointwise_exponential() {
        let xi = families::flat_xi();
        let z = C64::new(0.8, -1.1);
        let lp = exp_loop(&xi, z, &cfg()).unwrap();
        for t in [0.1, 1.3, 2.9, 4.4] {
            let lam = C64::from_polar(1.0, t);
            let a = xi.eval_unchecked(lam) * z;
            let rho = (-a.det()).sqrt() * (-I);
            let closed = Mat2::scalar(rho.cos()) + a * (rho.sin() / rho);
            assert!((lp.eval(lam) - closed).max_abs() < 1e-13);
        }
        // real z: already unitary
        let lp = exp_loop(&xi, C64::new(1.7, 0.0), &cfg()).unwrap();
        let u = lp.eval(C64::from_polar(1.0, 0.4));
        assert!((u * u.adjoint() - Mat2::identity()).max_abs() < 1e-13);
    }

    #[test]
    fn factor_of_unitary_loop_is_trivial() {
        let lp = exp_loop(&families::flat_xi(), C64::new(1.2, 0.0), &cfg()).unwrap();
        let fac = iwasawa_factor(&lp, &cfg()).unwrap();
        for k in -(fac.b.n as i64)..=fac.b.n as i64 {
            let want = if k == 0 { Mat2::identity() } else { Mat2::zero() };
            assert!((fac.b.coeff(k) - want).max_abs() < 1e-12);
        }
        let lam = C64::from_polar(1.0, 2.2);
        assert!((fac.f.eval(lam) - lp.eval(lam)).max_abs() < 1e-12);
    }

    #[test]
    fn factor_of_constant_plus_loop() {
        let r = 2.5;
        let phi = FourierLoop::constant(Mat2::new(C64::new(r, 0.0), ZERO, ZERO, C64::new(1.0 / r, 0.0)), LoopClass::General);
        let fac = iwasawa_factor(&phi, &cfg()).unwrap();
        assert!((fac.f.eval(C64::from_polar(1.0, 0.3)) - Mat2::identity()).max_abs() < 1e-12);
        assert!((fac.b.coeff(0) - phi.coeff(0)).max_abs() < 1e-12);
    }

    #[test]
    fn flat_frame_closed_form() {
        let xi = families::flat_xi();
        for z in [C64::new(1.0, 1.0), C64::new(-2.0, 1.5), C64::new(0.3, -2.0)] {
            let fp = frame(&xi, z, &cfg()).unwrap();
            assert!(fp.diagnostics.meets(1e-9), "{:?}", fp.diagnostics);
            for t in 0..8 {
                let lam = C64::from_polar(1.0, 0.7 * t as f64 + 0.1);
                let err = (fp.f.eval(lam) - flat_closed(z, lam)).max_abs();
                assert!(err < 1e-10, "z={z} err={err}");
            }
            // plus remainder exp(P) with P = (i/2)(z - conj z)(eps+ + lambda eps-)
            let p0 = Mat2::eps_plus() * ((z - z.conj()) * I * 0.5);
            assert!((fp.b.coeff(0) - p0.exp()).max_abs() < 1e-10);
        }
        let fp = frame(&xi, ZERO, &cfg()).unwrap();
        assert!((fp.f.eval(I) - Mat2::identity()).max_abs() < 1e-14);
    }

    #[test]
    fn composed_frames_agree_with_direct_factorization() {
        let xi = families::delaunay_xi_normalized(0.3, 0.5);
        let z = C64::new(1.1, 2.3);
        let direct = frame(&xi, z, &IwasawaConfig { max_growth: 100.0, ..cfg() }).unwrap();
        let split = frame(&xi, z, &IwasawaConfig { max_growth: 0.5, ..cfg() }).unwrap();
        assert!(split.segments > 1);
        for t in 0..6 {
            let lam = C64::from_polar(1.0, 1.1 * t as f64);
            assert!((direct.f.eval(lam) - split.f.eval(lam)).max_abs() < 1e-10);
        }
    }

    #[test]
    fn flat_monodromy_clifford_period() {
        let xi = families::flat_xi();
        let tau = C64::new(std::f64::consts::PI * 2f64.sqrt(), 0.0);
        let m = monodromy(&xi, tau, &cfg()).unwrap();
        for lam in [I, -I] {
            assert!((m.at(lam) + Mat2::identity()).max_abs() < 1e-10);
            assert!((m.delta(lam) + 2.0).norm() < 1e-10);
        }
        let m0 = monodromy(&xi, ZERO, &cfg()).unwrap();
        assert!((m0.delta(C64::from_polar(1.0, 0.5)) - 2.0).norm() < 1e-14);
        for t in 0..8 {
            let lam = C64::from_polar(1.0, 0.8 * t as f64);
            let x = xi.eval_unchecked(lam);
            assert!(m.at(lam).commutator(&x).max_abs() < 1e-8);
        }
    }

    #[test]
    fn killing_field_at_zero_and_isospectral() {
        let xi = families::delaunay_xi(0.3, 0.5);
        let k0 = killing_field(&xi, ZERO, &cfg()).unwrap();
        for (a, b) in k0.zeta.coeffs.iter().zip(&xi.coeffs) {
            assert!((*a - *b).max_abs() < 1e-13);
        }
        let a = xi.det_lambda_poly();
        let k = killing_field(&xi, C64::new(0.7, 0.4), &cfg()).unwrap();
        assert!(k.zeta.det_lambda_poly().sub(&a).norm() < 1e-10);
    }

    #[test]
    fn delaunay_killing_field_matches_closed_form() {
        let p = families::DelaunayParams::new(0.3, 0.5).unwrap();
        let xi = families::delaunay_xi(p.a_r, p.b_r);
        // the profile variable runs along z = -i x; along real z the loop exp(z xi) is already unitary
        for x in [0.3, 0.9, 1.7, -0.6] {
            let k = killing_field(&xi, C64::new(0.0, -x), &cfg()).unwrap();
            let want = families::delaunay_killing_field(&p, x).unwrap();
            for (a, b) in k.zeta.coeffs.iter().zip(&want.coeffs) {
                assert!((*a - *b).max_abs() < 1e-6, "x={x}: {a:?} vs {b:?}");
            }
        }
        let k = killing_field(&xi, C64::new(1.3, 0.0), &cfg()).unwrap();
        for (a, b) in k.zeta.coeffs.iter().zip(&xi.coeffs) {
            assert!((*a - *b).max_abs() < 1e-12);
        }
    }

    #[test]
    fn fourier_csv_dump() {
        let mut out = Vec::new();
        FourierLoop::identity().write_csv(&mut out).unwrap();
        let s = String::from_utf8(out).unwrap();
        assert!(s.starts_with("k,entry,re,im\n0,00,1e0,0e0\n"));
    }
}
