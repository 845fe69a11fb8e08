//! Closed-form example families: spheres, flat cylinders and the Clifford torus, Delaunay surfaces,
//! the genus at most one revolution family and the genus-zero closing conditions.

use crate::elliptic::{complete_k, jacobi};
use crate::error::{Error, Result};
use crate::immersion::MarkedPoints;
use crate::loop_algebra::LaurentMatrix;
use crate::mat2::{Mat2, C64, I, ONE, ZERO};
use crate::poly::{PolyRole, RealPolynomial};
use crate::spectral::SpectralData;
use std::f64::consts::PI;

const MODULE: &str = "families";

/// Largest admissible `alpha`; the chain-of-spheres limit `alpha = 1` is excluded.
pub const ALPHA_MAX: f64 = 1.0 - 1e-6;

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// `(i/2)((lambda^{-1} + 1) eps+ + (1 + lambda) eps-)`.
pub fn flat_xi() -> LaurentMatrix {
    let h = I * 0.5;
    LaurentMatrix {
        g: 1,
        coeffs: vec![Mat2::eps_plus() * h, (Mat2::eps_plus() + Mat2::eps_minus()) * h, Mat2::eps_minus() * h],
    }
}

/// Marked points `lambda_0 = e^{2 i t0}`, `lambda_1 = e^{-2 i t0}`, so that `H = cot(2 t0)`.
pub fn flat_marked(t0: f64) -> Result<MarkedPoints> {
    let l0 = C64::from_polar(1.0, 2.0 * t0);
    if (l0 - l0.conj()).norm() < 1e-12 {
        return Err(Error::domain(MODULE, format!("t0 = {t0} gives coincident marked points")));
    }
    MarkedPoints::new(l0, l0.conj())
}

pub fn flat_family(t0: f64) -> Result<(LaurentMatrix, MarkedPoints)> {
    Ok((flat_xi(), flat_marked(t0)?))
}

/// `exp((i/2) [[0, z/lambda + conj z], [z + conj(z) lambda, 0]])`.
pub fn flat_frame(z: C64, lambda: C64) -> Mat2 {
    (Mat2::new(ZERO, z / lambda + z.conj(), z + z.conj() * lambda, ZERO) * (I * 0.5)).exp()
}

/// Eigenvalues of the flat frame are `exp(+-mu)` with `mu = (i/2)(z lambda^{-1/2} + conj(z) lambda^{1/2})`.
pub fn flat_eigen_exponent(z: C64, lambda: C64) -> C64 {
    let s = lambda.sqrt();
    I * 0.5 * (z / s + z.conj() * s)
}

/// The simple periods of the Clifford torus.
pub fn clifford_periods() -> (C64, C64) {
    let w = PI * 2f64.sqrt();
    (c(w), C64::new(0.0, w))
}

pub fn clifford_marked() -> MarkedPoints {
    flat_marked(PI / 4.0).expect("distinct marked points")
}

/// Genus-zero spectral data of the Clifford torus: `a = 1`, `b = 1/sqrt 2`, `kappa = +-1`.
pub fn clifford_data() -> SpectralData {
    SpectralData::new(
        RealPolynomial::new(vec![1.0]).with_role(PolyRole::A),
        RealPolynomial::new(vec![1.0 / 2f64.sqrt(), 0.0]).with_role(PolyRole::B),
        1.0,
        -1.0,
    )
    .expect("valid Clifford data")
}

/// `lambda^{-1} eps+ - lambda eps-`.
pub fn sphere_xi() -> LaurentMatrix {
    LaurentMatrix { g: 1, coeffs: vec![Mat2::eps_plus(), Mat2::zero(), -Mat2::eps_minus()] }
}

/// `(1 + |z|^2)^{-1/2} [[1, z/lambda], [-lambda conj z, 1]]`.
pub fn sphere_frame(z: C64, lambda: C64) -> Mat2 {
    let s = 1.0 / (1.0 + z.norm_sqr()).sqrt();
    Mat2::new(ONE, z / lambda, -lambda * z.conj(), ONE) * s
}

/// `u = -log(1 + |z|^2)`, a solution of the Liouville equation.
pub fn sphere_u(z: C64) -> f64 {
    -(1.0 + z.norm_sqr()).ln()
}

pub fn sphere_killing_field(z: C64) -> LaurentMatrix {
    let s = 1.0 / (1.0 + z.norm_sqr());
    let d = (z - z.conj()) * s;
    LaurentMatrix {
        g: 1,
        coeffs: vec![
            Mat2::eps_plus() * ((ONE + z * z) * s),
            Mat2::new(d, ZERO, ZERO, -d),
            Mat2::eps_minus() * (-(ONE + z.conj() * z.conj()) * s),
        ],
    }
}

/// Maurer-Cartan form of the sphere frame applied to the tangent vector `dz`.
pub fn sphere_alpha(z: C64, dz: C64, lambda: C64) -> Mat2 {
    let s = 1.0 + z.norm_sqr();
    let uz = -z.conj() / s;
    let uzb = -z / s;
    let eu = 1.0 / s;
    let d = uz * dz - uzb * dz.conj();
    Mat2::new(d, lambda.inv() * dz * 2.0 * eu, -lambda * dz.conj() * 2.0 * eu, -d) * 0.5
}

/// Maurer-Cartan form with `u = 0` applied to `dz`.
pub fn flat_alpha(_z: C64, dz: C64, lambda: C64) -> Mat2 {
    Mat2::new(ZERO, I * (dz / lambda + dz.conj()), I * (dz + lambda * dz.conj()), ZERO) * 0.5
}

/// Integrate `dF = F alpha` along the segment from 0 to `z` by classical Runge-Kutta.
pub fn ode_frame(alpha: impl Fn(C64, C64, C64) -> Mat2, z: C64, lambda: C64, steps: usize) -> Mat2 {
    let h = 1.0 / steps as f64;
    let rhs = |t: f64, f: &Mat2| *f * alpha(z * t, z, lambda);
    let mut f = Mat2::identity();
    for k in 0..steps {
        let t = k as f64 * h;
        let k1 = rhs(t, &f);
        let k2 = rhs(t + 0.5 * h, &(f + k1 * (0.5 * h)));
        let k3 = rhs(t + 0.5 * h, &(f + k2 * (0.5 * h)));
        let k4 = rhs(t + h, &(f + k3 * h));
        f = f + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
    }
    f
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DelaunayParams {
    pub a_r: f64,
    pub b_r: f64,
}

impl DelaunayParams {
    pub fn new(a_r: f64, b_r: f64) -> Result<Self> {
        if !(a_r > 0.0 && b_r > 0.0) || !a_r.is_finite() || !b_r.is_finite() {
            return Err(Error::domain(MODULE, format!("Delaunay radii must be positive, got ({a_r}, {b_r})")));
        }
        Ok(DelaunayParams { a_r, b_r })
    }

    /// Elliptic parameter `1 - a_r^2/b_r^2`.
    pub fn modulus(&self) -> f64 {
        1.0 - (self.a_r / self.b_r).powi(2)
    }

    /// Period of `v` in `x`.
    pub fn period(&self) -> f64 {
        let (b, m) = self.effective();
        2.0 * complete_k(m).expect("parameter in range") / (2.0 * b)
    }

    /// `(b, m)` with `m` in `[0, 1)` describing the same profile, using `dn(u | -m) = 1/dn(u sqrt(1+m) | m/(1+m))`.
    fn effective(&self) -> (f64, f64) {
        if self.a_r <= self.b_r {
            (self.b_r, self.modulus())
        } else {
            (self.a_r, 1.0 - (self.b_r / self.a_r).powi(2))
        }
    }

    /// Scale `2 sqrt(a_r b_r)` that normalizes the initial value to the sinh-Gordon slice `4 a_r b_r = 1`.
    pub fn sinh_gordon_scale(&self) -> f64 {
        2.0 * (self.a_r * self.b_r).sqrt()
    }

    pub fn normalized(&self) -> DelaunayParams {
        let s = self.sinh_gordon_scale();
        DelaunayParams { a_r: self.a_r / s, b_r: self.b_r / s }
    }
}

/// `(a_r lambda^{-1} + b_r) i eps+ + (b_r + a_r lambda) i eps-`.
pub fn delaunay_xi(a_r: f64, b_r: f64) -> LaurentMatrix {
    LaurentMatrix {
        g: 1,
        coeffs: vec![
            Mat2::eps_plus() * (I * a_r),
            (Mat2::eps_plus() + Mat2::eps_minus()) * (I * b_r),
            Mat2::eps_minus() * (I * a_r),
        ],
    }
}

/// Initial value whose surface has conformal factor exactly `delaunay_v`: the Killing field at the half period.
pub fn delaunay_xi_metric(p: &DelaunayParams) -> LaurentMatrix {
    delaunay_xi(p.b_r, p.a_r)
}

/// [`delaunay_xi_metric`] rescaled onto the sinh-Gordon slice.
pub fn delaunay_xi_normalized(a_r: f64, b_r: f64) -> LaurentMatrix {
    let s = 2.0 * (a_r * b_r).sqrt();
    delaunay_xi(b_r / s, a_r / s)
}

/// `v(x) = 2 b_r dn(2 b_r x | 1 - a_r^2/b_r^2)` and its derivative.
pub fn delaunay_v_and_derivative(x: f64, p: &DelaunayParams) -> Result<(f64, f64)> {
    let m = p.modulus();
    if m >= 0.0 {
        let j = jacobi(2.0 * p.b_r * x, m)?;
        Ok((2.0 * p.b_r * j.dn, -4.0 * p.b_r * p.b_r * m * j.sn * j.cn))
    } else {
        let mu = -m;
        let s = (1.0 + mu).sqrt();
        let mm = mu / (1.0 + mu);
        let j = jacobi(2.0 * p.b_r * x * s, mm)?;
        let v = 2.0 * p.b_r / j.dn;
        // d/du nd(u) = m sn cn / dn^2
        let dv = 2.0 * p.b_r * mm * j.sn * j.cn / (j.dn * j.dn) * 2.0 * p.b_r * s;
        Ok((v, dv))
    }
}

pub fn delaunay_v(x: f64, p: &DelaunayParams) -> Result<f64> {
    delaunay_v_and_derivative(x, p).map(|r| r.0)
}

/// Killing field of [`delaunay_xi`] along the real axis:
/// `i [[-v'/2v, 2ab/(lambda v) + v/2], [2ab lambda/v + v/2, v'/2v]]`.
pub fn delaunay_killing_field(p: &DelaunayParams, x: f64) -> Result<LaurentMatrix> {
    let (v, dv) = delaunay_v_and_derivative(x, p)?;
    let off = 2.0 * p.a_r * p.b_r / v;
    let d = -dv / (2.0 * v);
    Ok(LaurentMatrix {
        g: 1,
        coeffs: vec![
            Mat2::eps_plus() * (I * off),
            Mat2::new(I * d, I * (v / 2.0), I * (v / 2.0), -I * d),
            Mat2::eps_minus() * (I * off),
        ],
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RevolutionParams {
    pub h: f64,
    pub alpha: f64,
}

impl RevolutionParams {
    pub fn new(h: f64, alpha: f64) -> Result<Self> {
        if !(h >= 0.0) || !h.is_finite() {
            return Err(Error::domain(MODULE, format!("mean curvature must be >= 0, got {h}")));
        }
        if !(0.0..=ALPHA_MAX).contains(&alpha) {
            return Err(Error::domain(
                MODULE,
                format!("alpha = {alpha} outside [0, 1 - 1e-6]; alpha -> 1 is the chain-of-spheres boundary"),
            ));
        }
        Ok(RevolutionParams { h, alpha })
    }

    pub fn is_flat(&self) -> bool {
        self.alpha == 0.0
    }

    pub fn is_minimal(&self) -> bool {
        self.h == 0.0
    }

    /// `k = |H| + sqrt(H^2 + 1) >= 1`, the modulus of the marked points.
    pub fn kappa_modulus(&self) -> f64 {
        self.h.abs() + (self.h * self.h + 1.0).sqrt()
    }

    /// Marked points `(kappa_0, kappa_1) = (k, -k)`; for `H > 0` the orientation is flipped to `(-k, k)`.
    pub fn marked_kappas(&self) -> (f64, f64) {
        let k = self.kappa_modulus();
        if self.h > 0.0 {
            (-k, k)
        } else {
            (k, -k)
        }
    }

    /// `b_2 = sqrt((k^2 + 1)/(4(k^2 + alpha)))`.
    pub fn b2(&self) -> f64 {
        let k = self.kappa_modulus();
        ((k * k + 1.0) / (4.0 * (k * k + self.alpha))).sqrt()
    }
}

/// Spectral data `a = kappa^2 + alpha`, `b = (1 - alpha) b_2 kappa` with `ln mu = 2 pi i b_2 (kappa^2 + alpha)/nu`.
/// For `alpha = 0` the common factor `kappa` is removed, leaving genus-zero data `a = 1`, `b = b_2`.
pub fn revolution_family(p: &RevolutionParams) -> Result<SpectralData> {
    let (k0, k1) = p.marked_kappas();
    let b2 = p.b2();
    let (a, b) = if p.is_flat() {
        (vec![1.0], vec![b2, 0.0])
    } else {
        (vec![p.alpha, 0.0, 1.0], vec![0.0, (1.0 - p.alpha) * b2])
    };
    SpectralData::new(
        RealPolynomial::new(a).with_role(PolyRole::A),
        RealPolynomial::new(b).with_role(PolyRole::B),
        k0,
        k1,
    )
}

/// Closed form `ln mu = 2 pi i b_2 (kappa^2 + alpha)/nu` on the positive sheet.
pub fn revolution_ln_mu(p: &RevolutionParams, kappa: f64) -> f64 {
    let nu = ((kappa * kappa + 1.0) * (kappa * kappa + p.alpha)).sqrt();
    2.0 * PI * p.b2() * (kappa * kappa + p.alpha) / nu
}

/// Minimal members realized by a normalized Delaunay initial value with marked points `+-i`.
/// The branch points `-a_r/b_r`, `-b_r/a_r` map to `kappa = +-i sqrt(alpha)` after `kappa -> -1/kappa`.
pub fn revolution_xi(p: &RevolutionParams) -> Result<(LaurentMatrix, MarkedPoints)> {
    if !p.is_minimal() {
        return Err(Error::domain(MODULE, "closed-form initial values are provided for H = 0 only"));
    }
    if p.is_flat() {
        return Ok((flat_xi(), clifford_marked()));
    }
    let r = p.alpha.sqrt();
    let a_r = 0.5 * ((1.0 - r) / (1.0 + r)).sqrt();
    let b_r = 0.5 * ((1.0 + r) / (1.0 - r)).sqrt();
    Ok((delaunay_xi(a_r, b_r), clifford_marked()))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Genus0Closing {
    pub n: i64,
    pub m: i64,
    /// `4(b0 k0 - b1)^2 - n^2 (k0^2 + 1)`.
    pub residual_n: f64,
    /// `4(b0 k0 + b1)^2 - m^2 (k0^2 + 1)`.
    pub residual_m: f64,
}

impl Genus0Closing {
    pub fn embedded(&self) -> bool {
        self.n.abs() == 1 && self.m.abs() == 1
    }
}

/// Residuals of both closing equations for prescribed integers.
pub fn genus0_residuals(kappa0: f64, b0: f64, b1: f64, n: i64, m: i64) -> (f64, f64) {
    let q = kappa0 * kappa0 + 1.0;
    (
        4.0 * (b0 * kappa0 - b1).powi(2) - (n * n) as f64 * q,
        4.0 * (b0 * kappa0 + b1).powi(2) - (m * m) as f64 * q,
    )
}

/// Nearest integers solving the closing equations at `+-kappa0` and the residuals there.
pub fn genus0_closing(kappa0: f64, b0: f64, b1: f64) -> Result<Genus0Closing> {
    if kappa0 == 0.0 {
        return Err(Error::domain(MODULE, "kappa0 must be nonzero"));
    }
    let q = (kappa0 * kappa0 + 1.0).sqrt();
    let n = (2.0 * (b0 * kappa0 - b1) / q).round() as i64;
    let m = (2.0 * (b0 * kappa0 + b1) / q).round() as i64;
    let (residual_n, residual_m) = genus0_residuals(kappa0, b0, b1, n, m);
    Ok(Genus0Closing { n, m, residual_n, residual_m })
}
