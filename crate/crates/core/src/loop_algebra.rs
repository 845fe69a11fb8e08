//! Laurent polynomial 2x2 matrices in the spectral parameter, their reality structure,
//! determinant polynomial, root removal, dressing and the change to the real parameter.

use crate::error::{Error, Result};
use crate::mat2::{Mat2, C64, I, ONE, ZERO};
use crate::poly::{CPoly, RealPolynomial};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

const MODULE: &str = "loop_algebra";

/// `xi(lambda) = sum_{d=-1}^{g} coeffs[d+1] lambda^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentMatrix {
    pub g: usize,
    pub coeffs: Vec<Mat2>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimpleFactorPoint {
    beta: C64,
}

impl SimpleFactorPoint {
    pub fn new(beta: C64) -> Result<Self> {
        let r = beta.norm();
        if r > 0.0 && r < 1.0 {
            Ok(SimpleFactorPoint { beta })
        } else {
            Err(Error::precondition(MODULE, format!("simple factor point needs 0 < |beta| < 1, got {r}")))
        }
    }

    pub fn beta(&self) -> C64 {
        self.beta
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RealityReport {
    pub ok: bool,
    pub max_violation: f64,
}

/// Determinant polynomial in both parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct DetPolynomial {
    /// `a(lambda) = -lambda det xi(lambda)`, coefficients for degrees 0..=2g.
    pub lambda_form: CPoly,
    /// Real form in kappa, normalized to leading coefficient 1 when the degree is 2g.
    pub kappa_form: RealPolynomial,
    /// Sign `s` with `lambda^{2g} conj(a(1/conj lambda)) = s a(lambda)`.
    pub reality_sign: f64,
}

impl LaurentMatrix {
    pub fn new(g: usize, coeffs: Vec<Mat2>) -> Result<Self> {
        if coeffs.len() != g + 2 {
            return Err(Error::domain(MODULE, format!("expected {} coefficients for g = {g}, got {}", g + 2, coeffs.len())));
        }
        Ok(LaurentMatrix { g, coeffs })
    }

    pub fn zero(g: usize) -> Self {
        LaurentMatrix { g, coeffs: vec![Mat2::zero(); g + 2] }
    }

    /// Coefficient of `lambda^d`, `d >= -1`.
    pub fn coeff(&self, d: i64) -> Mat2 {
        let k = d + 1;
        if k < 0 || k as usize >= self.coeffs.len() {
            Mat2::zero()
        } else {
            self.coeffs[k as usize]
        }
    }

    pub fn evaluate(&self, lambda: C64) -> Result<Mat2> {
        if lambda.norm() == 0.0 {
            return Err(Error::domain(MODULE, "evaluation at the pole lambda = 0"));
        }
        Ok(self.eval_unchecked(lambda))
    }

    pub(crate) fn eval_unchecked(&self, lambda: C64) -> Mat2 {
        let mut acc = Mat2::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * lambda + *c;
        }
        acc * lambda.inv()
    }

    pub fn scale(&self, s: C64) -> Self {
        LaurentMatrix { g: self.g, coeffs: self.coeffs.iter().map(|c| c.scale(s)).collect() }
    }

    pub fn add(&self, o: &LaurentMatrix) -> Result<Self> {
        if self.g != o.g {
            return Err(Error::domain(MODULE, "degree mismatch"));
        }
        Ok(LaurentMatrix { g: self.g, coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| *a + *b).collect() })
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm().powi(2)).sum::<f64>().sqrt()
    }

    /// Entries of `lambda * xi` as polynomials of degree `<= g + 1`, row-major.
    pub fn entry_polys(&self) -> [CPoly; 4] {
        let e = |i: usize, j: usize| CPoly::new(self.coeffs.iter().map(|c| c[(i, j)]).collect());
        [e(0, 0), e(0, 1), e(1, 0), e(1, 1)]
    }

    /// Inverse of [`entry_polys`](Self::entry_polys) for formal degree `g`.
    pub fn from_entry_polys(g: usize, p: &[CPoly; 4]) -> Self {
        let coeffs = (0..g + 2)
            .map(|k| Mat2::new(p[0].coeff(k), p[1].coeff(k), p[2].coeff(k), p[3].coeff(k)))
            .collect();
        LaurentMatrix { g, coeffs }
    }

    /// Largest deviation from the structural conditions (tracelessness and upper-triangular leading term).
    pub fn structure_violation(&self) -> f64 {
        let tr = self.coeffs.iter().map(|c| c.trace().norm()).fold(0.0, f64::max);
        let lead = &self.coeffs[0];
        let low = lead[(1, 0)].norm().max(lead[(0, 0)].norm()).max(lead[(1, 1)].norm());
        tr.max(low)
    }

    pub fn reality_check(&self, tol: f64) -> RealityReport {
        let g = self.g as i64;
        let mut worst = self.structure_violation();
        for d in -1..=g {
            let want = -self.coeff(g - 1 - d).adjoint();
            worst = worst.max((self.coeff(d) - want).max_abs());
        }
        RealityReport { ok: worst <= tol, max_violation: worst }
    }

    pub fn semisimplicity_check(&self, tol: f64) -> bool {
        self.coeff(-1)[(0, 1)].norm() > tol && self.coeff(0)[(1, 0)].norm() > tol
    }

    /// `-lambda det xi(lambda)` as a polynomial of degree `<= 2g`.
    pub fn det_lambda_poly(&self) -> CPoly {
        let [p00, p01, p10, p11] = self.entry_polys();
        // lambda^2 det xi = det(lambda xi); dividing by lambda gives -lambda det xi after a sign.
        let d = p00.mul(&p11).sub(&p01.mul(&p10));
        let mut c = d.coeffs;
        if c.is_empty() {
            return CPoly::zero();
        }
        c.remove(0);
        c.resize(2 * self.g + 1, ZERO);
        CPoly::new(c).scale(-ONE)
    }

    pub fn det_polynomial(&self, tol: f64) -> Result<DetPolynomial> {
        let a = self.det_lambda_poly();
        let n = 2 * self.g;
        let sign = reality_sign(&a, n);
        let kappa = lambda_poly_to_kappa(&a, n);
        let (mut real, worst) = RealPolynomial::from_complex(&kappa);
        if worst > tol {
            return Err(Error::domain(MODULE, format!("kappa form of a is not real (relative imaginary part {worst:.3e})")));
        }
        // on the real axis (i + kappa)^{2g} a = (-1)^{g+1} (1 + kappa^2)^g |.|^2
        real = real.trimmed(1e-13).scale(if self.g % 2 == 0 { -1.0 } else { 1.0 });
        if real.degree() == Some(n) {
            let lead = real.coeffs[n];
            real = real.scale(1.0 / lead);
        }
        Ok(DetPolynomial {
            lambda_form: a,
            kappa_form: real.with_role(crate::poly::PolyRole::A),
            reality_sign: sign,
        })
    }

    /// Divide out the root at `alpha` using the real-structure preserving factor.
    pub fn divide_root(&self, alpha: C64, tol: f64) -> Result<LaurentMatrix> {
        if alpha.norm() == 0.0 {
            return Err(Error::domain(MODULE, "root at lambda = 0"));
        }
        let at = self.eval_unchecked(alpha);
        let scale = self.norm().max(1e-300);
        if at.max_abs() > tol * scale {
            return Err(Error::precondition(MODULE, format!("xi(alpha) != 0 (|xi(alpha)| = {:.3e})", at.max_abs())));
        }
        let p = real_factor(alpha, tol);
        let deg = p.len() - 1;
        if deg > self.g {
            return Err(Error::domain(MODULE, "division would give negative degree"));
        }
        let entries = self.entry_polys();
        let mut quot: [CPoly; 4] = Default::default();
        let mut worst: f64 = 0.0;
        for (k, e) in entries.iter().enumerate() {
            let (q, r) = e.div_rem(&p);
            worst = worst.max(r.max_abs());
            quot[k] = q;
        }
        if worst > tol.sqrt() * scale {
            return Err(Error::precondition(MODULE, format!("division remainder {worst:.3e}")));
        }
        Ok(LaurentMatrix::from_entry_polys(self.g - deg, &quot))
    }

    pub fn dress_simple_factor(&self, beta: SimpleFactorPoint) -> LaurentMatrix {
        let b = beta.beta();
        let left = CPoly::linear(-b, ONE);
        let right = CPoly::linear(ONE, -b.conj());
        let [p00, p01, p10, p11] = self.entry_polys();
        let mixed = left.mul(&right);
        let out = [
            p00.mul(&mixed),
            p01.mul(&left.mul(&left)),
            p10.mul(&right.mul(&right)),
            p11.mul(&mixed),
        ];
        LaurentMatrix::from_entry_polys(self.g + 2, &out)
    }

    /// Tangent vector along which `a` moves by `2a/(lambda - alpha)`, pole free at the root `alpha`.
    pub fn isospectral_tangent(&self, alpha: C64, tol: f64) -> Result<LaurentMatrix> {
        let n = self.evaluate(alpha)?;
        let scale = self.norm().max(1e-300);
        if n.max_abs() <= tol * scale {
            return Err(Error::precondition(MODULE, "xi(alpha) = 0; divide the root instead"));
        }
        let nil = (n * n).max_abs();
        if nil > tol.sqrt() * n.max_abs().powi(2) {
            return Err(Error::precondition(MODULE, "xi(alpha) is not nilpotent; alpha is not a root of a"));
        }
        let q = solve_commutator_identity(&n);
        // numerator xi - [Q, xi] vanishes at alpha
        let num = LaurentMatrix {
            g: self.g,
            coeffs: self.coeffs.iter().map(|c| *c - q.commutator(c)).collect(),
        };
        let p = CPoly::linear(-alpha, ONE);
        let mut quot: [CPoly; 4] = Default::default();
        let mut worst: f64 = 0.0;
        for (k, e) in num.entry_polys().iter().enumerate() {
            let (qk, r) = e.div_rem(&p);
            worst = worst.max(r.max_abs());
            quot[k] = qk;
        }
        if worst > tol.sqrt() * scale {
            return Err(Error::convergence(MODULE, "tangent numerator not divisible", worst));
        }
        Ok(LaurentMatrix::from_entry_polys(self.g, &quot))
    }
}

/// Minimum-norm traceless `Q` with `[Q, N] = N`.
pub fn solve_commutator_identity(n: &Mat2) -> Mat2 {
    // Q = [[q0, q1], [q2, -q0]]; the map Q -> [Q, N] as a 4x3 complex system
    let basis = [
        Mat2::new(ONE, ZERO, ZERO, -ONE),
        Mat2::new(ZERO, ONE, ZERO, ZERO),
        Mat2::new(ZERO, ZERO, ONE, ZERO),
    ];
    let mut a = DMatrix::<C64>::zeros(4, 3);
    for (j, b) in basis.iter().enumerate() {
        let col = b.commutator(n).entries();
        for i in 0..4 {
            a[(i, j)] = col[i];
        }
    }
    let rhs = DVector::from_iterator(4, n.entries());
    let svd = a.svd(true, true);
    let smax = svd.singular_values.max();
    let x = svd.solve(&rhs, 1e-12 * smax).expect("svd with u and v");
    basis.iter().zip(x.iter()).fold(Mat2::zero(), |acc, (b, &c)| acc + b.scale(c))
}

fn reality_sign(a: &CPoly, n: usize) -> f64 {
    let refl = a.reflect(n);
    let plus = refl.sub(a).norm();
    let minus = refl.add(a).norm();
    if plus <= minus {
        1.0
    } else {
        -1.0
    }
}

/// Factor whose zero set is `{alpha}` (unimodular) or `{alpha, 1/conj(alpha)}`.
pub fn real_factor(alpha: C64, tol: f64) -> CPoly {
    if (alpha.norm() - 1.0).abs() < tol {
        // canonical branch: arg(alpha) in (-pi, pi], so alpha = -1 gives s = i
        let im = if alpha.im == 0.0 { 0.0 } else { alpha.im };
        let s = C64::from_polar(1.0, 0.5 * im.atan2(alpha.re));
        // i (conj(s) lambda - s)
        CPoly::linear(-I * s, I * s.conj())
    } else {
        CPoly::linear(-alpha, ONE).mul(&CPoly::linear(ONE, -alpha.conj()))
    }
}

/// `kappa = i(1 - lambda)/(1 + lambda)`.
pub fn mobius_to_kappa(lambda: C64) -> Result<C64> {
    let den = ONE + lambda;
    if den.norm() < 1e-300 {
        return Err(Error::domain(MODULE, "lambda = -1 maps to kappa = infinity"));
    }
    Ok(I * (ONE - lambda) / den)
}

/// `lambda = (i - kappa)/(i + kappa)`.
pub fn mobius_to_lambda(kappa: C64) -> Result<C64> {
    let den = I + kappa;
    if den.norm() < 1e-300 {
        return Err(Error::domain(MODULE, "kappa = -i maps to lambda = infinity"));
    }
    Ok((I - kappa) / den)
}

/// `sum_k p_k (i - kappa)^k (i + kappa)^{n-k}`, i.e. `(i + kappa)^n p(lambda(kappa))`.
pub fn lambda_poly_to_kappa(p: &CPoly, n: usize) -> CPoly {
    p.mobius_substitute(n, (I, -ONE), (I, ONE))
}

/// `sum_k q_k (i(1 - lambda))^k (1 + lambda)^{n-k}`, i.e. `(1 + lambda)^n q(kappa(lambda))`.
/// Composition with [`lambda_poly_to_kappa`] multiplies by `(2i)^n`.
pub fn kappa_poly_to_lambda(q: &CPoly, n: usize) -> CPoly {
    q.mobius_substitute(n, (I, -I), (ONE, ONE))
}

/// Rotation `lambda -> e^{2 i phi} lambda` acting on kappa.
pub fn rotate_kappa(kappa: C64, phi: f64) -> C64 {
    let (s, c) = phi.sin_cos();
    (kappa * c + s) / (c - kappa * s)
}

/// Transport of a real polynomial of formal degree `n` under [`rotate_kappa`]: roots `r` move to `rotate_kappa(r, phi)`.
pub fn rotate_kappa_poly(q: &RealPolynomial, n: usize, phi: f64) -> RealPolynomial {
    let (s, c) = phi.sin_cos();
    let p = q.to_complex().mobius_substitute(n, (C64::new(-s, 0.0), C64::new(c, 0.0)), (C64::new(c, 0.0), C64::new(s, 0.0)));
    RealPolynomial::from_complex(&p).0
}

#[derive(Serialize, Deserialize)]
struct LaurentJson {
    g: usize,
    coeffs: Vec<[[[f64; 2]; 2]; 2]>,
}

impl Serialize for LaurentMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|m| {
                let e = |i: usize, j: usize| [m[(i, j)].re, m[(i, j)].im];
                [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
            })
            .collect();
        LaurentJson { g: self.g, coeffs }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for LaurentMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = LaurentJson::deserialize(d)?;
        let coeffs = j
            .coeffs
            .iter()
            .map(|m| {
                let e = |i: usize, k: usize| C64::new(m[i][k][0], m[i][k][1]);
                Mat2::new(e(0, 0), e(0, 1), e(1, 0), e(1, 1))
            })
            .collect();
        LaurentMatrix::new(j.g, coeffs).map_err(serde::de::Error::custom)
    }
}

/// Element of the real space of degree `g` built from free coefficients, cycling through `params` as (re, im) pairs.
pub fn real_from_parameters(g: usize, params: &[f64]) -> LaurentMatrix {
    let params = if params.is_empty() { &[0.0][..] } else { params };
    let mut it = params.iter().cycle().copied();
    let mut next = || C64::new(it.next().unwrap(), it.next().unwrap());
    let mut coeffs = vec![Mat2::zero(); g + 2];
    let gi = g as i64;
    for d in -1..=gi {
        let e = gi - 1 - d;
        if e < d {
            break;
        }
        let m = if d == -1 {
            Mat2::eps_plus() * next()
        } else {
            let a = next();
            Mat2::new(a, next(), next(), -a)
        };
        coeffs[(d + 1) as usize] = m;
        if e == d {
            // self-paired coefficient must be skew-hermitian
            let sk = (m - m.adjoint()) * 0.5;
            coeffs[(d + 1) as usize] = sk.traceless_part();
        } else {
            coeffs[(e + 1) as usize] = -m.adjoint();
        }
    }
    LaurentMatrix { g, coeffs }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families;
    use crate::roots::{find_roots, find_roots_real};
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random_xi(g: usize, seed: &[f64]) -> LaurentMatrix {
        real_from_parameters(g, seed)
    }

    #[test]
    fn evaluate_examples() {
        let z = LaurentMatrix::zero(2);
        assert_eq!(z.evaluate(c(0.3, 0.8)).unwrap(), Mat2::zero());
        let flat = families::flat_xi();
        let m = flat.evaluate(ONE).unwrap();
        assert!((m - Mat2::new(ZERO, I, I, ZERO)).norm() < 1e-15);
        let sphere = families::sphere_xi();
        let m = sphere.evaluate(I).unwrap();
        assert!((m - Mat2::new(ZERO, -I, -I, ZERO)).norm() < 1e-15);
        assert!(flat.evaluate(ZERO).is_err());
    }

    #[test]
    fn reality_examples() {
        assert!(families::sphere_xi().reality_check(1e-12).ok);
        assert!(families::delaunay_xi(0.3, 0.5).reality_check(1e-12).ok);
        let mut broken = LaurentMatrix::zero(1);
        broken.coeffs[1] = Mat2::eps_plus();
        let r = broken.reality_check(1e-12);
        assert!(!r.ok);
        assert!((r.max_violation - 1.0).abs() < 1e-15);
    }

    #[test]
    fn semisimplicity_examples() {
        assert!(families::delaunay_xi(0.3, 0.5).semisimplicity_check(1e-12));
        assert!(!families::sphere_xi().semisimplicity_check(1e-12));
        assert!(!LaurentMatrix::zero(1).semisimplicity_check(1e-12));
    }

    #[test]
    fn det_polynomial_examples() {
        let s = families::sphere_xi().det_polynomial(1e-10).unwrap();
        assert!(s.lambda_form.sub(&CPoly::from_real(&[0.0, -1.0, 0.0])).norm() < 1e-15);

        let (ar, br) = (0.3, 0.5);
        let d = families::delaunay_xi(ar, br).det_polynomial(1e-10).unwrap();
        let want = CPoly::from_real(&[ar, br]).mul(&CPoly::from_real(&[br, ar])).scale(-ONE);
        assert!(d.lambda_form.sub(&want).norm() < 1e-15);
        let roots = find_roots(&d.lambda_form, 1e-9).unwrap();
        assert!((roots[0].value + br / ar).norm() < 1e-12);
        assert!((roots[1].value + ar / br).norm() < 1e-12);
        // kappa form: (a-b)^2 kappa^2 + (a+b)^2, normalized
        let k = &d.kappa_form;
        assert!((k.coeff(2) - 1.0).abs() < 1e-14);
        assert!((k.coeff(0) - ((ar + br) / (ar - br)).powi(2)).abs() < 1e-12);

        let f = families::flat_xi().det_polynomial(1e-10).unwrap();
        assert!(f.lambda_form.sub(&CPoly::from_real(&[-0.25, -0.5, -0.25])).norm() < 1e-15);
        let r = find_roots(&f.lambda_form, 1e-9).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].multiplicity, 2);
        assert!((r[0].value + 1.0).norm() < 1e-12);
        // the double root sits at kappa = infinity, leaving the constant 1
        assert!(f.kappa_form.trimmed(1e-12).coeffs.iter().zip([1.0]).all(|(a, b)| (a - b).abs() < 1e-14));
        assert_eq!(f.reality_sign, 1.0);
    }

    #[test]
    fn mobius_examples() {
        assert!(mobius_to_kappa(ONE).unwrap().norm() < 1e-15);
        assert!((mobius_to_kappa(I).unwrap() - ONE).norm() < 1e-15);
        assert!((mobius_to_kappa(-I).unwrap() + ONE).norm() < 1e-15);
        assert!(mobius_to_kappa(-ONE).is_err());
        assert!((rotate_kappa(c(2.0, 0.0), std::f64::consts::FRAC_PI_2) - c(-0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn polynomial_mobius_round_trip() {
        let q = CPoly::from_real(&[0.25, -0.3, 1.0]);
        let back = lambda_poly_to_kappa(&kappa_poly_to_lambda(&q, 2), 2);
        let factor = (I * 2.0).powi(2);
        assert!(back.sub(&q.scale(factor)).norm() < 1e-13);
    }

    #[test]
    fn rotated_polynomial_moves_roots() {
        let q = RealPolynomial::new(vec![0.25, 0.0, 1.0]);
        let phi = 0.3;
        let rq = rotate_kappa_poly(&q, 2, phi);
        for r in find_roots_real(&q, 1e-9).unwrap() {
            let moved = rotate_kappa(r.value, phi);
            assert!(rq.eval_c(moved).norm() < 1e-12);
        }
    }

    #[test]
    fn divide_root_flat() {
        let flat = families::flat_xi();
        let red = flat.divide_root(-ONE, 1e-12).unwrap();
        assert_eq!(red.g, 0);
        let want = [Mat2::eps_plus() * (I * 0.5), Mat2::eps_minus() * (I * 0.5)];
        for (a, b) in red.coeffs.iter().zip(want) {
            assert!((*a - b).norm() < 1e-15);
        }
        assert!(red.reality_check(1e-12).ok);
        assert!(families::delaunay_xi(0.3, 0.5).divide_root(-ONE, 1e-10).is_err());
    }

    #[test]
    fn divide_root_recovers_factor() {
        let eta = random_xi(1, &[0.3, -0.7, 1.1, 0.2, -0.4, 0.9, 0.5, 0.1, -0.6, 0.8]);
        for alpha in [c(0.4, 0.3), C64::from_polar(1.0, 0.7)] {
            let p = real_factor(alpha, 1e-9);
            let e = eta.entry_polys();
            let prod = [p.mul(&e[0]), p.mul(&e[1]), p.mul(&e[2]), p.mul(&e[3])];
            let xi = LaurentMatrix::from_entry_polys(eta.g + p.len() - 1, &prod);
            assert!(xi.reality_check(1e-12).ok);
            let back = xi.divide_root(alpha, 1e-10).unwrap();
            assert_eq!(back.g, eta.g);
            for (a, b) in back.coeffs.iter().zip(&eta.coeffs) {
                assert!((*a - *b).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn dressing_doubles_roots() {
        let xi = random_xi(1, &[0.5, 0.2, -0.3, 0.7, 1.0, -0.2, 0.4, 0.6]);
        let beta = SimpleFactorPoint::new(c(0.4, 0.2)).unwrap();
        let d = xi.dress_simple_factor(beta);
        assert_eq!(d.g, 3);
        assert!(d.reality_check(1e-12).ok);
        let b = beta.beta();
        for lam in [c(0.3, 0.8), c(-1.2, 0.4), c(2.0, -1.0)] {
            let lhs = d.eval_unchecked(lam).det() * (-lam);
            let f = (lam - b) * (ONE - b.conj() * lam);
            let rhs = lam * f * f * (-xi.eval_unchecked(lam).det());
            assert!((lhs - rhs).norm() < 1e-10 * rhs.norm().max(1.0));
        }
        let a = d.det_lambda_poly();
        let roots = find_roots(&a, 1e-9).unwrap();
        let mult = |z: C64| roots.iter().filter(|r| (r.value - z).norm() < 1e-6).map(|r| r.multiplicity).sum::<usize>();
        assert!(mult(b) >= 2);
        assert!(mult(ONE / b.conj()) >= 2);
        assert!(SimpleFactorPoint::new(c(1.2, 0.0)).is_err());
    }

    #[test]
    fn isospectral_tangent_delaunay() {
        let (ar, br) = (0.3, 0.5);
        let xi = families::delaunay_xi(ar, br);
        let alpha = c(-ar / br, 0.0);
        let t = xi.isospectral_tangent(alpha, 1e-10).unwrap();
        let a = xi.det_lambda_poly();
        for lam in [c(0.3, 0.8), c(-1.2, 0.4), C64::from_polar(1.0, 2.0)] {
            let x = xi.eval_unchecked(lam);
            let adot = -lam * (x.adjugate() * t.eval_unchecked(lam)).trace();
            let expected = a.eval(lam) * 2.0 / (lam - alpha);
            assert!((adot / expected - ONE).norm() < 1e-10);
        }
        // directional derivative of the determinant
        let lam = c(0.7, -0.4);
        let h = 1e-5;
        let moved = xi.add(&t.scale(c(h, 0.0))).unwrap();
        let lhs = -lam * moved.eval_unchecked(lam).det();
        let adot = -lam * (xi.eval_unchecked(lam).adjugate() * t.eval_unchecked(lam)).trace();
        let rhs = a.eval(lam) + adot * h;
        assert!((lhs - rhs).norm() < 1e-8);
        assert!(families::flat_xi().isospectral_tangent(-ONE, 1e-10).is_err());
    }

    #[test]
    fn laurent_json_round_trip() {
        let xi = families::delaunay_xi(0.3, 0.5);
        let s = serde_json::to_string(&xi).unwrap();
        let back: LaurentMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, xi);
        assert!(serde_json::from_str::<LaurentMatrix>(r#"{"g":1,"coeffs":[]}"#).is_err());
    }

    proptest! {
        #[test]
        fn hermitian_part_vanishes_on_circle(seed in proptest::collection::vec(-1.0f64..1.0, 16), g in 0usize..4, theta in 0.0f64..6.28) {
            let xi = random_xi(g, &seed);
            let lam = C64::from_polar(1.0, theta);
            let m = xi.eval_unchecked(lam) * lam.powf((1.0 - g as f64) / 2.0);
            prop_assert!(((m + m.adjoint()) * 0.5).norm() < 1e-12);
        }

        #[test]
        fn kappa_form_is_real_with_even_real_roots(seed in proptest::collection::vec(-1.0f64..1.0, 16), g in 1usize..4) {
            let xi = random_xi(g, &seed);
            prop_assume!(xi.norm() > 0.1);
            let d = xi.det_polynomial(1e-9).unwrap();
            let kp = lambda_poly_to_kappa(&d.lambda_form, 2 * g);
            let scale = kp.max_abs();
            for k in 0..1000 {
                let x = -50.0 + 0.1 * k as f64;
                let v = kp.eval(c(x, 0.0)) * if g % 2 == 0 { -1.0 } else { 1.0 };
                prop_assert!(v.im.abs() < 1e-10 * scale * (1.0 + x * x).powi(g as i32));
                prop_assert!(v.re >= -1e-10 * scale * (1.0 + x * x).powi(g as i32));
            }
            for r in find_roots_real(&d.kappa_form, 1e-9).unwrap() {
                if r.real && r.value.im == 0.0 {
                    prop_assert!(r.multiplicity % 2 == 0);
                }
            }
        }

        #[test]
        fn divide_root_divides_a_by_factor_squared(seed in proptest::collection::vec(-1.0f64..1.0, 12), ar in 0.1f64..0.9, ai in -0.5f64..0.5) {
            let eta = random_xi(1, &seed);
            let alpha = c(ar, ai * ar);
            let p = real_factor(alpha, 1e-9);
            let e = eta.entry_polys();
            let xi = LaurentMatrix::from_entry_polys(3, &[p.mul(&e[0]), p.mul(&e[1]), p.mul(&e[2]), p.mul(&e[3])]);
            let red = xi.divide_root(alpha, 1e-9).unwrap();
            let a = xi.det_lambda_poly();
            let ared = red.det_lambda_poly();
            let resid = ared.mul(&p.mul(&p)).sub(&a).norm();
            prop_assert!(resid < 1e-12 * a.norm().max(1.0));
        }

        #[test]
        fn dress_then_divide_restores_determinant(seed in proptest::collection::vec(-1.0f64..1.0, 12), br in 0.05f64..0.6, bi in -0.3f64..0.3) {
            let xi = random_xi(1, &seed);
            let beta = SimpleFactorPoint::new(c(br, bi)).unwrap();
            let d = xi.dress_simple_factor(beta);
            prop_assert!(d.reality_check(1e-11).ok);
            let a = xi.det_lambda_poly();
            let f = real_factor(beta.beta(), 1e-9);
            let ad = d.det_lambda_poly();
            let resid = a.mul(&f.mul(&f)).sub(&ad).norm();
            prop_assert!(resid < 1e-12 * ad.norm().max(1.0));
        }
    }
}
