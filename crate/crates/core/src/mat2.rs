//! Complex 2x2 matrices.

use num_complex::Complex64;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Mat2(pub [[C64; 2]; 2]);

impl Mat2 {
    pub const fn new(a: C64, b: C64, c: C64, d: C64) -> Self {
        Mat2([[a, b], [c, d]])
    }

    pub const fn zero() -> Self {
        Mat2([[ZERO, ZERO], [ZERO, ZERO]])
    }

    pub const fn identity() -> Self {
        Mat2([[ONE, ZERO], [ZERO, ONE]])
    }

    /// Upper nilpotent generator.
    pub const fn eps_plus() -> Self {
        Mat2([[ZERO, ONE], [ZERO, ZERO]])
    }

    /// Lower nilpotent generator.
    pub const fn eps_minus() -> Self {
        Mat2([[ZERO, ZERO], [ONE, ZERO]])
    }

    /// diag(i, -i).
    pub const fn epsilon() -> Self {
        Mat2([[I, ZERO], [ZERO, C64::new(0.0, -1.0)]])
    }

    pub fn scalar(s: C64) -> Self {
        Mat2([[s, ZERO], [ZERO, s]])
    }

    pub fn trace(&self) -> C64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn det(&self) -> C64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.0;
        Mat2([[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]])
    }

    pub fn transpose(&self) -> Self {
        let m = &self.0;
        Mat2([[m[0][0], m[1][0]], [m[0][1], m[1][1]]])
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        let m = &self.0;
        Mat2([[f(m[0][0]), f(m[0][1])], [f(m[1][0]), f(m[1][1])]])
    }

    pub fn scale(&self, s: C64) -> Self {
        self.map(|z| z * s)
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.map(|z| z * s)
    }

    pub fn inverse(&self) -> Option<Self> {
        let d = self.det();
        if d.norm() < 1e-300 {
            return None;
        }
        let m = &self.0;
        Some(Mat2([[m[1][1] / d, -m[0][1] / d], [-m[1][0] / d, m[0][0] / d]]))
    }

    /// Adjugate; equals the inverse times the determinant.
    pub fn adjugate(&self) -> Self {
        let m = &self.0;
        Mat2([[m[1][1], -m[0][1]], [-m[1][0], m[0][0]]])
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn commutator(&self, other: &Self) -> Self {
        *self * *other - *other * *self
    }

    pub fn traceless_part(&self) -> Self {
        let h = self.trace() * 0.5;
        *self - Mat2::scalar(h)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Matrix exponential. Uses the Cayley-Hamilton form for the traceless part.
    pub fn exp(&self) -> Self {
        let h = self.trace() * 0.5;
        let a = self.traceless_part();
        let s2 = -a.det();
        let s = s2.sqrt();
        let (ch, sh_over_s) = if s.norm() < 1e-4 {
            // series in s^2
            let mut ch = ONE;
            let mut sh = ONE;
            let mut term_c = ONE;
            let mut term_s = ONE;
            for k in 1..8 {
                term_c = term_c * s2 / ((2 * k - 1) as f64 * (2 * k) as f64);
                term_s = term_s * s2 / ((2 * k) as f64 * (2 * k + 1) as f64);
                ch += term_c;
                sh += term_s;
            }
            (ch, sh)
        } else {
            (s.cosh(), s.sinh() / s)
        };
        (Mat2::scalar(ch) + a.scale(sh_over_s)).scale(h.exp())
    }

    /// Entries as a row-major array.
    pub fn entries(&self) -> [C64; 4] {
        [self.0[0][0], self.0[0][1], self.0[1][0], self.0[1][1]]
    }

    pub fn from_entries(e: [C64; 4]) -> Self {
        Mat2([[e[0], e[1]], [e[2], e[3]]])
    }
}

impl Index<(usize, usize)> for Mat2 {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.0[i][j]
    }
}

impl IndexMut<(usize, usize)> for Mat2 {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.0[i][j]
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, o: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &o.0);
        Mat2([
            [a[0][0] + b[0][0], a[0][1] + b[0][1]],
            [a[1][0] + b[1][0], a[1][1] + b[1][1]],
        ])
    }
}

impl AddAssign for Mat2 {
    fn add_assign(&mut self, o: Mat2) {
        *self = *self + o;
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, o: Mat2) -> Mat2 {
        self + (-o)
    }
}

impl Neg for Mat2 {
    type Output = Mat2;
    fn neg(self) -> Mat2 {
        self.map(|z| -z)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &o.0);
        Mat2([
            [
                a[0][0] * b[0][0] + a[0][1] * b[1][0],
                a[0][0] * b[0][1] + a[0][1] * b[1][1],
            ],
            [
                a[1][0] * b[0][0] + a[1][1] * b[1][0],
                a[1][0] * b[0][1] + a[1][1] * b[1][1],
            ],
        ])
    }
}

impl Mul<C64> for Mat2 {
    type Output = Mat2;
    fn mul(self, s: C64) -> Mat2 {
        self.scale(s)
    }
}

impl Mul<f64> for Mat2 {
    type Output = Mat2;
    fn mul(self, s: f64) -> Mat2 {
        self.scale_re(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series_exp(a: &Mat2) -> Mat2 {
        let mut sum = Mat2::identity();
        let mut term = Mat2::identity();
        for k in 1..60 {
            term = term * *a * (1.0 / k as f64);
            sum += term;
        }
        sum
    }

    #[test]
    fn exp_matches_taylor_series() {
        let a = Mat2::new(C64::new(0.3, -0.2), C64::new(1.1, 0.4), C64::new(-0.7, 0.5), C64::new(0.1, 0.9));
        assert!((a.exp() - series_exp(&a)).norm() < 1e-12);
        let tiny = a * 1e-6;
        assert!((tiny.exp() - series_exp(&tiny)).norm() < 1e-15);
        let nil = Mat2::eps_plus() * C64::new(2.0, 1.0);
        assert!((nil.exp() - (Mat2::identity() + nil)).norm() < 1e-15);
    }

    #[test]
    fn inverse_and_adjugate() {
        let a = Mat2::new(C64::new(2.0, 0.0), C64::new(1.0, 1.0), C64::new(0.0, -1.0), C64::new(3.0, 0.5));
        let inv = a.inverse().unwrap();
        assert!((a * inv - Mat2::identity()).norm() < 1e-14);
        assert!((a.adjugate() - inv * a.det()).norm() < 1e-14);
    }
}
