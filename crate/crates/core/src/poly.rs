//! Dense polynomials with complex or real coefficients in ascending order.

use crate::mat2::{C64, ONE, ZERO};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Default)]
pub struct CPoly {
    pub coeffs: Vec<C64>,
}

impl CPoly {
    pub fn new(coeffs: Vec<C64>) -> Self {
        CPoly { coeffs }
    }

    pub fn zero() -> Self {
        CPoly { coeffs: vec![] }
    }

    pub fn constant(c: C64) -> Self {
        CPoly { coeffs: vec![c] }
    }

    /// `c0 + c1 x`.
    pub fn linear(c0: C64, c1: C64) -> Self {
        CPoly { coeffs: vec![c0, c1] }
    }

    pub fn from_real(c: &[f64]) -> Self {
        CPoly { coeffs: c.iter().map(|&x| C64::new(x, 0.0)).collect() }
    }

    /// Monic polynomial with the given roots.
    pub fn from_roots(roots: &[C64]) -> Self {
        roots
            .iter()
            .fold(CPoly::constant(ONE), |p, &r| p.mul(&CPoly::linear(-r, ONE)))
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, k: usize) -> C64 {
        self.coeffs.get(k).copied().unwrap_or(ZERO)
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Degree after discarding leading coefficients below `tol` (relative to the largest).
    pub fn degree(&self, tol: f64) -> Option<usize> {
        let scale = self.max_abs();
        if scale == 0.0 {
            return None;
        }
        self.coeffs.iter().rposition(|c| c.norm() > tol * scale)
    }

    pub fn trimmed(&self, tol: f64) -> CPoly {
        match self.degree(tol) {
            Some(d) => CPoly::new(self.coeffs[..=d].to_vec()),
            None => CPoly::zero(),
        }
    }

    pub fn eval(&self, x: C64) -> C64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> CPoly {
        CPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    pub fn add(&self, o: &CPoly) -> CPoly {
        let n = self.len().max(o.len());
        CPoly::new((0..n).map(|k| self.coeff(k) + o.coeff(k)).collect())
    }

    pub fn sub(&self, o: &CPoly) -> CPoly {
        let n = self.len().max(o.len());
        CPoly::new((0..n).map(|k| self.coeff(k) - o.coeff(k)).collect())
    }

    pub fn scale(&self, s: C64) -> CPoly {
        CPoly::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    pub fn mul(&self, o: &CPoly) -> CPoly {
        if self.is_empty() || o.is_empty() {
            return CPoly::zero();
        }
        let mut out = vec![ZERO; self.len() + o.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in o.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        CPoly::new(out)
    }

    pub fn pow(&self, n: usize) -> CPoly {
        (0..n).fold(CPoly::constant(ONE), |p, _| p.mul(self))
    }

    /// Multiply by `x^k`.
    pub fn shift(&self, k: usize) -> CPoly {
        let mut c = vec![ZERO; k];
        c.extend_from_slice(&self.coeffs);
        CPoly::new(c)
    }

    /// Euclidean division; returns (quotient, remainder).
    pub fn div_rem(&self, d: &CPoly) -> (CPoly, CPoly) {
        let d = d.trimmed(0.0);
        let dd = d.len() - 1;
        let lead = d.coeffs[dd];
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (CPoly::zero(), CPoly::new(rem));
        }
        let mut q = vec![ZERO; rem.len() - dd];
        for k in (0..q.len()).rev() {
            let c = rem[k + dd] / lead;
            q[k] = c;
            for (j, &dj) in d.coeffs.iter().enumerate() {
                rem[k + j] -= c * dj;
            }
        }
        rem.truncate(dd);
        (CPoly::new(q), CPoly::new(rem))
    }

    /// `x^n conj(p(1/conj x))` for formal degree `n`.
    pub fn reflect(&self, n: usize) -> CPoly {
        CPoly::new((0..=n).map(|k| self.coeff(n - k).conj()).collect())
    }

    /// Substitute `x -> (num0 + num1 y) / (den0 + den1 y)` and clear denominators for formal degree `n`.
    pub fn mobius_substitute(&self, n: usize, num: (C64, C64), den: (C64, C64)) -> CPoly {
        let num = CPoly::linear(num.0, num.1);
        let den = CPoly::linear(den.0, den.1);
        let mut out = CPoly::zero();
        for k in 0..=n {
            let c = self.coeff(k);
            if c == ZERO {
                continue;
            }
            out = out.add(&num.pow(k).mul(&den.pow(n - k)).scale(c));
        }
        out
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Role tag of a real polynomial in the spectral parameter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolyRole {
    A,
    B,
    C,
}

#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct RealPolynomial {
    pub coeffs: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub role: Option<PolyRole>,
}

impl RealPolynomial {
    pub fn new(coeffs: Vec<f64>) -> Self {
        RealPolynomial { coeffs, role: None }
    }

    pub fn with_role(mut self, role: PolyRole) -> Self {
        self.role = Some(role);
        self
    }

    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|&c| c != 0.0)
    }

    pub fn trimmed(&self, tol: f64) -> RealPolynomial {
        let scale = self.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        let d = self.coeffs.iter().rposition(|c| c.abs() > tol * scale);
        RealPolynomial {
            coeffs: d.map(|d| self.coeffs[..=d].to_vec()).unwrap_or_default(),
            role: self.role,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn eval_c(&self, x: C64) -> C64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> RealPolynomial {
        RealPolynomial {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
            role: self.role,
        }
    }

    pub fn to_complex(&self) -> CPoly {
        CPoly::from_real(&self.coeffs)
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn mul(&self, o: &RealPolynomial) -> RealPolynomial {
        if self.coeffs.is_empty() || o.coeffs.is_empty() {
            return RealPolynomial::new(vec![]);
        }
        let mut out = vec![0.0; self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RealPolynomial::new(out)
    }

    pub fn add(&self, o: &RealPolynomial) -> RealPolynomial {
        let n = self.coeffs.len().max(o.coeffs.len());
        RealPolynomial::new((0..n).map(|k| self.coeff(k) + o.coeff(k)).collect())
    }

    pub fn scale(&self, s: f64) -> RealPolynomial {
        RealPolynomial::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// Real part of a complex polynomial, with the largest imaginary part relative to the coefficient scale.
    pub fn from_complex(p: &CPoly) -> (RealPolynomial, f64) {
        let scale = p.max_abs().max(1e-300);
        let worst = p.coeffs.iter().map(|c| c.im.abs()).fold(0.0, f64::max) / scale;
        (RealPolynomial::new(p.coeffs.iter().map(|c| c.re).collect()), worst)
    }
}

/// Normalized resultant of two real polynomials via the Sylvester determinant.
pub fn normalized_resultant(p: &RealPolynomial, q: &RealPolynomial) -> f64 {
    let p = p.trimmed(1e-14);
    let q = q.trimmed(1e-14);
    let (m, n) = match (p.degree(), q.degree()) {
        (Some(m), Some(n)) => (m, n),
        _ => return 0.0,
    };
    if m + n == 0 {
        return 1.0;
    }
    let pn = p.norm();
    let qn = q.norm();
    let size = m + n;
    let mut s = nalgebra::DMatrix::<f64>::zeros(size, size);
    for r in 0..n {
        for k in 0..=m {
            s[(r, r + k)] = p.coeffs[m - k] / pn;
        }
    }
    for r in 0..m {
        for k in 0..=n {
            s[(n + r, r + k)] = q.coeffs[n - k] / qn;
        }
    }
    s.determinant().abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn div_rem_reconstructs() {
        let p = CPoly::new(vec![C64::new(1.0, 2.0), C64::new(-3.0, 0.5), C64::new(0.2, 0.0), C64::new(4.0, -1.0)]);
        let d = CPoly::linear(C64::new(0.5, 0.5), ONE);
        let (q, r) = p.div_rem(&d);
        assert_eq!(r.len(), 1);
        assert!(q.mul(&d).add(&r).sub(&p).norm() < 1e-13);
    }

    #[test]
    fn from_roots_vanishes_at_roots() {
        let roots = [C64::new(0.3, 0.1), C64::new(-2.0, 0.0), C64::new(0.0, 1.0)];
        let p = CPoly::from_roots(&roots);
        for r in roots {
            assert!(p.eval(r).norm() < 1e-14);
        }
    }

    #[test]
    fn resultant_detects_common_root() {
        let a = RealPolynomial::new(vec![-1.0, 0.0, 1.0]);
        let b = RealPolynomial::new(vec![-1.0, 1.0]);
        assert!(normalized_resultant(&a, &b) < 1e-14);
        let c = RealPolynomial::new(vec![2.0, 1.0]);
        assert!(normalized_resultant(&a, &c) > 1e-2);
    }
}
