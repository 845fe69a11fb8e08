//! Polynomial roots with multiplicities: companion eigenvalues, Newton polish and cluster merging.

use crate::error::{Error, Result};
use crate::mat2::{C64, ONE, ZERO};
use crate::poly::{CPoly, RealPolynomial};
use nalgebra::DMatrix;
use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Root {
    pub value: C64,
    pub multiplicity: usize,
    pub real: bool,
    pub unimodular: bool,
    /// The complex conjugate is also a root (always false for real roots).
    pub conjugate_pair: bool,
    /// `1 / conj(root)` is also a root, distinct from this one.
    pub reciprocal_pair: bool,
}

pub const DEFAULT_ROOT_TOL: f64 = 1e-9;

const CLUSTER_RADIUS: f64 = 1e-4;

pub fn find_roots_real(p: &RealPolynomial, tol: f64) -> Result<Vec<Root>> {
    find_roots(&p.to_complex(), tol)
}

/// Roots of `p`, merged when closer than `tol` (relative) and tagged.
pub fn find_roots(p: &CPoly, tol: f64) -> Result<Vec<Root>> {
    let p = p.trimmed(1e-14);
    if p.is_empty() {
        return Err(Error::domain("roots", "zero polynomial"));
    }
    let zeros_at_origin = p.coeffs.iter().position(|c| c.norm() > 0.0).unwrap_or(0);
    let core = CPoly::new(p.coeffs[zeros_at_origin..].to_vec());
    let mut raw: Vec<C64> = vec![ZERO; zeros_at_origin];
    raw.extend(companion_roots(&core)?.into_iter().map(|r| newton_polish(&core, r)));

    let mut groups = cluster(&raw, CLUSTER_RADIUS);
    let mut merged: Vec<(C64, usize)> = Vec::new();
    for g in groups.drain(..) {
        let members: Vec<C64> = g.iter().map(|&i| raw[i]).collect();
        if members.len() == 1 {
            merged.push((members[0], 1));
            continue;
        }
        match multiple_root(&p, &members) {
            Some(c) => merged.push((c, members.len())),
            None => merged.extend(members.into_iter().map(|r| (r, 1))),
        }
    }
    // final merge at the caller tolerance
    let values: Vec<C64> = merged.iter().map(|m| m.0).collect();
    let mut roots: Vec<(C64, usize)> = cluster(&values, tol)
        .into_iter()
        .map(|g| {
            let m: usize = g.iter().map(|&i| merged[i].1).sum();
            let c = g.iter().map(|&i| merged[i].0 * merged[i].1 as f64).sum::<C64>() / m as f64;
            (c, m)
        })
        .collect();
    roots.sort_by(|a, b| {
        (a.0.re, a.0.im)
            .partial_cmp(&(b.0.re, b.0.im))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(tag(&roots, tol))
}

fn tag(roots: &[(C64, usize)], tol: f64) -> Vec<Root> {
    let close = |a: C64, b: C64| (a - b).norm() <= tol * 10.0 * a.norm().max(1.0);
    roots
        .iter()
        .map(|&(value, multiplicity)| {
            let scale = value.norm().max(1.0);
            let real = value.im.abs() < tol * scale;
            let unimodular = (value.norm() - 1.0).abs() < tol;
            let conjugate_pair = !real && roots.iter().any(|r| close(r.0, value.conj()));
            let reciprocal_pair = !unimodular
                && value.norm() > 0.0
                && roots.iter().any(|r| close(r.0, ONE / value.conj()));
            Root { value, multiplicity, real, unimodular, conjugate_pair, reciprocal_pair }
        })
        .collect()
}

fn companion_roots(p: &CPoly) -> Result<Vec<C64>> {
    let n = p.len() - 1;
    if n == 0 {
        return Ok(vec![]);
    }
    let lead = p.coeffs[n];
    if n == 1 {
        return Ok(vec![-p.coeffs[0] / lead]);
    }
    let mut m = DMatrix::<C64>::zeros(n, n);
    for k in 0..n {
        m[(0, k)] = -p.coeffs[n - 1 - k] / lead;
    }
    for k in 1..n {
        m[(k, k - 1)] = ONE;
    }
    m.schur()
        .eigenvalues()
        .map(|v| v.iter().copied().collect())
        .ok_or_else(|| Error::convergence("roots", "companion eigenvalues", f64::NAN))
}

fn newton_polish(p: &CPoly, mut r: C64) -> C64 {
    let dp = p.derivative();
    for _ in 0..3 {
        let d = dp.eval(r);
        if d.norm() == 0.0 {
            break;
        }
        let next = r - p.eval(r) / d;
        if !next.re.is_finite() || p.eval(next).norm() > p.eval(r).norm() {
            break;
        }
        r = next;
    }
    r
}

/// Single linkage clustering with relative radius.
fn cluster(values: &[C64], radius: f64) -> Vec<Vec<usize>> {
    let n = values.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut i = i;
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            let scale = values[i].norm().max(values[j].norm()).max(1.0);
            if (values[i] - values[j]).norm() <= radius * scale {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut index = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if index[r] == usize::MAX {
            index[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[index[r]].push(i);
    }
    groups
}

/// Accept a cluster of `k` approximations as one `k`-fold root when the first `k` Taylor coefficients
/// at the refined centre are negligible.
fn multiple_root(p: &CPoly, members: &[C64]) -> Option<C64> {
    let k = members.len();
    let mut c = members.iter().sum::<C64>() / k as f64;
    let mut derivs = vec![p.clone()];
    for _ in 0..k {
        let d = derivs.last().unwrap().derivative();
        derivs.push(d);
    }
    // Newton on the (k-1)-th derivative, whose simple root is the multiple root
    for _ in 0..5 {
        let d = derivs[k].eval(c);
        if d.norm() == 0.0 {
            break;
        }
        let step = derivs[k - 1].eval(c) / d;
        c -= step;
        if step.norm() < 1e-16 * c.norm().max(1.0) {
            break;
        }
    }
    let scale: f64 = p
        .coeffs
        .iter()
        .enumerate()
        .map(|(j, a)| a.norm() * c.norm().max(1.0).powi(j as i32))
        .sum();
    let mut fact = 1.0;
    for (j, d) in derivs.iter().take(k).enumerate() {
        if j > 0 {
            fact *= j as f64;
        }
        if d.eval(c).norm() / fact > 1e-12 * scale {
            return None;
        }
    }
    Some(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn double_root_of_square() {
        let p = CPoly::from_real(&[1.0, 2.0, 1.0]);
        let r = find_roots(&p, DEFAULT_ROOT_TOL).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].multiplicity, 2);
        assert!((r[0].value + 1.0).norm() < 1e-12);
        assert!(r[0].real && r[0].unimodular);
    }

    #[test]
    fn delaunay_determinant_roots() {
        // -(0.3 + 0.5 x)(0.3 x + 0.5)
        let p = CPoly::from_real(&[0.3, 0.5]).mul(&CPoly::from_real(&[0.5, 0.3])).scale(C64::new(-1.0, 0.0));
        let r = find_roots(&p, DEFAULT_ROOT_TOL).unwrap();
        assert_eq!(r.len(), 2);
        assert!((r[0].value + 5.0 / 3.0).norm() < 1e-12);
        assert!((r[1].value + 0.6).norm() < 1e-12);
        assert!(r.iter().all(|x| x.multiplicity == 1 && x.real && x.reciprocal_pair));
    }

    #[test]
    fn conjugate_pair_tagging() {
        let p = CPoly::from_real(&[0.25, 0.0, 1.0]);
        let r = find_roots(&p, DEFAULT_ROOT_TOL).unwrap();
        assert_eq!(r.len(), 2);
        assert!((r[0].value - C64::new(0.0, -0.5)).norm() < 1e-12);
        assert!((r[1].value - C64::new(0.0, 0.5)).norm() < 1e-12);
        assert!(r.iter().all(|x| x.conjugate_pair && !x.real));
    }

    #[test]
    fn triple_and_double_roots() {
        let a = C64::new(0.4, 0.2);
        let b = C64::new(-1.5, 0.7);
        let p = CPoly::from_roots(&[a, a, a, b, b, C64::new(2.0, 0.0)]);
        let r = find_roots(&p, DEFAULT_ROOT_TOL).unwrap();
        let mult = |z: C64| r.iter().find(|x| (x.value - z).norm() < 1e-6).map(|x| x.multiplicity);
        assert_eq!(mult(a), Some(3));
        assert_eq!(mult(b), Some(2));
        assert_eq!(mult(C64::new(2.0, 0.0)), Some(1));
    }

    #[test]
    fn zero_polynomial_is_error() {
        assert!(find_roots(&CPoly::from_real(&[0.0, 0.0]), DEFAULT_ROOT_TOL).is_err());
    }

    #[test]
    fn close_distinct_roots_stay_separate() {
        let p = CPoly::from_roots(&[C64::new(1.0, 0.0), C64::new(1.0 + 1e-5, 0.0)]);
        let r = find_roots(&p, DEFAULT_ROOT_TOL).unwrap();
        assert_eq!(r.len(), 2);
    }
}
