//! Jacobi elliptic functions by the arithmetic-geometric mean and descending Landen transformation.

use crate::error::{Error, Result};
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JacobiValues {
    pub sn: f64,
    pub cn: f64,
    pub dn: f64,
}

fn check_parameter(m: f64) -> Result<()> {
    if (0.0..1.0).contains(&m) {
        Ok(())
    } else {
        Err(Error::domain("families", format!("elliptic parameter m = {m} outside [0, 1)")))
    }
}

/// Complete elliptic integral of the first kind `K(m)`.
pub fn complete_k(m: f64) -> Result<f64> {
    check_parameter(m)?;
    let (mut a, mut b) = (1.0f64, (1.0 - m).sqrt());
    for _ in 0..64 {
        if (a - b).abs() <= 4e-16 * a {
            break;
        }
        let an = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = an;
    }
    Ok(PI / (2.0 * a))
}

pub fn jacobi(u: f64, m: f64) -> Result<JacobiValues> {
    check_parameter(m)?;
    if m == 0.0 {
        return Ok(JacobiValues { sn: u.sin(), cn: u.cos(), dn: 1.0 });
    }
    let period = 4.0 * complete_k(m)?;
    let u = u - period * (u / period).round();

    let mut a = vec![1.0f64];
    let mut c = vec![m.sqrt()];
    let mut b = (1.0 - m).sqrt();
    while c.last().unwrap().abs() > 1e-16 || a.len() < 2 {
        let an = *a.last().unwrap();
        a.push(0.5 * (an + b));
        c.push(0.5 * (an - b));
        b = (an * b).sqrt();
        if a.len() > 40 {
            break;
        }
    }
    let n = a.len() - 1;
    let mut phi = vec![0.0; n + 1];
    phi[n] = 2f64.powi(n as i32) * a[n] * u;
    for k in (1..=n).rev() {
        phi[k - 1] = 0.5 * (phi[k] + (c[k] / a[k] * phi[k].sin()).asin());
    }
    let sn = phi[0].sin();
    let cn = phi[0].cos();
    let den = (phi[1] - phi[0]).cos();
    let dn = if den.abs() > 1e-3 { cn / den } else { (1.0 - m * sn * sn).sqrt() };
    Ok(JacobiValues { sn, cn, dn })
}

pub fn jacobi_dn(u: f64, m: f64) -> Result<f64> {
    jacobi(u, m).map(|j| j.dn)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Incomplete integral F(phi | m) by composite Gauss-Legendre, then invert by bisection.
    fn dn_by_inversion(u: f64, m: f64) -> f64 {
        let f = |phi: f64| {
            let (x, w) = gauss_legendre_8();
            let pieces = 64;
            let h = phi / pieces as f64;
            let mut s = 0.0;
            for p in 0..pieces {
                let mid = (p as f64 + 0.5) * h;
                for (xi, wi) in x.iter().zip(&w) {
                    let t = mid + 0.5 * h * xi;
                    s += 0.5 * h * wi / (1.0 - m * t.sin().powi(2)).sqrt();
                }
            }
            s
        };
        let (mut lo, mut hi) = (0.0, 10.0 * (1.0 + u));
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) < u {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let phi = 0.5 * (lo + hi);
        (1.0 - m * phi.sin().powi(2)).sqrt()
    }

    fn gauss_legendre_8() -> ([f64; 8], [f64; 8]) {
        let x = [
            -0.960_289_856_497_536_3,
            -0.796_666_477_413_626_7,
            -0.525_532_409_916_329,
            -0.183_434_642_495_649_8,
            0.183_434_642_495_649_8,
            0.525_532_409_916_329,
            0.796_666_477_413_626_7,
            0.960_289_856_497_536_3,
        ];
        let w = [
            0.101_228_536_290_376_26,
            0.222_381_034_453_374_47,
            0.313_706_645_877_887_3,
            0.362_683_783_378_362,
            0.362_683_783_378_362,
            0.313_706_645_877_887_3,
            0.222_381_034_453_374_47,
            0.101_228_536_290_376_26,
        ];
        (x, w)
    }

    #[test]
    fn trivial_values() {
        for u in [-3.0, 0.0, 0.7, 12.0] {
            assert_eq!(jacobi_dn(u, 0.0).unwrap(), 1.0);
        }
        for m in [0.1, 0.5, 0.99] {
            assert!((jacobi_dn(0.0, m).unwrap() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn quarter_period_identity() {
        let m = 0.5;
        let k = complete_k(m).unwrap();
        // K(1/2) = Gamma(1/4)^2 / (4 sqrt(pi))
        assert!((k - 1.854_074_677_301_372).abs() < 1e-14);
        assert!((jacobi_dn(k, m).unwrap() - (1.0 - m).sqrt()).abs() < 1e-13);
    }

    #[test]
    fn matches_integral_inversion() {
        for &m in &[0.1, 0.64, 0.9] {
            for &u in &[0.2, 0.9, 1.7, 2.4] {
                let a = jacobi_dn(u, m).unwrap();
                let b = dn_by_inversion(u, m);
                assert!((a - b).abs() < 1e-12, "m={m} u={u}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn pythagorean_identities() {
        let j = jacobi(1.3, 0.7).unwrap();
        assert!((j.sn * j.sn + j.cn * j.cn - 1.0).abs() < 1e-14);
        assert!((j.dn * j.dn + 0.7 * j.sn * j.sn - 1.0).abs() < 1e-14);
    }

    #[test]
    fn parameter_out_of_range() {
        assert!(jacobi_dn(0.3, 1.0).is_err());
        assert!(jacobi_dn(0.3, -0.1).is_err());
    }

    proptest::proptest! {
        #[test]
        fn dn_has_period_2k(u in -5.0f64..5.0, m in 0.0f64..0.95) {
            let k = complete_k(m).unwrap();
            let a = jacobi_dn(u + 2.0 * k, m).unwrap();
            let b = jacobi_dn(u, m).unwrap();
            proptest::prop_assert!((a - b).abs() < 1e-12);
        }
    }
}
