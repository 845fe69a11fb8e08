//! Adaptive Gauss-Legendre quadrature of complex integrands over real intervals.

use crate::error::{Error, Result};
use crate::mat2::{C64, ZERO};
use gauss_quad::legendre::GaussLegendre;
use std::num::NonZeroUsize;
use std::sync::OnceLock;

pub const ORDER: usize = 16;
const MAX_DEPTH: usize = 100;
const MAX_PANELS: usize = 200_000;

fn rule() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| {
        GaussLegendre::new(NonZeroUsize::new(ORDER).expect("nonzero order"))
            .as_node_weight_pairs()
            .to_vec()
    })
}

/// Fixed-order rule on `[a, b]`.
pub fn gauss<F: Fn(f64) -> C64>(f: &F, a: f64, b: f64) -> C64 {
    let (half, mid) = (0.5 * (b - a), 0.5 * (a + b));
    rule().iter().map(|&(x, w)| f(mid + half * x) * w).sum::<C64>() * half
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadResult {
    pub value: C64,
    /// Sum of accepted local error estimates.
    pub error: f64,
    pub panels: usize,
}

/// Interval halving until each panel's one-versus-two estimate meets its share of `tol`
/// (absolute, scaled by `max(1, |integral|)`), or a floor of `tol/1000` for short panels.
pub fn adaptive<F: Fn(f64) -> C64>(f: F, a: f64, b: f64, tol: f64) -> Result<QuadResult> {
    if a == b {
        return Ok(QuadResult { value: ZERO, error: 0.0, panels: 0 });
    }
    let whole = gauss(&f, a, b);
    let scale = whole.norm().max(1.0);
    let mut stack = vec![(a, b, whole, 0usize)];
    let mut value = ZERO;
    let mut error = 0.0;
    let mut panels = 0;
    while let Some((lo, hi, est, depth)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        let left = gauss(&f, lo, mid);
        let right = gauss(&f, mid, hi);
        let local = (left + right - est).norm();
        let share = (tol * scale * ((hi - lo) / (b - a)).abs()).max(1e-3 * tol * scale).max(1e-15 * scale);
        panels += 1;
        if !local.is_finite() {
            return Err(Error::convergence("quad", format!("non-finite integrand on [{lo}, {hi}]"), f64::NAN));
        }
        if local <= share || depth >= MAX_DEPTH || panels > MAX_PANELS {
            if local > share {
                return Err(Error::convergence("quad", format!("no convergence on [{lo}, {hi}]"), local));
            }
            value += left + right;
            error += local;
        } else {
            stack.push((mid, hi, right, depth + 1));
            stack.push((lo, mid, left, depth + 1));
        }
    }
    Ok(QuadResult { value, error, panels })
}
