//! The acceptance suite: thirteen numerical criteria with pinned tolerances, each reported as one pass/fail line.

use crate::error::Result;
use crate::families::{
    clifford_data, clifford_marked, clifford_periods, delaunay_v, delaunay_xi, delaunay_xi_metric, delaunay_xi_normalized,
    flat_family, flat_frame, flat_xi, genus0_closing, revolution_family, revolution_xi, DelaunayParams, RevolutionParams,
};
use crate::flow::{flow_integrate, solve_ab_dot, step, CField, FlowControls};
use crate::immersion::{sample_surface, sinh_gordon_residual, summarize_geometry, surface_point, GridSpec};
use crate::iwasawa::{frame, killing_field, FactorDiagnostics, IwasawaConfig};
use crate::loop_algebra::{real_from_parameters, LaurentMatrix, SimpleFactorPoint};
use crate::mat2::{C64, I, ONE};
use crate::poly::{CPoly, RealPolynomial};
use crate::spectral::{check_conditions, delta, ln_mu, real_branch_points, CurvePoint, SpectralData, CHECK_TOL};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;
use std::fmt;
use std::time::Instant;

pub const FLAT_FRAME_TOL: f64 = 1e-8;
pub const FLAT_FRAME_SECONDS: f64 = 30.0;
pub const PERIODICITY_TOL: f64 = 1e-6;
pub const FACTOR_TOL: f64 = 1e-9;
pub const ISOSPECTRAL_TOL: f64 = 1e-8;
pub const METRIC_TOL: f64 = 1e-5;
pub const CONVERGENCE_RATIO: (f64, f64) = (3.5, 4.5);
pub const GEOMETRY_REL_TOL: f64 = 0.01;
pub const INTEGRABILITY_TOL: f64 = 1e-10;
pub const CLOSED_FORM_TOL: f64 = 1e-14;
pub const CLOSING_TOL: f64 = 1e-6;
pub const DRIFT_TOL: f64 = 1e-6;
pub const DOT_DELTA_TOL: f64 = 1e-4;
pub const DRESSING_TOL: f64 = 1e-10;
pub const BRANCH_TOL: f64 = 1e-8;
pub const GENUS0_TOL: f64 = 1e-12;

pub const CRITERIA: [(u8, &str); 13] = [
    (1, "flat-frame oracle"),
    (2, "Clifford periodicity"),
    (3, "unitarity and plus structure"),
    (4, "isospectrality"),
    (5, "Delaunay metric"),
    (6, "sinh-Gordon convergence"),
    (7, "geometry constants"),
    (8, "integrability solve"),
    (9, "flow invariance"),
    (10, "revolution family"),
    (11, "dressing"),
    (12, "branch-point detection"),
    (13, "genus-zero closing"),
];

#[derive(Clone, Debug, Serialize)]
pub struct Criterion {
    pub id: u8,
    pub name: &'static str,
    pub pass: bool,
    /// Worst measured quantity.
    pub measured: f64,
    pub threshold: String,
    pub detail: String,
    pub seconds: f64,
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {:>2} {}: {:.3e} ({}) {} [{:.1} s]",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.measured,
            self.threshold,
            self.detail,
            self.seconds
        )
    }
}

struct Outcome {
    pass: bool,
    measured: f64,
    threshold: String,
    detail: String,
}

fn outcome(pass: bool, measured: f64, threshold: impl Into<String>, detail: impl Into<String>) -> Outcome {
    Outcome { pass, measured, threshold: threshold.into(), detail: detail.into() }
}

/// Runs one criterion; numerical errors count as failures with the error text as detail.
pub fn run_criterion(id: u8, seed: u64) -> Criterion {
    let name = CRITERIA.iter().find(|c| c.0 == id).map_or("unknown", |c| c.1);
    let start = Instant::now();
    let result = match id {
        1 => flat_frame_oracle(),
        2 => clifford_periodicity(seed),
        3 => factorization_structure(seed),
        4 => isospectrality(),
        5 => delaunay_metric(),
        6 => sinh_gordon_convergence(),
        7 => geometry_constants(),
        8 => integrability(seed),
        9 => flow_invariance(seed),
        10 => revolution(),
        11 => dressing(seed),
        12 => branch_points(),
        13 => genus_zero(),
        _ => Ok(outcome(false, f64::NAN, "-", format!("no criterion {id}"))),
    };
    let seconds = start.elapsed().as_secs_f64();
    let o = result.unwrap_or_else(|e| outcome(false, f64::NAN, "-", format!("error: {e}")));
    let pass = o.pass && if id == 1 { seconds < FLAT_FRAME_SECONDS } else { true };
    Criterion { id, name, pass, measured: o.measured, threshold: o.threshold, detail: o.detail, seconds }
}

pub fn run_all(seed: u64) -> Vec<Criterion> {
    CRITERIA.iter().map(|c| run_criterion(c.0, seed)).collect()
}

fn cfg() -> IwasawaConfig {
    IwasawaConfig::default()
}

fn flat_frame_oracle() -> Result<Outcome> {
    let xi = flat_xi();
    let zs: Vec<C64> = (0..17).flat_map(|j| (0..17).map(move |k| C64::new(-2.0 + 0.25 * j as f64, -2.0 + 0.25 * k as f64))).collect();
    let lambdas: Vec<C64> = (0..16).map(|k| C64::from_polar(1.0, 2.0 * PI * (k as f64 + 0.5) / 16.0)).collect();
    let errs: Vec<f64> = zs
        .par_iter()
        .map(|z| {
            let fp = frame(&xi, *z, &cfg())?;
            Ok(lambdas.iter().map(|l| (fp.f.eval(*l) - flat_frame(*z, *l)).max_abs()).fold(0.0, f64::max))
        })
        .collect::<Result<Vec<_>>>()?;
    let worst = errs.into_iter().fold(0.0, f64::max);
    Ok(outcome(worst < FLAT_FRAME_TOL, worst, format!("< {FLAT_FRAME_TOL:e}, < {FLAT_FRAME_SECONDS} s"), "17x17 grid on [-2,2]^2, 16 lambdas"))
}

fn clifford_periodicity(seed: u64) -> Result<Outcome> {
    let xi = flat_xi();
    let m = clifford_marked();
    let (w1, w2) = clifford_periods();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let probes: Vec<C64> = (0..100).map(|_| C64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))).collect();
    let errs: Vec<(f64, f64)> = probes
        .par_iter()
        .map(|z| {
            let f = surface_point(&xi, &m, *z, &cfg())?.0;
            let f1 = surface_point(&xi, &m, *z + w1, &cfg())?.0;
            let f2 = surface_point(&xi, &m, *z + w2, &cfg())?.0;
            Ok(((f1 - f).norm(), (f2 - f).norm()))
        })
        .collect::<Result<Vec<_>>>()?;
    let e1 = errs.iter().map(|e| e.0).fold(0.0, f64::max);
    let e2 = errs.iter().map(|e| e.1).fold(0.0, f64::max);
    let worst = e1.max(e2);
    Ok(outcome(worst < PERIODICITY_TOL, worst, format!("< {PERIODICITY_TOL:e}"), format!("100 probes; real period {e1:.2e}, imaginary period {e2:.2e}")))
}

fn factorization_structure(seed: u64) -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 3);
    let mut cases: Vec<(&str, LaurentMatrix)> = vec![
        ("flat", flat_xi()),
        ("delaunay", delaunay_xi(0.3, 0.5)),
        ("delaunay-normalized", delaunay_xi_normalized(0.3, 0.5)),
        ("revolution", revolution_xi(&RevolutionParams::new(0.0, 0.25)?)?.0),
    ];
    for g in 1..3 {
        let params: Vec<f64> = (0..24).map(|_| rng.gen_range(-0.5..0.5)).collect();
        let mut xi = real_from_parameters(g, &params);
        xi.coeffs[0] = xi.coeffs[0] + crate::mat2::Mat2::eps_plus() * C64::new(0.5, 0.0);
        let last = xi.coeffs.len() - 1;
        if g % 2 == 0 {
            xi.coeffs[last] = -xi.coeffs[0].adjoint();
        }
        if xi.reality_check(1e-12).ok {
            cases.push(if g == 1 { ("random g=1", xi) } else { ("random g=2", xi) });
        }
    }
    let mut worst = FactorDiagnostics::empty();
    let mut count = 0;
    for (_, xi) in &cases {
        for k in 0..12 {
            let z = C64::new(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5)) * if k == 0 { 0.0 } else { 1.0 };
            worst = worst.worst(&frame(xi, z, &cfg())?.diagnostics);
            count += 1;
        }
    }
    let measured = worst.unitarity_defect.max(worst.reconstruction_defect).max(worst.b0_lower).max(worst.b0_max_diag_imag);
    let pass = worst.meets(FACTOR_TOL);
    Ok(outcome(
        pass,
        measured,
        format!("< {FACTOR_TOL:e}"),
        format!(
            "{count} frames over {} initial values; unitarity {:.1e}, reconstruction {:.1e}, B(0) lower {:.1e}, min diagonal {:.3}",
            cases.len(),
            worst.unitarity_defect,
            worst.reconstruction_defect,
            worst.b0_lower,
            worst.b0_min_diagonal
        ),
    ))
}

fn isospectrality() -> Result<Outcome> {
    let xi = delaunay_xi(0.3, 0.5);
    let a = xi.det_lambda_poly();
    let end = C64::new(1.5, 2.0);
    let errs: Vec<f64> = (0..64)
        .into_par_iter()
        .map(|k| {
            let z = end * (k as f64 / 63.0);
            let zeta = killing_field(&xi, z, &cfg())?.zeta;
            Ok(zeta.det_lambda_poly().sub(&a).max_abs())
        })
        .collect::<Result<Vec<_>>>()?;
    let worst = errs.into_iter().fold(0.0, f64::max);
    Ok(outcome(worst < ISOSPECTRAL_TOL, worst, format!("< {ISOSPECTRAL_TOL:e}"), "(a_r, b_r) = (0.3, 0.5), 64 points from 0 to 1.5+2i"))
}

fn delaunay_metric() -> Result<Outcome> {
    let p = DelaunayParams::new(0.3, 0.5)?;
    let h = 0.02;
    let period = p.period();
    let ny = (period / h).ceil() as usize + 5;
    let grid = GridSpec::new(C64::new(-2.0 * h, -2.0 * h), h, h, 5, ny)?;
    let s = sample_surface(&delaunay_xi_metric(&p), &clifford_marked(), &grid, &cfg())?;
    let mut worst: f64 = 0.0;
    for k in 2..ny - 2 {
        let g = s.geometry[grid.index(2, k)].ok_or_else(|| crate::error::Error::geometry("verify", "degenerate metric"))?;
        worst = worst.max((g.v - delaunay_v(grid.z(2, k).im, &p)?).abs());
    }
    Ok(outcome(worst < METRIC_TOL, worst, format!("< {METRIC_TOL:e}"), format!("one period {period:.6} along the profile, h = {h}")))
}

/// Residual maxima on a fixed window for spacings `h` and `h/2`.
pub fn sinh_gordon_ratio(h: f64) -> Result<(f64, f64)> {
    let xi = delaunay_xi_normalized(0.3, 0.5);
    let (lo, hi) = (C64::new(0.5, 0.6), C64::new(0.9, 1.0));
    let run = |h: f64| -> Result<f64> {
        let margin = 4.0 * h;
        let n = ((hi.re - lo.re + 2.0 * margin) / h).round() as usize + 1;
        let grid = GridSpec::new(lo - C64::new(margin, margin), h, h, n, n)?;
        let s = sample_surface(&xi, &clifford_marked(), &grid, &cfg())?;
        Ok(sinh_gordon_residual(&s).max_in_window(&grid, lo, hi))
    };
    Ok((run(h)?, run(0.5 * h)?))
}

fn sinh_gordon_convergence() -> Result<Outcome> {
    let (r1, r2) = sinh_gordon_ratio(0.05)?;
    let ratio = r1 / r2;
    let (lo, hi) = CONVERGENCE_RATIO;
    Ok(outcome(
        ratio >= lo && ratio <= hi,
        ratio,
        format!("in [{lo}, {hi}]"),
        format!("Delaunay (0.3, 0.5) on the sinh-Gordon slice; max residual {r1:.3e} at h = 0.05, {r2:.3e} at h = 0.025"),
    ))
}

fn geometry_constants() -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    let mut notes = Vec::new();
    let (flat, fm) = flat_family(PI / 6.0)?;
    for (name, xi, m) in [("flat t0 = pi/6", flat, fm), ("Clifford", flat_xi(), clifford_marked())] {
        let grid = GridSpec::new(C64::new(-0.5, -0.5), 0.05, 0.05, 21, 21)?;
        let s = sample_surface(&xi, &m, &grid, &cfg())?;
        let sum = summarize_geometry(&s);
        let ex = m.expected_invariants();
        let eh = sum.max_h_error / ex.h.abs().max(1.0);
        let eq = sum.max_q_error / ex.q.norm();
        worst = worst.max(eh).max(eq);
        notes.push(format!("{name}: H {:.4} vs {:.4}, Q {:.4} vs {:.4}", sum.mean_h, ex.h, sum.mean_q, ex.q));
    }
    Ok(outcome(worst < GEOMETRY_REL_TOL, worst, format!("< {GEOMETRY_REL_TOL} relative"), notes.join("; ")))
}

fn random_poly(rng: &mut ChaCha8Rng, deg: usize) -> RealPolynomial {
    RealPolynomial::new((0..=deg).map(|_| rng.gen_range(-1.0..1.0)).collect())
}

fn random_positive_monic(rng: &mut ChaCha8Rng, g: usize) -> RealPolynomial {
    let mut a = RealPolynomial::new(vec![1.0]);
    for _ in 0..g {
        let (re, im): (f64, f64) = (rng.gen_range(-1.0..1.0), rng.gen_range(0.2..1.5));
        a = a.mul(&RealPolynomial::new(vec![re * re + im * im, -2.0 * re, 1.0]));
    }
    a
}

fn integrability(seed: u64) -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 8);
    let mut worst: f64 = 0.0;
    let mut solved = 0;
    for _ in 0..100 {
        for g in 0..3 {
            let a = random_positive_monic(&mut rng, g);
            let b = random_poly(&mut rng, g + 1);
            let c = random_poly(&mut rng, g + 1);
            worst = worst.max(solve_ab_dot(&a, &b, &c)?.residual);
            solved += 1;
        }
    }
    let (b0, b1, c0, c1) = (0.37, -0.81, 1.3, 0.45);
    let d = solve_ab_dot(&RealPolynomial::new(vec![1.0]), &RealPolynomial::new(vec![b0, b1]), &RealPolynomial::new(vec![c0, c1]))?;
    let closed = (d.b_dot.coeff(0) - c1).abs().max((d.b_dot.coeff(1) + c0).abs()).max(d.b_dot.coeff(2).abs());
    let pass = worst < INTEGRABILITY_TOL && closed < CLOSED_FORM_TOL && d.a_dot.degree().is_none();
    Ok(outcome(
        pass,
        worst,
        format!("< {INTEGRABILITY_TOL:e}; closed form < {CLOSED_FORM_TOL:e}"),
        format!("{solved} random systems at g = 0, 1, 2; g = 0 closed form deviation {closed:.1e}"),
    ))
}

/// `(k^2+1) c Delta'/b` with `Delta' = 2 sinh(ln mu) 2 pi i b/((k^2+1) nu)`.
fn dot_delta_formula(data: &SpectralData, c: &RealPolynomial, z: C64) -> Result<C64> {
    let p = CurvePoint::new(z, 1);
    let b = data.b.eval_c(z);
    let dprime = 2.0 * ln_mu(data, &p)?.sinh() * 2.0 * PI * I * b / ((z * z + 1.0) * data.nu(&p));
    Ok((z * z + 1.0) * c.eval_c(z) * dprime / b)
}

fn flow_invariance(seed: u64) -> Result<Outcome> {
    let data = revolution_family(&RevolutionParams::new(0.0, 0.25)?)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 9);
    let mut closing: f64 = 0.0;
    let mut drift: f64 = 0.0;
    let mut fd: f64 = 0.0;
    let runs = 5;
    for _ in 0..runs {
        let c = random_poly(&mut rng, data.genus() + 1);
        let c = c.scale(0.1 / c.norm());
        let traj = flow_integrate(&data, &CField::Fixed(c.clone()), 0.1, &[0.025, 0.05, 0.075], &FlowControls::default())?;
        if let Some(reason) = traj.stop {
            return Ok(outcome(false, f64::NAN, "-", format!("flow stopped: {reason}")));
        }
        closing = closing.max(traj.max_closing_residual());
        drift = drift.max(traj.max_period_drift());
        let h = 1e-3;
        let fwd = step(&data, &CField::Fixed(c.clone()), h)?;
        let bwd = step(&data, &CField::Fixed(c.clone()), -h)?;
        for k in 0..10 {
            let z = C64::new(-2.25 + 0.5 * k as f64, 0.0);
            let num = (delta(&fwd, z)? - delta(&bwd, z)?) / (2.0 * h);
            fd = fd.max((num - dot_delta_formula(&data, &c, z)?).norm());
        }
    }
    let pass = closing < CLOSING_TOL && drift < DRIFT_TOL && fd < DOT_DELTA_TOL;
    Ok(outcome(
        pass,
        closing.max(drift),
        format!("closing and drift < {CLOSING_TOL:e}; dDelta/dt < {DOT_DELTA_TOL:e}"),
        format!("{runs} flows on (H, alpha) = (0, 0.25) to t = 0.1; closing {closing:.1e}, period drift {drift:.1e}, dDelta/dt {fd:.1e}"),
    ))
}

fn revolution() -> Result<Outcome> {
    let mut failures = Vec::new();
    let mut worst: f64 = 0.0;
    for h in [0.0, 0.5, 2.0] {
        for alpha in [0.0, 0.25, 0.75] {
            let p = RevolutionParams::new(h, alpha)?;
            let data = revolution_family(&p)?;
            let r = check_conditions(&data, CHECK_TOL)?;
            worst = worst.max(r.c.residual0).max(r.c.residual1).max(r.b.period_defect);
            if !r.pass() {
                failures.push(format!("conditions at ({h}, {alpha})"));
            }
            if alpha > 0.0 {
                let scan = real_branch_points(&data, (-10.0, 10.0), 1e-10)?;
                let k0 = p.kappa_modulus();
                let dp = scan.double_point_candidates(1e-8);
                let only_marked = dp.len() == 2 && (dp[0].kappa + k0).abs() < 1e-8 && (dp[1].kappa - k0).abs() < 1e-8;
                if !only_marked {
                    failures.push(format!("Delta = +-2 points at ({h}, {alpha}): {:?}", dp.iter().map(|b| b.kappa).collect::<Vec<_>>()));
                }
            }
        }
    }
    let detail = if failures.is_empty() {
        "9 parameter pairs pass A-C; Delta = +-2 only at +-kappa0 (the b-root at 0 has |Delta| < 2)".to_string()
    } else {
        failures.join("; ")
    };
    Ok(outcome(failures.is_empty(), worst, format!("conditions at tol {CHECK_TOL:e}"), detail))
}

fn dressing(seed: u64) -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 11);
    let mut worst: f64 = 0.0;
    for k in 0..20 {
        let g = k % 3;
        let params: Vec<f64> = (0..24).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let xi = real_from_parameters(g, &params);
        let r: f64 = rng.gen_range(0.1..0.9);
        let beta = C64::from_polar(r, rng.gen_range(0.0..2.0 * PI));
        let dressed = xi.dress_simple_factor(SimpleFactorPoint::new(beta)?);
        let factor = CPoly::linear(-beta, ONE).mul(&CPoly::linear(ONE, -beta.conj()));
        let want = factor.mul(&factor).mul(&xi.det_lambda_poly());
        let got = dressed.det_lambda_poly();
        let err = got.sub(&want).max_abs() / want.max_abs().max(1.0);
        worst = worst.max(err);
    }
    Ok(outcome(worst < DRESSING_TOL, worst, format!("< {DRESSING_TOL:e}"), "20 random (xi, beta) at g = 0, 1, 2"))
}

fn branch_points() -> Result<Outcome> {
    let r = real_branch_points(&clifford_data(), (-3.0, 3.0), 1e-10)?;
    let want = [(-1.0, -2.0), (0.0, 2.0), (1.0, -2.0)];
    if r.points.len() != 3 {
        return Ok(outcome(false, f64::NAN, format!("< {BRANCH_TOL:e}"), format!("found {} points", r.points.len())));
    }
    let worst = r
        .points
        .iter()
        .zip(want)
        .map(|(p, (k, d))| (p.kappa - k).abs().max((p.delta - d).abs()))
        .fold(0.0, f64::max);
    Ok(outcome(worst < BRANCH_TOL, worst, format!("< {BRANCH_TOL:e}"), "Clifford data on [-3, 3]: kappa {-1, 0, 1}, Delta {-2, 2, -2}"))
}

fn genus_zero() -> Result<Outcome> {
    let b0 = 1.0 / 2f64.sqrt();
    let c = genus0_closing(1.0, b0, 0.0)?;
    let data = clifford_data();
    let d0 = (delta(&data, C64::new(1.0, 0.0))? + 2.0).norm();
    let d1 = (delta(&data, C64::new(-1.0, 0.0))? + 2.0).norm();
    let worst = c.residual_n.abs().max(c.residual_m.abs()).max(d0).max(d1);
    let pass = c.n == 1 && c.m == 1 && worst < GENUS0_TOL;
    Ok(outcome(pass, worst, format!("< {GENUS0_TOL:e}"), format!("(m, n) = ({}, {}), Delta(+-1) + 2 = {d0:.1e}, {d1:.1e}", c.m, c.n)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_criterion_fails() {
        let c = run_criterion(99, 0);
        assert!(!c.pass);
        assert!(c.to_string().starts_with("[FAIL] 99 unknown"));
    }

    #[test]
    fn genus_zero_line() {
        let c = run_criterion(13, 0);
        assert!(c.pass, "{c}");
        assert!(c.to_string().starts_with("[PASS] 13 genus-zero closing"));
    }
}
