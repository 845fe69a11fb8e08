//! Stereographic projection of sampled surfaces to R^3 and quad meshes with optional wrap-around stitching.

use crate::error::{Error, Result};
use crate::immersion::{from_r4, periodicity_check, to_r4, PeriodicityReport, SurfaceSample};
use crate::iwasawa::IwasawaConfig;
use crate::loop_algebra::LaurentMatrix;
use crate::mat2::{C64, Mat2};
use std::collections::HashSet;
use std::fmt::Write as _;

const MODULE: &str = "mesh";

/// Smallest admissible distance in R^4 between the surface and the projection pole.
pub const POLE_CLEARANCE: f64 = 1e-3;

/// Default pole `-I`.
pub fn default_pole() -> [f64; 4] {
    [-1.0, 0.0, 0.0, 0.0]
}

fn unit(p: &[f64; 4]) -> Result<[f64; 4]> {
    let n = p.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !(n > 1e-12) || !n.is_finite() {
        return Err(Error::domain(MODULE, "pole must be a nonzero point of R^4"));
    }
    Ok([p[0] / n, p[1] / n, p[2] / n, p[3] / n])
}

/// Projection from `pole` after the isometry `x -> -pole^{-1} x` taking the pole to `-I`.
pub fn stereographic(x: &[f64; 4], pole: &[f64; 4]) -> Result<[f64; 3]> {
    let p = unit(pole)?;
    let dist = x.iter().zip(&p).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
    if dist < POLE_CLEARANCE {
        return Err(Error::geometry(MODULE, format!("surface passes within {dist:.2e} of the pole; choose another pole")));
    }
    let pm: Mat2 = from_r4(&p);
    let m = to_r4(&(-(pm.adjoint() * from_r4(x))));
    let d = 1.0 + m[0];
    Ok([m[1] / d, m[2] / d, m[3] / d])
}

/// Among the signed coordinate axes and the normalized diagonals of R^4, the pole farthest from the sample.
pub fn auto_pole(sample: &SurfaceSample) -> [f64; 4] {
    let mut candidates = Vec::new();
    for k in 0..4 {
        for s in [-1.0, 1.0] {
            let mut p = [0.0; 4];
            p[k] = s;
            candidates.push(p);
        }
    }
    for bits in 0..16u32 {
        let sgn = |k: u32| if bits & (1 << k) == 0 { 0.5 } else { -0.5 };
        candidates.push([sgn(0), sgn(1), sgn(2), sgn(3)]);
    }
    let clearance = |p: &[f64; 4]| {
        sample
            .f
            .iter()
            .map(|x| x.iter().zip(p).map(|(a, b)| (a - b).powi(2)).sum::<f64>())
            .fold(f64::INFINITY, f64::min)
    };
    candidates
        .into_iter()
        .map(|p| (clearance(&p), p))
        .fold((f64::NEG_INFINITY, default_pole()), |best, c| if c.0 > best.0 + 1e-12 { c } else { best })
        .1
}

/// Checks whether the grid widths are periods and records the result in `sample.wrap`.
pub fn detect_wrap(sample: &mut SurfaceSample, xi: &LaurentMatrix, cfg: &IwasawaConfig, tol: f64) -> Result<(PeriodicityReport, PeriodicityReport)> {
    let g = sample.grid;
    let rx = periodicity_check(xi, &sample.marked, C64::new(g.nx as f64 * g.hx, 0.0), tol, cfg)?;
    let ry = periodicity_check(xi, &sample.marked, C64::new(0.0, g.ny as f64 * g.hy), tol, cfg)?;
    sample.wrap = (rx.pass, ry.pass);
    Ok((rx, ry))
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuadMesh {
    pub vertices: Vec<[f64; 3]>,
    /// Zero-based vertex indices in counterclockwise parameter order.
    pub faces: Vec<[usize; 4]>,
    pub stitched: (bool, bool),
}

impl QuadMesh {
    pub fn edge_count(&self) -> usize {
        let mut edges = HashSet::new();
        for f in &self.faces {
            for k in 0..4 {
                let (a, b) = (f[k], f[(k + 1) % 4]);
                edges.insert((a.min(b), a.max(b)));
            }
        }
        edges.len()
    }

    /// `V - E + F`.
    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edge_count() as i64 + self.faces.len() as i64
    }

    /// Edges belonging to exactly one face.
    pub fn boundary_edges(&self) -> usize {
        let mut count = std::collections::HashMap::new();
        for f in &self.faces {
            for k in 0..4 {
                let (a, b) = (f[k], f[(k + 1) % 4]);
                *count.entry((a.min(b), a.max(b))).or_insert(0usize) += 1;
            }
        }
        count.values().filter(|c| **c == 1).count()
    }

    /// `v x y z` lines then `f i j k l` lines, 1-based, 9 significant digits.
    pub fn to_obj(&self) -> String {
        let mut out = String::with_capacity(40 * (self.vertices.len() + self.faces.len()));
        for v in &self.vertices {
            let _ = writeln!(out, "v {:.8e} {:.8e} {:.8e}", v[0], v[1], v[2]);
        }
        for f in &self.faces {
            let _ = writeln!(out, "f {} {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1, f[3] + 1);
        }
        out
    }
}

/// Quad mesh of the projected sample; directions with `sample.wrap` set are closed up.
pub fn build_mesh(sample: &SurfaceSample, pole: &[f64; 4]) -> Result<QuadMesh> {
    let g = sample.grid;
    let vertices = sample.f.iter().map(|x| stereographic(x, pole)).collect::<Result<Vec<_>>>().map_err(|e| match e {
        Error::Geometry { module, msg } => Error::Geometry { module, msg: format!("{msg}; the pole {:?} clears this sample", auto_pole(sample)) },
        e => e,
    })?;
    let (wx, wy) = sample.wrap;
    let jmax = if wx { g.nx } else { g.nx - 1 };
    let kmax = if wy { g.ny } else { g.ny - 1 };
    let mut faces = Vec::with_capacity(jmax * kmax);
    for k in 0..kmax {
        for j in 0..jmax {
            let (j1, k1) = ((j + 1) % g.nx, (k + 1) % g.ny);
            faces.push([g.index(j, k), g.index(j1, k), g.index(j1, k1), g.index(j, k1)]);
        }
    }
    Ok(QuadMesh { vertices, faces, stitched: (wx, wy) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{clifford_marked, clifford_periods, flat_xi};
    use crate::immersion::{sample_surface, GridSpec, DEFAULT_PERIOD_TOL};
    use crate::mat2::ONE;

    #[test]
    fn identity_projects_to_origin() {
        let p = stereographic(&[1.0, 0.0, 0.0, 0.0], &default_pole()).unwrap();
        assert_eq!(p, [0.0, 0.0, 0.0]);
        assert!(stereographic(&[-1.0, 0.0, 0.0, 0.0], &default_pole()).is_err());
    }

    #[test]
    fn projection_is_inverse_of_standard_lift() {
        let y = [0.3, -1.2, 0.7];
        let r2: f64 = y.iter().map(|a| a * a).sum();
        let x = [(1.0 - r2) / (1.0 + r2), 2.0 * y[0] / (1.0 + r2), 2.0 * y[1] / (1.0 + r2), 2.0 * y[2] / (1.0 + r2)];
        let p = stereographic(&x, &default_pole()).unwrap();
        for k in 0..3 {
            assert!((p[k] - y[k]).abs() < 1e-14);
        }
    }

    #[test]
    fn other_poles_are_rotations() {
        let pole = [0.0, 0.0, 1.0, 0.0];
        let p = stereographic(&[0.0, 0.0, -1.0, 0.0], &pole).unwrap();
        assert!(p.iter().all(|c| c.abs() < 1e-14));
        let q = Mat2::new(ONE, ONE, -ONE, ONE) * (1.0 / 2f64.sqrt());
        let x = to_r4(&q);
        let r = stereographic(&x, &pole).unwrap();
        assert!(r.iter().all(|c| c.is_finite()));
    }

    fn clifford_sample(n: usize) -> SurfaceSample {
        let (w1, w2) = clifford_periods();
        let grid = GridSpec::periodic(w1.re, w2.im, n, n).unwrap();
        sample_surface(&flat_xi(), &clifford_marked(), &grid, &IwasawaConfig::default()).unwrap()
    }

    #[test]
    fn clifford_torus_closes() {
        let mut s = clifford_sample(12);
        let (rx, ry) = detect_wrap(&mut s, &flat_xi(), &IwasawaConfig::default(), DEFAULT_PERIOD_TOL).unwrap();
        assert!(rx.pass && ry.pass);
        let m = build_mesh(&s, &auto_pole(&s)).unwrap();
        assert_eq!(m.faces.len(), 144);
        assert_eq!(m.euler_characteristic(), 0);
        assert_eq!(m.boundary_edges(), 0);
    }

    #[test]
    fn default_pole_on_clifford_torus_is_rejected() {
        let s = clifford_sample(12);
        let err = build_mesh(&s, &default_pole()).unwrap_err().to_string();
        assert!(err.contains("clears this sample"), "{err}");
        let p = auto_pole(&s);
        let gap = s.f.iter().map(|x| x.iter().zip(&p).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt()).fold(f64::INFINITY, f64::min);
        assert!(gap > 0.5);
    }

    #[test]
    fn strip_has_boundary() {
        let mut s = clifford_sample(12);
        s.wrap = (true, false);
        let m = build_mesh(&s, &auto_pole(&s)).unwrap();
        assert_eq!(m.euler_characteristic(), 0);
        assert_eq!(m.boundary_edges(), 24);
        s.wrap = (false, false);
        let disc = build_mesh(&s, &auto_pole(&s)).unwrap();
        assert_eq!(disc.euler_characteristic(), 1);
    }

    #[test]
    fn obj_format() {
        let mut s = clifford_sample(6);
        s.wrap = (true, true);
        let text = build_mesh(&s, &auto_pole(&s)).unwrap().to_obj();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 72);
        assert!(lines[0].starts_with("v ") && lines[0].split(' ').count() == 4);
        assert!(!text.contains('\r'));
        assert_eq!(lines[36], "f 1 2 8 7");
        assert_eq!(lines[71], "f 36 31 1 6");
        let mantissa = lines[1].split(' ').nth(1).unwrap().split('e').next().unwrap();
        assert_eq!(mantissa.trim_start_matches('-').replace('.', "").len(), 9);
    }
}
