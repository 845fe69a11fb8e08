//! Clifford torus: periodic sample, wrap detection and a stitched OBJ mesh.
//!
//! `cargo run --release --example clifford_torus -- [out.obj]`

use cmc_core::families::{clifford_marked, clifford_periods, flat_xi};
use cmc_core::immersion::{sample_surface, summarize_geometry, GridSpec, DEFAULT_PERIOD_TOL};
use cmc_core::iwasawa::IwasawaConfig;
use cmc_core::mesh::{auto_pole, build_mesh, detect_wrap};
use cmc_core::output::write_atomic;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "clifford.obj".into());
    let cfg = IwasawaConfig::default();
    let (w1, w2) = clifford_periods();
    let grid = GridSpec::periodic(w1.re, w2.im, 48, 48)?;
    let mut sample = sample_surface(&flat_xi(), &clifford_marked(), &grid, &cfg)?;
    let (rx, ry) = detect_wrap(&mut sample, &flat_xi(), &cfg, DEFAULT_PERIOD_TOL)?;
    println!("periods {w1:.6}, {w2:.6}: closes {} / {} (signs {:?}, {:?})", rx.pass, ry.pass, rx.sign, ry.sign);
    let sum = summarize_geometry(&sample);
    println!("H = {:.3e}, Q = {:.6}, conformality {:.2e}", sum.mean_h, sum.mean_q, sum.max_conformality);
    let pole = auto_pole(&sample);
    let mesh = build_mesh(&sample, &pole)?;
    println!("pole {pole:?}: V = {}, F = {}, chi = {}, boundary edges {}", mesh.vertices.len(), mesh.faces.len(), mesh.euler_characteristic(), mesh.boundary_edges());
    write_atomic(out.as_ref(), mesh.to_obj().as_bytes())?;
    println!("wrote {out}");
    Ok(())
}
