//! Parallel surfaces of a flat torus: numeric mean curvature against the prediction from the principal curvatures.

use cmc_core::families::flat_family;
use cmc_core::immersion::{focal_distance, parallel_surface, sample_surface, GridSpec};
use cmc_core::iwasawa::IwasawaConfig;
use cmc_core::mat2::C64;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (xi, marked) = flat_family(std::f64::consts::PI / 6.0)?;
    let grid = GridSpec::new(C64::new(0.0, 0.0), 0.05, 0.05, 16, 16)?;
    let s = sample_surface(&xi, &marked, &grid, &IwasawaConfig::default())?;
    let tf = focal_distance(&s);
    println!("focal distance {tf:.6}");
    for frac in [0.1, 0.4, 0.8] {
        let p = parallel_surface(&s, frac * tf)?;
        let h = p.sample.geometry.iter().flatten().map(|g| g.h).sum::<f64>() / p.sample.geometry.iter().flatten().count() as f64;
        println!("t = {:.4}: mean H {h:.6}, largest relative error {:.2e}", p.t, p.max_relative_error);
    }
    println!("beyond the focal distance: {}", parallel_surface(&s, 1.01 * tf).unwrap_err());
    Ok(())
}
