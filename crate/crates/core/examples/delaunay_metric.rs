//! Delaunay cylinders: metric profile against the elliptic closed form and second-order convergence of the
//! sinh-Gordon residual.

use cmc_core::families::{clifford_marked, delaunay_v, delaunay_xi_metric, DelaunayParams};
use cmc_core::immersion::{sample_surface, GridSpec};
use cmc_core::iwasawa::IwasawaConfig;
use cmc_core::mat2::C64;
use cmc_core::verify::sinh_gordon_ratio;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = DelaunayParams::new(0.3, 0.5)?;
    let h = 0.05;
    let n = (p.period() / h).ceil() as usize + 5;
    let grid = GridSpec::new(C64::new(-2.0 * h, -2.0 * h), h, h, 5, n)?;
    let s = sample_surface(&delaunay_xi_metric(&p), &clifford_marked(), &grid, &IwasawaConfig::default())?;
    println!("period {:.6}, modulus {:.6}", p.period(), p.modulus());
    println!("{:>8} {:>12} {:>12} {:>10}", "y", "v", "2b dn", "error");
    for k in (2..n - 2).step_by(8) {
        let y = grid.z(2, k).im;
        let v = s.geometry[grid.index(2, k)].map_or(f64::NAN, |g| g.v);
        let want = delaunay_v(y, &p)?;
        println!("{y:>8.4} {v:>12.8} {want:>12.8} {:>10.2e}", (v - want).abs());
    }
    let (r1, r2) = sinh_gordon_ratio(0.05)?;
    println!("sinh-Gordon residual {r1:.3e} (h = 0.05), {r2:.3e} (h = 0.025), ratio {:.3}", r1 / r2);
    Ok(())
}
