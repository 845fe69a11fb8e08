//! Numerical extended frame of the flat initial value against its closed form.

use cmc_core::families::{flat_frame, flat_xi};
use cmc_core::iwasawa::{frame, IwasawaConfig};
use cmc_core::mat2::C64;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let xi = flat_xi();
    let cfg = IwasawaConfig::default();
    println!("{:>18} {:>12} {:>12} {:>12}", "z", "max error", "unitarity", "segments");
    for z in [C64::new(0.0, 0.0), C64::new(0.5, -0.25), C64::new(-1.5, 1.0), C64::new(2.0, 2.0)] {
        let fp = frame(&xi, z, &cfg)?;
        let err = (0..16)
            .map(|k| C64::from_polar(1.0, 2.0 * std::f64::consts::PI * (k as f64 + 0.5) / 16.0))
            .map(|l| (fp.f.eval(l) - flat_frame(z, l)).max_abs())
            .fold(0.0, f64::max);
        println!("{:>18} {:>12.3e} {:>12.3e} {:>12}", format!("{z:.2}"), err, fp.diagnostics.unitarity_defect, fp.segments);
    }
    Ok(())
}
