//! The trace function on the real line: samples, branch points and weighted counts.

use cmc_core::families::{clifford_data, revolution_family, RevolutionParams};
use cmc_core::mat2::C64;
use cmc_core::spectral::{delta, g_invariant, real_branch_points};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cases = [("clifford", clifford_data()), ("revolution (0, 0.75)", revolution_family(&RevolutionParams::new(0.0, 0.75)?)?)];
    for (name, data) in cases {
        println!("{name}");
        for k in 0..=8 {
            let x = -2.0 + 0.5 * k as f64;
            println!("  Delta({x:>5.2}) = {:>10.6}", delta(&data, C64::new(x, 0.0))?.re);
        }
        let r = real_branch_points(&data, (-3.0, 3.0), 1e-10)?;
        for p in &r.points {
            println!("  branch point {:>10.6}, Delta {:>9.6}, order {}", p.kappa, p.delta, p.order);
        }
        println!("  max |Delta| on [-3, 3]: {:.6}, G = {}", r.max_abs_delta, g_invariant(&data)?.g);
    }
    Ok(())
}
