//! Closing conditions, branch points and the G invariant for revolution data, and a perturbation that breaks them.

use cmc_core::families::{revolution_family, RevolutionParams};
use cmc_core::poly::RealPolynomial;
use cmc_core::spectral::{check_conditions, g_invariant, real_branch_points, SpectralData, CHECK_TOL};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let data = revolution_family(&RevolutionParams::new(0.5, 0.25)?)?;
    println!("data {}", data.to_json());
    println!("genus {}, H = {:.6}", data.genus(), data.mean_curvature());
    let r = check_conditions(&data, CHECK_TOL)?;
    println!("{}", serde_json::to_string_pretty(&r.to_json())?);
    for p in real_branch_points(&data, (-10.0, 10.0), 1e-10)?.points {
        println!("branch point {:>10.6}  Delta {:>9.6}  order {}  {:?}", p.kappa, p.delta, p.order, p.kind);
    }
    println!("G = {}", g_invariant(&data)?.g);

    let mut b = data.b.coeffs.clone();
    b[1] *= 1.01;
    let bent = SpectralData::new(data.a.clone(), RealPolynomial::new(b), data.kappa0, data.kappa1)?;
    let r = check_conditions(&bent, CHECK_TOL)?;
    println!("b scaled by 1.01: pass {}, closing residuals {:.3e}, {:.3e}", r.pass(), r.c.residual0, r.c.residual1);
    Ok(())
}
