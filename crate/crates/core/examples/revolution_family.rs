//! The one-sided revolution family over a grid of (H, alpha): closing conditions and the closed form of ln mu.

use cmc_core::families::{revolution_family, revolution_ln_mu, RevolutionParams};
use cmc_core::spectral::{check_conditions, ln_mu, CurvePoint, CHECK_TOL};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!("{:>5} {:>6} {:>9} {:>9} {:>6} {:>10} {:>10}", "H", "alpha", "kappa0", "kappa1", "pass", "residual", "ln mu err");
    for h in [0.0, 0.5, 2.0] {
        for alpha in [0.0, 0.25, 0.75] {
            let p = RevolutionParams::new(h, alpha)?;
            let data = revolution_family(&p)?;
            let r = check_conditions(&data, CHECK_TOL)?;
            let k = 1.7;
            let err = (ln_mu(&data, &CurvePoint::real(k))?.im - revolution_ln_mu(&p, k)).abs();
            println!(
                "{h:>5} {alpha:>6} {:>9.5} {:>9.5} {:>6} {:>10.2e} {err:>10.2e}",
                data.kappa0,
                data.kappa1,
                r.pass(),
                r.c.residual0.max(r.c.residual1)
            );
        }
    }
    Ok(())
}
