//! Dressing by a simple factor: the determinant polynomial gains the factor (lambda - beta)^2 (1 - conj(beta) lambda)^2.

use cmc_core::families::flat_xi;
use cmc_core::loop_algebra::SimpleFactorPoint;
use cmc_core::mat2::{C64, ONE};
use cmc_core::poly::CPoly;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let xi = flat_xi();
    for beta in [C64::new(0.3, 0.2), C64::new(-0.5, 0.1), C64::new(0.0, 0.7)] {
        let dressed = xi.dress_simple_factor(SimpleFactorPoint::new(beta)?);
        let f = CPoly::linear(-beta, ONE).mul(&CPoly::linear(ONE, -beta.conj()));
        let want = f.mul(&f).mul(&xi.det_lambda_poly());
        let err = dressed.det_lambda_poly().sub(&want).max_abs();
        let real = dressed.reality_check(1e-10);
        println!("beta {beta:.2}: genus {} -> {}, determinant residual {err:.2e}, reality {} ({:.1e})", xi.g, dressed.g, real.ok, real.max_violation);
    }
    Ok(())
}
