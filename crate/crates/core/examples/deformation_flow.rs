//! Deformations of revolution data: a fixed polynomial field, the Moebius field and a branch-point target.

use cmc_core::families::{revolution_family, RevolutionParams};
use cmc_core::flow::{b_root_delta, flow_integrate, CField, FlowControls};
use cmc_core::poly::RealPolynomial;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let data = revolution_family(&RevolutionParams::new(0.0, 0.25)?)?;
    let controls = FlowControls::default();
    let samples = [0.025, 0.05, 0.075, 0.1];
    let fixed = CField::Fixed(RealPolynomial::new(vec![0.05, -0.03, 0.08]));
    for (name, field) in [("fixed c", fixed), ("moebius", CField::Mobius)] {
        let traj = flow_integrate(&data, &field, 0.1, &samples, &controls)?;
        let last = traj.last();
        println!(
            "{name}: {} rows, kappa = ({:.6}, {:.6}), H = {:.6}, closing {:.2e}, period drift {:.2e}",
            traj.states.len(),
            last.data.kappa0,
            last.data.kappa1,
            last.mean_curvature,
            traj.max_closing_residual(),
            traj.max_period_drift()
        );
    }
    let moved = data.mobius(0.3)?;
    let traj = flow_integrate(&moved, &CField::BranchTarget(0), 0.05, &samples[..2], &controls)?;
    for s in &traj.states {
        let (beta, d) = b_root_delta(&s.data, 0)?;
        println!("t = {:.4}: beta = {beta:.6}, Delta(beta) = {d:.6}", s.t);
    }
    Ok(())
}
