//! Scaling every energy and rate by the same factor leaves η unchanged.

use enaqt::bath::BathSpec;
use enaqt::landscape::governing_parameter;
use enaqt::model::{energy_scale_g, fmo_canonical, ExcitonModel};
use enaqt::solver::{ete, TransferProblem};

fn main() -> enaqt::Result<()> {
    let m = fmo_canonical();
    // Fixed Matsubara count: the default changes with temperature.
    let bath = BathSpec { matsubara_terms: Some(100), ..BathSpec::canonical() };
    let base = ete(&TransferProblem::new(m.clone(), bath)?)?;
    println!("base η = {base:.10}");
    for alpha in [0.1, 0.5, 2.0, 10.0] {
        let model = ExcitonModel {
            hamiltonian: &m.hamiltonian * alpha,
            trap_rate: m.trap_rate * alpha,
            loss_rate: m.loss_rate * alpha,
            ..m.clone()
        };
        let b = BathSpec {
            lambda_cm1: bath.lambda_cm1 * alpha,
            gamma_cm1: bath.gamma_cm1 * alpha,
            temperature_k: bath.temperature_k * alpha,
            ..bath
        };
        let g = energy_scale_g(&model.hamiltonian);
        let eta = ete(&TransferProblem::new(model, b)?)?;
        println!(
            "α = {alpha:>4}: η = {eta:.10}  Δ = {:.1e}  Λ = {:.4}",
            eta - base,
            governing_parameter(b.lambda_cm1, b.temperature_k, b.gamma_cm1, g)
        );
    }
    Ok(())
}
