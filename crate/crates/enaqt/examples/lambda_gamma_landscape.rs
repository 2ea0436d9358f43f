//! η over a log-spaced (λ, γ) grid with gradient and Hessian norms.

use enaqt::bath::BathSpec;
use enaqt::landscape::{sweep, GridAxis, HessianNorm, Parameter, Scale};
use enaqt::model::fmo_canonical;
use enaqt::solver::ProblemOptions;

fn main() -> enaqt::Result<()> {
    let lambda = GridAxis::new(Parameter::Lambda, 1.0, 500.0, 12, Scale::Log)?;
    let gamma = GridAxis::new(Parameter::Gamma, 5.0, 500.0, 10, Scale::Log)?;
    let grid = sweep(&fmo_canonical(), &BathSpec::canonical(), &ProblemOptions::default(), lambda, gamma)?;

    print!("λ \\ γ  ");
    for g in gamma.values() {
        print!("{g:>6.0}");
    }
    println!();
    for (i, l) in lambda.values().iter().enumerate() {
        print!("{l:>6.1} ");
        for j in 0..gamma.points {
            print!("{:>6.3}", grid.ete[(i, j)]);
        }
        println!();
    }
    if let Some((i, j, v)) = grid.max() {
        println!("max η = {v:.4} at λ = {:.1}, γ = {:.1}", lambda.values()[i], gamma.values()[j]);
    }
    println!("{} clamped cells, {} failures", grid.clamped.len(), grid.failures.len());

    // Norms are defined on the interior, two cells in from each edge.
    let grad = grid.gradient_norm()?;
    let hess = grid.hessian_norm(HessianNorm::Spectral)?;
    let flattest = (0..grad.len()).min_by(|&a, &b| grad[a].total_cmp(&grad[b])).unwrap();
    let (gi, gj) = (flattest % grad.nrows(), flattest / grad.nrows());
    println!(
        "flattest interior point: λ = {:.1}, γ = {:.1} (|∇η| = {:.2e}, ‖H‖ = {:.2e})",
        lambda.values()[gi + 2],
        gamma.values()[gj + 2],
        grad[(gi, gj)],
        hess[(gi, gj)]
    );
    Ok(())
}
