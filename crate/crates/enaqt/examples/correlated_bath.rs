//! Spatially correlated fluctuations, positive and negative.

use enaqt::bath::BathSpec;
use enaqt::model::{fmo_canonical, fmo_geometry};
use enaqt::solver::{ete, TransferProblem};

fn main() -> enaqt::Result<()> {
    let model = fmo_canonical().with_positions(fmo_geometry().positions());
    println!("R_cor (Å)   λ=35 (+)   λ=35 (−)   λ=350 (+)");
    for r in [0.0, 5.0, 15.0, 30.0, 100.0] {
        let run = |lambda: f64, sign: i32| -> enaqt::Result<f64> {
            let bath = BathSpec { lambda_cm1: lambda, r_cor_angstrom: r, correlation_sign: sign, ..BathSpec::canonical() };
            ete(&TransferProblem::new(model.clone(), bath)?)
        };
        println!("{r:>8.1}   {:>8.4}   {:>8.4}   {:>9.4}", run(35.0, 1)?, run(35.0, -1)?, run(350.0, 1)?);
    }
    Ok(())
}
