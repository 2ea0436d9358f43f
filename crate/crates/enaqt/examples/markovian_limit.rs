//! Memory matters at small γ; at large γ the full and Markovian results converge,
//! up to the detailed-balance part the Markovian generator still keeps.

use enaqt::bath::BathSpec;
use enaqt::model::fmo_canonical;
use enaqt::solver::{ete, ete_markovian_limit, TransferProblem};

fn main() -> enaqt::Result<()> {
    println!("  γ (cm⁻¹)   T (K)   η full   η Markov    gap");
    for (gamma, temp) in [(10.0, 298.0), (50.0, 298.0), (500.0, 298.0), (5000.0, 298.0), (5000.0, 2000.0)] {
        let bath = BathSpec { lambda_cm1: 300.0, gamma_cm1: gamma, temperature_k: temp, ..BathSpec::canonical() };
        let p = TransferProblem::new(fmo_canonical(), bath)?;
        let (full, markov) = (ete(&p)?, ete_markovian_limit(&p)?);
        println!("{gamma:>10} {temp:>7} {full:>8.4} {markov:>10.4} {:>7.4}", (full - markov).abs());
    }
    Ok(())
}
