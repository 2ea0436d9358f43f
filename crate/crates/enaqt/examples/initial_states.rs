//! η is nearly independent of how the excitation starts.

use enaqt::bath::BathSpec;
use enaqt::ensembles::{mean_std, sample_density_matrix, sample_rng};
use enaqt::model::fmo_canonical;
use enaqt::solver::{ete, TransferProblem};

fn main() -> enaqt::Result<()> {
    let p = TransferProblem::new(fmo_canonical(), BathSpec::canonical())?;
    println!("|1⟩⟨1|: {:.4}", ete(&p)?);
    println!("I/7:    {:.4}", ete(&p.clone().maximally_mixed())?);
    let etas: Vec<f64> = (0..500)
        .map(|i| ete(&p.clone().with_initial_state(sample_density_matrix(7, &mut sample_rng(5, i)))?))
        .collect::<enaqt::Result<_>>()?;
    let (mean, std) = mean_std(&etas);
    println!("500 random ρ(0): {mean:.4} ± {std:.4}");
    Ok(())
}
