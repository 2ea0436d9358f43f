//! Stretching or squeezing the FMO geometry.

use enaqt::bath::BathSpec;
use enaqt::model::{build_hamiltonian, energy_scale_g, fmo_canonical, fmo_geometry, rescale_compactness, ExcitonModel};
use enaqt::solver::{ete, TransferProblem};

fn main() -> enaqt::Result<()> {
    let geom = fmo_geometry();
    println!("    k   min distance (Å)   g (cm⁻¹)      η");
    for k in [0.6, 0.8, 1.0, 1.5, 2.0, 3.0, 5.0] {
        let g = rescale_compactness(&geom, k)?;
        let h = build_hamiltonian(&g)?;
        let model = ExcitonModel { hamiltonian: h.clone(), positions: Some(g.positions()), ..fmo_canonical() };
        let eta = ete(&TransferProblem::new(model, BathSpec::canonical())?)?;
        println!("{k:>5.1}   {:>16.2}   {:>8.1}   {eta:.4}", g.min_pair_distance(), energy_scale_g(&h));
    }
    Ok(())
}
