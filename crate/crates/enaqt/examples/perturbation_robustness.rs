//! FMO under random structural perturbations.

use enaqt::bath::BathSpec;
use enaqt::ensembles::mean_std;
use enaqt::model::{fmo_canonical, fmo_geometry, PerturbSpec};
use enaqt::solver::ProblemOptions;

fn main() -> enaqt::Result<()> {
    for (name, spec) in [("conservative", PerturbSpec::conservative()), ("large", PerturbSpec::large_variation())] {
        let rs = enaqt::ensembles::perturbation_ensemble(
            &fmo_geometry(),
            &fmo_canonical(),
            &spec,
            &BathSpec::canonical(),
            &ProblemOptions::default(),
            500,
            7,
        )?;
        let ok: Vec<f64> = rs.into_iter().filter_map(|r| r.ok()).collect();
        let (mean, std) = mean_std(&ok);
        let above = ok.iter().filter(|&&e| e > 0.9).count();
        println!("{name:>12}: {above}/{} above 0.9, mean {mean:.3} ± {std:.3}", ok.len());
    }
    Ok(())
}
