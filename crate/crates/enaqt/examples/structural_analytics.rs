//! Geometric and spectral descriptors of FMO and of a random ensemble.

use enaqt::bath::{mean_phonon_energy, BathSpec};
use enaqt::ensembles::{connectivity_paths, ensemble_member, gap_statistics, ground_trap_overlap, run_ensemble, EnsembleSpec};
use enaqt::model::fmo_canonical;

fn main() -> enaqt::Result<()> {
    let fmo = fmo_canonical();
    let o = ground_trap_overlap(&fmo);
    println!("FMO ground state on trap: amplitude {:.3}, probability {:.3}", o.amplitude, o.probability);
    println!("mean phonon energy: {:.1} cm⁻¹", mean_phonon_energy(&BathSpec::canonical()));

    let mut paths = connectivity_paths(&fmo.with_trap(7))?;
    paths.sort_by(|a, b| b.strength.total_cmp(&a.strength));
    println!("{} paths 1 → 7; strongest:", paths.len());
    for p in &paths[..5] {
        println!("  {:?}  {:.2} cm⁻¹", p.path, p.strength);
    }

    let spec = EnsembleSpec::new(7, 60.0, 500, 11);
    let report = run_ensemble(&spec)?;
    let mean = |v: Vec<f64>| v.iter().sum::<f64>() / v.len() as f64;
    for (name, set) in [("top 50", report.top(50)), ("bottom 50", report.bottom(50))] {
        let hs: Vec<_> = set.iter().map(|s| ensemble_member(&spec, s.index).map(|(_, m)| m.hamiltonian)).collect::<enaqt::Result<_>>()?;
        let gaps = gap_statistics(&hs);
        println!(
            "{name:>9}: g {:.0} ± {:.0} cm⁻¹, overlap {:.3}, z-axis distance {:.1} Å",
            gaps.mean,
            gaps.std,
            mean(set.iter().map(|s| s.ground_trap_overlap).collect()),
            mean(set.iter().map(|s| s.z_axis_mean_distance).collect()),
        );
    }
    Ok(())
}
