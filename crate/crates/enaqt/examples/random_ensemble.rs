//! Random seven-site complexes in spheres of increasing size.

use enaqt::ensembles::{run_ensemble, EnsembleSpec};

fn main() -> enaqt::Result<()> {
    for d in [30.0, 50.0, 100.0] {
        let report = run_ensemble(&EnsembleSpec::new(7, d, 300, 1))?;
        let a = &report.aggregates;
        println!("d = {d:>5} Å: mean η {:.3} ± {:.3}  histogram {:?}  ({} failed)", a.mean, a.std, a.histogram, a.n_failed);
    }

    let report = run_ensemble(&EnsembleSpec::new(7, 30.0, 300, 1))?;
    let best = report.top(1)[0];
    let worst = report.bottom(1)[0];
    println!("best sample #{}: η {:.3}, g {:.0} cm⁻¹", best.index, best.ete.unwrap(), best.g);
    println!("worst sample #{}: η {:.3}, g {:.0} cm⁻¹", worst.index, worst.ete.unwrap(), worst.g);
    Ok(())
}
