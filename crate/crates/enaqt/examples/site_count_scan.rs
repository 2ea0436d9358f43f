//! Ensemble η as more chromophores are packed into the same sphere.

use enaqt::ensembles::{site_count_scan, EnsembleSpec};

fn main() -> enaqt::Result<()> {
    let counts: Vec<usize> = (2..=12).collect();
    for d in [30.0, 50.0] {
        println!("d = {d} Å");
        for p in site_count_scan(&EnsembleSpec::new(2, d, 200, 3), &counts)? {
            println!("  n = {:>2}: {:.3} ± {:.3}", p.n_sites, p.mean, p.std);
        }
    }
    Ok(())
}
