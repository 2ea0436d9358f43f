//! Where should the trap sit? η for every trap site, starting from I/N.

use enaqt::bath::BathSpec;
use enaqt::landscape::trap_site_scan;
use enaqt::model::fmo_canonical;
use enaqt::solver::ProblemOptions;

fn main() -> enaqt::Result<()> {
    for lambda in [0.0, 35.0, 150.0] {
        let bath = BathSpec { lambda_cm1: lambda, ..BathSpec::canonical() };
        let etas = trap_site_scan(&fmo_canonical(), &bath, &ProblemOptions::default())?;
        let best = (0..etas.len()).max_by(|&a, &b| etas[a].total_cmp(&etas[b])).unwrap();
        let row: Vec<String> = etas.iter().map(|e| format!("{e:.3}")).collect();
        println!("λ = {lambda:>5}: [{}]  best site {}", row.join(" "), best + 1);
    }
    Ok(())
}
