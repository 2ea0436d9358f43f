//! Geometry JSON out and back in, and the couplings it implies.

use enaqt::model::{build_hamiltonian, fmo_geometry, fmo_hamiltonian, ChromophoreGeometry};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let json = serde_json::to_string_pretty(&fmo_geometry())?;
    println!("{}", json.lines().take(12).collect::<Vec<_>>().join("\n"));
    println!("...");

    let back: ChromophoreGeometry = serde_json::from_str(&json)?;
    let rebuilt = build_hamiltonian(&back)?;
    let fitted = fmo_hamiltonian();
    println!("\npair   dipole   fitted");
    for i in 0..7 {
        for j in i + 1..7 {
            if fitted[(i, j)].abs() > 20.0 {
                println!("{}-{}   {:>7.1}  {:>7.1}", i + 1, j + 1, rebuilt[(i, j)], fitted[(i, j)]);
            }
        }
    }
    Ok(())
}
