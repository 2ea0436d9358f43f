//! Site populations of FMO over the first picoseconds.

use enaqt::bath::BathSpec;
use enaqt::model::fmo_canonical;
use enaqt::solver::{propagate_time, TimeOptions, TransferProblem};

fn main() -> enaqt::Result<()> {
    let problem = TransferProblem::new(fmo_canonical(), BathSpec::canonical())?;
    let (traj, result) = propagate_time(&problem, &TimeOptions::with_grid(5.0, 11))?;

    print!("t (ps)");
    for j in 1..=7 {
        print!("     p{j}");
    }
    println!("    trace  η(t)");
    for k in 0..traj.t_ps.len() {
        print!("{:>6.2}", traj.t_ps[k]);
        for p in &traj.populations[k] {
            print!(" {p:>6.3}");
        }
        println!(" {:>8.4} {:.4}", traj.trace[k], traj.eta_cumulative[k]);
    }
    println!("η at 5 ps = {:.4}, residual trace {:.3}", result.ete, result.residual_trace.unwrap_or(f64::NAN));
    Ok(())
}
