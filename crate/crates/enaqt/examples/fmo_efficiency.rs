//! Canonical FMO efficiency with the frequency-domain solver, checked against
//! time propagation.

use std::time::Instant;

use enaqt::bath::BathSpec;
use enaqt::model::fmo_canonical;
use enaqt::solver::{ete_frequency, propagate_time, TimeOptions, TransferProblem};

fn main() -> enaqt::Result<()> {
    let problem = TransferProblem::new(fmo_canonical(), BathSpec::canonical())?;

    let t0 = Instant::now();
    let freq = ete_frequency(&problem)?;
    println!(
        "frequency: η = {:.5}  ({:.1} ms, condition ≈ {:.1e})",
        freq.ete,
        t0.elapsed().as_secs_f64() * 1e3,
        freq.diagnostics.condition_estimate.unwrap_or(f64::NAN)
    );

    let t0 = Instant::now();
    let (_, time) = propagate_time(&problem, &TimeOptions::default())?;
    println!(
        "time:      η = {:.5}  ({:.1} ms, {} steps, stopped at {:.1} ps)",
        time.ete,
        t0.elapsed().as_secs_f64() * 1e3,
        time.diagnostics.steps.unwrap_or(0),
        time.diagnostics.t_reached_ps.unwrap_or(f64::NAN)
    );
    println!("losses:    {:.5} (residual trace {:.1e})", time.loss_fraction, time.residual_trace.unwrap_or(0.0));
    println!("balance:   η + losses = {:.8}", time.ete + time.loss_fraction);
    Ok(())
}
