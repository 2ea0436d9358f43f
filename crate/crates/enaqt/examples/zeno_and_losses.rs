//! Trapping too fast freezes transfer; losing too fast wastes it.

use enaqt::bath::BathSpec;
use enaqt::model::{fmo_canonical, ExcitonModel};
use enaqt::solver::{ete, TransferProblem};

fn eta(model: ExcitonModel) -> enaqt::Result<f64> {
    ete(&TransferProblem::new(model, BathSpec::canonical())?)
}

fn main() -> enaqt::Result<()> {
    println!("trap time     η");
    for ps in [1e-3, 1e-2, 0.1, 1.0, 10.0, 100.0] {
        println!("{ps:>8} ps  {:.4}", eta(ExcitonModel { trap_rate: 1.0 / ps, ..fmo_canonical() })?);
    }
    println!("\nloss time     η");
    for ps in [10.0, 100.0, 1e3, 1e4] {
        println!("{ps:>8} ps  {:.4}", eta(ExcitonModel { loss_rate: 1.0 / ps, ..fmo_canonical() })?);
    }
    Ok(())
}
