//! Exponential fit of the Ohmic correlation function and its effect on FMO.

use enaqt::bath::{correlation_by_quadrature, decompose_ohmic, BathSpec, OhmicFit, SpectralFamily};
use enaqt::model::fmo_canonical;
use enaqt::solver::{ete, TransferProblem};
use enaqt::units::Units;

fn main() -> enaqt::Result<()> {
    let spec = BathSpec { family: SpectralFamily::Ohmic, ..BathSpec::canonical() };
    let fit = OhmicFit::default();
    let kernel = decompose_ohmic(&spec, &fit, Units::default())?;
    println!("{} terms, max relative deviation {:.2e}", kernel.terms.len(), kernel.fit_residual.unwrap_or(f64::NAN));
    for t in &kernel.terms {
        println!("  a = {:>10.3} {:+10.3}i   ν = {:>8.3} {:+8.3}i", t.amplitude.re, t.amplitude.im, t.decay.re, t.decay.im);
    }

    println!("\n t (ps)    fitted C(t)              quadrature C(t)");
    let units = Units::default();
    for t_ps in [0.0, 0.05, 0.1, 0.25, 0.5, 1.0] {
        let t = units.ps_to_internal(t_ps);
        let (a, b) = (kernel.correlation_at(t), correlation_by_quadrature(&spec, t));
        println!("{t_ps:>5.2}   {:>9.2} {:+9.2}i   {:>9.2} {:+9.2}i", a.re, a.im, b.re, b.im);
    }

    let ohmic = ete(&TransferProblem::new(fmo_canonical(), spec)?)?;
    let lorentz = ete(&TransferProblem::new(fmo_canonical(), BathSpec::canonical())?)?;
    println!("\nFMO η: Ohmic {ohmic:.4}, Lorentzian {lorentz:.4}");
    Ok(())
}
