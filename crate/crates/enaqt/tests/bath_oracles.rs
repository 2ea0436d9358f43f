//! Exponential kernels against brute-force quadrature of the spectral
//! representation. The integrators here are deliberately naive (composite
//! Simpson on uniform grids) and share nothing with the library.

use std::f64::consts::PI;

use approx::assert_relative_eq;
use enaqt::bath::{
    decompose, decompose_ohmic, laplace_at, mean_phonon_energy, spatial_correlation_matrix, BathSpec, ExpTerm,
    ExponentialKernel, OhmicFit, SpectralFamily,
};
use enaqt::units::{beta, Units};
use num_complex::Complex64;
use proptest::prelude::*;

fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(a + i as f64 * h);
    }
    s * h / 3.0
}

fn drude(l: f64, g: f64, w: f64) -> f64 {
    2.0 * l * g * w / (w * w + g * g)
}

/// (1/π)∫₀^∞ J(ω)[coth(βω/2) cos ωt − i sin ωt] dω, split as
/// (1/π)∫J e^{−iωt} + (2/π)∫J n cos ωt. The second piece converges
/// exponentially; the first is integrated to Ω with the 1/ω tail of J
/// handled by the asymptotic series of E₁(iΩt).
fn correlation_oracle(l: f64, g: f64, temp: f64, t: f64) -> Complex64 {
    let b = beta(temp);
    let thermal = simpson(
        |w| if w == 0.0 { 2.0 * l / (b * g) } else { drude(l, g, w) / (b * w).exp_m1() * (w * t).cos() },
        0.0,
        60.0 / b,
        200_000,
    );
    let omega = 600.0 / t;
    let n = (omega / 0.05).ceil() as usize;
    let re = simpson(|w| drude(l, g, w) * (w * t).cos(), 0.0, omega, n);
    let im = simpson(|w| drude(l, g, w) * (w * t).sin(), 0.0, omega, n);
    // ∫_Ω^∞ e^{−iωt}/ω dω = E₁(iz), z = Ωt; J ≈ 2λγ/ω there.
    let z = Complex64::new(0.0, omega * t);
    let e1 = (-z).exp() / z * (1.0 - 1.0 / z + 2.0 / (z * z) - 6.0 / (z * z * z));
    let tail = 2.0 * l * g * e1;
    (Complex64::new(re, -im) + tail) / PI + 2.0 / PI * thermal
}

#[test]
fn lorentzian_kernel_matches_spectral_quadrature() {
    let spec = BathSpec { matsubara_terms: Some(100), ..BathSpec::canonical() };
    let k = decompose(&spec).unwrap();
    let units = Units::default();
    for t_ps in [0.02, 0.05, 0.1, 0.2, 0.35, 0.5, 0.75, 1.0] {
        let t = units.ps_to_internal(t_ps);
        let got = k.correlation_at(t);
        let want = correlation_oracle(35.0, 50.0, 298.0, t);
        let rel = (got - want).norm() / want.norm();
        assert!(rel < 1e-4, "t = {t_ps} ps: kernel {got} quadrature {want} rel {rel:.2e}");
    }
}

#[test]
fn lorentzian_laplace_matches_spectral_quadrature() {
    // C̃(iΩ) = (1/π)∫_ℝ J(ω)(n(ω)+1)/(i(ω+Ω)) dω: the real part collapses
    // onto ω = −Ω, the imaginary part is a principal value.
    let (l, g, temp, s) = (35.0, 50.0, 298.0, 100.0);
    let b = beta(temp);
    let f = |w: f64| if w == 0.0 { 2.0 * l / (b * g) } else { drude(l, g, w) * (1.0 + 1.0 / (b * w).exp_m1()) };
    let re = drude(l, g, s) / (b * s).exp_m1();
    let (lo, hi) = (-40.0 / b, 2.0e4);
    let w0 = -s;
    let f0 = f(w0);
    let pv = simpson(|w| if (w - w0).abs() < 1e-9 { 0.0 } else { (f(w) - f0) / (w - w0) }, lo, hi, 2_000_000)
        + f0 * ((hi - w0) / (w0 - lo)).ln();
    // ω ∈ [hi, ∞) via u = 1/ω; n is negligible there.
    let tail = simpson(|u| 2.0 * l * g / ((1.0 + g * g * u * u) * (1.0 + s * u)), 0.0, 1.0 / hi, 2000);
    let im = -(pv + tail) / PI;

    let k = decompose(&BathSpec { matsubara_terms: Some(100), ..BathSpec::canonical() }).unwrap();
    let got = laplace_at(&k, Complex64::new(0.0, s)).unwrap();
    let want = Complex64::new(re, im);
    let rel = (got - want).norm() / want.norm();
    assert!(rel < 1e-4, "kernel {got} quadrature {want} rel {rel:.2e}");
}

#[test]
fn high_temperature_term_zero_limit() {
    let spec = BathSpec { temperature_k: 1e6, ..BathSpec::canonical() };
    let k = decompose(&spec).unwrap();
    let want = Complex64::new(35.0 * 2.0 / spec.beta(), -35.0 * 50.0);
    assert_relative_eq!(k.terms[0].amplitude.re, want.re, max_relative = 1e-4);
    assert_relative_eq!(k.terms[0].amplitude.im, want.im, max_relative = 1e-12);
}

#[test]
fn imaginary_amplitude_is_minus_lambda_gamma_at_any_temperature() {
    for temp in [10.0, 77.0, 298.0, 1000.0] {
        let k = decompose(&BathSpec { temperature_k: temp, ..BathSpec::canonical() }).unwrap();
        let im: f64 = k.terms.iter().map(|m| m.amplitude.im).sum();
        assert_relative_eq!(im, -35.0 * 50.0, max_relative = 1e-12);
    }
}

#[test]
fn zero_coupling_zero_kernel() {
    let k = decompose(&BathSpec { lambda_cm1: 0.0, ..BathSpec::canonical() }).unwrap();
    assert!(k.terms.iter().all(|m| m.amplitude == Complex64::new(0.0, 0.0)));
    let ohm = BathSpec { family: SpectralFamily::Ohmic, lambda_cm1: 0.0, ..BathSpec::canonical() };
    assert!(decompose_ohmic(&ohm, &OhmicFit::default(), Units::default()).unwrap().is_zero());
}

#[test]
fn single_term_laplace_at_origin() {
    let a = Complex64::new(3.0, -1.0);
    let nu = Complex64::new(2.0, 0.5);
    let k = ExponentialKernel { terms: vec![ExpTerm { amplitude: a, decay: nu }], ..ExponentialKernel::zero() };
    assert_eq!(laplace_at(&k, Complex64::new(0.0, 0.0)).unwrap(), a / nu);
    assert!(laplace_at(&k, -nu).is_err());
    assert_eq!(laplace_at(&ExponentialKernel::zero(), Complex64::new(1.0, 7.0)).unwrap(), Complex64::new(0.0, 0.0));
}

#[test]
fn ohmic_fit_reproduces_origin_value() {
    let spec = BathSpec { family: SpectralFamily::Ohmic, ..BathSpec::canonical() };
    let fit = OhmicFit::default();
    let k = decompose_ohmic(&spec, &fit, Units::default()).unwrap();
    let b = spec.beta();
    // C(0⁺) real part: (1/π)∫ J coth; J = λ(ω/γ)e^{−ω/γ}.
    let re0 = simpson(
        |w| if w == 0.0 { 2.0 * 35.0 / (50.0 * b) } else { 35.0 * w / 50.0 * (-w / 50.0).exp() / (0.5 * b * w).tanh() },
        0.0,
        60.0 * 50.0,
        100_000,
    ) / PI;
    let c0 = k.correlation_at(0.0);
    assert_relative_eq!(c0.re, re0, max_relative = fit.rel_tol);
    assert!(c0.im.abs() <= fit.rel_tol * c0.norm());
    assert!(k.fit_residual.unwrap() <= fit.rel_tol);
}

#[test]
fn phonon_energy_fixture_and_monotonicity() {
    let c = BathSpec::canonical();
    let e = mean_phonon_energy(&c);
    assert!((e - 64.0).abs() <= 2.0, "{e}");
    let temps = [100.0, 298.0, 600.0].map(|t| mean_phonon_energy(&BathSpec { temperature_k: t, ..c }));
    assert!(temps[0] < temps[1] && temps[1] < temps[2], "{temps:?}");
    let doubled = mean_phonon_energy(&BathSpec { lambda_cm1: 70.0, ..c });
    assert!((doubled - e).abs() <= 1e-12 * e);
}

#[test]
fn spatial_correlation_examples() {
    let c = BathSpec::canonical();
    let pos = [[0.0, 0.0, 0.0], [0.0, 0.0, 20.0]];
    let diag = spatial_correlation_matrix(&pos, &c);
    assert_eq!(diag[(0, 1)], 0.0);
    assert_eq!(diag[(0, 0)], 35.0);
    let m = spatial_correlation_matrix(&pos, &BathSpec { r_cor_angstrom: 20.0, ..c });
    assert_relative_eq!(m[(0, 1)], 35.0 / std::f64::consts::E, max_relative = 1e-14);
    let neg = spatial_correlation_matrix(&pos, &BathSpec { r_cor_angstrom: 20.0, correlation_sign: -1, ..c });
    assert_eq!(neg[(1, 0)], -m[(1, 0)]);
    assert_eq!(neg[(1, 1)], 35.0);
}

fn kernel_strategy() -> impl Strategy<Value = ExponentialKernel> {
    prop::collection::vec((-1e3..1e3f64, -1e3..1e3f64, 1.0..500.0f64, -200.0..200.0f64), 1..6).prop_map(|v| {
        ExponentialKernel {
            terms: v
                .into_iter()
                .map(|(ar, ai, nr, ni)| ExpTerm { amplitude: Complex64::new(ar, ai), decay: Complex64::new(nr, ni) })
                .collect(),
            ..ExponentialKernel::zero()
        }
    })
}

proptest! {
    #[test]
    fn laplace_is_linear_in_the_kernel(a in kernel_strategy(), b in kernel_strategy(), sr in 0.0..100.0f64, si in -300.0..300.0f64) {
        let s = Complex64::new(sr, si);
        let whole = laplace_at(&a.concat(&b), s).unwrap();
        let parts = laplace_at(&a, s).unwrap() + laplace_at(&b, s).unwrap();
        prop_assert!((whole - parts).norm() <= 1e-14 * (whole.norm() + parts.norm()).max(1.0) * 4.0);
    }

    #[test]
    fn correlation_matrix_symmetric_with_exact_diagonal(
        pts in prop::collection::vec(prop::array::uniform3(-30.0..30.0f64), 2..8),
        r in 0.0..120.0f64,
        lambda in 0.0..400.0f64,
        sign in prop::sample::select(vec![1, -1]),
    ) {
        let spec = BathSpec { lambda_cm1: lambda, r_cor_angstrom: r, correlation_sign: sign, ..BathSpec::canonical() };
        let m = spatial_correlation_matrix(&pts, &spec);
        for j in 0..pts.len() {
            prop_assert_eq!(m[(j, j)], lambda);
            for k in 0..pts.len() {
                prop_assert_eq!(m[(j, k)], m[(k, j)]);
            }
        }
    }
}
