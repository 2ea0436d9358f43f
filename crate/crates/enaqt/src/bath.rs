//! Phonon baths: spectral densities, exponential-sum correlation kernels and
//! their Laplace transforms, spatial correlation coefficients.
//!
//! Everything here is in cm⁻¹ (ħ = 1); the time argument of C(t) is in 1/cm⁻¹.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fit;
use crate::quad;
use crate::units::{beta, Units};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpectralFamily {
    /// Drude–Lorentz: J(ω) = 2λγω/(ω² + γ²).
    Lorentzian,
    /// Exponential-cutoff Ohmic: J(ω) = λ(ω/γ)e^{−ω/γ}.
    Ohmic,
}

/// Bath parameters as they appear in run configs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BathSpec {
    pub family: SpectralFamily,
    pub lambda_cm1: f64,
    pub gamma_cm1: f64,
    #[serde(rename = "temperature_K")]
    pub temperature_k: f64,
    /// 0 means spatially uncorrelated.
    #[serde(default)]
    pub r_cor_angstrom: f64,
    /// ±1, applied to off-diagonal correlations only.
    #[serde(default = "plus_one")]
    pub correlation_sign: i32,
    /// `None` → 3 at T ≥ 200 K, 100 below.
    #[serde(default)]
    pub matsubara_terms: Option<usize>,
}

fn plus_one() -> i32 {
    1
}

impl Default for BathSpec {
    fn default() -> Self {
        BathSpec::canonical()
    }
}

impl BathSpec {
    /// λ = 35 cm⁻¹, γ = 50 cm⁻¹, T = 298 K, Lorentzian, uncorrelated.
    pub fn canonical() -> Self {
        BathSpec {
            family: SpectralFamily::Lorentzian,
            lambda_cm1: 35.0,
            gamma_cm1: 50.0,
            temperature_k: 298.0,
            r_cor_angstrom: 0.0,
            correlation_sign: 1,
            matsubara_terms: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.lambda_cm1, self.gamma_cm1, self.temperature_k, self.r_cor_angstrom]
            .iter()
            .all(|x| x.is_finite());
        if !finite {
            return Err(Error::Invalid("bath parameters must be finite".into()));
        }
        if self.lambda_cm1 < 0.0 {
            return Err(Error::Invalid("λ must be ≥ 0 (use correlation_sign for anticorrelation)".into()));
        }
        if self.gamma_cm1 <= 0.0 || self.temperature_k <= 0.0 {
            return Err(Error::Invalid("γ and T must be positive".into()));
        }
        if self.r_cor_angstrom < 0.0 {
            return Err(Error::Invalid("R_cor must be ≥ 0".into()));
        }
        if self.correlation_sign != 1 && self.correlation_sign != -1 {
            return Err(Error::Invalid("correlation_sign must be +1 or -1".into()));
        }
        Ok(())
    }

    pub fn matsubara(&self) -> usize {
        self.matsubara_terms.unwrap_or(if self.temperature_k >= 200.0 { 3 } else { 100 })
    }

    pub fn beta(&self) -> f64 {
        beta(self.temperature_k)
    }

    /// J(ω) in cm⁻¹.
    pub fn spectral_density(&self, w: f64) -> f64 {
        let (l, g) = (self.lambda_cm1, self.gamma_cm1);
        match self.family {
            SpectralFamily::Lorentzian => 2.0 * l * g * w / (w * w + g * g),
            SpectralFamily::Ohmic => l * (w / g) * (-w / g).exp(),
        }
    }
}

/// One term a·e^{−νt} of a correlation function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpTerm {
    /// cm⁻².
    pub amplitude: Complex64,
    /// cm⁻¹, Re > 0.
    pub decay: Complex64,
}

/// C(t) = Σ a_m e^{−ν_m t} + w·δ(t), Laplace transform Σ a_m/(s + ν_m) + w.
///
/// The white-noise weight `w` stands in for the Matsubara terms dropped by
/// truncation: their decays are far above every system frequency, so each
/// contributes a_k/ν_k to C̃(s) over the relevant range of s.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ExponentialKernel {
    pub terms: Vec<ExpTerm>,
    pub white_noise: f64,
    /// Max deviation of a fitted kernel from the sampled C(t).
    pub fit_residual: Option<f64>,
}

impl ExponentialKernel {
    pub fn zero() -> Self {
        ExponentialKernel::default()
    }

    pub fn is_zero(&self) -> bool {
        self.white_noise == 0.0 && self.terms.iter().all(|t| t.amplitude == Complex64::new(0.0, 0.0))
    }

    /// C(t) for t > 0 (the white-noise part is a delta at the origin).
    pub fn correlation_at(&self, t: f64) -> Complex64 {
        self.terms.iter().map(|m| m.amplitude * (-m.decay * t).exp()).sum()
    }

    /// Σ a_m/(s + ν_m) + w without pole checks.
    pub fn laplace(&self, s: Complex64) -> Complex64 {
        self.terms.iter().map(|m| m.amplitude / (s + m.decay)).sum::<Complex64>() + self.white_noise
    }

    /// Σ a_m*/(s + ν_m*) + w: the transform of C(t)*.
    pub fn laplace_conj(&self, s: Complex64) -> Complex64 {
        self.terms.iter().map(|m| m.amplitude.conj() / (s + m.decay.conj())).sum::<Complex64>() + self.white_noise
    }

    /// True when s sits on (or within 1e-12 relative of) a pole.
    pub fn near_pole(&self, s: Complex64) -> bool {
        self.terms
            .iter()
            .any(|m| m.amplitude != Complex64::new(0.0, 0.0) && (s + m.decay).norm() <= 1e-12 * m.decay.norm().max(1.0))
    }

    pub fn concat(&self, other: &ExponentialKernel) -> ExponentialKernel {
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&other.terms);
        ExponentialKernel { terms, white_noise: self.white_noise + other.white_noise, fit_residual: None }
    }

    /// Rescales energies by α: C(t) → α²C(αt) in the exponential form.
    pub fn scaled_energy(&self, alpha: f64) -> ExponentialKernel {
        ExponentialKernel {
            terms: self
                .terms
                .iter()
                .map(|m| ExpTerm { amplitude: m.amplitude * alpha * alpha, decay: m.decay * alpha })
                .collect(),
            white_noise: self.white_noise * alpha,
            fit_residual: self.fit_residual,
        }
    }
}

/// Exact rational evaluation of C̃(s).
pub fn laplace_at(kernel: &ExponentialKernel, s: Complex64) -> Result<Complex64> {
    if kernel.near_pole(s) {
        return Err(Error::KernelPole(format!("{s}")));
    }
    Ok(kernel.laplace(s))
}

const ZETA2: f64 = PI * PI / 6.0;
const ZETA4: f64 = PI * PI * PI * PI / 90.0;
const ZETA6: f64 = PI * PI * PI * PI * PI * PI / 945.0;

/// Σ_{k>K} 1/(k² − x²).
fn matsubara_tail(k_max: usize, x: f64) -> f64 {
    let x2 = x * x;
    let total = if x < 1e-3 {
        ZETA2 + ZETA4 * x2 + ZETA6 * x2 * x2
    } else {
        0.5 / x2 - PI / (2.0 * x * (PI * x).tan())
    };
    // Past a few thousand terms the explicit partial sum would lose more
    // digits to cancellation than the asymptotic tail.
    if k_max > 2000 && (k_max as f64) > 10.0 * x {
        let m = k_max as f64;
        return 1.0 / m - 0.5 / (m * m) + (1.0 / 6.0 + x2 / 3.0) / (m * m * m);
    }
    total - (1..=k_max).map(|k| 1.0 / ((k * k) as f64 - x2)).sum::<f64>()
}

/// Drude–Lorentz kernel: one γ term plus `matsubara()` Matsubara terms and the
/// white-noise remainder of the rest.
pub fn decompose(spec: &BathSpec) -> Result<ExponentialKernel> {
    spec.validate()?;
    if spec.family != SpectralFamily::Lorentzian {
        return Err(Error::Invalid("decompose handles the Lorentzian family; use decompose_ohmic".into()));
    }
    let (l, g, b) = (spec.lambda_cm1, spec.gamma_cm1, spec.beta());
    let k_max = spec.matsubara();
    let x = b * g / (2.0 * PI);
    let nearest = x.round();
    if l != 0.0 && nearest >= 1.0 && (x - nearest).abs() < 1e-9 * nearest.max(1.0) {
        return Err(Error::DegenerateMatsubara(x));
    }
    let mut terms = Vec::with_capacity(k_max + 1);
    let cot = 1.0 / (b * g / 2.0).tan();
    terms.push(ExpTerm { amplitude: Complex64::new(l * g * cot, -l * g), decay: Complex64::new(g, 0.0) });
    for k in 1..=k_max {
        let nu = 2.0 * PI * k as f64 / b;
        let a = 4.0 * l * g / b * nu / (nu * nu - g * g);
        terms.push(ExpTerm { amplitude: Complex64::new(a, 0.0), decay: Complex64::new(nu, 0.0) });
    }
    let pref = 4.0 * l * g / b * (b / (2.0 * PI)).powi(2);
    let white_noise = if l == 0.0 { 0.0 } else { pref * matsubara_tail(k_max, x) };
    Ok(ExponentialKernel { terms, white_noise, fit_residual: None })
}

/// [`decompose`], nudging T by 1e-6 K off a degenerate Matsubara point.
pub fn decompose_nudged(spec: &BathSpec) -> Result<(ExponentialKernel, bool)> {
    match decompose(spec) {
        Err(Error::DegenerateMatsubara(_)) => {
            let s = BathSpec { temperature_k: spec.temperature_k + 1e-6, ..*spec };
            decompose(&s).map(|k| (k, true))
        }
        other => other.map(|k| (k, false)),
    }
}

/// C(t) = (1/π)∫₀^∞ J(ω)[coth(βω/2) cos ωt − i sin ωt] dω by adaptive
/// quadrature. Only sensible for spectral densities with an exponential
/// cutoff (Ohmic); the integral is truncated at ω = 60γ.
pub fn correlation_by_quadrature(spec: &BathSpec, t: f64) -> Complex64 {
    let b = spec.beta();
    let w_max = 60.0 * spec.gamma_cm1;
    let pieces = ((w_max * t / PI).ceil() as usize).clamp(4, 4000);
    let f = |w: f64| {
        let j = spec.spectral_density(w);
        let coth = 1.0 / (0.5 * b * w).tanh();
        Complex64::new(j * coth * (w * t).cos(), -j * (w * t).sin())
    };
    let scale = spec.lambda_cm1 * spec.gamma_cm1 / (b * spec.gamma_cm1).min(1.0);
    quad::integrate_complex(f, 0.0, w_max, pieces, 1e-11, 1e-13 * scale.abs().max(1e-300)) / PI
}

/// Parameters of the Ohmic exponential fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OhmicFit {
    /// Number of exponentials, 2..=12.
    pub terms: usize,
    /// Fitting window in ps.
    pub t_max_ps: f64,
    pub rel_tol: f64,
}

impl Default for OhmicFit {
    fn default() -> Self {
        OhmicFit { terms: 6, t_max_ps: 3.0, rel_tol: 1e-3 }
    }
}

/// Samples C(t) by quadrature on a log grid over [0, t_max] and fits
/// `fit.terms` exponentials to it.
pub fn decompose_ohmic(spec: &BathSpec, fit: &OhmicFit, units: Units) -> Result<ExponentialKernel> {
    spec.validate()?;
    if spec.family != SpectralFamily::Ohmic {
        return Err(Error::Invalid("decompose_ohmic expects the Ohmic family".into()));
    }
    if !(2..=12).contains(&fit.terms) {
        return Err(Error::Invalid(format!("fit terms must be in 2..=12, got {}", fit.terms)));
    }
    if !(fit.t_max_ps > 0.0 && fit.rel_tol > 0.0) {
        return Err(Error::Invalid("t_max and rel_tol must be positive".into()));
    }
    if spec.lambda_cm1 == 0.0 {
        return Ok(ExponentialKernel { terms: vec![], white_noise: 0.0, fit_residual: Some(0.0) });
    }
    let t_max = units.ps_to_internal(fit.t_max_ps);
    let n = 240;
    let mut t = vec![0.0];
    let t0 = 1e-4 * t_max;
    t.extend((0..n - 1).map(|i| t0 * (t_max / t0).powf(i as f64 / (n - 2) as f64)));
    let y: Vec<Complex64> = t.iter().map(|&x| correlation_by_quadrature(spec, x)).collect();
    let m = 5 * fit.terms + 1;
    let dt = t_max / (m - 1) as f64;
    let u: Vec<Complex64> = (0..m).map(|i| correlation_by_quadrature(spec, i as f64 * dt)).collect();
    let f = fit::fit_exponentials(&t, &y, (&u, dt), fit.terms, 6);
    if !(f.max_deviation <= fit.rel_tol) {
        return Err(Error::FitFailed { achieved: f.max_deviation, tol: fit.rel_tol });
    }
    let terms = f
        .amplitudes
        .iter()
        .zip(&f.decays)
        .map(|(&amplitude, &decay)| ExpTerm { amplitude, decay })
        .collect();
    Ok(ExponentialKernel { terms, white_noise: 0.0, fit_residual: Some(f.max_deviation) })
}

/// Kernel for either family.
pub fn kernel_for(spec: &BathSpec, fit: &OhmicFit, units: Units) -> Result<ExponentialKernel> {
    match spec.family {
        SpectralFamily::Lorentzian => decompose_nudged(spec).map(|(k, _)| k),
        SpectralFamily::Ohmic => decompose_ohmic(spec, fit, units),
    }
}

/// λ_jk = λ on the diagonal, sign·λ·exp(−d_jk/R_cor) off it (0 when R_cor = 0).
pub fn spatial_correlation_matrix(positions: &[[f64; 3]], spec: &BathSpec) -> DMatrix<f64> {
    correlation_coefficients(positions, spec) * spec.lambda_cm1
}

/// λ_jk/λ: the matrix that weights cross-site memory terms.
pub fn correlation_coefficients(positions: &[[f64; 3]], spec: &BathSpec) -> DMatrix<f64> {
    let n = positions.len();
    DMatrix::from_fn(n, n, |j, k| {
        if j == k {
            1.0
        } else if spec.r_cor_angstrom == 0.0 {
            0.0
        } else {
            let d = (0..3).map(|c| (positions[j][c] - positions[k][c]).powi(2)).sum::<f64>().sqrt();
            spec.correlation_sign as f64 * (-d / spec.r_cor_angstrom).exp()
        }
    })
}

/// ∫J(ω) ω n(ω) dω / ∫J(ω) n(ω) dω over [0, 50γ], n the Bose occupation.
pub fn mean_phonon_energy(spec: &BathSpec) -> f64 {
    let unit = BathSpec { lambda_cm1: 1.0, ..*spec };
    let b = spec.beta();
    let w_max = 50.0 * spec.gamma_cm1;
    let jn = |w: f64| unit.spectral_density(w) / (b * w).exp_m1();
    let num = quad::integrate(|w| w * jn(w), 0.0, w_max, 50, 1e-10, 0.0);
    let den = quad::integrate(jn, 0.0, w_max, 50, 1e-10, 0.0);
    num / den
}
