//! Transfer efficiency from the time-nonlocal master equation.
//!
//! Two independent routes:
//! - [`ete_frequency`]: one dense solve with the Laplace-domain generator at s = 0;
//! - [`propagate_time`]: auxiliary-operator propagation with an adaptive
//!   Dormand–Prince pair, giving population traces as well.
//!
//! Vectorisation is column stacking: vec(AXB) = (Bᵀ ⊗ A) vec(X), so left
//! multiplication by A is I ⊗ A and right multiplication is Aᵀ ⊗ I.

mod frequency;
mod liouville;
mod time;

pub use frequency::{ete, ete_frequency, ete_markovian_limit};
pub use liouville::{build_generator, build_memory_per_site, vec_index, LiouvilleOperator, MemoryPoint};
pub use time::{propagate_time, TimeOptions, Trajectory};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bath::{correlation_coefficients, kernel_for, BathSpec, ExponentialKernel, OhmicFit};
use crate::error::{Error, Result};
use crate::model::ExcitonModel;
use crate::units::Units;

/// Numerical settings shared by both solvers.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProblemOptions {
    pub units: Units,
    pub ohmic: OhmicFit,
}

/// Model + bath (+ its kernel and correlation coefficients) + ρ(0).
#[derive(Debug, Clone)]
pub struct TransferProblem {
    pub model: ExcitonModel,
    pub bath: BathSpec,
    pub kernel: ExponentialKernel,
    /// λ_jk/λ; identity for an uncorrelated bath.
    pub correlation: DMatrix<f64>,
    pub initial_state: DMatrix<Complex64>,
    pub units: Units,
}

impl TransferProblem {
    /// Canonical options, ρ(0) = |initial⟩⟨initial|.
    pub fn new(model: ExcitonModel, bath: BathSpec) -> Result<Self> {
        Self::with_options(model, bath, &ProblemOptions::default())
    }

    pub fn with_options(model: ExcitonModel, bath: BathSpec, opts: &ProblemOptions) -> Result<Self> {
        model.validate(true)?;
        bath.validate()?;
        let kernel = kernel_for(&bath, &opts.ohmic, opts.units)?;
        Self::assemble(model, bath, kernel, opts.units)
    }

    /// Uses a precomputed kernel (e.g. shared across an ensemble).
    pub fn with_kernel(model: ExcitonModel, bath: BathSpec, kernel: ExponentialKernel, units: Units) -> Result<Self> {
        model.validate(true)?;
        bath.validate()?;
        Self::assemble(model, bath, kernel, units)
    }

    fn assemble(model: ExcitonModel, bath: BathSpec, kernel: ExponentialKernel, units: Units) -> Result<Self> {
        let n = model.n_sites();
        let correlation = if bath.r_cor_angstrom > 0.0 {
            let pos = model
                .positions
                .as_ref()
                .ok_or_else(|| Error::Invalid("correlated bath needs site positions".into()))?;
            correlation_coefficients(pos, &bath)
        } else {
            DMatrix::identity(n, n)
        };
        let mut initial_state = DMatrix::zeros(n, n);
        initial_state[(model.initial_index(), model.initial_index())] = Complex64::new(1.0, 0.0);
        Ok(TransferProblem { model, bath, kernel, correlation, initial_state, units })
    }

    /// Replaces ρ(0) after checking Hermiticity, positivity and unit trace.
    pub fn with_initial_state(mut self, rho: DMatrix<Complex64>) -> Result<Self> {
        validate_density_matrix(&rho, self.model.n_sites())?;
        self.initial_state = rho;
        Ok(self)
    }

    /// ρ(0) = I/N.
    pub fn maximally_mixed(mut self) -> Self {
        let n = self.model.n_sites();
        self.initial_state = DMatrix::from_diagonal_element(n, n, Complex64::new(1.0 / n as f64, 0.0));
        self
    }

    pub fn is_correlated(&self) -> bool {
        let n = self.correlation.nrows();
        (0..n).any(|j| (0..n).any(|k| j != k && self.correlation[(j, k)] != 0.0))
    }

    pub(crate) fn rates(&self) -> (f64, f64) {
        (self.units.rate_to_internal(self.model.trap_rate), self.units.rate_to_internal(self.model.loss_rate))
    }
}

pub fn validate_density_matrix(rho: &DMatrix<Complex64>, n: usize) -> Result<()> {
    if rho.nrows() != n || rho.ncols() != n {
        return Err(Error::Invalid(format!("initial state must be {n}×{n}")));
    }
    let herm = (rho - rho.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    if herm > 1e-10 {
        return Err(Error::Invalid("initial state not Hermitian".into()));
    }
    if (rho.trace() - Complex64::new(1.0, 0.0)).norm() > 1e-10 {
        return Err(Error::Invalid("initial state trace ≠ 1".into()));
    }
    let h = (rho + rho.adjoint()) * Complex64::new(0.5, 0.0);
    let min = h.symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min);
    if min < -1e-10 {
        return Err(Error::Invalid("initial state not positive semidefinite".into()));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    Frequency,
    Time,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Pivot-magnitude ratio of the LU factorisation (frequency solver).
    pub condition_estimate: Option<f64>,
    pub kernel_terms: usize,
    pub white_noise: f64,
    /// A kernel pole was hit and s shifted by 1e-6 cm⁻¹.
    pub regularized: bool,
    /// η left [0, 1] and was clamped; `raw_ete` keeps the unclamped value.
    pub clamped: bool,
    pub raw_ete: f64,
    pub steps: Option<usize>,
    pub t_reached_ps: Option<f64>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferResult {
    pub ete: f64,
    /// 1 − η for the frequency solver; Σ losses + residual trace for the time solver.
    pub loss_fraction: f64,
    /// Per-site 2r_loss∫p_j dt (time solver only).
    pub site_losses: Option<Vec<f64>>,
    /// trace ρ(t_end) (time solver only).
    pub residual_trace: Option<f64>,
    pub solver: SolverKind,
    pub diagnostics: Diagnostics,
}

pub(crate) fn base_diagnostics(p: &TransferProblem) -> Diagnostics {
    let mut d = Diagnostics {
        kernel_terms: p.kernel.terms.len(),
        white_noise: p.kernel.white_noise,
        ..Default::default()
    };
    if p.bath.lambda_cm1 > 0.0 && p.bath.gamma_cm1 < 5.0 {
        d.warnings.push("γ < 5 cm⁻¹: strongly non-Markovian regime, second-order memory may be inaccurate".into());
    }
    d
}

pub(crate) fn clamp_ete(raw: f64, d: &mut Diagnostics) -> f64 {
    d.raw_ete = raw;
    if !(0.0..=1.0).contains(&raw) {
        d.clamped = true;
        if !(-1e-9..=1.0 + 1e-9).contains(&raw) {
            d.warnings.push(format!("η = {raw:.6} outside [0, 1] beyond round-off"));
        }
    }
    raw.clamp(0.0, 1.0)
}
