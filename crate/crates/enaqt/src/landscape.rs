//! Two-parameter ETE landscapes and their stencil derivatives.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::fmt;
use std::str::FromStr;

use crate::bath::{BathSpec, SpectralFamily};
use crate::error::{Error, Result};
use crate::model::ExcitonModel;
use crate::solver::{ete, ete_frequency, ProblemOptions, TransferProblem};
use crate::units::KB_CM_PER_K;

/// Sweepable parameters. Times are in ps and set the rates to 1/τ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parameter {
    Lambda,
    Gamma,
    Temperature,
    RCor,
    TrapTime,
    LossTime,
    Compactness,
}

impl Parameter {
    pub fn name(self) -> &'static str {
        match self {
            Parameter::Lambda => "lambda",
            Parameter::Gamma => "gamma",
            Parameter::Temperature => "temperature",
            Parameter::RCor => "r_cor",
            Parameter::TrapTime => "trap_time",
            Parameter::LossTime => "loss_time",
            Parameter::Compactness => "compactness",
        }
    }
}

impl FromStr for Parameter {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "lambda" => Parameter::Lambda,
            "gamma" => Parameter::Gamma,
            "temperature" => Parameter::Temperature,
            "r_cor" => Parameter::RCor,
            "trap_time" => Parameter::TrapTime,
            "loss_time" => Parameter::LossTime,
            "compactness" => Parameter::Compactness,
            _ => return Err(Error::Invalid(format!("unknown sweep parameter '{s}'"))),
        })
    }
}

impl fmt::Display for Parameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridAxis {
    pub parameter: Parameter,
    pub min: f64,
    pub max: f64,
    pub points: usize,
    pub scale: Scale,
}

impl GridAxis {
    pub fn new(parameter: Parameter, min: f64, max: f64, points: usize, scale: Scale) -> Result<Self> {
        let a = GridAxis { parameter, min, max, points, scale };
        a.validate()?;
        Ok(a)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.min < self.max) || !self.min.is_finite() || !self.max.is_finite() {
            return Err(Error::Invalid(format!("axis {}: need min < max", self.parameter)));
        }
        if self.points < 2 {
            return Err(Error::Invalid(format!("axis {}: need ≥ 2 points", self.parameter)));
        }
        if self.scale == Scale::Log && self.min <= 0.0 {
            return Err(Error::Invalid(format!("axis {}: log scale needs min > 0", self.parameter)));
        }
        Ok(())
    }

    /// Default ranges used by the landscape figures.
    pub fn default_for(parameter: Parameter, points: usize) -> Self {
        let (min, max, scale) = match parameter {
            Parameter::Lambda => (1.0, 500.0, Scale::Log),
            Parameter::Gamma => (5.0, 500.0, Scale::Log),
            Parameter::Temperature => (35.0, 350.0, Scale::Linear),
            Parameter::TrapTime => (1e-3, 1e3, Scale::Log),
            Parameter::LossTime => (10.0, 1e4, Scale::Log),
            Parameter::RCor => (0.0, 100.0, Scale::Linear),
            Parameter::Compactness => (0.5, 5.0, Scale::Log),
        };
        GridAxis { parameter, min, max, points, scale }
    }

    /// Native coordinate of each point (ln of the value on log axes).
    pub fn coordinates(&self) -> Vec<f64> {
        let (a, b) = match self.scale {
            Scale::Linear => (self.min, self.max),
            Scale::Log => (self.min.ln(), self.max.ln()),
        };
        let last = (self.points - 1) as f64;
        (0..self.points).map(|i| a + (b - a) * i as f64 / last).collect()
    }

    pub fn values(&self) -> Vec<f64> {
        let c = self.coordinates();
        match self.scale {
            Scale::Linear => c,
            Scale::Log => c.into_iter().map(f64::exp).collect(),
        }
    }
}

/// `name:min:max:points[:scale]`, e.g. `lambda:1:500:60:log`.
impl FromStr for GridAxis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 4 && parts.len() != 5 {
            return Err(Error::Invalid(format!("axis '{s}': expected name:min:max:points[:scale]")));
        }
        let num = |x: &str| x.parse::<f64>().map_err(|_| Error::Invalid(format!("axis '{s}': bad number '{x}'")));
        let points = parts[3].parse::<usize>().map_err(|_| Error::Invalid(format!("axis '{s}': bad point count")))?;
        let scale = match parts.get(4).copied().unwrap_or("linear") {
            "linear" | "lin" => Scale::Linear,
            "log" => Scale::Log,
            other => return Err(Error::Invalid(format!("axis '{s}': unknown scale '{other}'"))),
        };
        GridAxis::new(parts[0].parse()?, num(parts[1])?, num(parts[2])?, points, scale)
    }
}

/// Applies one swept parameter value to copies of the model and bath.
pub fn apply_parameter(p: Parameter, v: f64, model: &mut ExcitonModel, bath: &mut BathSpec) -> Result<()> {
    match p {
        Parameter::Lambda => bath.lambda_cm1 = v,
        Parameter::Gamma => bath.gamma_cm1 = v,
        Parameter::Temperature => bath.temperature_k = v,
        Parameter::RCor => bath.r_cor_angstrom = v,
        Parameter::TrapTime | Parameter::LossTime => {
            if !(v > 0.0) {
                return Err(Error::Invalid(format!("{p} must be positive")));
            }
            if p == Parameter::TrapTime {
                model.trap_rate = 1.0 / v;
            } else {
                model.loss_rate = 1.0 / v;
            }
        }
        Parameter::Compactness => {
            if !(v > 0.0) {
                return Err(Error::Invalid("compactness must be positive".into()));
            }
            // point-dipole couplings scale as k⁻³ when every distance scales by k
            let n = model.n_sites();
            let f = v.powi(-3);
            for j in 0..n {
                for k in 0..n {
                    if j != k {
                        model.hamiltonian[(j, k)] *= f;
                    }
                }
            }
            if let Some(pos) = &mut model.positions {
                let c: Vec<f64> = (0..3).map(|i| pos.iter().map(|q| q[i]).sum::<f64>() / n as f64).collect();
                for q in pos.iter_mut() {
                    for i in 0..3 {
                        q[i] = c[i] + (q[i] - c[i]) * v;
                    }
                }
            }
        }
    }
    Ok(())
}

/// Provenance attached to a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridMetadata {
    pub model_hash: String,
    pub bath: BathSpec,
    pub options: ProblemOptions,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LandscapeGrid {
    pub axes: [GridAxis; 2],
    /// points₁ × points₂; NaN where the solver failed.
    pub ete: DMatrix<f64>,
    /// (i, j, message) for every failed cell.
    pub failures: Vec<(usize, usize, String)>,
    /// (i, j, raw η) for cells whose η left [0, 1] and was clamped.
    pub clamped: Vec<(usize, usize, f64)>,
    pub metadata: GridMetadata,
}

/// Short SHA-256 digest of a model's Hamiltonian, sites and rates.
pub fn model_hash(model: &ExcitonModel) -> String {
    let mut h = Sha256::new();
    for x in model.hamiltonian.iter() {
        h.update(x.to_le_bytes());
    }
    for x in [model.initial_site as f64, model.trap_site as f64, model.trap_rate, model.loss_rate] {
        h.update(x.to_le_bytes());
    }
    h.finalize().iter().take(8).map(|b| format!("{b:02x}")).collect()
}

/// One frequency-domain ETE per grid point; failures become NaN cells.
pub fn sweep(
    model: &ExcitonModel,
    bath: &BathSpec,
    opts: &ProblemOptions,
    axis1: GridAxis,
    axis2: GridAxis,
) -> Result<LandscapeGrid> {
    axis1.validate()?;
    axis2.validate()?;
    if axis1.parameter == axis2.parameter {
        return Err(Error::Invalid("sweep axes must name distinct parameters".into()));
    }
    let (v1, v2) = (axis1.values(), axis2.values());
    let cells: Vec<(usize, usize)> = (0..v1.len()).flat_map(|i| (0..v2.len()).map(move |j| (i, j))).collect();
    let results: Vec<std::result::Result<(f64, Option<f64>), String>> = cells
        .par_iter()
        .map(|&(i, j)| {
            let mut m = model.clone();
            let mut b = *bath;
            apply_parameter(axis1.parameter, v1[i], &mut m, &mut b).map_err(|e| e.to_string())?;
            apply_parameter(axis2.parameter, v2[j], &mut m, &mut b).map_err(|e| e.to_string())?;
            let r = TransferProblem::with_options(m, b, opts).and_then(|p| ete_frequency(&p)).map_err(|e| e.to_string())?;
            Ok((r.ete, r.diagnostics.clamped.then_some(r.diagnostics.raw_ete)))
        })
        .collect();
    let mut grid = DMatrix::from_element(v1.len(), v2.len(), f64::NAN);
    let mut failures = vec![];
    let mut clamped = vec![];
    for (&(i, j), r) in cells.iter().zip(results) {
        match r {
            Ok((v, raw)) => {
                grid[(i, j)] = v;
                if let Some(raw) = raw {
                    clamped.push((i, j, raw));
                }
            }
            Err(e) => failures.push((i, j, e)),
        }
    }
    Ok(LandscapeGrid {
        axes: [axis1, axis2],
        ete: grid,
        failures,
        clamped,
        metadata: GridMetadata { model_hash: model_hash(model), bath: *bath, options: *opts, seed: None },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HessianNorm {
    #[default]
    Spectral,
    Frobenius,
}

fn spacing(c: &[f64]) -> f64 {
    c[1] - c[0]
}

fn check_stencil(f: &DMatrix<f64>, x: &[f64], y: &[f64]) -> Result<()> {
    if f.nrows() < 5 || f.ncols() < 5 || x.len() != f.nrows() || y.len() != f.ncols() {
        return Err(Error::Invalid("stencils need ≥ 5 points per axis and matching coordinates".into()));
    }
    Ok(())
}

fn d1(f: &DMatrix<f64>, i: usize, j: usize, h: f64, along_x: bool) -> f64 {
    let g = |o: isize| {
        if along_x {
            f[((i as isize + o) as usize, j)]
        } else {
            f[(i, (j as isize + o) as usize)]
        }
    };
    (-g(2) + 8.0 * g(1) - 8.0 * g(-1) + g(-2)) / (12.0 * h)
}

fn d2(f: &DMatrix<f64>, i: usize, j: usize, h: f64, along_x: bool) -> f64 {
    let g = |o: isize| {
        if along_x {
            f[((i as isize + o) as usize, j)]
        } else {
            f[(i, (j as isize + o) as usize)]
        }
    };
    (-g(2) + 16.0 * g(1) - 30.0 * g(0) + 16.0 * g(-1) - g(-2)) / (12.0 * h * h)
}

/// ‖∇η‖ on the interior (rows 2..n−2, cols 2..m−2) from five-point stencils.
pub fn stencil_gradient_norm(f: &DMatrix<f64>, x: &[f64], y: &[f64]) -> Result<DMatrix<f64>> {
    check_stencil(f, x, y)?;
    let (hx, hy) = (spacing(x), spacing(y));
    Ok(DMatrix::from_fn(f.nrows() - 4, f.ncols() - 4, |i, j| {
        let (i, j) = (i + 2, j + 2);
        d1(f, i, j, hx, true).hypot(d1(f, i, j, hy, false))
    }))
}

/// Norm of the 2×2 Hessian [η_xx, η_xy; η_xy, η_yy] on the interior; η_xy
/// from the four-point cross stencil.
pub fn stencil_hessian_norm(f: &DMatrix<f64>, x: &[f64], y: &[f64], norm: HessianNorm) -> Result<DMatrix<f64>> {
    check_stencil(f, x, y)?;
    let (hx, hy) = (spacing(x), spacing(y));
    Ok(DMatrix::from_fn(f.nrows() - 4, f.ncols() - 4, |i, j| {
        let (i, j) = (i + 2, j + 2);
        let fxx = d2(f, i, j, hx, true);
        let fyy = d2(f, i, j, hy, false);
        let fxy = (f[(i + 1, j + 1)] - f[(i + 1, j - 1)] - f[(i - 1, j + 1)] + f[(i - 1, j - 1)]) / (4.0 * hx * hy);
        match norm {
            HessianNorm::Frobenius => (fxx * fxx + fyy * fyy + 2.0 * fxy * fxy).sqrt(),
            HessianNorm::Spectral => {
                let mean = 0.5 * (fxx + fyy);
                let r = (0.5 * (fxx - fyy)).hypot(fxy);
                (mean.abs() + r).max((mean - r).abs()).max((mean + r).abs())
            }
        }
    }))
}

impl LandscapeGrid {
    pub fn gradient_norm(&self) -> Result<DMatrix<f64>> {
        stencil_gradient_norm(&self.ete, &self.axes[0].coordinates(), &self.axes[1].coordinates())
    }

    pub fn hessian_norm(&self, norm: HessianNorm) -> Result<DMatrix<f64>> {
        stencil_hessian_norm(&self.ete, &self.axes[0].coordinates(), &self.axes[1].coordinates(), norm)
    }

    /// Largest finite, unclamped η on the grid with its indices.
    pub fn max(&self) -> Option<(usize, usize, f64)> {
        let mut best: Option<(usize, usize, f64)> = None;
        for i in 0..self.ete.nrows() {
            for j in 0..self.ete.ncols() {
                let v = self.ete[(i, j)];
                let clamped = self.clamped.iter().any(|c| (c.0, c.1) == (i, j));
                if v.is_finite() && !clamped && best.is_none_or(|b| v > b.2) {
                    best = Some((i, j, v));
                }
            }
        }
        best
    }
}

/// Λ = λ k_B T / (γ g), dimensionless.
pub fn governing_parameter(lambda: f64, temperature: f64, gamma: f64, g: f64) -> f64 {
    lambda * KB_CM_PER_K * temperature / (gamma * g)
}

/// η for the trap at each site in turn, starting from I/N.
pub fn trap_site_scan(model: &ExcitonModel, bath: &BathSpec, opts: &ProblemOptions) -> Result<Vec<f64>> {
    let kernel = crate::bath::kernel_for(bath, &opts.ohmic, opts.units)?;
    (1..=model.n_sites())
        .map(|s| {
            let p = TransferProblem::with_kernel(model.with_trap(s), *bath, kernel.clone(), opts.units)?.maximally_mixed();
            ete(&p)
        })
        .collect()
}

/// Whether a family needs a (slow) fit per grid point.
pub fn is_fitted(bath: &BathSpec) -> bool {
    bath.family == SpectralFamily::Ohmic
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(f: impl Fn(f64, f64) -> f64) -> (DMatrix<f64>, Vec<f64>, Vec<f64>) {
        let x: Vec<f64> = (0..9).map(|i| -1.0 + 0.25 * i as f64).collect();
        let y: Vec<f64> = (0..7).map(|j| 0.5 + 0.3 * j as f64).collect();
        (DMatrix::from_fn(9, 7, |i, j| f(x[i], y[j])), x, y)
    }

    #[test]
    fn constant_has_zero_norms() {
        let (f, x, y) = grid(|_, _| 0.7);
        assert!(stencil_gradient_norm(&f, &x, &y).unwrap().amax() < 1e-12);
        assert!(stencil_hessian_norm(&f, &x, &y, HessianNorm::Spectral).unwrap().amax() < 1e-10);
    }

    #[test]
    fn linear_and_quadratic() {
        let (f, x, y) = grid(|x, _| x);
        let g = stencil_gradient_norm(&f, &x, &y).unwrap();
        assert!(g.iter().all(|v| (v - 1.0).abs() < 1e-10));
        assert!(stencil_hessian_norm(&f, &x, &y, HessianNorm::Spectral).unwrap().amax() < 1e-10);
        let (f, x, y) = grid(|x, y| x * x + y * y);
        let h = stencil_hessian_norm(&f, &x, &y, HessianNorm::Spectral).unwrap();
        assert!(h.iter().all(|v| (v - 2.0).abs() < 1e-9));
    }

    #[test]
    fn axis_parsing() {
        let a: GridAxis = "lambda:1:500:60:log".parse().unwrap();
        assert_eq!((a.parameter, a.points, a.scale), (Parameter::Lambda, 60, Scale::Log));
        let v = a.values();
        assert!((v[0] - 1.0).abs() < 1e-12 && (v[59] - 500.0).abs() < 1e-9);
        assert!("lambda:0:5:4:log".parse::<GridAxis>().is_err());
        assert!("bogus:1:5:4".parse::<GridAxis>().is_err());
    }

    #[test]
    fn governing_parameter_scaling() {
        assert_eq!(governing_parameter(0.0, 300.0, 50.0, 100.0), 0.0);
        let a = governing_parameter(35.0, 298.0, 50.0, 120.0);
        assert!((governing_parameter(70.0, 298.0, 50.0, 120.0) - 2.0 * a).abs() < 1e-12);
        assert!((governing_parameter(35.0, 298.0, 100.0, 120.0) - a / 2.0).abs() < 1e-12);
    }
}
