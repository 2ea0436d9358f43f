//! Run configuration: JSON file, then subcommand flags, then dotted overrides.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

use super::CliError;
use crate::bath::{BathSpec, OhmicFit};
use crate::ensembles::EndpointMode;
use crate::landscape::HessianNorm;
use crate::model::{build_hamiltonian, fmo_canonical, fmo_geometry, ChromophoreGeometry, ExcitonModel};
use crate::solver::SolverKind;
use crate::units::Units;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    #[default]
    Ete,
    Dynamics,
    Sweep,
    TrapScan,
    Ensemble,
    SiteScan,
    Robustness,
    Paths,
    ExportFmo,
}

/// `"builtin-fmo"`, `{"geometry": "file.json"}` or `{"model": "file.json"}`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelSource {
    #[default]
    BuiltinFmo,
    /// Chromophore geometry; the Hamiltonian is rebuilt from point dipoles.
    Geometry(PathBuf),
    /// A serialized `ExcitonModel`.
    Model(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub kind: SolverKind,
    pub units: Units,
    pub ohmic: OhmicFit,
    /// Time-solver horizon, ps.
    pub t_max_ps: f64,
    /// Output points for `dynamics`.
    pub points: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { kind: SolverKind::Frequency, units: Units::default(), ohmic: OhmicFit::default(), t_max_ps: 1e4, points: 201 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub axis1: String,
    pub axis2: String,
    pub metrics: bool,
    pub hessian_norm: HessianNorm,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            axis1: "lambda:1:500:60:log".into(),
            axis2: "gamma:5:500:60:log".into(),
            metrics: false,
            hessian_norm: HessianNorm::Spectral,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnsembleConfig {
    pub n_sites: usize,
    pub diameter: f64,
    pub samples: usize,
    pub endpoints: EndpointMode,
    pub energy_range: (f64, f64),
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        EnsembleConfig { n_sites: 7, diameter: 30.0, samples: 1000, endpoints: EndpointMode::Poles, energy_range: (0.0, 500.0) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SiteScanConfig {
    pub diameter: f64,
    pub n_min: usize,
    pub n_max: usize,
    pub samples: usize,
}

impl Default for SiteScanConfig {
    fn default() -> Self {
        SiteScanConfig { diameter: 30.0, n_min: 2, n_max: 20, samples: 200 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum RobustnessMode {
    /// ±2.5 Å, ±5°, ±10 cm⁻¹.
    #[default]
    Conservative,
    /// ±2.5 Å, random dipoles, energies anywhere in [0, 500] cm⁻¹.
    Large,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RobustnessConfig {
    pub mode: RobustnessMode,
    pub samples: usize,
    pub threshold: f64,
}

impl Default for RobustnessConfig {
    fn default() -> Self {
        RobustnessConfig { mode: RobustnessMode::Conservative, samples: 500, threshold: 0.9 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathsConfig {
    /// Dominance threshold, cm⁻¹.
    pub threshold: f64,
}

impl Default for PathsConfig {
    fn default() -> Self {
        PathsConfig { threshold: crate::ensembles::DOMINANT_PATH_THRESHOLD }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    /// Main artifact (a directory for `export-fmo`).
    pub out: Option<PathBuf>,
    /// `ensemble`: write every sampled geometry here.
    pub dump_geometries: Option<PathBuf>,
    /// Embed wall time in artifacts (breaks byte-identical reruns).
    pub timing: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    pub model: ModelSource,
    pub initial_site: Option<usize>,
    pub trap_site: Option<usize>,
    /// r_trap⁻¹ in ps.
    pub trap_time_ps: Option<f64>,
    /// r_loss⁻¹ in ps.
    pub loss_time_ps: Option<f64>,
    pub bath: BathSpec,
    pub solver: SolverConfig,
    pub sweep: SweepConfig,
    pub ensemble: EnsembleConfig,
    pub site_scan: SiteScanConfig,
    pub robustness: RobustnessConfig,
    pub paths: PathsConfig,
    pub output: OutputConfig,
    pub seed: u64,
    /// Worker threads; defaults to available parallelism. Never affects results.
    pub threads: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            command: Command::Ete,
            model: ModelSource::BuiltinFmo,
            initial_site: None,
            trap_site: None,
            trap_time_ps: None,
            loss_time_ps: None,
            bath: BathSpec::canonical(),
            solver: SolverConfig::default(),
            sweep: SweepConfig::default(),
            ensemble: EnsembleConfig::default(),
            site_scan: SiteScanConfig::default(),
            robustness: RobustnessConfig::default(),
            paths: PathsConfig::default(),
            output: OutputConfig::default(),
            seed: 42,
            threads: None,
        }
    }
}

/// Recursively overlays `patch` onto `base`.
pub fn merge(base: &mut Value, patch: Value) {
    match (base, patch) {
        (Value::Object(b), Value::Object(p)) => {
            for (k, v) in p {
                match b.get_mut(&k) {
                    Some(slot) if slot.is_object() && v.is_object() => merge(slot, v),
                    _ => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (b, p) => *b = p,
    }
}

/// Sets `a.b.c` in a JSON tree; the value is parsed as JSON, falling back to a string.
pub fn set_dotted(root: &mut Value, path: &str, raw: &str) -> Result<(), CliError> {
    let value = serde_json::from_str::<Value>(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let keys: Vec<&str> = path.split('.').collect();
    if keys.iter().any(|k| k.is_empty()) {
        return Err(CliError::validation(format!("bad override path '{path}'")));
    }
    let mut node = root;
    for k in &keys[..keys.len() - 1] {
        let obj = node
            .as_object_mut()
            .ok_or_else(|| CliError::validation(format!("override '{path}': '{k}' is not a section")))?;
        node = obj.entry(k.to_string()).or_insert_with(|| Value::Object(Default::default()));
        if node.is_null() {
            *node = Value::Object(Default::default());
        }
    }
    node.as_object_mut()
        .ok_or_else(|| CliError::validation(format!("override '{path}' does not name a field")))?
        .insert(keys[keys.len() - 1].to_string(), value);
    Ok(())
}

impl RunConfig {
    /// Defaults ← config file ← `patches` (in order), then schema validation.
    pub fn resolve(file: Option<&Path>, patches: &[(String, String)]) -> Result<Self, CliError> {
        let mut v = serde_json::to_value(RunConfig::default()).expect("default config serializes");
        if let Some(f) = file {
            let text = std::fs::read_to_string(f)
                .map_err(|e| CliError::validation(format!("cannot read config {}: {e}", f.display())))?;
            let patch: Value = serde_json::from_str(&text)
                .map_err(|e| CliError::validation(format!("config {}: {e}", f.display())))?;
            if !patch.is_object() {
                return Err(CliError::validation("config must be a JSON object"));
            }
            merge(&mut v, patch);
        }
        for (k, raw) in patches {
            set_dotted(&mut v, k, raw)?;
        }
        let cfg: RunConfig = serde_json::from_value(v).map_err(|e| CliError::validation(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.bath.validate()?;
        for (name, t) in [("trap_time_ps", self.trap_time_ps), ("loss_time_ps", self.loss_time_ps)] {
            if let Some(t) = t {
                if !(t > 0.0) {
                    return Err(CliError::validation(format!("{name} must be positive")));
                }
            }
        }
        if self.threads == Some(0) {
            return Err(CliError::validation("threads must be ≥ 1"));
        }
        if !(self.solver.t_max_ps > 0.0) || self.solver.points < 2 {
            return Err(CliError::validation("solver.t_max_ps must be positive and solver.points ≥ 2"));
        }
        if self.site_scan.n_min < 2 || self.site_scan.n_min > self.site_scan.n_max || self.site_scan.samples == 0 {
            return Err(CliError::validation("site_scan needs 2 ≤ n_min ≤ n_max and samples ≥ 1"));
        }
        if self.robustness.samples == 0 || self.ensemble.samples == 0 {
            return Err(CliError::validation("sample counts must be ≥ 1"));
        }
        match self.command {
            Command::Sweep => {
                let a: crate::landscape::GridAxis = self.sweep.axis1.parse()?;
                let b: crate::landscape::GridAxis = self.sweep.axis2.parse()?;
                if a.parameter == b.parameter {
                    return Err(CliError::validation("sweep axes must name distinct parameters"));
                }
                if self.sweep.metrics && (a.points < 5 || b.points < 5) {
                    return Err(CliError::validation("--metrics needs ≥ 5 points per axis"));
                }
            }
            Command::Ensemble => self.ensemble_spec().validate()?,
            Command::ExportFmo if self.output.out.is_none() => {
                return Err(CliError::validation("export-fmo needs --out <dir>"));
            }
            _ => {}
        }
        Ok(())
    }

    /// SHA-256 of the canonical config with thread count and output paths
    /// removed, so it identifies the computation, not where it ran.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.threads = None;
        c.output = OutputConfig::default();
        let bytes = serde_json::to_vec(&c).expect("config serializes");
        Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn geometry(&self) -> Result<Option<ChromophoreGeometry>, CliError> {
        Ok(match &self.model {
            ModelSource::BuiltinFmo => Some(fmo_geometry()),
            ModelSource::Geometry(p) => Some(read_json(p)?),
            ModelSource::Model(_) => None,
        })
    }

    /// The model with site and rate overrides applied.
    pub fn model(&self) -> Result<ExcitonModel, CliError> {
        let mut m = match &self.model {
            ModelSource::BuiltinFmo => fmo_canonical(),
            ModelSource::Geometry(p) => {
                let g: ChromophoreGeometry = read_json(p)?;
                let h = build_hamiltonian(&g)?;
                let n = h.nrows();
                ExcitonModel { hamiltonian: h, initial_site: 1, trap_site: n, trap_rate: 1.0, loss_rate: 1e-3, positions: Some(g.positions()) }
            }
            ModelSource::Model(p) => read_json(p)?,
        };
        if let Some(s) = self.initial_site {
            m.initial_site = s;
        }
        if let Some(s) = self.trap_site {
            m.trap_site = s;
        }
        if let Some(t) = self.trap_time_ps {
            m.trap_rate = 1.0 / t;
        }
        if let Some(t) = self.loss_time_ps {
            m.loss_rate = 1.0 / t;
        }
        m.validate(self.command == Command::TrapScan)?;
        Ok(m)
    }

    pub fn options(&self) -> crate::solver::ProblemOptions {
        crate::solver::ProblemOptions { units: self.solver.units, ohmic: self.solver.ohmic }
    }

    pub fn ensemble_spec(&self) -> crate::ensembles::EnsembleSpec {
        let e = &self.ensemble;
        crate::ensembles::EnsembleSpec {
            n_sites: e.n_sites,
            diameter: e.diameter,
            n_samples: e.samples,
            bath: self.bath,
            seed: self.seed,
            energy_range: e.energy_range,
            endpoints: e.endpoints,
            trap_rate: self.trap_time_ps.map_or(1.0, |t| 1.0 / t),
            loss_rate: self.loss_time_ps.map_or(1e-3, |t| 1.0 / t),
            options: self.options(),
            ..Default::default()
        }
    }
}

fn read_json<T: serde::de::DeserializeOwned>(p: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(p).map_err(|e| CliError::validation(format!("cannot read {}: {e}", p.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::validation(format!("{}: {e}", p.display())))
}
