//! The `enaqt` command line.
//!
//! Configuration is layered: defaults, then `--config file.json`, then
//! subcommand flags, then dotted overrides such as `--bath.lambda_cm1 70`.
//! Artifacts are assembled in memory and written atomically only after the
//! whole computation succeeded. Exit codes: 0 success, 1 invalid input,
//! 2 numerical failure.

mod config;

pub use config::{
    Command, EnsembleConfig, ModelSource, OutputConfig, PathsConfig, RobustnessConfig, RobustnessMode, RunConfig,
    SiteScanConfig, SolverConfig, SweepConfig,
};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::ensembles::{
    connectivity_paths, ensemble_member, mean_std, perturbation_ensemble, run_ensemble, site_count_scan, EndpointMode,
};
use crate::landscape::{sweep, trap_site_scan, GridAxis, HessianNorm, LandscapeGrid};
use crate::model::{fmo_canonical, fmo_geometry, PerturbSpec};
use crate::solver::{ete_frequency, propagate_time, SolverKind, TimeOptions, TransferProblem};

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    /// 1 = invalid input, 2 = numerical failure.
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn validation(msg: impl Into<String>) -> Self {
        CliError { code: 1, message: msg.into() }
    }

    pub fn numerical(msg: impl Into<String>) -> Self {
        CliError { code: 2, message: msg.into() }
    }
}

impl From<crate::Error> for CliError {
    fn from(e: crate::Error) -> Self {
        CliError { code: if e.is_numerical() { 2 } else { 1 }, message: e.to_string() }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

#[derive(Parser, Debug)]
#[command(name = "enaqt", version, about = "Exciton energy-transfer efficiency under non-Markovian baths")]
#[command(after_help = "Any config field can be overridden with a dotted flag, e.g. --bath.lambda_cm1 70 --solver.units angular")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Cmd,
}

#[derive(Args, Debug, Default)]
pub struct Common {
    /// JSON run configuration.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Use the built-in FMO monomer.
    #[arg(long)]
    pub builtin_fmo: bool,
    /// Chromophore geometry JSON; couplings rebuilt from point dipoles.
    #[arg(long, value_name = "FILE")]
    pub geometry: Option<PathBuf>,
    /// Serialized exciton model JSON.
    #[arg(long, value_name = "FILE")]
    pub model: Option<PathBuf>,
    #[arg(long)]
    pub initial: Option<usize>,
    #[arg(long)]
    pub trap: Option<usize>,
    /// r_trap⁻¹ in ps.
    #[arg(long, value_name = "PS")]
    pub trap_time: Option<f64>,
    /// r_loss⁻¹ in ps.
    #[arg(long, value_name = "PS")]
    pub loss_time: Option<f64>,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub threads: Option<usize>,
    /// Embed wall time in artifact metadata.
    #[arg(long)]
    pub timing: bool,
}

#[derive(Subcommand, Debug)]
pub enum Cmd {
    /// Transfer efficiency of one model.
    Ete {
        #[command(flatten)]
        common: Common,
        /// Use the time-domain solver.
        #[arg(long)]
        time: bool,
    },
    /// Site populations over time (CSV).
    Dynamics {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_name = "PS")]
        t_max: Option<f64>,
        #[arg(long)]
        points: Option<usize>,
    },
    /// Two-parameter ETE grid (CSV).
    Sweep {
        #[command(flatten)]
        common: Common,
        /// name:min:max:points[:log]
        #[arg(long)]
        axis1: Option<String>,
        #[arg(long)]
        axis2: Option<String>,
        /// Also write gradient and Hessian norm grids.
        #[arg(long)]
        metrics: bool,
        /// Frobenius instead of spectral Hessian norm.
        #[arg(long)]
        frobenius: bool,
    },
    /// η for the trap at each site, maximally mixed start.
    TrapScan {
        #[command(flatten)]
        common: Common,
    },
    /// Random complexes in a sphere.
    Ensemble {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        sites: Option<usize>,
        #[arg(long, value_name = "ANGSTROM")]
        diameter: Option<f64>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        free_endpoints: bool,
        #[arg(long, value_name = "DIR")]
        dump_geometries: Option<PathBuf>,
    },
    /// Ensemble mean/std as a function of the number of sites.
    SiteScan {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_name = "ANGSTROM")]
        diameter: Option<f64>,
        #[arg(long)]
        n_min: Option<usize>,
        #[arg(long)]
        n_max: Option<usize>,
        #[arg(long)]
        samples: Option<usize>,
    },
    /// η under random structural perturbations of the geometry.
    Robustness {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        mode: Option<RobustnessMode>,
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Connectivity paths from initial to trap site.
    Paths {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_name = "CM1")]
        threshold: Option<f64>,
    },
    /// Write the built-in FMO model and geometry as JSON.
    ExportFmo {
        #[command(flatten)]
        common: Common,
    },
}

type Patches = Vec<(String, String)>;

fn push<T: serde::Serialize>(p: &mut Patches, key: &str, v: Option<T>) {
    if let Some(v) = v {
        p.push((key.into(), serde_json::to_string(&v).expect("flag serializes")));
    }
}

impl Common {
    fn patches(&self, p: &mut Patches) -> Result<(), CliError> {
        let sources = [self.builtin_fmo, self.geometry.is_some(), self.model.is_some()];
        if sources.iter().filter(|&&s| s).count() > 1 {
            return Err(CliError::validation("give exactly one of --builtin-fmo, --geometry, --model"));
        }
        if self.builtin_fmo {
            push(p, "model", Some(ModelSource::BuiltinFmo));
        }
        push(p, "model", self.geometry.clone().map(ModelSource::Geometry));
        push(p, "model", self.model.clone().map(ModelSource::Model));
        push(p, "initial_site", self.initial);
        push(p, "trap_site", self.trap);
        push(p, "trap_time_ps", self.trap_time);
        push(p, "loss_time_ps", self.loss_time);
        push(p, "output.out", self.out.clone());
        push(p, "seed", self.seed);
        push(p, "threads", self.threads);
        if self.timing {
            push(p, "output.timing", Some(true));
        }
        Ok(())
    }
}

impl Cmd {
    /// Command, config file and flag patches.
    fn lower(&self) -> Result<(Command, Option<PathBuf>, Patches), CliError> {
        let mut p = Patches::new();
        let (cmd, common) = match self {
            Cmd::Ete { common, time } => {
                if *time {
                    push(&mut p, "solver.kind", Some(SolverKind::Time));
                }
                (Command::Ete, common)
            }
            Cmd::Dynamics { common, t_max, points } => {
                push(&mut p, "solver.t_max_ps", *t_max);
                push(&mut p, "solver.points", *points);
                (Command::Dynamics, common)
            }
            Cmd::Sweep { common, axis1, axis2, metrics, frobenius } => {
                push(&mut p, "sweep.axis1", axis1.clone());
                push(&mut p, "sweep.axis2", axis2.clone());
                if *metrics {
                    push(&mut p, "sweep.metrics", Some(true));
                }
                if *frobenius {
                    push(&mut p, "sweep.hessian_norm", Some(HessianNorm::Frobenius));
                }
                (Command::Sweep, common)
            }
            Cmd::TrapScan { common } => (Command::TrapScan, common),
            Cmd::Ensemble { common, sites, diameter, samples, free_endpoints, dump_geometries } => {
                push(&mut p, "ensemble.n_sites", *sites);
                push(&mut p, "ensemble.diameter", *diameter);
                push(&mut p, "ensemble.samples", *samples);
                if *free_endpoints {
                    push(&mut p, "ensemble.endpoints", Some(EndpointMode::Free));
                }
                push(&mut p, "output.dump_geometries", dump_geometries.clone());
                (Command::Ensemble, common)
            }
            Cmd::SiteScan { common, diameter, n_min, n_max, samples } => {
                push(&mut p, "site_scan.diameter", *diameter);
                push(&mut p, "site_scan.n_min", *n_min);
                push(&mut p, "site_scan.n_max", *n_max);
                push(&mut p, "site_scan.samples", *samples);
                (Command::SiteScan, common)
            }
            Cmd::Robustness { common, mode, samples } => {
                push(&mut p, "robustness.mode", *mode);
                push(&mut p, "robustness.samples", *samples);
                (Command::Robustness, common)
            }
            Cmd::Paths { common, threshold } => {
                push(&mut p, "paths.threshold", *threshold);
                (Command::Paths, common)
            }
            Cmd::ExportFmo { common } => (Command::ExportFmo, common),
        };
        common.patches(&mut p)?;
        push(&mut p, "command", Some(cmd));
        Ok((cmd, common.config.clone(), p))
    }
}

/// Splits `--a.b value` / `--a.b=value` overrides from the arguments clap sees.
pub fn split_dotted(args: &[String]) -> Result<(Vec<String>, Patches), CliError> {
    let mut rest = vec![];
    let mut patches = vec![];
    let mut it = args.iter();
    while let Some(a) = it.next() {
        let name = a.strip_prefix("--").map(|s| s.split('=').next().unwrap_or(s));
        match name {
            Some(n) if n.contains('.') => {
                let value = match a.split_once('=') {
                    Some((_, v)) => v.to_string(),
                    None => it.next().cloned().ok_or_else(|| CliError::validation(format!("{a} needs a value")))?,
                };
                patches.push((n.to_string(), value));
            }
            _ => rest.push(a.clone()),
        }
    }
    Ok((rest, patches))
}

/// Parses argv (without the program name) into a validated config.
pub fn parse_config(args: &[String]) -> Result<RunConfig, CliError> {
    let (rest, dotted) = split_dotted(args)?;
    let cli = Cli::try_parse_from(std::iter::once("enaqt".to_string()).chain(rest))
        .map_err(|e| CliError::validation(e.to_string()))?;
    let (_, file, mut patches) = cli.command.lower()?;
    patches.extend(dotted);
    RunConfig::resolve(file.as_deref(), &patches)
}

/// A finished run: the stdout summary and the files to write.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub summary: Value,
    pub artifacts: Vec<(PathBuf, Vec<u8>)>,
}

fn metadata(cfg: &RunConfig, started: Instant) -> Value {
    let mut m = json!({
        "tool": "enaqt",
        "version": env!("CARGO_PKG_VERSION"),
        "config_hash": cfg.hash(),
        "seed": cfg.seed,
    });
    if cfg.output.timing {
        m["wall_time_s"] = json!(started.elapsed().as_secs_f64());
    }
    m
}

fn json_bytes(v: &Value) -> Vec<u8> {
    let mut b = serde_json::to_vec_pretty(v).expect("artifact serializes");
    b.push(b'\n');
    b
}

fn csv_bytes(header: Vec<String>, rows: impl IntoIterator<Item = Vec<String>>) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(vec![]);
    w.write_record(&header).expect("in-memory csv");
    for r in rows {
        w.write_record(&r).expect("in-memory csv");
    }
    w.into_inner().expect("in-memory csv")
}

fn with_suffix(p: &Path, suffix: &str) -> PathBuf {
    let mut s = p.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

/// `grid.csv` → `grid.grad.csv`.
fn companion(p: &Path, tag: &str) -> PathBuf {
    let stem = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let ext = p.extension().map(|e| e.to_string_lossy().into_owned()).unwrap_or_else(|| "csv".into());
    p.with_file_name(format!("{stem}.{tag}.{ext}"))
}

fn grid_csv(m: &nalgebra::DMatrix<f64>, xs: &[f64], ys: &[f64], corner: &str) -> Vec<u8> {
    let header = std::iter::once(corner.to_string()).chain(ys.iter().map(|y| y.to_string())).collect();
    let rows = (0..m.nrows()).map(|i| std::iter::once(xs[i].to_string()).chain((0..m.ncols()).map(|j| m[(i, j)].to_string())).collect());
    csv_bytes(header, rows)
}

fn sweep_artifacts(cfg: &RunConfig, grid: &LandscapeGrid, out: &Path, meta: Value) -> Result<Vec<(PathBuf, Vec<u8>)>, CliError> {
    let (a, b) = (&grid.axes[0], &grid.axes[1]);
    let (xs, ys) = (a.values(), b.values());
    let corner = format!("{}\\{}", a.parameter, b.parameter);
    let mut files = vec![(out.to_path_buf(), grid_csv(&grid.ete, &xs, &ys, &corner))];
    if cfg.sweep.metrics {
        let g = grid.gradient_norm()?;
        let h = grid.hessian_norm(cfg.sweep.hessian_norm)?;
        let (xi, yi) = (&xs[2..xs.len() - 2], &ys[2..ys.len() - 2]);
        files.push((companion(out, "grad"), grid_csv(&g, xi, yi, &corner)));
        files.push((companion(out, "hess"), grid_csv(&h, xi, yi, &corner)));
    }
    let side = json!({
        "metadata": meta,
        "axes": grid.axes,
        "model_hash": grid.metadata.model_hash,
        "bath": grid.metadata.bath,
        "options": grid.metadata.options,
        "hessian_norm": cfg.sweep.hessian_norm,
        "failures": grid.failures,
        "clamped": grid.clamped,
    });
    files.push((with_suffix(out, ".meta.json"), json_bytes(&side)));
    Ok(files)
}

/// Runs the configured command without touching the file system except for reading inputs.
pub fn execute(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let started = Instant::now();
    let out = cfg.output.out.clone();
    let mut artifacts = vec![];
    let opts = cfg.options();
    let summary = match cfg.command {
        Command::Ete => {
            let p = TransferProblem::with_options(cfg.model()?, cfg.bath, &opts)?;
            let r = match cfg.solver.kind {
                SolverKind::Frequency => ete_frequency(&p)?,
                SolverKind::Time => {
                    propagate_time(&p, &TimeOptions { t_max_ps: cfg.solver.t_max_ps, ..Default::default() })?.1
                }
            };
            if let Some(o) = &out {
                artifacts.push((o.clone(), json_bytes(&json!({ "metadata": metadata(cfg, started), "result": r }))));
            }
            json!({ "ete": r.ete, "loss_fraction": r.loss_fraction, "solver": r.solver,
                    "condition_estimate": r.diagnostics.condition_estimate, "warnings": r.diagnostics.warnings })
        }
        Command::Dynamics => {
            let p = TransferProblem::with_options(cfg.model()?, cfg.bath, &opts)?;
            let (traj, r) = propagate_time(&p, &TimeOptions::with_grid(cfg.solver.t_max_ps, cfg.solver.points))?;
            if let Some(o) = &out {
                let n = p.model.n_sites();
                let header = std::iter::once("t_ps".to_string())
                    .chain((1..=n).map(|j| format!("p{j}")))
                    .chain(["trace".to_string(), "eta_cumulative".to_string()])
                    .collect();
                let rows = (0..traj.t_ps.len()).map(|k| {
                    std::iter::once(traj.t_ps[k].to_string())
                        .chain(traj.populations[k].iter().map(|x| x.to_string()))
                        .chain([traj.trace[k].to_string(), traj.eta_cumulative[k].to_string()])
                        .collect()
                });
                artifacts.push((o.clone(), csv_bytes(header, rows)));
                artifacts.push((with_suffix(o, ".meta.json"), json_bytes(&json!({ "metadata": metadata(cfg, started), "result": r }))));
            }
            json!({ "ete": r.ete, "loss_fraction": r.loss_fraction, "residual_trace": r.residual_trace,
                    "points": traj.t_ps.len() })
        }
        Command::Sweep => {
            let a1: GridAxis = cfg.sweep.axis1.parse()?;
            let a2: GridAxis = cfg.sweep.axis2.parse()?;
            let mut grid = sweep(&cfg.model()?, &cfg.bath, &opts, a1, a2)?;
            grid.metadata.seed = Some(cfg.seed);
            if let Some(o) = &out {
                artifacts.extend(sweep_artifacts(cfg, &grid, o, metadata(cfg, started))?);
            }
            let best = grid.max().map(|(i, j, v)| json!({ "ete": v, a1.parameter.name(): a1.values()[i], a2.parameter.name(): a2.values()[j] }));
            json!({ "points": grid.ete.len(), "failed": grid.failures.len(), "clamped": grid.clamped.len(), "max": best })
        }
        Command::TrapScan => {
            let etas = trap_site_scan(&cfg.model()?, &cfg.bath, &opts)?;
            let best = etas.iter().enumerate().fold((0, f64::NEG_INFINITY), |b, (i, &v)| if v > b.1 { (i, v) } else { b }).0 + 1;
            if let Some(o) = &out {
                let sites: Vec<Value> = etas.iter().enumerate().map(|(i, e)| json!({ "trap_site": i + 1, "ete": e })).collect();
                artifacts.push((o.clone(), json_bytes(&json!({ "metadata": metadata(cfg, started), "sites": sites, "best_site": best }))));
            }
            json!({ "ete": etas, "best_site": best })
        }
        Command::Ensemble => {
            let spec = cfg.ensemble_spec();
            let report = run_ensemble(&spec)?;
            if let Some(dir) = &cfg.output.dump_geometries {
                for i in 0..spec.n_samples {
                    let (g, _) = ensemble_member(&spec, i)?;
                    let bytes = serde_json::to_vec_pretty(&g).expect("geometry serializes");
                    artifacts.push((dir.join(format!("sample_{i:06}.json")), bytes));
                }
            }
            if let Some(o) = &out {
                artifacts.push((
                    o.clone(),
                    json_bytes(&json!({
                        "metadata": metadata(cfg, started),
                        "gap_measure": "nuclear-norm g, the same measure as the governing parameter",
                        "spec": report.spec,
                        "aggregates": report.aggregates,
                        "samples": report.samples,
                    })),
                ));
            }
            let a = &report.aggregates;
            json!({ "mean": a.mean, "std": a.std, "histogram": a.histogram, "n_ok": a.n_ok, "n_failed": a.n_failed })
        }
        Command::SiteScan => {
            let s = &cfg.site_scan;
            let base = crate::ensembles::EnsembleSpec { diameter: s.diameter, n_samples: s.samples, ..cfg.ensemble_spec() };
            let counts: Vec<usize> = (s.n_min..=s.n_max).collect();
            let points = site_count_scan(&base, &counts)?;
            if let Some(o) = &out {
                artifacts.push((o.clone(), json_bytes(&json!({ "metadata": metadata(cfg, started), "diameter": s.diameter, "samples": s.samples, "points": points }))));
            }
            json!({ "points": points })
        }
        Command::Robustness => {
            let geom = cfg
                .geometry()?
                .ok_or_else(|| CliError::validation("robustness needs a geometry (builtin FMO or --geometry)"))?;
            let template = cfg.model()?;
            let spec = match cfg.robustness.mode {
                RobustnessMode::Conservative => PerturbSpec::conservative(),
                RobustnessMode::Large => PerturbSpec::large_variation(),
            };
            let rs = perturbation_ensemble(&geom, &template, &spec, &cfg.bath, &opts, cfg.robustness.samples, cfg.seed)?;
            let etas: Vec<Option<f64>> = rs.iter().map(|r| r.as_ref().ok().copied()).collect();
            let ok: Vec<f64> = etas.iter().flatten().copied().collect();
            let above = ok.iter().filter(|&&e| e > cfg.robustness.threshold).count() as f64 / rs.len() as f64;
            let (mean, std) = mean_std(&ok);
            let failed = rs.len() - ok.len();
            if let Some(o) = &out {
                artifacts.push((
                    o.clone(),
                    json_bytes(&json!({
                        "metadata": metadata(cfg, started), "mode": cfg.robustness.mode, "perturbation": spec,
                        "threshold": cfg.robustness.threshold, "fraction_above": above, "mean": mean, "std": std,
                        "n_failed": failed, "ete": etas,
                    })),
                ));
            }
            json!({ "fraction_above": above, "threshold": cfg.robustness.threshold, "mean": mean, "std": std, "n_failed": failed })
        }
        Command::Paths => {
            let model = cfg.model()?;
            let paths = connectivity_paths(&model)?;
            let dominant = paths.iter().filter(|p| p.strength > cfg.paths.threshold).count();
            let strongest = paths.iter().map(|p| p.strength).fold(0.0, f64::max);
            if let Some(o) = &out {
                artifacts.push((
                    o.clone(),
                    json_bytes(&json!({ "metadata": metadata(cfg, started), "threshold": cfg.paths.threshold,
                                        "dominant_count": dominant, "paths": paths })),
                ));
            }
            json!({ "paths": paths.len(), "dominant": dominant, "strongest": strongest })
        }
        Command::ExportFmo => {
            let dir = out.clone().expect("validated");
            let model = dir.join("fmo_model.json");
            let geom = dir.join("fmo_geometry.json");
            artifacts.push((model.clone(), json_bytes(&serde_json::to_value(fmo_canonical()).expect("model serializes"))));
            artifacts.push((geom.clone(), json_bytes(&serde_json::to_value(fmo_geometry()).expect("geometry serializes"))));
            json!({ "written": [model, geom] })
        }
    };
    let mut summary = summary;
    summary["command"] = serde_json::to_value(cfg.command).expect("command serializes");
    summary["wall_time_s"] = json!(started.elapsed().as_secs_f64());
    Ok(Outcome { summary, artifacts })
}

/// Temp file in the target directory, then rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    std::fs::create_dir_all(&dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(&dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

fn run_inner(args: &[String]) -> Result<Value, CliError> {
    let cfg = parse_config(args)?;
    let outcome = match cfg.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::validation(format!("thread pool: {e}")))?
            .install(|| execute(&cfg)),
        None => execute(&cfg),
    }?;
    for (p, b) in &outcome.artifacts {
        write_atomic(p, b).map_err(|e| CliError::validation(format!("writing {}: {e}", p.display())))?;
    }
    Ok(outcome.summary)
}

/// Entry point for the binary; returns the process exit code.
pub fn main_with_args(args: &[String]) -> i32 {
    if args.iter().any(|a| a == "--help" || a == "-h" || a == "--version" || a == "-V") || args.is_empty() {
        let r = Cli::try_parse_from(std::iter::once("enaqt".to_string()).chain(args.iter().cloned()));
        if let Err(e) = r {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    }
    match run_inner(args) {
        Ok(summary) => {
            println!("{summary}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            println!("{}", json!({ "error": e.message, "exit_code": e.code }));
            e.code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(s: &str) -> Vec<String> {
        s.split_whitespace().map(String::from).collect()
    }

    #[test]
    fn dotted_split() {
        let (rest, p) = split_dotted(&args("ete --builtin-fmo --bath.lambda_cm1 70 --solver.units=angular")).unwrap();
        assert_eq!(rest, args("ete --builtin-fmo"));
        assert_eq!(p, vec![("bath.lambda_cm1".into(), "70".into()), ("solver.units".into(), "angular".into())]);
    }

    #[test]
    fn conflicting_sources_rejected() {
        let e = parse_config(&args("ete --builtin-fmo --geometry g.json")).unwrap_err();
        assert_eq!(e.code, 1);
    }

    #[test]
    fn flags_reach_config() {
        let c = parse_config(&args("ensemble --sites 9 --diameter 40 --samples 3 --seed 5")).unwrap();
        assert_eq!((c.command, c.ensemble.n_sites, c.ensemble.diameter, c.ensemble.samples, c.seed), (Command::Ensemble, 9, 40.0, 3, 5));
    }

    #[test]
    fn companion_names() {
        assert_eq!(companion(Path::new("out/grid.csv"), "grad"), PathBuf::from("out/grid.grad.csv"));
        assert_eq!(with_suffix(Path::new("grid.csv"), ".meta.json"), PathBuf::from("grid.csv.meta.json"));
    }
}
