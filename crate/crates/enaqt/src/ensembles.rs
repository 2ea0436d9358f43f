//! Random chromophore complexes, random initial states and structural analytics.

use nalgebra::{DMatrix, Vector3};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bath::{kernel_for, BathSpec};
use crate::error::{Error, Result};
use crate::model::{
    build_hamiltonian, energy_scale_g, isotropic_dipole, perturb_geometry, ChromophoreGeometry, ExcitonModel,
    PerturbSpec, Site, MIN_PAIR_DISTANCE,
};
use crate::solver::{ete, ProblemOptions, TransferProblem};

const MAX_PLACEMENT_DRAWS: usize = 100_000;
/// Path enumeration is factorial in the site count.
pub const MAX_PATH_SITES: usize = 10;
pub const HISTOGRAM_BINS: usize = 10;

/// Where the initial and trap chromophores sit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EndpointMode {
    /// Initial at (0, 0, +d/2), trap at (0, 0, −d/2).
    #[default]
    Poles,
    /// Every site uniform in the ball; site 1 is initial, site n the trap.
    Free,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnsembleSpec {
    pub n_sites: usize,
    /// Sphere diameter, Å.
    pub diameter: f64,
    pub n_samples: usize,
    pub bath: BathSpec,
    pub seed: u64,
    /// Site energies are uniform in this range, cm⁻¹.
    pub energy_range: (f64, f64),
    pub min_distance: f64,
    pub endpoints: EndpointMode,
    pub trap_rate: f64,
    pub loss_rate: f64,
    pub options: ProblemOptions,
}

impl Default for EnsembleSpec {
    fn default() -> Self {
        EnsembleSpec {
            n_sites: 7,
            diameter: 30.0,
            n_samples: 1000,
            bath: BathSpec::canonical(),
            seed: 42,
            energy_range: (0.0, 500.0),
            min_distance: MIN_PAIR_DISTANCE,
            endpoints: EndpointMode::Poles,
            trap_rate: 1.0,
            loss_rate: 1e-3,
            options: ProblemOptions::default(),
        }
    }
}

impl EnsembleSpec {
    pub fn new(n_sites: usize, diameter: f64, n_samples: usize, seed: u64) -> Self {
        EnsembleSpec { n_sites, diameter, n_samples, seed, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_sites < 2 {
            return Err(Error::Invalid("ensembles need at least two sites".into()));
        }
        if !(self.diameter > 2.0 * self.min_distance) {
            return Err(Error::Invalid(format!("diameter must exceed {} Å", 2.0 * self.min_distance)));
        }
        if self.n_samples == 0 {
            return Err(Error::Invalid("n_samples must be ≥ 1".into()));
        }
        let (lo, hi) = self.energy_range;
        if !(lo <= hi) {
            return Err(Error::Invalid("energy range inverted".into()));
        }
        if !(self.trap_rate >= 0.0 && self.loss_rate >= 0.0) {
            return Err(Error::Invalid("rates must be non-negative".into()));
        }
        self.bath.validate()
    }
}

/// Independent stream for sample `index`, so results do not depend on scheduling.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn uniform_in_ball<R: Rng + ?Sized>(rng: &mut R, radius: f64) -> Vector3<f64> {
    let dir = isotropic_dipole(rng);
    let u: f64 = rng.random();
    dir * (radius * u.cbrt())
}

/// One random complex: positions, isotropic dipoles, uniform energies, trap at the last site.
pub fn sample_configuration<R: Rng + ?Sized>(
    spec: &EnsembleSpec,
    rng: &mut R,
) -> Result<(ChromophoreGeometry, ExcitonModel)> {
    spec.validate()?;
    let n = spec.n_sites;
    let r = spec.diameter / 2.0;
    let mut pos: Vec<Vector3<f64>> = Vec::with_capacity(n);
    if spec.endpoints == EndpointMode::Poles {
        pos.push(Vector3::new(0.0, 0.0, r));
    }
    let free = if spec.endpoints == EndpointMode::Poles { n - 2 } else { n };
    let mut draws = 0;
    for _ in 0..free {
        loop {
            draws += 1;
            if draws > MAX_PLACEMENT_DRAWS {
                return Err(Error::PackingInfeasible(MAX_PLACEMENT_DRAWS));
            }
            let p = uniform_in_ball(rng, r);
            let far = |q: &Vector3<f64>| (p - q).norm() >= spec.min_distance;
            let south = Vector3::new(0.0, 0.0, -r);
            if pos.iter().all(far) && (spec.endpoints == EndpointMode::Free || far(&south)) {
                pos.push(p);
                break;
            }
        }
    }
    if spec.endpoints == EndpointMode::Poles {
        pos.push(Vector3::new(0.0, 0.0, -r));
    }
    let (lo, hi) = spec.energy_range;
    let sites: Vec<Site> = pos
        .into_iter()
        .map(|position| {
            let dipole = isotropic_dipole(rng);
            let energy = if hi > lo { rng.random_range(lo..=hi) } else { lo };
            Site { position, dipole, energy }
        })
        .collect();
    let geom = ChromophoreGeometry::new(sites);
    let h = build_hamiltonian(&geom)?;
    let model = ExcitonModel::new(h, 1, n, spec.trap_rate, spec.loss_rate)?.with_positions(geom.positions());
    Ok((geom, model))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub index: usize,
    pub ete: Option<f64>,
    pub error: Option<String>,
    pub g: f64,
    pub ground_trap_overlap: f64,
    pub z_axis_mean_distance: f64,
    /// Only for n ≤ 10 sites.
    pub dominant_path_count: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregates {
    pub mean: f64,
    /// Population standard deviation.
    pub std: f64,
    /// Counts over [0, 1] in ten equal bins; η = 1 falls in the last.
    pub histogram: [usize; HISTOGRAM_BINS],
    pub n_ok: usize,
    pub n_failed: usize,
}

impl Aggregates {
    pub fn from_values(values: &[f64], n_failed: usize) -> Self {
        let (mean, std) = mean_std(values);
        let mut histogram = [0; HISTOGRAM_BINS];
        for &v in values {
            histogram[((v * HISTOGRAM_BINS as f64) as usize).min(HISTOGRAM_BINS - 1)] += 1;
        }
        Aggregates { mean, std, histogram, n_ok: values.len(), n_failed }
    }
}

/// Mean and population standard deviation (NaN for empty input).
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleReport {
    pub spec: EnsembleSpec,
    pub samples: Vec<SampleRecord>,
    pub aggregates: Aggregates,
}

impl EnsembleReport {
    fn ranked(&self) -> Vec<&SampleRecord> {
        let mut ok: Vec<&SampleRecord> = self.samples.iter().filter(|s| s.ete.is_some()).collect();
        ok.sort_by(|a, b| b.ete.partial_cmp(&a.ete).unwrap().then(a.index.cmp(&b.index)));
        ok
    }

    /// The m highest-η samples (ties: lower index first).
    pub fn top(&self, m: usize) -> Vec<&SampleRecord> {
        self.ranked().into_iter().take(m).collect()
    }

    /// The m lowest-η samples (ties: lower index first).
    pub fn bottom(&self, m: usize) -> Vec<&SampleRecord> {
        let mut ok: Vec<&SampleRecord> = self.samples.iter().filter(|s| s.ete.is_some()).collect();
        ok.sort_by(|a, b| a.ete.partial_cmp(&b.ete).unwrap().then(a.index.cmp(&b.index)));
        ok.into_iter().take(m).collect()
    }

    pub fn etes(&self) -> Vec<f64> {
        self.samples.iter().filter_map(|s| s.ete).collect()
    }
}

/// Draws the i-th configuration of an ensemble (same stream as [`run_ensemble`]).
pub fn ensemble_member(spec: &EnsembleSpec, index: usize) -> Result<(ChromophoreGeometry, ExcitonModel)> {
    sample_configuration(spec, &mut sample_rng(spec.seed, index as u64))
}

/// η and structural analytics for every sample; failures are counted, not fatal.
pub fn run_ensemble(spec: &EnsembleSpec) -> Result<EnsembleReport> {
    spec.validate()?;
    let kernel = kernel_for(&spec.bath, &spec.options.ohmic, spec.options.units)?;
    let samples: Vec<SampleRecord> = (0..spec.n_samples)
        .into_par_iter()
        .map(|i| {
            let (_, model) = match ensemble_member(spec, i) {
                Ok(x) => x,
                Err(e) => {
                    return SampleRecord {
                        index: i,
                        ete: None,
                        error: Some(e.to_string()),
                        g: f64::NAN,
                        ground_trap_overlap: f64::NAN,
                        z_axis_mean_distance: f64::NAN,
                        dominant_path_count: None,
                    }
                }
            };
            let eta = TransferProblem::with_kernel(model.clone(), spec.bath, kernel.clone(), spec.options.units)
                .and_then(|p| ete(&p));
            let pos = model.positions.as_deref().unwrap_or(&[]);
            SampleRecord {
                index: i,
                ete: eta.as_ref().ok().copied(),
                error: eta.err().map(|e| e.to_string()),
                g: energy_scale_g(&model.hamiltonian),
                ground_trap_overlap: ground_trap_overlap(&model).amplitude,
                z_axis_mean_distance: z_axis_proximity(pos, model.initial_index(), model.trap_index()),
                dominant_path_count: if model.n_sites() <= MAX_PATH_SITES {
                    dominant_path_count(&model, DOMINANT_PATH_THRESHOLD).ok()
                } else {
                    None
                },
            }
        })
        .collect();
    let values: Vec<f64> = samples.iter().filter_map(|s| s.ete).collect();
    let failed = samples.len() - values.len();
    Ok(EnsembleReport { spec: *spec, aggregates: Aggregates::from_values(&values, failed), samples })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SiteCountPoint {
    pub n_sites: usize,
    pub mean: f64,
    pub std: f64,
    pub n_failed: usize,
}

/// Mean/std of η for each site count, reusing `base` for everything else.
pub fn site_count_scan(base: &EnsembleSpec, counts: &[usize]) -> Result<Vec<SiteCountPoint>> {
    counts
        .iter()
        .map(|&n| {
            let r = run_ensemble(&EnsembleSpec { n_sites: n, ..*base })?;
            Ok(SiteCountPoint { n_sites: n, mean: r.aggregates.mean, std: r.aggregates.std, n_failed: r.aggregates.n_failed })
        })
        .collect()
}

/// η of `n` random perturbations of `geom`, each rebuilt through the dipole Hamiltonian.
/// `template` supplies the sites and rates.
pub fn perturbation_ensemble(
    geom: &ChromophoreGeometry,
    template: &ExcitonModel,
    perturb: &PerturbSpec,
    bath: &BathSpec,
    options: &ProblemOptions,
    n: usize,
    seed: u64,
) -> Result<Vec<Result<f64>>> {
    let kernel = kernel_for(bath, &options.ohmic, options.units)?;
    Ok((0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = sample_rng(seed, i as u64);
            let g = perturb_geometry(geom, perturb, &mut rng)?;
            let model = ExcitonModel { hamiltonian: build_hamiltonian(&g)?, positions: Some(g.positions()), ..template.clone() };
            ete(&TransferProblem::with_kernel(model, *bath, kernel.clone(), options.units)?)
        })
        .collect())
}

/// Hilbert–Schmidt-uniform density matrix: GG†/tr(GG†) with complex Gaussian G.
pub fn sample_density_matrix<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DMatrix<Complex64> {
    let g = DMatrix::from_fn(n, n, |_, _| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    let w = &g * g.adjoint();
    let t = w.trace().re;
    let mut rho = w / Complex64::new(t, 0.0);
    // exact Hermiticity
    for a in 0..n {
        rho[(a, a)].im = 0.0;
        for b in a + 1..n {
            rho[(b, a)] = rho[(a, b)].conj();
        }
    }
    rho
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroundOverlap {
    /// sqrt of `probability`: the magnitude |⟨trap|ψ₀⟩|.
    pub amplitude: f64,
    /// ⟨trap|P₀|trap⟩ for the projector P₀ onto the ground eigenspace.
    pub probability: f64,
    pub degenerate: bool,
}

/// Overlap of the trap site with the lowest exciton state.
pub fn ground_trap_overlap(model: &ExcitonModel) -> GroundOverlap {
    let e = model.hamiltonian.clone().symmetric_eigen();
    let emin = e.eigenvalues.min();
    let scale = e.eigenvalues.amax().max(1.0);
    let t = model.trap_index();
    let ground: Vec<usize> = (0..e.eigenvalues.len()).filter(|&k| e.eigenvalues[k] - emin <= 1e-9 * scale).collect();
    let probability: f64 = ground.iter().map(|&k| e.eigenvectors[(t, k)].powi(2)).sum::<f64>().min(1.0);
    GroundOverlap { amplitude: probability.sqrt(), probability, degenerate: ground.len() > 1 }
}

pub const DOMINANT_PATH_THRESHOLD: f64 = 1000.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathStrength {
    /// 1-indexed sites from initial to trap.
    pub path: Vec<usize>,
    /// (Σ 1/|H_link|)⁻¹, cm⁻¹; 0 if any link is uncoupled.
    pub strength: f64,
}

/// Strength of one explicit path (0-indexed sites).
pub fn path_strength(h: &DMatrix<f64>, path: &[usize]) -> f64 {
    let mut inv = 0.0;
    for w in path.windows(2) {
        let c = h[(w[0], w[1])].abs();
        if c == 0.0 {
            return 0.0;
        }
        inv += 1.0 / c;
    }
    if inv == 0.0 {
        0.0
    } else {
        1.0 / inv
    }
}

/// Every initial→trap path through distinct intermediates, in depth-first order.
pub fn connectivity_paths(model: &ExcitonModel) -> Result<Vec<PathStrength>> {
    let m = model.n_sites();
    if m > MAX_PATH_SITES {
        return Err(Error::TooManySites(m));
    }
    let (s, t) = (model.initial_index(), model.trap_index());
    if s == t {
        return Err(Error::Invalid("paths need initial ≠ trap".into()));
    }
    let mut out = vec![];
    let mut path = vec![s];
    let mut used = vec![false; m];
    used[s] = true;
    used[t] = true;
    fn walk(h: &DMatrix<f64>, t: usize, path: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<PathStrength>) {
        path.push(t);
        out.push(PathStrength { path: path.iter().map(|i| i + 1).collect(), strength: path_strength(h, path) });
        path.pop();
        for k in 0..used.len() {
            if !used[k] {
                used[k] = true;
                path.push(k);
                walk(h, t, path, used, out);
                path.pop();
                used[k] = false;
            }
        }
    }
    walk(&model.hamiltonian, t, &mut path, &mut used, &mut out);
    Ok(out)
}

/// Number of paths with strength above `threshold` (cm⁻¹).
pub fn dominant_path_count(model: &ExcitonModel, threshold: f64) -> Result<usize> {
    Ok(connectivity_paths(model)?.iter().filter(|p| p.strength > threshold).count())
}

/// Σ_{k=0}^{m−2} (m−2)!/(m−2−k)!.
pub fn path_count(m: usize) -> u64 {
    if m < 2 {
        return 0;
    }
    let r = (m - 2) as u64;
    let mut total = 0;
    let mut term = 1;
    for k in 0..=r {
        total += term;
        term *= r - k;
    }
    total
}

/// Mean perpendicular distance (Å) of the other sites from the initial–trap line.
pub fn z_axis_proximity(positions: &[[f64; 3]], initial: usize, trap: usize) -> f64 {
    if positions.len() < 3 {
        return 0.0;
    }
    let v = |i: usize| Vector3::new(positions[i][0], positions[i][1], positions[i][2]);
    let (a, b) = (v(initial), v(trap));
    let axis = (b - a).normalize();
    let ds: Vec<f64> = (0..positions.len())
        .filter(|&i| i != initial && i != trap)
        .map(|i| {
            let r = v(i) - a;
            (r - axis * r.dot(&axis)).norm()
        })
        .collect();
    ds.iter().sum::<f64>() / ds.len() as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapStatistics {
    pub mean: f64,
    pub std: f64,
    /// Ten equal bins over [min g, max g].
    pub histogram: Vec<usize>,
    pub range: (f64, f64),
}

/// Mean/std/histogram of the gap measure g over a set of Hamiltonians.
pub fn gap_statistics<'a>(hamiltonians: impl IntoIterator<Item = &'a DMatrix<f64>>) -> GapStatistics {
    let gs: Vec<f64> = hamiltonians.into_iter().map(energy_scale_g).collect();
    let (mean, std) = mean_std(&gs);
    let lo = gs.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = gs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut histogram = vec![0; HISTOGRAM_BINS];
    for &g in &gs {
        let b = if hi > lo { ((g - lo) / (hi - lo) * HISTOGRAM_BINS as f64) as usize } else { 0 };
        histogram[b.min(HISTOGRAM_BINS - 1)] += 1;
    }
    GapStatistics { mean, std, histogram, range: (lo, hi) }
}
