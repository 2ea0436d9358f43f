//! Chromophore geometries, Frenkel Hamiltonians and the built-in FMO monomer.
//!
//! Site labels are 1-indexed at every public boundary (`initial_site`,
//! `trap_site`, path listings); vectors and matrices are 0-indexed as usual.

use nalgebra::{DMatrix, Vector3};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// C|μ|² for BChl a, cm⁻¹·Å³.
pub const DEFAULT_COUPLING_CONSTANT: f64 = 134_000.0;

/// Closest approach allowed for sampled chromophores, Å.
pub const MIN_PAIR_DISTANCE: f64 = 5.0;

const MAX_JITTER_ATTEMPTS: usize = 10_000;

/// One chromophore: position (Å), unit transition dipole and site energy (cm⁻¹).
#[derive(Debug, Clone, PartialEq)]
pub struct Site {
    pub position: Vector3<f64>,
    pub dipole: Vector3<f64>,
    pub energy: f64,
}

impl Site {
    /// Dipole from elevation θ (angle above the xy-plane) and azimuth φ.
    pub fn from_angles(position: [f64; 3], theta: f64, phi: f64, energy: f64) -> Self {
        Site {
            position: Vector3::from(position),
            dipole: dipole_from_angles(theta, phi),
            energy,
        }
    }

    /// (θ, φ) of the dipole in the elevation/azimuth convention.
    pub fn angles(&self) -> (f64, f64) {
        let d = self.dipole;
        (d.z.clamp(-1.0, 1.0).asin(), d.y.atan2(d.x))
    }
}

pub fn dipole_from_angles(theta: f64, phi: f64) -> Vector3<f64> {
    Vector3::new(theta.cos() * phi.cos(), theta.cos() * phi.sin(), theta.sin())
}

/// Positions, dipoles and site energies of a multichromophoric complex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "GeometryFile", try_from = "GeometryFile")]
pub struct ChromophoreGeometry {
    pub sites: Vec<Site>,
    pub coupling_constant: f64,
}

#[derive(Serialize, Deserialize)]
struct SiteRecord {
    position: [f64; 3],
    theta: f64,
    phi: f64,
    energy: f64,
}

/// On-disk layout: `sites[{position, theta, phi, energy}]`, `coupling_constant`.
#[derive(Serialize, Deserialize)]
struct GeometryFile {
    sites: Vec<SiteRecord>,
    #[serde(default = "default_constant")]
    coupling_constant: f64,
}

fn default_constant() -> f64 {
    DEFAULT_COUPLING_CONSTANT
}

impl From<ChromophoreGeometry> for GeometryFile {
    fn from(g: ChromophoreGeometry) -> Self {
        GeometryFile {
            sites: g
                .sites
                .iter()
                .map(|s| {
                    let (theta, phi) = s.angles();
                    SiteRecord {
                        position: [s.position.x, s.position.y, s.position.z],
                        theta,
                        phi,
                        energy: s.energy,
                    }
                })
                .collect(),
            coupling_constant: g.coupling_constant,
        }
    }
}

impl TryFrom<GeometryFile> for ChromophoreGeometry {
    type Error = Error;
    fn try_from(f: GeometryFile) -> Result<Self> {
        if f.sites.is_empty() {
            return Err(Error::Invalid("geometry has no sites".into()));
        }
        let sites = f
            .sites
            .into_iter()
            .map(|r| {
                if !(r.energy.is_finite() && r.theta.is_finite() && r.phi.is_finite()) {
                    return Err(Error::Invalid("non-finite site record".into()));
                }
                Ok(Site::from_angles(r.position, r.theta, r.phi, r.energy))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ChromophoreGeometry { sites, coupling_constant: f.coupling_constant })
    }
}

impl ChromophoreGeometry {
    pub fn new(sites: Vec<Site>) -> Self {
        ChromophoreGeometry { sites, coupling_constant: DEFAULT_COUPLING_CONSTANT }
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn positions(&self) -> Vec<[f64; 3]> {
        self.sites.iter().map(|s| [s.position.x, s.position.y, s.position.z]).collect()
    }

    pub fn min_pair_distance(&self) -> f64 {
        let mut m = f64::INFINITY;
        for (j, a) in self.sites.iter().enumerate() {
            for b in &self.sites[j + 1..] {
                m = m.min((a.position - b.position).norm());
            }
        }
        m
    }

    pub fn centroid(&self) -> Vector3<f64> {
        let n = self.sites.len() as f64;
        self.sites.iter().fold(Vector3::zeros(), |acc, s| acc + s.position) / n
    }
}

/// Frenkel Hamiltonian with trap and loss placement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExcitonModel {
    /// N×N real symmetric, cm⁻¹.
    pub hamiltonian: DMatrix<f64>,
    /// 1-indexed.
    pub initial_site: usize,
    /// 1-indexed.
    pub trap_site: usize,
    /// ps⁻¹.
    pub trap_rate: f64,
    /// ps⁻¹, applied uniformly to every site.
    pub loss_rate: f64,
    /// Site positions (Å) when known; needed for spatially correlated baths.
    #[serde(default)]
    pub positions: Option<Vec<[f64; 3]>>,
}

impl ExcitonModel {
    /// Validates symmetry, site labels (trap ≠ initial) and rate signs.
    pub fn new(
        hamiltonian: DMatrix<f64>,
        initial_site: usize,
        trap_site: usize,
        trap_rate: f64,
        loss_rate: f64,
    ) -> Result<Self> {
        let m = ExcitonModel { hamiltonian, initial_site, trap_site, trap_rate, loss_rate, positions: None };
        m.validate(false)?;
        Ok(m)
    }

    /// Checks the invariants; `allow_same_sites` permits trap = initial.
    pub fn validate(&self, allow_same_sites: bool) -> Result<()> {
        let h = &self.hamiltonian;
        let n = h.nrows();
        if n == 0 || h.ncols() != n {
            return Err(Error::Invalid("Hamiltonian must be square and non-empty".into()));
        }
        if h.iter().any(|x| !x.is_finite()) {
            return Err(Error::Invalid("Hamiltonian has non-finite entries".into()));
        }
        for j in 0..n {
            for k in 0..j {
                if (h[(j, k)] - h[(k, j)]).abs() > 1e-10 {
                    return Err(Error::Invalid(format!("Hamiltonian not symmetric at ({}, {})", j + 1, k + 1)));
                }
            }
        }
        for (name, s) in [("initial_site", self.initial_site), ("trap_site", self.trap_site)] {
            if s == 0 || s > n {
                return Err(Error::Invalid(format!("{name} = {s} outside 1..={n}")));
            }
        }
        if !allow_same_sites && n > 1 && self.initial_site == self.trap_site {
            return Err(Error::Invalid("trap_site equals initial_site".into()));
        }
        if !(self.trap_rate >= 0.0 && self.loss_rate >= 0.0) {
            return Err(Error::Invalid("rates must be non-negative".into()));
        }
        if let Some(p) = &self.positions {
            if p.len() != n {
                return Err(Error::Invalid("positions length differs from Hamiltonian size".into()));
            }
        }
        Ok(())
    }

    pub fn n_sites(&self) -> usize {
        self.hamiltonian.nrows()
    }

    /// 0-indexed trap.
    pub fn trap_index(&self) -> usize {
        self.trap_site - 1
    }

    /// 0-indexed initial site.
    pub fn initial_index(&self) -> usize {
        self.initial_site - 1
    }

    /// Same model with the trap moved (no trap ≠ initial check).
    pub fn with_trap(&self, trap_site: usize) -> Self {
        ExcitonModel { trap_site, ..self.clone() }
    }

    pub fn with_positions(mut self, positions: Vec<[f64; 3]>) -> Self {
        self.positions = Some(positions);
        self
    }
}

/// Point-dipole couplings J_jk = C/R³ (μ_j·μ_k − 3(μ_j·R̂)(μ_k·R̂)); diagonal = site energies.
pub fn build_hamiltonian(geom: &ChromophoreGeometry) -> Result<DMatrix<f64>> {
    let n = geom.sites.len();
    if n < 2 {
        return Err(Error::Invalid("need at least two sites".into()));
    }
    let mut h = DMatrix::zeros(n, n);
    for j in 0..n {
        let a = &geom.sites[j];
        h[(j, j)] = a.energy;
        for k in j + 1..n {
            let b = &geom.sites[k];
            let r = b.position - a.position;
            let d = r.norm();
            if d == 0.0 {
                return Err(Error::DegenerateGeometry(j + 1, k + 1));
            }
            let u = r / d;
            let jk = geom.coupling_constant / (d * d * d)
                * (a.dipole.dot(&b.dipole) - 3.0 * a.dipole.dot(&u) * b.dipole.dot(&u));
            h[(j, k)] = jk;
            h[(k, j)] = jk;
        }
    }
    Ok(h)
}

const FMO_H: [[f64; 7]; 7] = [
    [280.0, -106.0, 8.0, -5.0, 6.0, -8.0, -4.0],
    [-106.0, 420.0, 28.0, 6.0, 2.0, 13.0, 1.0],
    [8.0, 28.0, 0.0, -62.0, -1.0, -9.0, 17.0],
    [-5.0, 6.0, -62.0, 175.0, -70.0, -19.0, -57.0],
    [6.0, 2.0, -1.0, -70.0, 320.0, 40.0, -2.0],
    [-8.0, 13.0, -9.0, -19.0, 40.0, 360.0, 32.0],
    [-4.0, 1.0, 17.0, -57.0, -2.0, 32.0, 260.0],
];

/// BChl positions (Å), θ and tabulated φ (rad); the tabulated φ still needs +π.
const FMO_TABLE: [[f64; 5]; 7] = [
    [28.032, 163.534, 94.400, 0.3816, -0.6423],
    [17.140, 168.057, 100.162, 0.0670, 0.5209],
    [5.409, 180.553, 97.621, 0.1399, 1.3616],
    [9.062, 187.635, 89.474, 0.2570, -0.6098],
    [21.823, 185.260, 84.721, -0.1606, 0.6899],
    [23.815, 173.888, 82.810, -0.4214, -1.4686],
    [12.735, 174.887, 89.044, 0.5780, -1.0076],
];

/// The published 7×7 FMO Hamiltonian (cm⁻¹), verbatim.
pub fn fmo_hamiltonian() -> DMatrix<f64> {
    DMatrix::from_fn(7, 7, |j, k| FMO_H[j][k])
}

/// FMO monomer geometry with the published site energies on the diagonal.
pub fn fmo_geometry() -> ChromophoreGeometry {
    let sites = FMO_TABLE
        .iter()
        .enumerate()
        .map(|(j, r)| Site::from_angles([r[0], r[1], r[2]], r[3], r[4] + std::f64::consts::PI, FMO_H[j][j]))
        .collect();
    ChromophoreGeometry::new(sites)
}

/// Canonical FMO: verbatim Hamiltonian, BChl 1 → trap at BChl 3, 1 ps trapping, 1 ns loss.
pub fn fmo_canonical() -> ExcitonModel {
    ExcitonModel {
        hamiltonian: fmo_hamiltonian(),
        initial_site: 1,
        trap_site: 3,
        trap_rate: 1.0,
        loss_rate: 1e-3,
        positions: Some(fmo_geometry().positions()),
    }
}

/// g = ‖H − tr(H)/N‖_* / (N − 1), the mean excitonic gap.
pub fn energy_scale_g(h: &DMatrix<f64>) -> f64 {
    let n = h.nrows();
    if n < 2 {
        return 0.0;
    }
    let shift = h.trace() / n as f64;
    let mut t = h.clone();
    for j in 0..n {
        t[(j, j)] -= shift;
    }
    t.singular_values().sum() / (n - 1) as f64
}

/// Scales positions by `k` about the centroid.
pub fn rescale_compactness(geom: &ChromophoreGeometry, k: f64) -> Result<ChromophoreGeometry> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::Invalid(format!("compactness factor must be positive, got {k}")));
    }
    let c = geom.centroid();
    let mut out = geom.clone();
    for s in &mut out.sites {
        s.position = c + (s.position - c) * k;
    }
    Ok(out)
}

/// How dipole orientations are disturbed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AngleJitter {
    /// θ and φ each shifted uniformly in ±value (rad).
    Uniform(f64),
    /// Fresh isotropic orientation.
    Isotropic,
}

/// How site energies are disturbed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnergyJitter {
    /// Shift uniformly in ±value (cm⁻¹), clamped at 0.
    Uniform(f64),
    /// Redraw uniformly in [lo, hi].
    Redraw(f64, f64),
}

/// Disorder applied by [`perturb_geometry`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbSpec {
    /// Per-coordinate uniform shift bound, Å.
    pub pos_jitter: f64,
    pub angle: AngleJitter,
    pub energy: EnergyJitter,
}

impl PerturbSpec {
    /// ±2.5 Å, ±5°, ±10 cm⁻¹.
    pub fn conservative() -> Self {
        PerturbSpec {
            pos_jitter: 2.5,
            angle: AngleJitter::Uniform(5f64.to_radians()),
            energy: EnergyJitter::Uniform(10.0),
        }
    }

    /// ±2.5 Å, arbitrary dipole directions, energies anywhere in [0, 500] cm⁻¹.
    pub fn large_variation() -> Self {
        PerturbSpec { pos_jitter: 2.5, angle: AngleJitter::Isotropic, energy: EnergyJitter::Redraw(0.0, 500.0) }
    }

    pub fn none() -> Self {
        PerturbSpec { pos_jitter: 0.0, angle: AngleJitter::Uniform(0.0), energy: EnergyJitter::Uniform(0.0) }
    }
}

/// Uniform on the unit sphere.
pub fn isotropic_dipole<R: Rng + ?Sized>(rng: &mut R) -> Vector3<f64> {
    let z: f64 = rng.random_range(-1.0..=1.0);
    let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let r = (1.0 - z * z).max(0.0).sqrt();
    Vector3::new(r * phi.cos(), r * phi.sin(), z)
}

fn sym<R: Rng + ?Sized>(rng: &mut R, w: f64) -> f64 {
    if w > 0.0 {
        rng.random_range(-w..=w)
    } else {
        0.0
    }
}

/// Random disorder around `geom`; positions are redrawn until all pairs are ≥ 5 Å apart.
pub fn perturb_geometry<R: Rng + ?Sized>(
    geom: &ChromophoreGeometry,
    spec: &PerturbSpec,
    rng: &mut R,
) -> Result<ChromophoreGeometry> {
    if spec.pos_jitter < 0.0 {
        return Err(Error::Invalid("negative position jitter".into()));
    }
    let mut out = geom.clone();
    if spec.pos_jitter > 0.0 {
        let mut ok = false;
        for _ in 0..MAX_JITTER_ATTEMPTS {
            for (s, o) in geom.sites.iter().zip(out.sites.iter_mut()) {
                o.position = s.position + Vector3::from_fn(|_, _| sym(rng, spec.pos_jitter));
            }
            if out.min_pair_distance() >= MIN_PAIR_DISTANCE {
                ok = true;
                break;
            }
        }
        if !ok {
            return Err(Error::InfeasibleJitter(MAX_JITTER_ATTEMPTS));
        }
    }
    for s in &mut out.sites {
        match spec.angle {
            AngleJitter::Uniform(w) => {
                if w < 0.0 {
                    return Err(Error::Invalid("negative angle jitter".into()));
                }
                if w > 0.0 {
                    let (t, p) = s.angles();
                    s.dipole = dipole_from_angles(t + sym(rng, w), p + sym(rng, w)).normalize();
                }
            }
            AngleJitter::Isotropic => s.dipole = isotropic_dipole(rng),
        }
        match spec.energy {
            EnergyJitter::Uniform(w) => {
                if w < 0.0 {
                    return Err(Error::Invalid("negative energy jitter".into()));
                }
                s.energy = (s.energy + sym(rng, w)).max(0.0);
            }
            EnergyJitter::Redraw(lo, hi) => {
                if !(hi >= lo) {
                    return Err(Error::Invalid("energy range inverted".into()));
                }
                s.energy = if hi > lo { rng.random_range(lo..=hi) } else { lo };
            }
        }
    }
    Ok(out)
}
