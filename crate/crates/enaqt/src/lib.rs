//! Exciton energy-transfer efficiency (ETE) of multichromophoric complexes
//! coupled to non-Markovian phonon baths.
//!
//! The dynamics is a second-order time-nonlocal master equation with
//! anticommutator trap and loss sinks; η is the probability absorbed by the
//! trap. Modules:
//!
//! - [`model`]: geometries, point-dipole Hamiltonians, built-in FMO data;
//! - [`bath`]: spectral densities reduced to exponential kernels;
//! - [`solver`]: Laplace-domain ETE and time propagation;
//! - [`landscape`]: parameter sweeps with stencil gradient/Hessian norms;
//! - [`ensembles`]: random complexes, initial states, structural analytics;
//! - [`cli`]: the `enaqt` command line.
//!
//! ## Examples
//!
//! Each capability has a runnable example:
//!
//! ```bash
//! cargo run -p enaqt --example fmo_efficiency      # canonical FMO, both solvers
//! cargo run -p enaqt --example ohmic_bath          # exponential fit of an Ohmic kernel
//! cargo run -p enaqt --example population_dynamics # site populations over time
//! cargo run -p enaqt --example lambda_gamma_landscape
//! cargo run -p enaqt --example trap_placement
//! cargo run -p enaqt --example zeno_and_losses
//! cargo run -p enaqt --example correlated_bath
//! cargo run -p enaqt --example markovian_limit
//! cargo run -p enaqt --example rescaling_invariance
//! cargo run -p enaqt --example random_ensemble
//! cargo run -p enaqt --example site_count_scan
//! cargo run -p enaqt --example perturbation_robustness
//! cargo run -p enaqt --example compactness
//! cargo run -p enaqt --example initial_states
//! cargo run -p enaqt --example structural_analytics
//! cargo run -p enaqt --example geometry_round_trip
//! ```
//!
//! ```
//! use enaqt::{bath::BathSpec, model::fmo_canonical, solver::{ete, TransferProblem}};
//!
//! let problem = TransferProblem::new(fmo_canonical(), BathSpec::canonical()).unwrap();
//! let eta = ete(&problem).unwrap();
//! assert!((eta - 0.967).abs() < 0.015);
//! ```

pub mod bath;
pub mod cli;
pub mod ensembles;
pub mod error;
pub mod fit;
pub mod landscape;
pub mod model;
pub mod quad;
pub mod solver;
pub mod units;

pub use error::{Error, Result};
