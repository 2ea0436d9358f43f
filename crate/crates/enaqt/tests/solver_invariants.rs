use approx::assert_relative_eq;
use enaqt::bath::BathSpec;
use enaqt::ensembles::{sample_density_matrix, sample_rng};
use enaqt::model::{fmo_canonical, fmo_geometry, ExcitonModel};
use enaqt::solver::{
    build_generator, build_memory_per_site, ete, ete_frequency, ete_markovian_limit, propagate_time, vec_index,
    MemoryPoint, TimeOptions, TransferProblem,
};
use enaqt::units::Units;
use enaqt::Error;
use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;
use proptest::prelude::*;

fn canonical() -> TransferProblem {
    TransferProblem::new(fmo_canonical(), BathSpec::canonical()).unwrap()
}

fn with_positions(m: ExcitonModel) -> ExcitonModel {
    m.with_positions(fmo_geometry().positions())
}

fn eta(model: ExcitonModel, bath: BathSpec) -> f64 {
    ete(&TransferProblem::new(model, bath).unwrap()).unwrap()
}

fn eigenvalues(m: DMatrix<Complex64>) -> Vec<Complex64> {
    Schur::new(m).eigenvalues().expect("triangular Schur form").iter().cloned().collect()
}

#[test]
fn closed_form_memory_matches_per_site_construction() {
    for bath in [
        BathSpec::canonical(),
        BathSpec { lambda_cm1: 200.0, gamma_cm1: 20.0, temperature_k: 77.0, ..BathSpec::canonical() },
        BathSpec { r_cor_angstrom: 30.0, ..BathSpec::canonical() },
        BathSpec { r_cor_angstrom: 15.0, correlation_sign: -1, ..BathSpec::canonical() },
    ] {
        let p = TransferProblem::new(with_positions(fmo_canonical()), bath).unwrap();
        for point in [MemoryPoint::Coherent, MemoryPoint::Markovian] {
            let fast = build_generator(&p, point).memory;
            let slow = build_memory_per_site(&p, point);
            let scale = slow.iter().map(|z| z.norm()).fold(0.0, f64::max);
            let err = (&fast - &slow).iter().map(|z| z.norm()).fold(0.0, f64::max);
            assert!(err <= 1e-12 * scale, "{bath:?} {err:e}");
        }
    }
}

#[test]
fn coherent_part_has_imaginary_spectrum() {
    let op = build_generator(&canonical(), MemoryPoint::Coherent);
    let scale = op.energies.amax();
    for z in eigenvalues(op.coherent.clone()) {
        assert!(z.re.abs() <= 1e-8 * scale, "{z}");
    }
    let mut want: Vec<f64> = op.coherent_spectrum().iter().map(|z| z.im).collect();
    let mut got: Vec<f64> = eigenvalues(op.coherent.clone()).iter().map(|z| z.im).collect();
    want.sort_by(f64::total_cmp);
    got.sort_by(f64::total_cmp);
    for (a, b) in got.iter().zip(&want) {
        assert!((a - b).abs() <= 1e-8 * scale);
    }
}

#[test]
fn diagonal_hamiltonian_without_bath_is_pure_coherent() {
    let h = DMatrix::from_diagonal(&nalgebra::dvector![0.0, 120.0, 310.0]);
    let m = ExcitonModel { trap_rate: 0.0, loss_rate: 0.0, ..ExcitonModel::new(h, 1, 3, 1.0, 0.0).unwrap() };
    let p = TransferProblem::new(m, BathSpec { lambda_cm1: 0.0, ..BathSpec::canonical() }).unwrap();
    let op = build_generator(&p, MemoryPoint::Coherent);
    assert_eq!(op.generator(), op.coherent);
    for z in eigenvalues(op.generator()) {
        assert!(z.re.abs() < 1e-10);
    }
}

#[test]
fn full_generator_is_dissipative() {
    for bath in [BathSpec::canonical(), BathSpec { temperature_k: 77.0, ..BathSpec::canonical() }] {
        let op = build_generator(&TransferProblem::new(fmo_canonical(), bath).unwrap(), MemoryPoint::Coherent);
        for z in eigenvalues(op.generator()) {
            assert!(z.re <= 1e-10, "{z}");
        }
    }
}

#[test]
fn single_site_generator_is_twice_the_rate() {
    let m = ExcitonModel {
        hamiltonian: DMatrix::from_element(1, 1, 200.0),
        initial_site: 1,
        trap_site: 1,
        trap_rate: 2.5,
        loss_rate: 0.0,
        positions: None,
    };
    let p = TransferProblem::new(m, BathSpec::canonical()).unwrap();
    let g = build_generator(&p, MemoryPoint::Coherent).generator();
    assert_eq!(g.shape(), (1, 1));
    assert_relative_eq!(g[(0, 0)].re, -2.0 * Units::default().rate_to_internal(2.5), max_relative = 1e-14);
    assert_eq!(g[(0, 0)].im, 0.0);
    assert_relative_eq!(ete(&p).unwrap(), 1.0, epsilon = 1e-12);
}

#[test]
fn sink_trace_on_populations() {
    let p = canonical();
    let op = build_generator(&p, MemoryPoint::Coherent);
    let n = 7;
    let tr: f64 = (0..n).map(|a| op.sinks[(vec_index(a, a, n), vec_index(a, a, n))].re).sum();
    let u = Units::default();
    let want = -2.0 * (n as f64 * u.rate_to_internal(0.001) + u.rate_to_internal(1.0));
    assert_relative_eq!(tr, want, max_relative = 1e-14);
}

#[test]
fn sinks_bound_the_efficiency() {
    let c = BathSpec::canonical();
    let lossless = eta(ExcitonModel { loss_rate: 0.0, ..fmo_canonical() }, c);
    assert!((lossless - 1.0).abs() < 1e-8, "{lossless}");
    assert_eq!(eta(ExcitonModel { trap_rate: 0.0, ..fmo_canonical() }, c), 0.0);
    let none = TransferProblem::new(ExcitonModel { trap_rate: 0.0, loss_rate: 0.0, ..fmo_canonical() }, c).unwrap();
    assert!(matches!(ete_frequency(&none), Err(Error::NoSink)));
}

#[test]
fn canonical_diagnostics() {
    let r = ete_frequency(&canonical()).unwrap();
    assert!((r.ete - 0.967).abs() <= 0.015, "{}", r.ete);
    assert_relative_eq!(r.ete + r.loss_fraction, 1.0, epsilon = 1e-15);
    assert!(r.diagnostics.condition_estimate.unwrap() < 1e14);
    assert_eq!(r.diagnostics.kernel_terms, 4);
    assert!(!r.diagnostics.clamped && !r.diagnostics.regularized);
}

#[test]
fn slow_bath_warns_but_solves() {
    let b = BathSpec { gamma_cm1: 2.0, ..BathSpec::canonical() };
    let r = ete_frequency(&TransferProblem::new(fmo_canonical(), b).unwrap()).unwrap();
    assert!(!r.diagnostics.warnings.is_empty());
    assert!((0.0..=1.0).contains(&r.ete));
}

#[test]
fn markovian_limit_without_coupling_is_identical() {
    let p = TransferProblem::new(fmo_canonical(), BathSpec { lambda_cm1: 0.0, ..BathSpec::canonical() }).unwrap();
    assert_eq!(ete(&p).unwrap(), ete_markovian_limit(&p).unwrap());
}

#[test]
fn markovian_limit_at_fast_bath() {
    let gap = |g: f64, t: f64| {
        let b = BathSpec { gamma_cm1: g, temperature_k: t, ..BathSpec::canonical() };
        let p = TransferProblem::new(fmo_canonical(), b).unwrap();
        (ete(&p).unwrap() - ete_markovian_limit(&p).unwrap()).abs()
    };
    // At room temperature a ~0.02 gap survives γ → ∞: C̃(0) drops the thermal
    // asymmetry between up- and downhill exciton transitions, which memory
    // has nothing to do with. It closes as k_B T outgrows the exciton gaps.
    assert!(gap(5000.0, 298.0) < 0.025);
    assert!(gap(5000.0, 2000.0) < 0.01);
}

#[test]
fn markovian_limit_fails_for_slow_strong_bath() {
    let b = BathSpec { gamma_cm1: 10.0, lambda_cm1: 300.0, ..BathSpec::canonical() };
    let p = TransferProblem::new(fmo_canonical(), b).unwrap();
    assert!((ete(&p).unwrap() - ete_markovian_limit(&p).unwrap()).abs() > 0.05);
}

#[test]
fn vanishing_correlation_length_reproduces_uncorrelated() {
    let c = BathSpec::canonical();
    let plain = ete(&canonical()).unwrap();
    let zero = eta(with_positions(fmo_canonical()), BathSpec { r_cor_angstrom: 0.0, ..c });
    assert_eq!(plain, zero);
    // e^{−d/R} ≈ 1e−44: takes the correlated path with numerically absent cross terms.
    let p = TransferProblem::new(with_positions(fmo_canonical()), BathSpec { r_cor_angstrom: 0.05, ..c }).unwrap();
    assert!(p.is_correlated());
    assert!((ete(&p).unwrap() - plain).abs() <= 1e-12);
    let opts = TimeOptions { t_max_ps: 5.0, ..TimeOptions::default() };
    let (_, a) = propagate_time(&canonical(), &opts).unwrap();
    let (_, b) = propagate_time(&p, &opts).unwrap();
    assert!((a.ete - b.ete).abs() <= 1e-12);
}

#[test]
fn positive_correlations_enhance_transfer_at_strong_coupling() {
    let b = BathSpec { lambda_cm1: 350.0, ..BathSpec::canonical() };
    let uncorrelated = eta(with_positions(fmo_canonical()), b);
    let correlated = eta(with_positions(fmo_canonical()), BathSpec { r_cor_angstrom: 100.0, ..b });
    assert!(correlated > uncorrelated + 0.03, "{correlated} vs {uncorrelated}");
}

#[test]
fn unitary_dynamics_without_bath_or_sinks() {
    let m = ExcitonModel { trap_rate: 0.0, loss_rate: 0.0, ..fmo_canonical() };
    let p = TransferProblem::new(m, BathSpec { lambda_cm1: 0.0, ..BathSpec::canonical() }).unwrap();
    let (traj, _) = propagate_time(&p, &TimeOptions::with_grid(2.0, 201)).unwrap();
    for tr in &traj.trace {
        assert!((tr - 1.0).abs() < 1e-8);
    }
    let p1: Vec<f64> = traj.populations.iter().map(|p| p[0]).collect();
    let min = p1.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(min < 0.5, "site 1 never empties: {min}");
    // Goes back up after the first dip.
    let first_min = p1.iter().position(|&v| v == min).unwrap();
    assert!(p1[first_min..].iter().any(|&v| v > min + 0.05));
}

#[test]
fn dynamics_preserve_hermiticity_and_drain_monotonically() {
    let (traj, res) = propagate_time(&canonical(), &TimeOptions::with_grid(20.0, 401)).unwrap();
    assert!(traj.max_hermiticity_error < 1e-8);
    for w in traj.trace.windows(2) {
        assert!(w[1] <= w[0] + 1e-12);
    }
    for w in traj.eta_cumulative.windows(2) {
        assert!(w[1] >= w[0] - 1e-12);
    }
    for (p, tr) in traj.populations.iter().zip(&traj.trace) {
        assert!((p.iter().sum::<f64>() - tr).abs() < 1e-10);
        assert!(p.iter().all(|&x| x > -1e-8));
    }
    assert_eq!(traj.t_ps.len(), 401);
    assert!(res.ete < 0.967 + 0.015);
}

#[test]
fn time_solver_agrees_and_balances() {
    let p = canonical();
    let (_, r) = propagate_time(&p, &TimeOptions { t_max_ps: 1e4, ..TimeOptions::default() }).unwrap();
    let f = ete(&p).unwrap();
    assert!((r.ete - f).abs() < 2e-3, "time {} frequency {f}", r.ete);
    let losses: f64 = r.site_losses.as_ref().unwrap().iter().sum();
    let residual = r.residual_trace.unwrap();
    assert!(residual < 1e-4);
    assert!((r.ete + losses + residual - 1.0).abs() < 1e-4);
    assert_relative_eq!(r.ete + r.loss_fraction, 1.0, epsilon = 1e-6);
}

#[test]
fn coherent_limit_efficiency() {
    let p = TransferProblem::new(fmo_canonical(), BathSpec { lambda_cm1: 0.0, ..BathSpec::canonical() }).unwrap();
    let (_, r) = propagate_time(&p, &TimeOptions::default()).unwrap();
    assert!((r.ete - 0.83).abs() <= 0.03, "{}", r.ete);
    assert!((r.ete - ete(&p).unwrap()).abs() < 2e-3);
}

#[test]
fn mixed_initial_states_validated() {
    let p = canonical();
    let bad = DMatrix::from_diagonal_element(7, 7, Complex64::new(0.5, 0.0));
    assert!(p.clone().with_initial_state(bad).is_err());
    let mut rng = sample_rng(1, 0);
    let rho = sample_density_matrix(7, &mut rng);
    let q = p.with_initial_state(rho).unwrap();
    assert!((0.0..=1.0).contains(&ete(&q).unwrap()));
}

fn permuted(model: &ExcitonModel, perm: &[usize]) -> ExcitonModel {
    // New site i is old site perm[i].
    let n = perm.len();
    let inv = |old: usize| perm.iter().position(|&p| p == old).unwrap();
    ExcitonModel {
        hamiltonian: DMatrix::from_fn(n, n, |i, j| model.hamiltonian[(perm[i], perm[j])]),
        initial_site: inv(model.initial_site - 1) + 1,
        trap_site: inv(model.trap_site - 1) + 1,
        positions: model.positions.as_ref().map(|p| perm.iter().map(|&k| p[k]).collect()),
        ..model.clone()
    }
}

fn scaled(model: &ExcitonModel, bath: &BathSpec, alpha: f64) -> (ExcitonModel, BathSpec) {
    (
        ExcitonModel {
            hamiltonian: &model.hamiltonian * alpha,
            trap_rate: model.trap_rate * alpha,
            loss_rate: model.loss_rate * alpha,
            ..model.clone()
        },
        BathSpec {
            lambda_cm1: bath.lambda_cm1 * alpha,
            gamma_cm1: bath.gamma_cm1 * alpha,
            temperature_k: bath.temperature_k * alpha,
            ..*bath
        },
    )
}

#[test]
fn rescaling_examples() {
    let (m, b) = (fmo_canonical(), BathSpec { matsubara_terms: Some(3), ..BathSpec::canonical() });
    for alpha in [0.5, 2.0, 10.0] {
        let (mut m1, b1) = scaled(&m, &b, 1.0 / alpha);
        m1.hamiltonian = m.hamiltonian.clone();
        let big = ExcitonModel { hamiltonian: &m.hamiltonian * alpha, ..m.clone() };
        assert!((eta(big, b) - eta(m1, b1)).abs() < 1e-6, "α = {alpha}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn efficiency_is_invariant_under_site_relabeling(
        perm in Just((0..7).collect::<Vec<usize>>()).prop_shuffle(),
        r_cor in prop::sample::select(vec![0.0, 25.0]),
    ) {
        let m = with_positions(fmo_canonical());
        let b = BathSpec { r_cor_angstrom: r_cor, ..BathSpec::canonical() };
        let a = eta(m.clone(), b);
        let p = eta(permuted(&m, &perm), b);
        prop_assert!((a - p).abs() < 1e-10, "{} vs {}", a, p);
    }

    #[test]
    fn efficiency_is_invariant_under_energy_rescaling(alpha in 0.2..10.0f64, lambda in 0.0..300.0f64) {
        let b = BathSpec { lambda_cm1: lambda, matsubara_terms: Some(20), ..BathSpec::canonical() };
        let m = fmo_canonical();
        let (ms, bs) = scaled(&m, &b, alpha);
        prop_assert!((eta(m, b) - eta(ms, bs)).abs() < 1e-6);
    }
}
