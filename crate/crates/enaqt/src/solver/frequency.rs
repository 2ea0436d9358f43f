use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::liouville::{build_generator, vec_index, MemoryPoint};
use super::{base_diagnostics, clamp_ete, SolverKind, TransferProblem, TransferResult};
use crate::error::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Coordinates on Hermitian matrices: X_aa, then Re X_ab and Im X_ab for a < b.
#[derive(Clone, Copy)]
enum Coord {
    Diag(usize),
    Re(usize, usize),
    Im(usize, usize),
}

fn coords(n: usize) -> Vec<Coord> {
    let mut v = Vec::with_capacity(n * n);
    for a in 0..n {
        v.push(Coord::Diag(a));
        for b in a + 1..n {
            v.push(Coord::Re(a, b));
            v.push(Coord::Im(a, b));
        }
    }
    v
}

fn read(c: Coord, x: &[Complex64], n: usize) -> f64 {
    match c {
        Coord::Diag(a) => x[vec_index(a, a, n)].re,
        Coord::Re(a, b) => x[vec_index(a, b, n)].re,
        Coord::Im(a, b) => x[vec_index(a, b, n)].im,
    }
}

/// The generator restricted to Hermitian matrices, as a real N²×N² matrix.
fn hermitian_restriction(g: &DMatrix<Complex64>, n: usize, cs: &[Coord]) -> DMatrix<f64> {
    let mut r = DMatrix::zeros(cs.len(), cs.len());
    let mut col = vec![Complex64::new(0.0, 0.0); n * n];
    for (k, &ck) in cs.iter().enumerate() {
        match ck {
            Coord::Diag(a) => col.copy_from_slice(g.column(vec_index(a, a, n)).as_slice()),
            Coord::Re(a, b) => {
                let (p, q) = (g.column(vec_index(a, b, n)), g.column(vec_index(b, a, n)));
                for (i, c) in col.iter_mut().enumerate() {
                    *c = p[i] + q[i];
                }
            }
            Coord::Im(a, b) => {
                let (p, q) = (g.column(vec_index(a, b, n)), g.column(vec_index(b, a, n)));
                for (i, c) in col.iter_mut().enumerate() {
                    *c = I * (p[i] - q[i]);
                }
            }
        }
        for (j, &cj) in cs.iter().enumerate() {
            r[(j, k)] = read(cj, &col, n);
        }
    }
    r
}

fn solve(problem: &TransferProblem, point: MemoryPoint) -> Result<TransferResult> {
    let (r_trap, r_loss) = problem.rates();
    if r_trap == 0.0 && r_loss == 0.0 {
        return Err(Error::NoSink);
    }
    let mut diag = base_diagnostics(problem);
    if r_trap == 0.0 {
        diag.raw_ete = 0.0;
        return Ok(TransferResult {
            ete: 0.0,
            loss_fraction: 1.0,
            site_losses: None,
            residual_trace: None,
            solver: SolverKind::Frequency,
            diagnostics: diag,
        });
    }
    let n = problem.model.n_sites();
    let op = build_generator(problem, point);
    diag.regularized = op.regularized;
    let cs = coords(n);
    let r = hermitian_restriction(&op.generator(), n, &cs);
    let rho0: Vec<Complex64> = problem.initial_state.iter().cloned().collect();
    let rhs = DVector::from_iterator(cs.len(), cs.iter().map(|&c| -read(c, &rho0, n)));

    let lu = r.lu();
    let u = lu.u();
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for k in 0..u.nrows() {
        let v = u[(k, k)].abs();
        lo = lo.min(v);
        hi = hi.max(v);
    }
    let cond = if lo > 0.0 { hi / lo } else { f64::INFINITY };
    diag.condition_estimate = Some(cond);
    if !(cond < 1e14) {
        return Err(Error::NearSingular(cond));
    }
    let x = lu.solve(&rhs).ok_or(Error::NearSingular(cond))?;
    let t = problem.model.trap_index();
    let pos = cs.iter().position(|c| matches!(c, Coord::Diag(a) if *a == t)).expect("trap coordinate");
    let raw = 2.0 * r_trap * x[pos];
    let ete = clamp_ete(raw, &mut diag);
    Ok(TransferResult {
        ete,
        loss_fraction: 1.0 - ete,
        site_losses: None,
        residual_trace: None,
        solver: SolverKind::Frequency,
        diagnostics: diag,
    })
}

/// η = 2 r_trap Re x_trap,trap with (L_S + L_sinks + M)x = −vec ρ(0).
pub fn ete_frequency(problem: &TransferProblem) -> Result<TransferResult> {
    solve(problem, MemoryPoint::Coherent)
}

/// η with the memory kernel frozen at C̃(0).
pub fn ete_markovian_limit(problem: &TransferProblem) -> Result<f64> {
    solve(problem, MemoryPoint::Markovian).map(|r| r.ete)
}

/// Shorthand for the default frequency solver returning only η.
pub fn ete(problem: &TransferProblem) -> Result<f64> {
    ete_frequency(problem).map(|r| r.ete)
}
