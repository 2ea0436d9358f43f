//! Auxiliary-operator propagation.
//!
//! Each kernel term m and source site k carries σ_km(t) = ∫₀ᵗ a_m e^{−(ν_m − L_S)(t−t')} S_k ρ(t') dt',
//! so dσ_km/dt = a_m S_k ρ − (ν_m − L_S)σ_km and the memory integral becomes
//! Σ_m σ_km. Everything is stored in the exciton basis, where L_S is diagonal
//! and each S_k = u_k u_kᵀ is rank one.
//!
//! Terms decaying faster than `TimeOptions::adiabatic_above` are not
//! propagated: their σ is slaved to S_kρ through the elementwise factor
//! a_m/(ν_m + iω_ab). This removes the stiffest modes and leaves the s = 0
//! resolvent, hence η, unchanged.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::liouville::eigen;
use super::{base_diagnostics, clamp_ete, SolverKind, TransferProblem, TransferResult};
use crate::error::{Error, Result};

type C = Complex64;
const ZERO: C = C::new(0.0, 0.0);
const I: C = C::new(0.0, 1.0);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TimeOptions {
    /// Integration horizon in ps.
    pub t_max_ps: f64,
    /// Times (ps) at which populations are recorded.
    pub output_ps: Vec<f64>,
    pub rtol: f64,
    pub atol: f64,
    /// Once past the last output, stop when trace ρ drops below this.
    pub stop_trace: f64,
    pub max_steps: usize,
    /// Kernel terms with |ν| above this (cm⁻¹) are eliminated adiabatically.
    pub adiabatic_above: f64,
}

impl Default for TimeOptions {
    fn default() -> Self {
        TimeOptions { t_max_ps: 1e4, output_ps: vec![], rtol: 1e-8, atol: 1e-12, stop_trace: 1e-10, max_steps: 50_000_000, adiabatic_above: 1000.0 }
    }
}

impl TimeOptions {
    /// `points` equally spaced outputs on [0, t_max].
    pub fn with_grid(t_max_ps: f64, points: usize) -> Self {
        let points = points.max(2);
        let output_ps = (0..points).map(|i| t_max_ps * i as f64 / (points - 1) as f64).collect();
        TimeOptions { t_max_ps, output_ps, stop_trace: 0.0, ..Default::default() }
    }
}

/// Recorded populations (site basis) and running efficiency.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Trajectory {
    pub t_ps: Vec<f64>,
    /// `populations[i][j]`: site j+1 at time i.
    pub populations: Vec<Vec<f64>>,
    pub trace: Vec<f64>,
    pub eta_cumulative: Vec<f64>,
    /// max ‖ρ − ρ†‖_max over the outputs.
    pub max_hermiticity_error: f64,
}

struct Rhs {
    n: usize,
    u: DMatrix<f64>,
    omega: Vec<C>,
    terms: Vec<(C, C)>,
    /// white noise + eliminated terms, per exciton-basis element.
    instant: Vec<C>,
    w: DMatrix<f64>,
    correlated: bool,
    r_trap: f64,
    r_loss: f64,
    trap: usize,
    // scratch
    sk_rho: Vec<Vec<C>>,
    q: Vec<Vec<C>>,
    z: Vec<C>,
    row: Vec<C>,
    col: Vec<C>,
}

impl Rhs {
    fn n2(&self) -> usize {
        self.n * self.n
    }

    fn acc_offset(&self) -> usize {
        self.n2() * (1 + self.n * self.terms.len())
    }

    fn len(&self) -> usize {
        self.acc_offset() + 1 + self.n
    }

    /// ⟨u|ρ|u⟩ for a real site vector in the exciton basis.
    fn expect(&self, rho: &[C], site: usize) -> f64 {
        let n = self.n;
        let mut s = ZERO;
        for b in 0..n {
            let ub = self.u[(site, b)];
            for a in 0..n {
                s += rho[a + n * b] * (self.u[(site, a)] * ub);
            }
        }
        s.re
    }

    fn eval(&mut self, y: &[C], dy: &mut [C]) {
        let n = self.n;
        let n2 = n * n;
        let rho = &y[..n2];
        let nt = self.terms.len();
        let (row, col) = (&mut self.row, &mut self.col);

        // S_k ρ = u_k (u_kᵀ ρ)
        for k in 0..n {
            for (b, r) in row.iter_mut().enumerate() {
                let mut s = ZERO;
                for a in 0..n {
                    s += rho[a + n * b] * self.u[(k, a)];
                }
                *r = s;
            }
            let out = &mut self.sk_rho[k];
            for b in 0..n {
                for a in 0..n {
                    out[a + n * b] = row[b] * self.u[(k, a)];
                }
            }
        }

        // coherent part and sinks: −iω∘ρ − r_loss·2ρ − r_trap(Pρ + ρP)
        let t = self.trap;
        row.iter_mut().for_each(|v| *v = ZERO); // u_tᵀ ρ
        col.iter_mut().for_each(|v| *v = ZERO); // ρ u_t
        for b in 0..n {
            for a in 0..n {
                row[b] += rho[a + n * b] * self.u[(t, a)];
                col[a] += rho[a + n * b] * self.u[(t, b)];
            }
        }
        for b in 0..n {
            for a in 0..n {
                let i = a + n * b;
                dy[i] = -self.omega[i] * rho[i] * I - rho[i] * (2.0 * self.r_loss)
                    - (row[b] * self.u[(t, a)] + col[a] * self.u[(t, b)]) * self.r_trap;
            }
        }

        // Q_k = Σ_m σ_km + F∘S_k ρ, then Q_k − Q_k†; auxiliary derivatives
        for k in 0..n {
            let q = &mut self.z;
            for ((qi, s), f) in q.iter_mut().zip(&self.sk_rho[k]).zip(&self.instant) {
                *qi = s * f;
            }
            for (m, &(a, nu)) in self.terms.iter().enumerate() {
                let off = n2 * (1 + k * nt + m);
                let sig = &y[off..off + n2];
                let d = &mut dy[off..off + n2];
                for i in 0..n2 {
                    q[i] += sig[i];
                    d[i] = a * self.sk_rho[k][i] - (nu + I * self.omega[i]) * sig[i];
                }
            }
            let anti = &mut self.q[k];
            for b in 0..n {
                for a in 0..n {
                    anti[a + n * b] = q[a + n * b] - q[b + n * a].conj();
                }
            }
        }

        // dρ −= Σ_j [S_j, Σ_k w_jk (Q_k − Q_k†)]
        for j in 0..n {
            let z = &mut self.z;
            if self.correlated {
                z.iter_mut().for_each(|v| *v = ZERO);
                for k in 0..n {
                    let wjk = self.w[(j, k)];
                    if wjk != 0.0 {
                        for (zi, qi) in z.iter_mut().zip(&self.q[k]) {
                            *zi += qi * wjk;
                        }
                    }
                }
            } else {
                z.copy_from_slice(&self.q[j]);
            }
            // u_jᵀ Z (row) and Z u_j (column)
            row.iter_mut().for_each(|v| *v = ZERO);
            col.iter_mut().for_each(|v| *v = ZERO);
            for b in 0..n {
                for a in 0..n {
                    let v = z[a + n * b];
                    row[b] += v * self.u[(j, a)];
                    col[a] += v * self.u[(j, b)];
                }
            }
            for b in 0..n {
                for a in 0..n {
                    dy[a + n * b] -= row[b] * self.u[(j, a)] - col[a] * self.u[(j, b)];
                }
            }
        }

        let acc = self.acc_offset();
        dy[acc] = C::new(2.0 * self.r_trap * self.expect(rho, t), 0.0);
        for j in 0..n {
            dy[acc + 1 + j] = C::new(2.0 * self.r_loss * self.expect(rho, j), 0.0);
        }
    }
}

// Dormand–Prince 5(4)
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Propagates ρ(t) from the problem's initial state; η and per-site losses
/// are integrated alongside the state.
pub fn propagate_time(problem: &TransferProblem, opts: &TimeOptions) -> Result<(Trajectory, TransferResult)> {
    let model = &problem.model;
    let n = model.n_sites();
    let units = problem.units;
    let (r_trap, r_loss) = problem.rates();
    let (energies, u) = eigen(&model.hamiltonian);
    let mut omega = vec![ZERO; n * n];
    for b in 0..n {
        for a in 0..n {
            omega[a + n * b] = C::new(energies[a] - energies[b], 0.0);
        }
    }
    let mut instant = vec![C::new(problem.kernel.white_noise, 0.0); n * n];
    let mut terms: Vec<(C, C)> = vec![];
    for t in problem.kernel.terms.iter().filter(|t| t.amplitude != ZERO) {
        if t.decay.norm() > opts.adiabatic_above {
            for (f, w) in instant.iter_mut().zip(&omega) {
                *f += t.amplitude / (t.decay + I * w);
            }
        } else {
            terms.push((t.amplitude, t.decay));
        }
    }
    let mut rhs = Rhs {
        n,
        u: u.clone(),
        omega,
        terms,
        instant,
        w: problem.correlation.clone(),
        correlated: problem.is_correlated(),
        r_trap,
        r_loss,
        trap: model.trap_index(),
        sk_rho: vec![vec![ZERO; n * n]; n],
        q: vec![vec![ZERO; n * n]; n],
        z: vec![ZERO; n * n],
        row: vec![ZERO; n],
        col: vec![ZERO; n],
    };

    // ρ in the exciton basis
    let uc = u.map(|x| C::new(x, 0.0));
    let rho_ex = uc.transpose() * &problem.initial_state * &uc;
    let mut y = vec![ZERO; rhs.len()];
    y[..n * n].copy_from_slice(rho_ex.as_slice());

    let t_end = units.ps_to_internal(opts.t_max_ps);
    let mut outputs: Vec<f64> = opts.output_ps.iter().map(|&t| units.ps_to_internal(t)).filter(|&t| t <= t_end).collect();
    outputs.sort_by(f64::total_cmp);
    let mut next_out = 0;
    let mut traj = Trajectory::default();
    let acc = rhs.acc_offset();

    let record = |traj: &mut Trajectory, t: f64, y: &[C], rhs: &Rhs| {
        let rho = DMatrix::from_column_slice(n, n, &y[..n * n]);
        let site = &uc * rho * uc.transpose();
        let herm = (&site - site.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        traj.max_hermiticity_error = traj.max_hermiticity_error.max(herm);
        traj.t_ps.push(units.internal_to_ps(t));
        traj.populations.push((0..n).map(|j| site[(j, j)].re).collect());
        traj.trace.push(site.trace().re);
        traj.eta_cumulative.push(y[rhs.acc_offset()].re);
    };

    let dim = y.len();
    let mut k: Vec<Vec<C>> = vec![vec![ZERO; dim]; 7];
    let mut tmp = vec![ZERO; dim];
    let mut y_new = vec![ZERO; dim];
    let mut t = 0.0;
    while next_out < outputs.len() && outputs[next_out] <= 0.0 {
        record(&mut traj, 0.0, &y, &rhs);
        next_out += 1;
    }
    rhs.eval(&y, &mut k[0]);

    let stiff = rhs.terms.iter().map(|(_, nu)| nu.norm()).fold(0.0, f64::max)
        + energies.iter().fold(0.0f64, |m, e| m.max(e.abs()))
        + 2.0 * (r_trap + r_loss)
        + 1.0;
    let mut h = 0.1 / stiff;
    let mut steps = 0usize;
    loop {
        let trace: f64 = (0..n).map(|i| y[i + n * i].re).sum();
        if t >= t_end || (next_out >= outputs.len() && trace.abs() < opts.stop_trace) {
            break;
        }
        if steps >= opts.max_steps {
            return Err(Error::StepUnderflow { t_ps: units.internal_to_ps(t) });
        }
        let target = if next_out < outputs.len() { outputs[next_out].min(t_end) } else { t_end };
        let hit = h >= target - t;
        let hs = if hit { target - t } else { h };
        if hs <= 1e-14 * t.max(1e-300) {
            return Err(Error::StepUnderflow { t_ps: units.internal_to_ps(t) });
        }
        for s in 0..6 {
            for i in 0..dim {
                let mut v = y[i];
                for (j, kj) in k.iter().enumerate().take(s + 1) {
                    let a = A[s][j];
                    if a != 0.0 {
                        v += kj[i] * (hs * a);
                    }
                }
                tmp[i] = v;
            }
            if s < 5 {
                let (head, tail) = k.split_at_mut(s + 1);
                let _ = head;
                rhs.eval(&tmp, &mut tail[0]);
            } else {
                y_new.copy_from_slice(&tmp);
                let (_, tail) = k.split_at_mut(6);
                rhs.eval(&y_new, &mut tail[0]);
            }
        }
        let mut err2 = 0.0;
        for i in 0..dim {
            let mut e = ZERO;
            for (j, kj) in k.iter().enumerate() {
                if E[j] != 0.0 {
                    e += kj[i] * E[j];
                }
            }
            let sc = opts.atol + opts.rtol * y[i].norm().max(y_new[i].norm());
            err2 += (e * hs).norm_sqr() / (sc * sc);
        }
        let err = (err2 / dim as f64).sqrt();
        steps += 1;
        if err <= 1.0 {
            t = if hit { target } else { t + hs };
            std::mem::swap(&mut y, &mut y_new);
            k.swap(0, 6);
            if hit && next_out < outputs.len() && target == outputs[next_out] {
                record(&mut traj, t, &y, &rhs);
                next_out += 1;
            }
            let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            // keep the proposal from the full step when a step was shortened to hit an output
            h = if hit { h.max(hs * fac) } else { hs * fac };
        } else {
            h = hs * (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
        }
    }

    let eta_raw = y[acc].re;
    let site_losses: Vec<f64> = (0..n).map(|j| y[acc + 1 + j].re).collect();
    let residual: f64 = (0..n).map(|i| y[i + n * i].re).sum();
    let mut diag = base_diagnostics(problem);
    diag.steps = Some(steps);
    diag.t_reached_ps = Some(units.internal_to_ps(t));
    let ete = clamp_ete(eta_raw, &mut diag);
    let loss_fraction = site_losses.iter().sum::<f64>() + residual;
    let result = TransferResult {
        ete,
        loss_fraction,
        site_losses: Some(site_losses),
        residual_trace: Some(residual),
        solver: SolverKind::Time,
        diagnostics: diag,
    };
    Ok((traj, result))
}
