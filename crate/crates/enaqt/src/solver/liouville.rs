use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use super::TransferProblem;
use crate::bath::ExponentialKernel;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Column-stacked position of X[a, b].
#[inline]
pub fn vec_index(a: usize, b: usize, n: usize) -> usize {
    a + n * b
}

/// Where the memory kernel is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MemoryPoint {
    /// C̃(−L_S): the exact s = 0 resolvent of the memory equation.
    Coherent,
    /// C̃(0) on every Liouville eigenvalue (memoryless limit).
    Markovian,
}

/// Generator pieces on column-stacked density matrices.
#[derive(Debug, Clone)]
pub struct LiouvilleOperator {
    pub n: usize,
    /// L_S = −i[H, ·].
    pub coherent: DMatrix<Complex64>,
    /// Anticommutator sinks.
    pub sinks: DMatrix<Complex64>,
    /// −Σ_jk w_jk [S_j, C̃(−L_S)(S_k ·) − h.c.], linearised on Hermitian inputs.
    pub memory: DMatrix<Complex64>,
    /// Exciton energies and eigenvectors of H (columns), cached from L_S.
    pub energies: DVector<f64>,
    pub eigenvectors: DMatrix<f64>,
    pub regularized: bool,
}

impl LiouvilleOperator {
    pub fn generator(&self) -> DMatrix<Complex64> {
        &self.coherent + &self.sinks + &self.memory
    }

    /// Eigenvalues −i(ε_m − ε_n) of L_S, ordered by vec_index(m, n).
    pub fn coherent_spectrum(&self) -> Vec<Complex64> {
        let n = self.n;
        let mut out = vec![ZERO; n * n];
        for b in 0..n {
            for a in 0..n {
                out[vec_index(a, b, n)] = -I * (self.energies[a] - self.energies[b]);
            }
        }
        out
    }
}

/// Kernel factors c_mn = C̃(iω_mn) and c'_mn = C̃*(iω_mn) in the exciton basis.
pub(crate) fn kernel_factors(
    kernel: &ExponentialKernel,
    energies: &DVector<f64>,
    point: MemoryPoint,
) -> (DMatrix<Complex64>, DMatrix<Complex64>, bool) {
    let n = energies.len();
    let mut regularized = false;
    let mut c = DMatrix::zeros(n, n);
    let mut cc = DMatrix::zeros(n, n);
    for m in 0..n {
        for k in 0..n {
            let mut s = match point {
                MemoryPoint::Coherent => I * (energies[m] - energies[k]),
                MemoryPoint::Markovian => ZERO,
            };
            if kernel.near_pole(s) || kernel.near_pole(s.conj()) {
                s += 1e-6;
                regularized = true;
            }
            c[(m, k)] = kernel.laplace(s);
            cc[(m, k)] = kernel.laplace_conj(s);
        }
    }
    (c, cc, regularized)
}

pub(crate) fn eigen(h: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let e = SymmetricEigen::new(h.clone());
    (e.eigenvalues, e.eigenvectors)
}

/// G[(a,c),(b,d)] = Σ_mn U_am U_cm c_mn U_bn U_dn, i.e. the site-basis matrix
/// element ⟨a|Φ(|c⟩⟨d|)|b⟩ of Φ(Z) = U (c ∘ UᵀZU) Uᵀ.
fn dressed(u: &DMatrix<f64>, c: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let n = u.nrows();
    let p = DMatrix::from_fn(n * n, n, |r, m| Complex64::new(u[(r % n, m)] * u[(r / n, m)], 0.0));
    &p * c * p.transpose()
}

/// Full generator at the chosen memory point (closed form, O(N⁵)).
pub fn build_generator(problem: &TransferProblem, point: MemoryPoint) -> LiouvilleOperator {
    let h = &problem.model.hamiltonian;
    let n = h.nrows();
    let (energies, u) = eigen(h);
    let (r_trap, r_loss) = problem.rates();
    let t = problem.model.trap_index();
    let n2 = n * n;

    let mut coherent = DMatrix::zeros(n2, n2);
    for b in 0..n {
        for a in 0..n {
            let row = vec_index(a, b, n);
            for c in 0..n {
                coherent[(row, vec_index(c, b, n))] += -I * h[(a, c)];
                coherent[(row, vec_index(a, c, n))] += I * h[(c, b)];
            }
        }
    }

    let gamma = |a: usize| r_loss + if a == t { r_trap } else { 0.0 };
    let mut sinks = DMatrix::zeros(n2, n2);
    for b in 0..n {
        for a in 0..n {
            let k = vec_index(a, b, n);
            sinks[(k, k)] = Complex64::new(-(gamma(a) + gamma(b)), 0.0);
        }
    }

    let (c, cc, regularized) = kernel_factors(&problem.kernel, &energies, point);
    let mut memory = DMatrix::zeros(n2, n2);
    if !problem.kernel.is_zero() {
        let g = dressed(&u, &c);
        let gc = dressed(&u, &cc);
        let w = &problem.correlation;
        for d in 0..n {
            for cidx in 0..n {
                let col = vec_index(cidx, d, n);
                for b in 0..n {
                    for a in 0..n {
                        let wc = w[(a, cidx)] - w[(b, cidx)];
                        let wd = w[(a, d)] - w[(b, d)];
                        if wc == 0.0 && wd == 0.0 {
                            continue;
                        }
                        let (gr, gcol) = (a + n * cidx, b + n * d);
                        memory[(vec_index(a, b, n), col)] = -(g[(gr, gcol)] * wc - gc[(gr, gcol)] * wd);
                    }
                }
            }
        }
    }

    LiouvilleOperator { n, coherent, sinks, memory, energies, eigenvectors: u, regularized }
}

/// Reference construction of the memory superoperator, one basis column at a
/// time and one site operator at a time, with dense matrix products only.
/// O(N⁶); used to cross-check the closed form of [`build_generator`].
pub fn build_memory_per_site(problem: &TransferProblem, point: MemoryPoint) -> DMatrix<Complex64> {
    let h = &problem.model.hamiltonian;
    let n = h.nrows();
    let (energies, u) = eigen(h);
    let (c, cc, _) = kernel_factors(&problem.kernel, &energies, point);
    let uc = u.map(|x| Complex64::new(x, 0.0));
    let phi = |z: &DMatrix<Complex64>, f: &DMatrix<Complex64>| -> DMatrix<Complex64> {
        let ex = uc.transpose() * z * &uc;
        &uc * ex.component_mul(f) * uc.transpose()
    };
    let proj = |j: usize| {
        let mut s = DMatrix::zeros(n, n);
        s[(j, j)] = Complex64::new(1.0, 0.0);
        s
    };
    let w = &problem.correlation;
    let mut out = DMatrix::zeros(n * n, n * n);
    for d in 0..n {
        for ci in 0..n {
            let mut x = DMatrix::zeros(n, n);
            x[(ci, d)] = Complex64::new(1.0, 0.0);
            let y: Vec<DMatrix<Complex64>> = (0..n)
                .map(|k| {
                    let sk = proj(k);
                    phi(&(&sk * &x), &c) - phi(&(&x * &sk), &cc)
                })
                .collect();
            let mut total = DMatrix::zeros(n, n);
            for j in 0..n {
                let mut z = DMatrix::zeros(n, n);
                for (k, yk) in y.iter().enumerate() {
                    if w[(j, k)] != 0.0 {
                        z += yk * Complex64::new(w[(j, k)], 0.0);
                    }
                }
                let sj = proj(j);
                total -= &sj * &z - &z * &sj;
            }
            let col = vec_index(ci, d, n);
            for b in 0..n {
                for a in 0..n {
                    out[(vec_index(a, b, n), col)] = total[(a, b)];
                }
            }
        }
    }
    out
}
