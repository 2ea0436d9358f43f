//! Sums of complex exponentials fitted to sampled kernels.
//!
//! Decays come from Prony's linear-prediction method, then are polished by
//! Levenberg–Marquardt over the decays alone (variable projection: for fixed
//! decays the amplitudes solve a linear least-squares problem).

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Result of [`fit_exponentials`]: y(t) ≈ Σ a_k e^{−ν_k t}.
#[derive(Debug, Clone)]
pub struct ExpFit {
    pub amplitudes: Vec<Complex64>,
    pub decays: Vec<Complex64>,
    /// max_i |fit(t_i) − y_i| / max_i |y_i|.
    pub max_deviation: f64,
}

/// Decay constants from `k`-term linear prediction on uniformly spaced samples.
pub fn prony(samples: &[Complex64], dt: f64, k: usize) -> Option<Vec<Complex64>> {
    let rows = samples.len().checked_sub(k)?;
    if rows < k || k == 0 {
        return None;
    }
    let a = DMatrix::from_fn(rows, k, |i, j| samples[i + j]);
    let b = DVector::from_fn(rows, |i, _| -samples[i + k]);
    let c = a.svd(true, true).solve(&b, 1e-13).ok()?;
    // companion matrix of z^k + c_{k-1} z^{k-1} + … + c_0
    let mut comp = DMatrix::<Complex64>::zeros(k, k);
    for j in 0..k {
        comp[(0, j)] = -c[k - 1 - j];
        if j + 1 < k {
            comp[(j + 1, j)] = Complex64::new(1.0, 0.0);
        }
    }
    let roots = comp.schur().eigenvalues()?;
    Some(
        roots
            .iter()
            .map(|z| {
                let nu = -z.ln() / dt;
                let re = if nu.re.is_finite() && nu.re > 0.0 { nu.re } else { nu.re.abs().max(1e-3 / dt) };
                let im = if nu.im.is_finite() { nu.im } else { 0.0 };
                Complex64::new(re.max(1e-6), im)
            })
            .collect(),
    )
}

struct Problem<'a> {
    t: &'a [f64],
    y: DVector<Complex64>,
    scale: f64,
    k: usize,
}

impl Problem<'_> {
    fn decays(&self, p: &[f64]) -> Vec<Complex64> {
        (0..self.k).map(|j| Complex64::new(p[j].exp(), p[self.k + j])).collect()
    }

    fn amplitudes(&self, nu: &[Complex64]) -> Option<(DVector<Complex64>, DVector<Complex64>)> {
        let e = DMatrix::from_fn(self.t.len(), self.k, |i, j| (-nu[j] * self.t[i]).exp());
        let a = e.clone().svd(true, true).solve(&self.y, 1e-14).ok()?;
        let model = &e * &a;
        Some((a, model))
    }

    /// Stacked real/imaginary residuals, scaled.
    fn residual(&self, p: &[f64]) -> Option<DVector<f64>> {
        let (_, model) = self.amplitudes(&self.decays(p))?;
        let n = self.t.len();
        let mut r = DVector::zeros(2 * n);
        for i in 0..n {
            let d = (model[i] - self.y[i]) / self.scale;
            r[i] = d.re;
            r[n + i] = d.im;
        }
        r.iter().all(|x| x.is_finite()).then_some(r)
    }

    fn max_deviation(&self, p: &[f64]) -> f64 {
        match self.amplitudes(&self.decays(p)) {
            Some((_, model)) => (0..self.t.len())
                .map(|i| (model[i] - self.y[i]).norm() / self.scale)
                .fold(0.0, f64::max),
            None => f64::INFINITY,
        }
    }

    fn levenberg_marquardt(&self, mut p: Vec<f64>, max_iter: usize) -> Vec<f64> {
        let Some(mut r) = self.residual(&p) else { return p };
        let mut cost = r.norm_squared();
        let mut mu = 1e-3;
        let m = p.len();
        for _ in 0..max_iter {
            let mut jac = DMatrix::zeros(r.len(), m);
            for j in 0..m {
                let h = 1e-7 * p[j].abs().max(1.0);
                let mut q = p.clone();
                q[j] += h;
                match self.residual(&q) {
                    Some(rq) => jac.set_column(j, &((rq - &r) / h)),
                    None => return p,
                }
            }
            let jtj = jac.transpose() * &jac;
            let g = jac.transpose() * &r;
            let mut improved = false;
            while mu < 1e12 {
                let mut a = jtj.clone();
                for j in 0..m {
                    a[(j, j)] += mu * jtj[(j, j)].max(1e-12);
                }
                let Some(step) = a.lu().solve(&(-&g)) else {
                    mu *= 4.0;
                    continue;
                };
                let q: Vec<f64> = p.iter().zip(step.iter()).map(|(x, s)| x + s).collect();
                if let Some(rq) = self.residual(&q) {
                    let c = rq.norm_squared();
                    if c < cost {
                        let rel = (cost - c) / cost.max(1e-300);
                        p = q;
                        r = rq;
                        cost = c;
                        mu = (mu / 3.0).max(1e-12);
                        improved = rel > 1e-13;
                        break;
                    }
                }
                mu *= 4.0;
            }
            if !improved {
                break;
            }
        }
        p
    }
}

/// Fits `k` exponentials to complex samples `y` on grid `t` (any spacing).
///
/// `uniform` supplies equally spaced samples (spacing `dt`) for the Prony
/// start; further starts are random log-normal perturbations of it and a
/// log-spaced ladder of real decays spanning the grid.
pub fn fit_exponentials(
    t: &[f64],
    y: &[Complex64],
    uniform: (&[Complex64], f64),
    k: usize,
    starts: usize,
) -> ExpFit {
    let scale = y.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if scale == 0.0 || k == 0 {
        return ExpFit { amplitudes: vec![], decays: vec![], max_deviation: 0.0 };
    }
    let prob = Problem { t, y: DVector::from_column_slice(y), scale, k };
    let to_params = |nu: &[Complex64]| -> Vec<f64> {
        let mut p: Vec<f64> = nu.iter().map(|v| v.re.max(1e-9).ln()).collect();
        p.extend(nu.iter().map(|v| v.im));
        p
    };

    let t_max = t.iter().cloned().fold(0.0, f64::max);
    let t_min = t.iter().cloned().filter(|&x| x > 0.0).fold(t_max, f64::min);
    let ladder: Vec<Complex64> = (0..k)
        .map(|j| {
            let f = if k > 1 { j as f64 / (k - 1) as f64 } else { 0.5 };
            Complex64::new((1.0 / t_max) * (t_max / t_min).powf(f), 0.0)
        })
        .collect();
    let base = prony(uniform.0, uniform.1, k).unwrap_or_else(|| ladder.clone());

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut candidates = vec![to_params(&base), to_params(&ladder)];
    for _ in 2..starts.max(2) {
        let nu: Vec<Complex64> = base
            .iter()
            .map(|v| {
                let f: f64 = rng.random_range(-0.7..0.7);
                let g: f64 = rng.random_range(-0.5..0.5);
                Complex64::new(v.re * f.exp(), v.im * (1.0 + g))
            })
            .collect();
        candidates.push(to_params(&nu));
    }

    let mut best: Option<(f64, Vec<f64>)> = None;
    for p0 in candidates {
        let p = prob.levenberg_marquardt(p0, 300);
        let dev = prob.max_deviation(&p);
        if best.as_ref().is_none_or(|(d, _)| dev < *d) {
            best = Some((dev, p));
        }
    }
    let (dev, p) = best.expect("at least one start");
    let decays = prob.decays(&p);
    let amplitudes = match prob.amplitudes(&decays) {
        Some((a, _)) => a.iter().cloned().collect(),
        None => vec![Complex64::new(0.0, 0.0); k],
    };
    ExpFit { amplitudes, decays, max_deviation: dev }
}
