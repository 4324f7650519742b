// Copyright 2026 ness-lab contributors
// SPDX-License-Identifier: Apache-2.0

//! Box-constrained Nelder–Mead minimization.
//!
//! Trial points are clamped into the box. Coefficients follow the
//! dimension-adaptive choice of Gao and Han, which keeps the simplex from
//! collapsing early in four or more dimensions. Non-finite objective values
//! count as `+∞`, so infeasible regions can be excluded by returning NaN or
//! infinity.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMead {
    pub max_evals: usize,
    /// Spread of objective values across the simplex.
    pub f_tol: f64,
    /// Max-norm spread of the simplex vertices.
    pub x_tol: f64,
    /// Edge length of the initial simplex.
    pub initial_step: f64,
    /// Fresh simplices built around the best point after convergence.
    pub restarts: usize,
}

impl Default for NelderMead {
    fn default() -> Self {
        NelderMead { max_evals: 2000, f_tol: 1e-12, x_tol: 1e-7, initial_step: 0.5, restarts: 1 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub f: f64,
    pub evals: usize,
    pub converged: bool,
}

fn clamp_into(x: &mut [f64], lower: &[f64], upper: &[f64]) {
    for ((v, &lo), &hi) in x.iter_mut().zip(lower).zip(upper) {
        *v = v.clamp(lo, hi);
    }
}

impl NelderMead {
    /// Minimizes `f` over the box `[lower, upper]` starting at `x0`.
    pub fn minimize<F: FnMut(&[f64]) -> f64>(&self, mut f: F, x0: &[f64], lower: &[f64], upper: &[f64]) -> Minimum {
        let n = x0.len();
        assert!(n > 0 && lower.len() == n && upper.len() == n, "dimension mismatch");
        let mut evals = 0usize;
        let mut eval = |x: &[f64], evals: &mut usize| {
            *evals += 1;
            let v = f(x);
            if v.is_nan() { f64::INFINITY } else { v }
        };

        let mut best = x0.to_vec();
        clamp_into(&mut best, lower, upper);
        let mut best_f = eval(&best, &mut evals);
        let mut converged = false;
        for round in 0..=self.restarts {
            if evals >= self.max_evals {
                break;
            }
            let (x, fx, conv) = self.run(&mut eval, &best, best_f, lower, upper, &mut evals);
            let improved = best_f - fx;
            if fx <= best_f {
                best = x;
                best_f = fx;
            }
            converged = conv;
            if !conv || (round > 0 && !(improved > self.f_tol)) {
                break;
            }
        }
        Minimum { x: best, f: best_f, evals, converged }
    }

    fn run<E: FnMut(&[f64], &mut usize) -> f64>(
        &self,
        eval: &mut E,
        x0: &[f64],
        f0: f64,
        lower: &[f64],
        upper: &[f64],
        evals: &mut usize,
    ) -> (Vec<f64>, f64, bool) {
        let n = x0.len();
        let nf = n as f64;
        let (alpha, beta, gamma, delta) = if n >= 2 {
            (1.0, 1.0 + 2.0 / nf, 0.75 - 0.5 / nf, 1.0 - 1.0 / nf)
        } else {
            (1.0, 2.0, 0.5, 0.5)
        };

        let mut simplex: Vec<(Vec<f64>, f64)> = vec![(x0.to_vec(), f0)];
        for i in 0..n {
            let mut v = x0.to_vec();
            let step = if v[i] + self.initial_step <= upper[i] { self.initial_step } else { -self.initial_step };
            v[i] += step;
            clamp_into(&mut v, lower, upper);
            let fv = eval(&v, evals);
            simplex.push((v, fv));
        }

        let point = |c: &[f64], d: &[f64], t: f64| -> Vec<f64> {
            let mut x: Vec<f64> = c.iter().zip(d).map(|(ci, di)| ci + t * (di - ci)).collect();
            clamp_into(&mut x, lower, upper);
            x
        };

        loop {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            let f_best = simplex[0].1;
            let f_worst = simplex[n].1;
            let f_spread = if f_best.is_finite() && f_worst.is_finite() { f_worst - f_best } else { f64::INFINITY };
            let x_spread = simplex[1..]
                .iter()
                .flat_map(|(v, _)| v.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()))
                .fold(0.0, f64::max);
            if f_spread <= self.f_tol && x_spread <= self.x_tol {
                return (simplex[0].0.clone(), f_best, true);
            }
            if *evals >= self.max_evals || (!f_best.is_finite() && x_spread <= self.x_tol) {
                return (simplex[0].0.clone(), f_best, false);
            }

            let mut centroid = vec![0.0; n];
            for (v, _) in &simplex[..n] {
                for (c, x) in centroid.iter_mut().zip(v) {
                    *c += x / nf;
                }
            }
            let worst = simplex[n].0.clone();

            let xr = point(&centroid, &worst, -alpha);
            let fr = eval(&xr, evals);
            if fr < f_best {
                let xe = point(&centroid, &worst, -alpha * beta);
                let fe = eval(&xe, evals);
                simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
                continue;
            }
            if fr < simplex[n - 1].1 {
                simplex[n] = (xr, fr);
                continue;
            }
            let (xc, fc) = if fr < f_worst {
                let xc = point(&centroid, &worst, -alpha * gamma);
                let fc = eval(&xc, evals);
                (xc, fc)
            } else {
                let xc = point(&centroid, &worst, gamma);
                let fc = eval(&xc, evals);
                (xc, fc)
            };
            if fc < fr.min(f_worst) {
                simplex[n] = (xc, fc);
                continue;
            }
            let anchor = simplex[0].0.clone();
            for vertex in simplex.iter_mut().skip(1) {
                let x = point(&anchor, &vertex.0, delta);
                let fx = eval(&x, evals);
                *vertex = (x, fx);
            }
        }
    }
}
