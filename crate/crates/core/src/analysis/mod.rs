// Copyright 2026 ness-lab contributors
// SPDX-License-Identifier: Apache-2.0

//! Parameter-space exploration: concurrence maximization over couplings,
//! the memoryless entanglement boundary, and `C_max` maps.
//!
//! Couplings are searched in `log₁₀` coordinates: `(γ₁, γ₂)` for the
//! memoryless model and `(γ₁, γ₂, Υ₁, Υ₂)` otherwise. Concurrence is
//! maximized through the entanglement margin `|ρ₂₃| − √(ρ₁₁ρ₄₄)`, which
//! equals `C/2` where positive and stays informative where `C = 0`.

pub mod nelder_mead;
mod region;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::collision::ModelParams;
use crate::error::{Error, Result};
use crate::generators::{steady_observables, steady_state_for};
pub use nelder_mead::{Minimum, NelderMead};
pub use region::{
    critical_heat_currents, detect_overhang, detect_overhang_with, sample_cq_region, sample_cq_region_with,
    CriticalCurrents, HullBin, RegionConfig, RegionPoint, RegionSample, OVERHANG_EPSILON,
};

const SQRT2: f64 = std::f64::consts::SQRT_2;

/// Optimized concurrences below this are reported as `0`. Equilibrium
/// states reach `C ≈ 1e−31` through rounding of `|ρ₂₃|`.
pub const CONCURRENCE_FLOOR: f64 = 1e-12;

/// Coupling ranges searched, in units of `Ω`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchBox {
    pub gamma_min: f64,
    pub gamma_max: f64,
    pub upsilon_min: f64,
    pub upsilon_max: f64,
}

impl Default for SearchBox {
    fn default() -> Self {
        SearchBox { gamma_min: 1e-3, gamma_max: 1e3, upsilon_min: 1e-3, upsilon_max: 1e3 }
    }
}

impl SearchBox {
    pub fn validate(&self) -> Result<()> {
        for (name, lo, hi) in [("gamma", self.gamma_min, self.gamma_max), ("upsilon", self.upsilon_min, self.upsilon_max)] {
            if !(lo > 0.0 && lo < hi && hi <= 1000.0) {
                return Err(Error::Parameter(format!("{name} range must satisfy 0 < min < max <= 1000, got [{lo}, {hi}]")));
            }
        }
        Ok(())
    }

    /// `log₁₀` bounds for the search coordinates at memory weight `p`.
    pub fn log_bounds(&self, p: f64) -> (Vec<f64>, Vec<f64>) {
        let g = (self.gamma_min.log10(), self.gamma_max.log10());
        let u = (self.upsilon_min.log10(), self.upsilon_max.log10());
        if p == 0.0 {
            (vec![g.0, g.0], vec![g.1, g.1])
        } else {
            (vec![g.0, g.0, u.0, u.0], vec![g.1, g.1, u.1, u.1])
        }
    }
}

/// Multi-start search settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    /// Total number of local searches, warm starts included.
    pub starts: usize,
    /// Evaluation budget per local search.
    pub max_evals: usize,
    pub f_tol: f64,
    pub x_tol: f64,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig { starts: 20, max_evals: 2000, f_tol: 1e-12, x_tol: 1e-7, seed: 0 }
    }
}

impl OptimizerConfig {
    fn local(&self) -> NelderMead {
        NelderMead { max_evals: self.max_evals, f_tol: self.f_tol, x_tol: self.x_tol, initial_step: 0.5, restarts: 1 }
    }
}

/// Best couplings found for a temperature pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationResult {
    pub best_params: ModelParams,
    pub c_max: f64,
    pub q_dot_at_best: f64,
    pub n_evaluations: usize,
    pub converged: bool,
}

/// Couplings maximizing the heat current.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeatOptimum {
    pub best_params: ModelParams,
    pub q_abs_max: f64,
    pub concurrence: f64,
    pub n_evaluations: usize,
    pub converged: bool,
}

/// Parameters for search coordinates `x` (`log₁₀` couplings).
pub fn params_from_log(z1: f64, z2: f64, p: f64, x: &[f64]) -> ModelParams {
    let e = |i: usize| 10f64.powf(x[i]);
    if x.len() == 2 {
        ModelParams::with_memory(z1, z2, e(0), e(1), 0.0, 0.0, p)
    } else {
        ModelParams::with_memory(z1, z2, e(0), e(1), e(2), e(3), p)
    }
}

/// Search coordinates of a parameter set at its own `p`.
pub fn log_coordinates(params: &ModelParams) -> Vec<f64> {
    let mut x = vec![params.gamma1.log10(), params.gamma2.log10()];
    if params.p != 0.0 {
        x.push(params.upsilon1.log10());
        x.push(params.upsilon2.log10());
    }
    x
}

fn check_temperatures(z1: f64, z2: f64, p: f64) -> Result<()> {
    ModelParams::with_memory(z1, z2, 1.0, 1.0, 1.0, 1.0, p).validate()
}

pub(crate) fn random_log_point<R: Rng + ?Sized>(rng: &mut R, lower: &[f64], upper: &[f64]) -> Vec<f64> {
    lower.iter().zip(upper).map(|(&lo, &hi)| rng.random_range(lo..=hi)).collect()
}

/// Mixes a base seed with an index so grid points get independent streams.
pub fn point_seed(seed: u64, index: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn run_starts<F: Fn(&[f64]) -> f64>(
    objective: F,
    warm: Vec<Vec<f64>>,
    lower: &[f64],
    upper: &[f64],
    cfg: &OptimizerConfig,
) -> (Minimum, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut starts = warm;
    starts.truncate(cfg.starts.max(1));
    while starts.len() < cfg.starts.max(1) {
        starts.push(random_log_point(&mut rng, lower, upper));
    }
    let local = cfg.local();
    let mut best: Option<Minimum> = None;
    let mut total = 0;
    for x0 in &starts {
        let m = local.minimize(&objective, x0, lower, upper);
        total += m.evals;
        if best.as_ref().is_none_or(|b| m.f < b.f) {
            best = Some(m);
        }
    }
    (best.expect("at least one start"), total)
}

/// Warm starts for the memoryless search: the two boundary coupling pairs
/// and the heat-current optimum `γ₁ = γ₂ = 2`.
fn memoryless_warm_starts(z1: f64, lower: &[f64], upper: &[f64]) -> Vec<Vec<f64>> {
    let mut out = vec![vec![2f64.log10(); 2]];
    if let Ok(pairs) = boundary_couplings(z1) {
        for b in pairs {
            if b.gamma1 > 0.0 && b.gamma2 > 0.0 {
                out.push(vec![b.gamma1.log10(), b.gamma2.log10()]);
            }
        }
    }
    for x in &mut out {
        for ((v, &lo), &hi) in x.iter_mut().zip(lower).zip(upper) {
            *v = v.clamp(lo, hi);
        }
    }
    out
}

/// Maximizes the steady-state concurrence over the couplings.
///
/// Multi-start Nelder–Mead in `log₁₀` coupling space. Warm starts come from
/// the memoryless model (boundary couplings, and for `p > 0` the memoryless
/// optimum paired with matching and unit memory couplings); the remaining
/// starts are log-uniform in the box, drawn from a ChaCha8 stream seeded by
/// `cfg.seed`.
pub fn maximize_concurrence(
    z1: f64,
    z2: f64,
    p: f64,
    search_box: &SearchBox,
    cfg: &OptimizerConfig,
) -> Result<OptimizationResult> {
    check_temperatures(z1, z2, p)?;
    search_box.validate()?;
    let (lower, upper) = search_box.log_bounds(p);
    let mut warm = memoryless_warm_starts(z1, &search_box.log_bounds(0.0).0, &search_box.log_bounds(0.0).1);
    let mut extra_evals = 0;
    if p != 0.0 {
        let base = maximize_concurrence(z1, z2, 0.0, search_box, &OptimizerConfig { starts: 6, ..*cfg })?;
        extra_evals = base.n_evaluations;
        let g = log_coordinates(&base.best_params);
        let clamp = |v: f64, i: usize| v.clamp(lower[i], upper[i]);
        warm = vec![
            vec![g[0], g[1], clamp(g[0], 2), clamp(g[1], 3)],
            vec![g[0], g[1], clamp(0.0, 2), clamp(0.0, 3)],
        ];
    }
    let objective = |x: &[f64]| match steady_observables(&params_from_log(z1, z2, p, x)) {
        Ok(o) => -o.margin,
        Err(_) => f64::NAN,
    };
    let (best, evals) = run_starts(objective, warm, &lower, &upper, cfg);
    let best_params = params_from_log(z1, z2, p, &best.x);
    let report = steady_state_for(&best_params)?;
    Ok(OptimizationResult {
        best_params,
        c_max: if report.concurrence < CONCURRENCE_FLOOR { 0.0 } else { report.concurrence },
        q_dot_at_best: report.q_dot,
        n_evaluations: evals + extra_evals,
        converged: best.converged,
    })
}

/// Maximizes `|Q̇|` over the couplings.
pub fn maximize_heat_current(
    z1: f64,
    z2: f64,
    p: f64,
    search_box: &SearchBox,
    cfg: &OptimizerConfig,
) -> Result<HeatOptimum> {
    check_temperatures(z1, z2, p)?;
    search_box.validate()?;
    let (lower, upper) = search_box.log_bounds(p);
    let mut warm = vec![vec![2f64.log10(); lower.len()]];
    for x in &mut warm {
        for ((v, &lo), &hi) in x.iter_mut().zip(&lower).zip(&upper) {
            *v = v.clamp(lo, hi);
        }
    }
    let objective = |x: &[f64]| match steady_observables(&params_from_log(z1, z2, p, x)) {
        Ok(o) => -o.q_dot.abs(),
        Err(_) => f64::NAN,
    };
    let (best, evals) = run_starts(objective, warm, &lower, &upper, cfg);
    let best_params = params_from_log(z1, z2, p, &best.x);
    let report = steady_state_for(&best_params)?;
    Ok(HeatOptimum {
        best_params,
        q_abs_max: report.q_dot.abs(),
        concurrence: report.concurrence,
        n_evaluations: evals,
        converged: best.converged,
    })
}

/// `z₁z₂ + √(9/8)|z₁ − z₂| > 1`: the memoryless steady state can be
/// entangled for some couplings.
pub fn memoryless_entanglement_possible(z1: f64, z2: f64) -> bool {
    z1 * z2 + (9.0f64 / 8.0).sqrt() * (z1 - z2).abs() > 1.0
}

/// Boundary values `z₂^{high,low} = (4 ± 3√2 z₁)/(4z₁ ± 3√2)` beyond
/// which the memoryless model admits entanglement.
pub fn memoryless_boundary(z1: f64) -> Result<(f64, f64)> {
    let a = 3.0 * SQRT2;
    let (dh, dl) = (4.0 * z1 + a, 4.0 * z1 - a);
    if dh.abs() < 1e-12 || dl.abs() < 1e-12 {
        return Err(Error::NumericalRange(format!("boundary is singular at z1 = {z1}")));
    }
    Ok(((4.0 + a * z1) / dh, (4.0 - a * z1) / dl))
}

/// A point on the memoryless boundary together with the couplings at which
/// the steady state is exactly marginal there.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryCouplings {
    pub z2: f64,
    pub gamma1: f64,
    pub gamma2: f64,
}

/// `γ₁ = 2/(√2 ± z₁)`, `γ₂ = 4√2 − γ₁` paired with `z₂^{high}` (upper
/// sign) and `z₂^{low}` (lower sign), in that order.
pub fn boundary_couplings(z1: f64) -> Result<[BoundaryCouplings; 2]> {
    let (high, low) = memoryless_boundary(z1)?;
    let g_high = 2.0 / (SQRT2 + z1);
    let g_low = 2.0 / (SQRT2 - z1);
    Ok([
        BoundaryCouplings { z2: high, gamma1: g_high, gamma2: 4.0 * SQRT2 - g_high },
        BoundaryCouplings { z2: low, gamma1: g_low, gamma2: 4.0 * SQRT2 - g_low },
    ])
}

/// `n` evenly spaced values from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![a],
        _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
    }
}

/// One cell of a `C_max` map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CmaxPoint {
    pub i: usize,
    pub j: usize,
    pub z1: f64,
    pub z2: f64,
    pub result: OptimizationResult,
}

/// `C_max` over an `n × n` grid on `[−1, 1]²`, row-major in `z₁`.
///
/// Points run in parallel; each draws its starts from
/// `point_seed(cfg.seed, index)`, so the output does not depend on the
/// thread count.
pub fn cmax_map(p: f64, grid_n: usize, search_box: &SearchBox, cfg: &OptimizerConfig) -> Result<Vec<CmaxPoint>> {
    let zs = linspace(-1.0, 1.0, grid_n);
    cmax_on_points(p, &grid_pairs(&zs), search_box, cfg)
}

fn grid_pairs(zs: &[f64]) -> Vec<(usize, usize, f64, f64)> {
    let n = zs.len();
    (0..n * n).map(|k| (k / n, k % n, zs[k / n], zs[k % n])).collect()
}

/// `C_max` for explicit `(i, j, z₁, z₂)` cells.
pub fn cmax_on_points(
    p: f64,
    cells: &[(usize, usize, f64, f64)],
    search_box: &SearchBox,
    cfg: &OptimizerConfig,
) -> Result<Vec<CmaxPoint>> {
    cells
        .par_iter()
        .enumerate()
        .map(|(k, &(i, j, z1, z2))| {
            let local = OptimizerConfig { seed: point_seed(cfg.seed, k as u64), ..*cfg };
            let result = maximize_concurrence(z1, z2, p, search_box, &local)?;
            Ok(CmaxPoint { i, j, z1, z2, result })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::observables::analytic_memoryless_steady_state;

    fn analytic_margin(z1: f64, z2: f64, g1: f64, g2: f64) -> f64 {
        let a = analytic_memoryless_steady_state(z1, z2, g1, g2).unwrap();
        crate::observables::entanglement_margin(&a.rho)
    }

    #[test]
    fn boundary_values() {
        let (h, l) = memoryless_boundary(0.0).unwrap();
        assert!((h - 4.0 / (3.0 * SQRT2)).abs() < 1e-15);
        assert!((l + 4.0 / (3.0 * SQRT2)).abs() < 1e-15);
        let (h, _) = memoryless_boundary(-1.0).unwrap();
        assert!((h + 1.0).abs() < 1e-14);
        assert!(memoryless_boundary(-3.0 * SQRT2 / 4.0).is_err());
    }

    #[test]
    fn boundary_matches_inequality() {
        for z1 in linspace(-0.95, 0.95, 15) {
            let (h, l) = memoryless_boundary(z1).unwrap();
            for z2 in [h, l] {
                if z2.abs() <= 1.0 {
                    let lhs = z1 * z2 + (9.0f64 / 8.0).sqrt() * (z1 - z2).abs();
                    assert!((lhs - 1.0).abs() < 1e-12, "z1={z1} z2={z2} lhs={lhs}");
                }
            }
        }
    }

    #[test]
    fn boundary_couplings_are_marginal() {
        for z1 in linspace(-0.9, 0.9, 7) {
            for b in boundary_couplings(z1).unwrap() {
                if b.z2.abs() <= 1.0 {
                    assert!(analytic_margin(z1, b.z2, b.gamma1, b.gamma2).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn memoryless_cmax_zero_outside_boundary() {
        let r = maximize_concurrence(0.0, -0.9, 0.0, &SearchBox::default(), &OptimizerConfig::default()).unwrap();
        assert_eq!(r.c_max, 0.0);
        let r = maximize_concurrence(0.0, -1.0, 0.0, &SearchBox::default(), &OptimizerConfig::default()).unwrap();
        assert!(r.c_max > 0.0);
        let again = steady_state_for(&r.best_params).unwrap().concurrence;
        assert!((again - r.c_max).abs() < 1e-8);
    }

    #[test]
    fn heat_current_maximum() {
        let cfg = OptimizerConfig { f_tol: 1e-15, x_tol: 1e-9, starts: 8, ..Default::default() };
        let h = maximize_heat_current(0.0, -1.0, 0.0, &SearchBox::default(), &cfg).unwrap();
        assert!((h.q_abs_max - 0.25).abs() < 1e-9);
        assert!((h.best_params.gamma1 - 2.0).abs() < 1e-4 && (h.best_params.gamma2 - 2.0).abs() < 1e-4);
    }

    #[test]
    fn optimization_is_deterministic() {
        let cfg = OptimizerConfig { starts: 4, seed: 9, ..Default::default() };
        let a = maximize_concurrence(0.2, -1.0, 0.5, &SearchBox::default(), &cfg).unwrap();
        let b = maximize_concurrence(0.2, -1.0, 0.5, &SearchBox::default(), &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn invalid_inputs() {
        let cfg = OptimizerConfig::default();
        assert!(maximize_concurrence(1.5, 0.0, 0.0, &SearchBox::default(), &cfg).is_err());
        assert!(maximize_concurrence(0.0, 0.0, 1.2, &SearchBox::default(), &cfg).is_err());
        let bad = SearchBox { gamma_max: 2000.0, ..Default::default() };
        assert!(maximize_concurrence(0.0, 0.0, 0.0, &bad, &cfg).is_err());
    }

    #[test]
    fn seeds_are_spread() {
        let a: Vec<u64> = (0..4).map(|k| point_seed(0, k)).collect();
        for i in 0..4 {
            for j in 0..i {
                assert_ne!(a[i], a[j]);
            }
        }
    }

    #[test]
    fn small_map_ordering() {
        let cfg = OptimizerConfig { starts: 3, ..Default::default() };
        let map = cmax_map(0.0, 3, &SearchBox::default(), &cfg).unwrap();
        assert_eq!(map.len(), 9);
        for (k, pt) in map.iter().enumerate() {
            assert_eq!((pt.i, pt.j), (k / 3, k % 3));
        }
        // Equilibrium diagonal.
        for pt in map.iter().filter(|pt| pt.i == pt.j) {
            assert!(pt.result.c_max < 1e-12);
        }
        // (z1, z2) = (1, −1) is entangled.
        assert!(map[6].result.c_max > 0.0 && map[2].result.c_max > 0.0);
    }
}
