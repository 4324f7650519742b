// Copyright 2026 ness-lab contributors
// SPDX-License-Identifier: Apache-2.0

//! The set of reachable `(|Q̇|, C)` pairs for a temperature pair.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::nelder_mead::NelderMead;
use super::{check_temperatures, params_from_log, random_log_point, log_coordinates, SearchBox};
use crate::collision::ModelParams;
use crate::error::{Error, Result};
use crate::generators::steady_observables;

/// Minimum concurrence over a bin for it to count as guaranteed entangled.
pub const OVERHANG_EPSILON: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionPoint {
    pub q_abs: f64,
    pub concurrence: f64,
    pub margin: f64,
    pub params: ModelParams,
}

/// Concurrence range of the points falling into `[q_lo, q_hi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HullBin {
    pub q_lo: f64,
    pub q_hi: f64,
    pub count: usize,
    pub c_min: Option<f64>,
    pub c_max: Option<f64>,
}

impl HullBin {
    pub fn center(&self) -> f64 {
        0.5 * (self.q_lo + self.q_hi)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionSample {
    pub z1: f64,
    pub z2: f64,
    pub p: f64,
    pub points: Vec<RegionPoint>,
    /// Uniform bins over `[0, max |Q̇|]`.
    pub bins: Vec<HullBin>,
}

impl RegionSample {
    fn new(z1: f64, z2: f64, p: f64, points: Vec<RegionPoint>, n_bins: usize) -> Self {
        let mut s = RegionSample { z1, z2, p, points, bins: vec![] };
        s.rebin(n_bins);
        s
    }

    pub fn q_max(&self) -> f64 {
        self.points.iter().map(|pt| pt.q_abs).fold(0.0, f64::max)
    }

    fn bin_of(&self, q: f64, n_bins: usize, top: f64) -> usize {
        if top <= 0.0 {
            return 0;
        }
        ((q / top * n_bins as f64) as usize).min(n_bins - 1)
    }

    /// Recomputes `n_bins` uniform bins over `[0, max |Q̇|]`.
    pub fn rebin(&mut self, n_bins: usize) {
        let n_bins = n_bins.max(1);
        let top = self.q_max();
        let width = top / n_bins as f64;
        let mut bins: Vec<HullBin> = (0..n_bins)
            .map(|b| HullBin { q_lo: b as f64 * width, q_hi: (b + 1) as f64 * width, count: 0, c_min: None, c_max: None })
            .collect();
        for pt in &self.points {
            let bin = &mut bins[self.bin_of(pt.q_abs, n_bins, top)];
            bin.count += 1;
            bin.c_min = Some(bin.c_min.map_or(pt.concurrence, |c| c.min(pt.concurrence)));
            bin.c_max = Some(bin.c_max.map_or(pt.concurrence, |c| c.max(pt.concurrence)));
        }
        self.bins = bins;
    }

    /// Upper hull as `(bin center, max C)` over non-empty bins.
    pub fn hull_upper(&self) -> Vec<(f64, f64)> {
        self.bins.iter().filter_map(|b| b.c_max.map(|c| (b.center(), c))).collect()
    }

    /// Lower hull as `(bin center, min C)` over non-empty bins.
    pub fn hull_lower(&self) -> Vec<(f64, f64)> {
        self.bins.iter().filter_map(|b| b.c_min.map(|c| (b.center(), c))).collect()
    }

    /// Piecewise-linear upper hull at `q`, `None` outside the sampled range.
    pub fn upper_at(&self, q: f64) -> Option<f64> {
        interpolate(&self.hull_upper(), q)
    }

    /// Piecewise-linear lower hull at `q`, `None` outside the sampled range.
    pub fn lower_at(&self, q: f64) -> Option<f64> {
        interpolate(&self.hull_lower(), q)
    }
}

fn interpolate(pts: &[(f64, f64)], q: f64) -> Option<f64> {
    let first = pts.first()?;
    let last = pts.last()?;
    if q < first.0 || q > last.0 {
        return None;
    }
    let k = pts.partition_point(|pt| pt.0 < q);
    if k == 0 {
        return Some(first.1);
    }
    let (a, b) = (pts[k - 1], pts[k]);
    Some(a.1 + (b.1 - a.1) * (q - a.0) / (b.0 - a.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionConfig {
    pub bins: usize,
    /// Run the per-bin hull searches after random sampling.
    pub refine: bool,
    /// Evaluation budget per hull search.
    pub refine_evals: usize,
    /// Weight of the distance-to-bin penalty in hull searches.
    pub penalty: f64,
    pub search_box: SearchBox,
}

impl Default for RegionConfig {
    fn default() -> Self {
        RegionConfig { bins: 200, refine: true, refine_evals: 200, penalty: 10.0, search_box: SearchBox::default() }
    }
}

/// Samples steady states over log-uniform couplings; see
/// [`sample_cq_region_with`].
pub fn sample_cq_region(z1: f64, z2: f64, p: f64, n_samples: usize, seed: u64) -> Result<RegionSample> {
    sample_cq_region_with(z1, z2, p, n_samples, seed, &RegionConfig::default())
}

struct Sampler {
    z1: f64,
    z2: f64,
    p: f64,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Sampler {
    fn point(&self, x: &[f64]) -> Option<RegionPoint> {
        let params = params_from_log(self.z1, self.z2, self.p, x);
        steady_observables(&params).ok().map(|o| RegionPoint {
            q_abs: o.q_dot.abs(),
            concurrence: o.concurrence,
            margin: o.margin,
            params,
        })
    }

    /// Local search; returns the final point if it is a valid state.
    fn search<F: Fn(&RegionPoint) -> f64>(&self, nm: &NelderMead, start: &ModelParams, score: F) -> Option<RegionPoint> {
        let m = nm.minimize(
            |x| self.point(x).map_or(f64::NAN, |pt| score(&pt)),
            &log_coordinates(start),
            &self.lower,
            &self.upper,
        );
        self.point(&m.x)
    }
}

/// Samples the reachable `(|Q̇|, C)` pairs.
///
/// Couplings are drawn log-uniformly over the search box (ChaCha8 stream
/// from `seed`). With refinement on, the extreme heat current is searched
/// for first, then every bin gets one search for the largest and, unless a
/// separable state already lies in it, one for the smallest entanglement
/// margin, with the objective penalized by the distance of `|Q̇|` from the
/// bin.
pub fn sample_cq_region_with(
    z1: f64,
    z2: f64,
    p: f64,
    n_samples: usize,
    seed: u64,
    cfg: &RegionConfig,
) -> Result<RegionSample> {
    check_temperatures(z1, z2, p)?;
    cfg.search_box.validate()?;
    if n_samples < 1000 {
        return Err(Error::Parameter(format!("at least 1000 samples required, got {n_samples}")));
    }
    if cfg.bins == 0 {
        return Err(Error::Parameter("bin count must be positive".into()));
    }
    let (lower, upper) = cfg.search_box.log_bounds(p);
    let sampler = Sampler { z1, z2, p, lower, upper };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points: Vec<RegionPoint> = (0..n_samples)
        .filter_map(|_| sampler.point(&random_log_point(&mut rng, &sampler.lower, &sampler.upper)))
        .collect();
    if points.is_empty() {
        return Err(Error::Convergence("no sampled coupling produced a steady state".into()));
    }
    if cfg.refine {
        refine(&sampler, &mut points, cfg);
    }
    Ok(RegionSample::new(z1, z2, p, points, cfg.bins))
}

fn refine(sampler: &Sampler, points: &mut Vec<RegionPoint>, cfg: &RegionConfig) {
    let nm = NelderMead { max_evals: cfg.refine_evals, f_tol: 1e-10, x_tol: 1e-4, initial_step: 0.3, restarts: 0 };
    let wide = NelderMead { max_evals: 4 * cfg.refine_evals, f_tol: 1e-14, x_tol: 1e-8, restarts: 1, ..nm };

    // Extend the sampled range to the largest reachable current.
    let mut by_q: Vec<usize> = (0..points.len()).collect();
    by_q.sort_by(|&a, &b| points[b].q_abs.total_cmp(&points[a].q_abs));
    let seeds: Vec<ModelParams> = by_q.iter().take(3).map(|&k| points[k].params).collect();
    for start in &seeds {
        if let Some(pt) = sampler.search(&wide, start, |pt| -pt.q_abs) {
            points.push(pt);
        }
    }

    let top = points.iter().map(|pt| pt.q_abs).fold(0.0, f64::max);
    if top <= 0.0 {
        return;
    }
    let nb = cfg.bins;
    let width = top / nb as f64;
    let bin_of = |q: f64| ((q / width) as usize).min(nb - 1);
    // Highest- and lowest-margin point seen in each bin.
    let mut high: Vec<Option<RegionPoint>> = vec![None; nb];
    let mut low: Vec<Option<RegionPoint>> = vec![None; nb];
    let record = |pt: RegionPoint, points: &mut Vec<RegionPoint>, high: &mut [Option<RegionPoint>], low: &mut [Option<RegionPoint>]| {
        let b = bin_of(pt.q_abs);
        if high[b].is_none_or(|h| pt.margin > h.margin) {
            high[b] = Some(pt);
        }
        if low[b].is_none_or(|l| pt.margin < l.margin) {
            low[b] = Some(pt);
        }
        points.push(pt);
    };
    for pt in points.iter() {
        let b = bin_of(pt.q_abs);
        if high[b].is_none_or(|h| pt.margin > h.margin) {
            high[b] = Some(*pt);
        }
        if low[b].is_none_or(|l| pt.margin < l.margin) {
            low[b] = Some(*pt);
        }
    }

    let penalty = cfg.penalty;
    let ascending: Vec<usize> = (0..nb).collect();
    let descending: Vec<usize> = (0..nb).rev().collect();
    // Margins below zero all mean C = 0; flattening them lets the lower
    // searches stop once they reach a separable state.
    let floor = -1e-6;

    // Continuation sweeps: each bin is searched from its own extreme point
    // and from the neighbor just refined.
    for (pass, order) in [&ascending, &descending].into_iter().enumerate() {
        for &b in order {
            let (lo, hi) = (b as f64 * width, (b + 1) as f64 * width);
            let dist = move |q: f64| if q < lo { lo - q } else if q > hi { q - hi } else { 0.0 };
            let neighbor = if pass == 0 { b.checked_sub(1) } else { (b + 1 < nb).then_some(b + 1) };

            let mut starts: Vec<ModelParams> = Vec::new();
            if pass == 0 {
                starts.extend(high[b].map(|pt| pt.params));
            }
            starts.extend(neighbor.and_then(|n| high[n]).map(|pt| pt.params));
            for start in starts {
                if let Some(pt) = sampler.search(&nm, &start, |pt| -pt.margin + penalty * dist(pt.q_abs)) {
                    record(pt, points, &mut high, &mut low);
                }
            }

            if low[b].is_some_and(|pt| pt.margin <= 0.0) {
                continue;
            }
            let mut starts: Vec<ModelParams> = Vec::new();
            if pass == 0 {
                starts.extend(low[b].map(|pt| pt.params));
            }
            starts.extend(neighbor.and_then(|n| low[n]).map(|pt| pt.params));
            for start in starts {
                if let Some(pt) = sampler.search(&nm, &start, |pt| pt.margin.max(floor) + penalty * dist(pt.q_abs)) {
                    record(pt, points, &mut high, &mut low);
                }
                if low[b].is_some_and(|pt| pt.margin <= 0.0) {
                    break;
                }
            }
        }
    }
}

/// Longest run of consecutive non-empty bins whose minimum concurrence
/// exceeds [`OVERHANG_EPSILON`], as a `|Q̇|` interval.
pub fn detect_overhang(region: &RegionSample) -> Option<(f64, f64)> {
    detect_overhang_with(region, OVERHANG_EPSILON)
}

pub fn detect_overhang_with(region: &RegionSample, epsilon: f64) -> Option<(f64, f64)> {
    let mut best: Option<(f64, f64)> = None;
    let mut run: Option<(f64, f64)> = None;
    for bin in &region.bins {
        match bin.c_min {
            Some(c) if c > epsilon => {
                run = Some(run.map_or((bin.q_lo, bin.q_hi), |(lo, _)| (lo, bin.q_hi)));
                if let Some(r) = run {
                    if best.is_none_or(|b| r.1 - r.0 > b.1 - b.0) {
                        best = Some(r);
                    }
                }
            }
            _ => run = None,
        }
    }
    best
}

/// Bounds on `|Q̇|` over entangled steady states.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalCurrents {
    pub q_crit_min: f64,
    pub q_crit_max: f64,
}

/// Smallest and largest heat current among entangled steady states, or
/// `None` when no sampled or optimized coupling gives `C > 0`.
///
/// Starts from a refined region sample and sharpens both ends with local
/// searches restricted to positive margin.
pub fn critical_heat_currents(
    z1: f64,
    z2: f64,
    p: f64,
    n_samples: usize,
    seed: u64,
    cfg: &RegionConfig,
) -> Result<Option<CriticalCurrents>> {
    let region = sample_cq_region_with(z1, z2, p, n_samples, seed, cfg)?;
    let (lower, upper) = cfg.search_box.log_bounds(p);
    let sampler = Sampler { z1, z2, p, lower, upper };
    let mut entangled: Vec<RegionPoint> = region.points.iter().copied().filter(|pt| pt.margin > 0.0).collect();
    if entangled.is_empty() {
        return Ok(None);
    }
    let nm = NelderMead { max_evals: 4 * cfg.refine_evals, f_tol: 1e-12, x_tol: 1e-7, initial_step: 0.1, restarts: 1 };
    entangled.sort_by(|a, b| a.q_abs.total_cmp(&b.q_abs));
    let low: Vec<ModelParams> = entangled.iter().take(3).map(|pt| pt.params).collect();
    let high: Vec<ModelParams> = entangled.iter().rev().take(3).map(|pt| pt.params).collect();
    let mut found = Vec::new();
    for start in &low {
        found.extend(sampler.search(&nm, start, |pt| if pt.margin > 0.0 { pt.q_abs } else { f64::NAN }));
    }
    for start in &high {
        found.extend(sampler.search(&nm, start, |pt| if pt.margin > 0.0 { -pt.q_abs } else { f64::NAN }));
    }
    entangled.extend(found.into_iter().filter(|pt| pt.margin > 0.0));
    let q_crit_min = entangled.iter().map(|pt| pt.q_abs).fold(f64::INFINITY, f64::min);
    let q_crit_max = entangled.iter().map(|pt| pt.q_abs).fold(0.0, f64::max);
    Ok(Some(CriticalCurrents { q_crit_min, q_crit_max }))
}
