// Copyright 2026 ness-lab contributors
// SPDX-License-Identifier: Apache-2.0

//! Non-divisibility of the reduced system dynamics.
//!
//! The system map `Λ_t[ρ] = Tr_M[e^{tℒ_SM}[ρ ⊗ ξ₁ ⊗ ξ₂]]` is written in
//! the orthonormal basis of normalized two-qubit Pauli products,
//! `F_ij(t) = Tr[G_i Λ_t[G_j]]`. A divisible map cannot increase
//! `|det F|`, so `𝒩 = ∫ max(0, ∂_t|det F|) dt` measures the violation.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::CmaxPoint;
use crate::collision::{thermal_qubit, ModelParams};
use crate::error::{Error, Result};
use crate::generators::{GeneratorKind, SectorGenerator};
use crate::qops::{matrix_exp, kron, CMatrix, CVector, Operator, C64};

/// Classification threshold for `𝒩`.
pub const NON_DIVISIBLE_THRESHOLD: f64 = 1e-12;
/// Grid size cap for refinement.
pub const MAX_GRID: usize = 16_000;
/// Relative change of `𝒩` below which refinement stops.
const REFINE_TOL: f64 = 0.01;
/// `|det F|` below which the rest of the time window is dropped.
const T_MAX_CAP: f64 = 1e4;

/// `𝟙/2` followed by `σ_μ ⊗ σ_ν / 2` for `(μ, ν) ≠ (0, 0)`, with
/// `σ₀ = 𝟙` and `μ` the slow index.
pub fn su4_basis() -> Vec<Operator> {
    let paulis = [Operator::identity(2), Operator::sigma_x(), Operator::sigma_y(), Operator::sigma_z()];
    let mut out = Vec::with_capacity(16);
    for a in &paulis {
        for b in &paulis {
            out.push(kron(a, b).scale(C64::new(0.5, 0.0)));
        }
    }
    out
}

/// The reduced map at one time in the Pauli-product basis.
#[derive(Debug, Clone, PartialEq)]
pub struct BlochMap {
    pub t: f64,
    pub matrix: DMatrix<f64>,
}

impl BlochMap {
    pub fn det_abs(&self) -> f64 {
        self.matrix.determinant().abs()
    }

    /// First-order rounding bound on [`det_abs`](Self::det_abs):
    /// `n²·ε·|det F|·σ_max/σ_min`.
    pub fn det_rounding(&self) -> f64 {
        let sv = self.matrix.singular_values();
        let (lo, hi) = (sv.min(), sv.max());
        let n = self.matrix.nrows() as f64;
        if lo <= 0.0 {
            return n * n * f64::EPSILON * hi.powi(self.matrix.nrows() as i32);
        }
        n * n * f64::EPSILON * self.det_abs() * hi / lo
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivisibilityReport {
    pub t_grid: Vec<f64>,
    pub det_abs: Vec<f64>,
    pub n_measure: f64,
    /// Refinement reached the `𝒩` tolerance before the grid cap.
    pub converged: bool,
    /// Window requested or chosen by the heuristic.
    pub t_max: f64,
}

impl DivisibilityReport {
    pub fn is_non_divisible(&self) -> bool {
        self.n_measure > NON_DIVISIBLE_THRESHOLD
    }
}

/// A system matrix unit `|a⟩⟨b|` lifted with the memory state, as a
/// vector in its coherence sector.
#[derive(Debug, Clone)]
struct Unit {
    sector: usize,
    init: CVector,
}

/// Propagates the sixteen lifted system matrix units and assembles `F(t)`.
#[derive(Debug, Clone)]
pub struct ReducedDynamics {
    gen: SectorGenerator,
    units: Vec<Unit>,
    /// Per sector: `(position, c, d)` for entries `|c m⟩⟨d m|`.
    traces: Vec<Vec<(usize, usize, usize)>>,
    /// `A[i, 4c + d] = (G_i)_{dc}`
    to_bloch: CMatrix,
    /// `B[4a + b, j] = (G_j)_{ab}`
    from_bloch: CMatrix,
}

impl ReducedDynamics {
    pub fn new(params: &ModelParams) -> Result<Self> {
        let gen = SectorGenerator::for_params(params, GeneratorKind::WithMemory)?;
        let xi1 = thermal_qubit(params.z1)?;
        let xi2 = thermal_qubit(params.z2)?;
        let xi: Vec<f64> = (0..4).map(|m| xi1.get(m >> 1, m >> 1).re * xi2.get(m & 1, m & 1).re).collect();

        let mut slot = vec![(usize::MAX, 0usize); 256];
        for (s, sector) in gen.sectors().iter().enumerate() {
            for (k, &idx) in sector.indices.iter().enumerate() {
                slot[idx] = (s, k);
            }
        }
        let liouville = |r: usize, c: usize| r + 16 * c;

        let mut units = Vec::with_capacity(16);
        for a in 0..4 {
            for b in 0..4 {
                let sector = slot[liouville(4 * a, 4 * b)].0;
                let mut init = CVector::zeros(gen.sectors()[sector].len());
                for (m, &w) in xi.iter().enumerate() {
                    let (s, k) = slot[liouville(4 * a + m, 4 * b + m)];
                    debug_assert_eq!(s, sector);
                    init[k] = C64::new(w, 0.0);
                }
                units.push(Unit { sector, init });
            }
        }

        let traces = gen
            .sectors()
            .iter()
            .map(|sector| {
                sector
                    .indices
                    .iter()
                    .enumerate()
                    .filter_map(|(k, &idx)| {
                        let (r, c) = (idx % 16, idx / 16);
                        (r % 4 == c % 4).then_some((k, r / 4, c / 4))
                    })
                    .collect()
            })
            .collect();

        let basis = su4_basis();
        let to_bloch = CMatrix::from_fn(16, 16, |i, cd| basis[i].matrix()[(cd % 4, cd / 4)]);
        let from_bloch = CMatrix::from_fn(16, 16, |ab, j| basis[j].matrix()[(ab / 4, ab % 4)]);
        Ok(ReducedDynamics { gen, units, traces, to_bloch, from_bloch })
    }

    fn initial_states(&self) -> Vec<CVector> {
        self.units.iter().map(|u| u.init.clone()).collect()
    }

    fn propagators(&self, dt: f64) -> Result<Vec<CMatrix>> {
        // Only sectors that carry a system unit are needed.
        let mut used = vec![false; self.gen.sectors().len()];
        for u in &self.units {
            used[u.sector] = true;
        }
        self.gen
            .blocks()
            .iter()
            .zip(used)
            .map(|(b, u)| if u { matrix_exp(b, dt) } else { Ok(CMatrix::zeros(0, 0)) })
            .collect()
    }

    fn step(&self, props: &[CMatrix], states: &mut [CVector]) {
        for (u, v) in self.units.iter().zip(states.iter_mut()) {
            *v = &props[u.sector] * &*v;
        }
    }

    fn bloch(&self, t: f64, states: &[CVector]) -> BlochMap {
        // T[4c + d, 4a + b] = ⟨c|Λ[|a⟩⟨b|]|d⟩
        let mut transfer = CMatrix::zeros(16, 16);
        for (ab, (u, v)) in self.units.iter().zip(states).enumerate() {
            for &(k, c, d) in &self.traces[u.sector] {
                transfer[(4 * c + d, ab)] += v[k];
            }
        }
        let f = &self.to_bloch * transfer * &self.from_bloch;
        BlochMap { t, matrix: f.map(|z| z.re) }
    }

    /// `F(t)` by a single propagation.
    pub fn map_at(&self, t: f64) -> Result<BlochMap> {
        if !(t >= 0.0) {
            return Err(Error::Parameter(format!("time must be non-negative, got {t}")));
        }
        let mut states = self.initial_states();
        if t > 0.0 {
            self.step(&self.propagators(t)?, &mut states);
        }
        Ok(self.bloch(t, &states))
    }

    /// `|det F(t_k)|` on the uniform grid `t_k = k·t_end/n`, `k = 0..=n`.
    pub fn det_trajectory(&self, t_end: f64, n: usize) -> Result<Vec<f64>> {
        Ok(self.trajectory(t_end, n)?.0)
    }

    /// Determinants plus the summed rounding bound over increasing cells.
    fn trajectory(&self, t_end: f64, n: usize) -> Result<(Vec<f64>, f64)> {
        let dt = t_end / n as f64;
        let props = self.propagators(dt)?;
        let mut states = self.initial_states();
        let mut out = Vec::with_capacity(n + 1);
        let mut noise = 0.0;
        // Λ₀ is the identity; the assembled F(0) differs only by rounding.
        out.push(1.0);
        let mut prev = self.bloch(0.0, &states);
        for k in 1..=n {
            self.step(&props, &mut states);
            let f = self.bloch(k as f64 * dt, &states);
            let det = f.det_abs();
            if det > out[k - 1] {
                noise += f.det_rounding() + if k > 1 { prev.det_rounding() } else { 0.0 };
            }
            out.push(det);
            prev = f;
        }
        Ok((out, noise))
    }
}

/// `F(t)` for the model with memory qubits starting in `ξ₁ ⊗ ξ₂`.
pub fn reduced_map(params: &ModelParams, t: f64) -> Result<BlochMap> {
    ReducedDynamics::new(params)?.map_at(t)
}

/// `50 / min` over the non-zero dissipation rates of the generator,
/// capped at `10⁴`.
pub fn default_t_max(params: &ModelParams) -> f64 {
    let p = params.p;
    let mut min_rate = f64::INFINITY;
    for (k, gamma) in [params.gamma1, params.gamma2].into_iter().enumerate() {
        let (up, down) = params.rates(k);
        for weight in [1.0 - p, p] {
            for r in [up, down] {
                let rate = weight * gamma * r;
                if rate > 0.0 {
                    min_rate = min_rate.min(rate);
                }
            }
        }
    }
    (50.0 / min_rate).min(T_MAX_CAP)
}

fn positive_increments(det: &[f64]) -> f64 {
    det.windows(2).map(|w| (w[1] - w[0]).max(0.0)).sum()
}


/// `𝒩` on a uniform grid, refined by doubling.
///
/// The window `[0, t_max]` (default [`default_t_max`]) is sampled with
/// `n_grid` steps and doubled until `𝒩` changes by less than 1% or the
/// grid reaches [`MAX_GRID`] points, or until the change is at the
/// rounding level of `|det F|`. `converged` is false if the cap is hit.
pub fn non_divisibility(params: &ModelParams, t_max: Option<f64>, n_grid: usize) -> Result<DivisibilityReport> {
    params.validate()?;
    if n_grid < 2 {
        return Err(Error::Parameter(format!("grid needs at least 2 steps, got {n_grid}")));
    }
    let t_max = t_max.unwrap_or_else(|| default_t_max(params));
    if !(t_max > 0.0 && t_max.is_finite()) {
        return Err(Error::Parameter(format!("t_max must be positive and finite, got {t_max}")));
    }
    let dynamics = ReducedDynamics::new(params)?;

    let t_end = t_max;
    let mut n = n_grid;
    let (mut det, mut noise) = dynamics.trajectory(t_end, n)?;
    let mut measure = positive_increments(&det);
    let mut converged = false;
    while 2 * n <= MAX_GRID {
        let (finer, finer_noise) = dynamics.trajectory(t_end, 2 * n)?;
        let next = positive_increments(&finer);
        let change = (next - measure).abs();
        n *= 2;
        det = finer;
        let done = change <= REFINE_TOL * next.max(measure) || change <= noise.max(finer_noise);
        noise = finer_noise;
        measure = next;
        if done {
            converged = true;
            break;
        }
    }
    let t_grid = (0..=n).map(|k| t_end * k as f64 / n as f64).collect();
    Ok(DivisibilityReport { t_grid, det_abs: det, n_measure: measure, converged, t_max })
}

/// `(C_max, 𝒩)` for one cell of a `C_max` map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivisibilityPoint {
    pub i: usize,
    pub j: usize,
    pub z1: f64,
    pub z2: f64,
    pub c_max: f64,
    /// `None` where `C_max = 0`; the optimal couplings are not meaningful
    /// there.
    pub n_measure: Option<f64>,
    pub converged: bool,
    pub params: ModelParams,
}

/// `𝒩` at the concurrence-optimal couplings of each entangled cell.
pub fn divisibility_map(cmax: &[CmaxPoint], n_grid: usize) -> Result<Vec<DivisibilityPoint>> {
    cmax.par_iter()
        .map(|pt| {
            let params = pt.result.best_params;
            let (n_measure, converged) = if pt.result.c_max > 0.0 {
                let r = non_divisibility(&params, None, n_grid)?;
                (Some(r.n_measure), r.converged)
            } else {
                (None, true)
            };
            Ok(DivisibilityPoint { i: pt.i, j: pt.j, z1: pt.z1, z2: pt.z2, c_max: pt.result.c_max, n_measure, converged, params })
        })
        .collect()
}
