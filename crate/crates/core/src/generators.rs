// Copyright 2026 ness-lab contributors
// SPDX-License-Identifier: Apache-2.0

//! Continuous-time GKSL generators of the model and their steady states.
//!
//! Rates are in units of `Ω = 1`. Both generators are sums of fixed
//! unit-coefficient terms (flip-flop Hamiltonians and single-qubit
//! dissipators) weighted by the model parameters; the terms are built once
//! and cached, dense and split into coherence sectors.

use std::sync::OnceLock;

use nalgebra::DMatrix;

use crate::collision::{thermal_qubit, ModelParams};
use crate::error::{Error, Result};
use crate::observables::SteadyStateReport;
use crate::qops::{
    coherence_sectors, partial_trace_matrix, HermitianCoords, stationary_in_subspace, unvectorize, vectorize, CMatrix,
    CVector, DensityMatrix, Operator, Sector, Superoperator, C64,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeneratorKind {
    /// Two system qubits, `D = 4`.
    Memoryless,
    /// System and memory qubits `S₁S₂M₁M₂`, `D = 16`.
    WithMemory,
}

impl GeneratorKind {
    pub fn n_qubits(self) -> usize {
        match self {
            GeneratorKind::Memoryless => 2,
            GeneratorKind::WithMemory => 4,
        }
    }

    pub fn dim(self) -> usize {
        1 << self.n_qubits()
    }
}

/// Unit-coefficient generator terms in a fixed order.
struct TermSet {
    terms: Vec<Superoperator>,
    sectors: Vec<Sector>,
    /// `blocks[s][t]`: term `t` restricted to sector `s`.
    blocks: Vec<Vec<CMatrix>>,
    /// Real form of each term on Hermitian zero-sector matrices.
    zero_coords: HermitianCoords,
    /// Coordinates left free by the bipartite gauge symmetry.
    zero_keep: Vec<usize>,
    zero_real: Vec<DMatrix<f64>>,
}

impl TermSet {
    fn new(n_qubits: usize, terms: Vec<Superoperator>) -> Self {
        let sectors = coherence_sectors(n_qubits);
        let blocks = sectors
            .iter()
            .map(|s| terms.iter().map(|t| t.restrict(&s.indices)).collect())
            .collect::<Vec<Vec<CMatrix>>>();
        let zero = sectors.iter().position(|s| s.order == 0).expect("zero sector");
        let zero_coords =
            HermitianCoords::new(&sectors[zero].indices, 1 << n_qubits).expect("zero sector is transpose-closed");
        let zero_keep = zero_coords.symmetric_subset(&gauge_signs(n_qubits));
        let zero_real = blocks[zero]
            .iter()
            .map(|b| zero_coords.realify(b).select_rows(&zero_keep).select_columns(&zero_keep))
            .collect();
        TermSet { terms, sectors, blocks, zero_coords, zero_keep, zero_real }
    }

    fn zero_real(&self, coeffs: &[f64]) -> DMatrix<f64> {
        let n = self.zero_keep.len();
        let mut out = DMatrix::zeros(n, n);
        for (t, &c) in self.zero_real.iter().zip(coeffs) {
            if c != 0.0 {
                out.zip_apply(t, |a, b| *a += b * c);
            }
        }
        out
    }

    fn dense(&self, coeffs: &[f64]) -> CMatrix {
        let n = self.terms[0].matrix().nrows();
        let mut out = CMatrix::zeros(n, n);
        for (t, &c) in self.terms.iter().zip(coeffs) {
            if c != 0.0 {
                out.zip_apply(t.matrix(), |a, b| *a += b * c);
            }
        }
        out
    }

    fn block(&self, sector: usize, coeffs: &[f64]) -> CMatrix {
        let n = self.sectors[sector].len();
        let mut out = CMatrix::zeros(n, n);
        for (t, &c) in self.blocks[sector].iter().zip(coeffs) {
            if c != 0.0 {
                out.zip_apply(t, |a, b| *a += b * c);
            }
        }
        out
    }

}

/// Diagonal of `U = ⊗ σ_z` over the qubits S₂ and M₁.
///
/// The exchange graph M₁–S₁–S₂–M₂ is bipartite with parts {S₁, M₂} and
/// {S₂, M₁}, so `U` flips the sign of every flip-flop term while leaving
/// the dissipators alone. Together with complex conjugation (all terms are
/// real) this maps the generator to itself, so the unique steady state
/// satisfies `ρ = Uρ*U`: every coherence is either real or imaginary.
fn gauge_signs(n_qubits: usize) -> Vec<f64> {
    let sites: &[usize] = if n_qubits == 2 { &[1] } else { &[1, 2] };
    (0..1usize << n_qubits)
        .map(|i| {
            // Bit set means ground state, where σ_z = −1.
            let flips = sites.iter().filter(|&&s| i >> (n_qubits - 1 - s) & 1 == 1).count();
            if flips % 2 == 0 { 1.0 } else { -1.0 }
        })
        .collect()
}

fn flip_flop_on(a: usize, b: usize, n: usize) -> CMatrix {
    Operator::embed(&Operator::flip_flop(), &[a, b], n).into_matrix()
}

fn lowering_on(site: usize, n: usize) -> CMatrix {
    Operator::embed_single(&Operator::sigma_minus(), site, n).into_matrix()
}

fn raising_on(site: usize, n: usize) -> CMatrix {
    Operator::embed_single(&Operator::sigma_plus(), site, n).into_matrix()
}

/// Term order: `H_S₁S₂`, then per bath k: `D[σ_−^{S_k}]`, `D[σ_+^{S_k}]`.
fn memoryless_terms() -> &'static TermSet {
    static TERMS: OnceLock<TermSet> = OnceLock::new();
    TERMS.get_or_init(|| {
        let mut terms = vec![Superoperator::commutator(&flip_flop_on(0, 1, 2))];
        for k in 0..2 {
            terms.push(Superoperator::dissipator(&lowering_on(k, 2)));
            terms.push(Superoperator::dissipator(&raising_on(k, 2)));
        }
        TermSet::new(2, terms)
    })
}

/// Term order: `H_S₁S₂`, `H_S₁M₁`, `H_S₂M₂`, then per bath k:
/// `D[σ_−^{S_k}]`, `D[σ_+^{S_k}]`, `D[σ_−^{M_k}]`, `D[σ_+^{M_k}]`.
fn memory_terms() -> &'static TermSet {
    static TERMS: OnceLock<TermSet> = OnceLock::new();
    TERMS.get_or_init(|| {
        let mut terms = vec![
            Superoperator::commutator(&flip_flop_on(0, 1, 4)),
            Superoperator::commutator(&flip_flop_on(0, 2, 4)),
            Superoperator::commutator(&flip_flop_on(1, 3, 4)),
        ];
        for k in 0..2 {
            terms.push(Superoperator::dissipator(&lowering_on(k, 4)));
            terms.push(Superoperator::dissipator(&raising_on(k, 4)));
            terms.push(Superoperator::dissipator(&lowering_on(2 + k, 4)));
            terms.push(Superoperator::dissipator(&raising_on(2 + k, 4)));
        }
        TermSet::new(4, terms)
    })
}

fn memoryless_coefficients(params: &ModelParams) -> Vec<f64> {
    let mut c = vec![1.0];
    for (k, gamma) in [params.gamma1, params.gamma2].into_iter().enumerate() {
        let (up, down) = params.rates(k);
        c.push(gamma * down);
        c.push(gamma * up);
    }
    c
}

fn memory_coefficients(params: &ModelParams) -> Vec<f64> {
    let p = params.p;
    let mut c = vec![1.0, p * params.upsilon1, p * params.upsilon2];
    for (k, gamma) in [params.gamma1, params.gamma2].into_iter().enumerate() {
        let (up, down) = params.rates(k);
        c.push((1.0 - p) * gamma * down);
        c.push((1.0 - p) * gamma * up);
        c.push(p * gamma * down);
        c.push(p * gamma * up);
    }
    c
}

/// A GKSL generator together with the parameters it was built from.
#[derive(Debug, Clone)]
pub struct GkslGenerator {
    superop: Superoperator,
    params: ModelParams,
    kind: GeneratorKind,
}

/// `ℒ = −iΩ[σ_int, ·] + Σ_k Γ_k(z_k^− D[σ_−^{S_k}] + z_k^+ D[σ_+^{S_k}])`.
pub fn build_memoryless_generator(params: &ModelParams) -> Result<GkslGenerator> {
    params.validate()?;
    let terms = memoryless_terms();
    let superop = Superoperator::new(4, terms.dense(&memoryless_coefficients(params)))?;
    Ok(GkslGenerator { superop, params: *params, kind: GeneratorKind::Memoryless })
}

/// Four-qubit generator of system and memory: Hamiltonian
/// `Ω σ_int^{S₁S₂} + p Σ Υ_k σ_int^{S_kM_k}`, dissipators weighted
/// `(1−p)Γ_k` on `S_k` and `pΓ_k` on `M_k`.
pub fn build_memory_generator(params: &ModelParams) -> Result<GkslGenerator> {
    params.validate()?;
    let terms = memory_terms();
    let superop = Superoperator::new(16, terms.dense(&memory_coefficients(params)))?;
    Ok(GkslGenerator { superop, params: *params, kind: GeneratorKind::WithMemory })
}

impl GkslGenerator {
    pub fn superop(&self) -> &Superoperator {
        &self.superop
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn kind(&self) -> GeneratorKind {
        self.kind
    }

    pub fn apply(&self, rho: &CMatrix) -> CMatrix {
        self.superop.apply(rho)
    }

    /// Generator in absolute time units, `Ω·ℒ`.
    pub fn in_absolute_units(&self) -> Superoperator {
        self.superop.scaled(self.params.inner_coupling)
    }

    /// The generator split into its coherence-sector blocks.
    pub fn sector_blocks(&self) -> SectorGenerator {
        let sectors = coherence_sectors(self.kind.n_qubits());
        let blocks = sectors.iter().map(|s| self.superop.restrict(&s.indices)).collect();
        SectorGenerator { dim: self.kind.dim(), sectors, blocks }
    }
}

/// Block-diagonal form of an excitation-conserving generator.
#[derive(Debug, Clone)]
pub struct SectorGenerator {
    dim: usize,
    sectors: Vec<Sector>,
    blocks: Vec<CMatrix>,
}

impl SectorGenerator {
    pub fn for_params(params: &ModelParams, kind: GeneratorKind) -> Result<Self> {
        params.validate()?;
        let (terms, coeffs) = match kind {
            GeneratorKind::Memoryless => (memoryless_terms(), memoryless_coefficients(params)),
            GeneratorKind::WithMemory => (memory_terms(), memory_coefficients(params)),
        };
        let blocks = (0..terms.sectors.len()).map(|s| terms.block(s, &coeffs)).collect();
        Ok(SectorGenerator { dim: kind.dim(), sectors: terms.sectors.clone(), blocks })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn sectors(&self) -> &[Sector] {
        &self.sectors
    }

    /// Blocks in the order of [`sectors`](Self::sectors).
    pub fn blocks(&self) -> &[CMatrix] {
        &self.blocks
    }

    pub fn block(&self, order: i32) -> Option<(&Sector, &CMatrix)> {
        let i = self.sectors.iter().position(|s| s.order == order)?;
        Some((&self.sectors[i], &self.blocks[i]))
    }

    /// `exp(t·ℒ)` as one dense block per sector.
    pub fn propagator(&self, t: f64) -> Result<SectorPropagator> {
        let blocks = self
            .blocks
            .iter()
            .map(|b| crate::qops::matrix_exp(b, t))
            .collect::<Result<Vec<_>>>()?;
        Ok(SectorPropagator { dim: self.dim, sectors: self.sectors.clone(), blocks })
    }
}

/// `exp(tℒ)` in block-diagonal form.
#[derive(Debug, Clone)]
pub struct SectorPropagator {
    dim: usize,
    sectors: Vec<Sector>,
    blocks: Vec<CMatrix>,
}

impl SectorPropagator {
    pub fn apply(&self, rho: &CMatrix) -> CMatrix {
        let v = vectorize(rho);
        let mut out = CVector::zeros(v.len());
        for (sector, block) in self.sectors.iter().zip(&self.blocks) {
            let sub = CVector::from_iterator(sector.len(), sector.indices.iter().map(|&i| v[i]));
            if sub.iter().all(|z| *z == C64::new(0.0, 0.0)) {
                continue;
            }
            let image = block * sub;
            for (k, &i) in sector.indices.iter().enumerate() {
                out[i] = image[k];
            }
        }
        unvectorize(&out, self.dim)
    }

    pub fn sectors(&self) -> &[Sector] {
        &self.sectors
    }

    /// Blocks in the order of [`sectors`](Self::sectors).
    pub fn blocks(&self) -> &[CMatrix] {
        &self.blocks
    }

    pub fn block(&self, order: i32) -> Option<&CMatrix> {
        self.sectors.iter().position(|s| s.order == order).map(|i| &self.blocks[i])
    }
}

/// Stationary state in the zero-coherence sector of a block generator.
fn solve_sector_zero(gen: &SectorGenerator) -> Result<(DensityMatrix, f64)> {
    let (sector, block) = gen.block(0).expect("zero sector");
    let st = stationary_in_subspace(block, &sector.indices, gen.dim)?;
    Ok((st.state, st.residual))
}

/// Steady state and observables of a generator.
///
/// Excitation conservation makes the zero-coherence sector invariant, and a
/// unique stationary state lies in it; only that block is solved. At `p = 0`
/// the memory qubits have no dynamics at all, so the four-qubit stationary
/// state is not unique; the memory is then pinned to its initial state
/// `ξ₁ ⊗ ξ₂` and the system part comes from the memoryless generator.
pub fn steady_state(gen: &GkslGenerator) -> Result<SteadyStateReport> {
    match gen.kind {
        GeneratorKind::Memoryless => {
            let (rho, residual) = solve_sector_zero(&gen.sector_blocks())?;
            SteadyStateReport::new(rho, None, &gen.params, residual)
        }
        GeneratorKind::WithMemory if gen.params.p == 0.0 => {
            let full = memoryless_lifted_steady_state(&gen.params)?;
            let residual = gen.apply(full.matrix()).norm();
            let system = DensityMatrix::from_numerical(partial_trace_matrix(full.matrix(), &[0], &[4, 4])?)?;
            SteadyStateReport::new(system, Some(full), &gen.params, residual)
        }
        GeneratorKind::WithMemory => {
            let (full, residual) = solve_sector_zero(&gen.sector_blocks())?;
            let system = DensityMatrix::from_numerical(partial_trace_matrix(full.matrix(), &[0], &[4, 4])?)?;
            SteadyStateReport::new(system, Some(full), &gen.params, residual)
        }
    }
}

fn memoryless_lifted_steady_state(params: &ModelParams) -> Result<DensityMatrix> {
    let gen = SectorGenerator::for_params(params, GeneratorKind::Memoryless)?;
    let (system, _) = solve_sector_zero(&gen)?;
    let xi1 = thermal_qubit(params.z1)?;
    let xi2 = thermal_qubit(params.z2)?;
    Ok(DensityMatrix::product(&[&system, &xi1, &xi2]))
}

fn terms_for(params: &ModelParams) -> (&'static TermSet, Vec<f64>, usize) {
    if params.p == 0.0 {
        (memoryless_terms(), memoryless_coefficients(params), 2)
    } else {
        (memory_terms(), memory_coefficients(params), 4)
    }
}

/// Zero-sector steady state as a full matrix (4- or 16-dim), with residual.
fn solve_real(params: &ModelParams) -> Result<(CMatrix, f64)> {
    params.validate()?;
    let (terms, coeffs, _) = terms_for(params);
    let (y, residual) = terms.zero_coords.stationary_on(&terms.zero_real(&coeffs), terms.zero_coords.n_diagonal())?;
    let x = terms.zero_coords.expand(&terms.zero_keep, &y);
    Ok((terms.zero_coords.to_matrix(&x), residual))
}

/// Steady state for a parameter set without materializing the dense
/// generator. Uses the memoryless model when `p = 0`.
pub fn steady_state_for(params: &ModelParams) -> Result<SteadyStateReport> {
    let (rho, residual) = solve_real(params)?;
    let tol = crate::qops::RESIDUAL_TOL * max_coefficient(params);
    if !(residual <= tol) {
        return Err(Error::Convergence(format!("residual {residual:.3e} exceeds {tol:.1e}")));
    }
    if params.p == 0.0 {
        SteadyStateReport::new(DensityMatrix::from_numerical(rho)?, None, params, residual)
    } else {
        let system = DensityMatrix::from_numerical(partial_trace_matrix(&rho, &[0], &[4, 4])?)?;
        SteadyStateReport::new(system, Some(DensityMatrix::from_numerical(rho)?), params, residual)
    }
}

fn max_coefficient(params: &ModelParams) -> f64 {
    [1.0, params.gamma1, params.gamma2, params.p * params.upsilon1, params.p * params.upsilon2]
        .into_iter()
        .fold(1.0, f64::max)
}

/// Steady-state observables needed by parameter searches.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyObservables {
    pub concurrence: f64,
    /// `|ρ₂₃| − √(ρ₁₁ρ₄₄)` of the system state; smooth across `C = 0`.
    pub margin: f64,
    /// Scaled heat current into bath 1.
    pub q_dot: f64,
}

/// Concurrence, entanglement margin and heat current of the steady state,
/// skipping state validation. The system state is an X-state with
/// `ρ₁₄ = 0` for every parameter set because the zero-coherence sector is
/// invariant.
pub fn steady_observables(params: &ModelParams) -> Result<SteadyObservables> {
    let (rho, _) = solve_real(params)?;
    let (system, q_dot) = if params.p == 0.0 {
        let q = crate::observables::heat_current_system_matrix(&rho, params);
        (rho, q)
    } else {
        let q = crate::observables::heat_current_dissipator_matrix(&rho, params);
        (partial_trace_matrix(&rho, &[0], &[4, 4])?, q)
    };
    let margin = system[(1, 2)].norm() - (system[(0, 0)].re.max(0.0) * system[(3, 3)].re.max(0.0)).sqrt();
    if !margin.is_finite() || !q_dot.is_finite() {
        return Err(Error::NumericalRange("non-finite steady-state observables".into()));
    }
    Ok(SteadyObservables { concurrence: (2.0 * margin).clamp(0.0, 1.0), margin, q_dot })
}

/// `ρ(t_k) = exp(t_k ℒ)[ρ₀]` for each time in an ascending grid.
pub fn evolve(gen: &GkslGenerator, rho0: &DensityMatrix, t_grid: &[f64]) -> Result<Vec<DensityMatrix>> {
    if rho0.dim() != gen.kind.dim() {
        return Err(Error::Dimension(format!(
            "initial state has dimension {}, generator acts on {}",
            rho0.dim(),
            gen.kind.dim()
        )));
    }
    if t_grid.first().is_some_and(|&t| t < 0.0) || t_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Parameter("time grid must be ascending and start at t >= 0".into()));
    }
    let blocks = gen.sector_blocks();
    let mut out = Vec::with_capacity(t_grid.len());
    let mut current = rho0.matrix().clone();
    let mut t_prev = 0.0;
    for &t in t_grid {
        if t > t_prev {
            current = blocks.propagator(t - t_prev)?.apply(&current);
            t_prev = t;
        }
        out.push(DensityMatrix::from_numerical(current.clone())?);
    }
    Ok(out)
}
