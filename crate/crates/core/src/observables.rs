// Copyright 2026 ness-lab contributors
// SPDX-License-Identifier: Apache-2.0

//! Concurrence, heat currents, local temperatures and the closed-form
//! memoryless steady state.

use serde::{Deserialize, Serialize};

use crate::collision::{thermal_qubit, ModelParams};
use crate::error::{Error, Result};
use crate::qops::{kron_matrix, partial_trace_matrix, CMatrix, DensityMatrix, Operator, C64, I};

/// Entries that must vanish for the X-state concurrence formula.
const X_STATE_TOL: f64 = 1e-10;

/// Steady state of the two-qubit system with derived observables.
#[derive(Debug, Clone)]
pub struct SteadyStateReport {
    /// Two-qubit system state (memory traced out).
    pub rho_system: DensityMatrix,
    /// Full system+memory state when the model carries memory qubits.
    pub rho_full: Option<DensityMatrix>,
    pub concurrence: f64,
    /// Scaled heat current `Q̇ = Q̃/(ωΩ)` into bath 1.
    pub q_dot: f64,
    /// Scaled heat current into bath 2.
    pub q_dot2: f64,
    pub s1: f64,
    pub s2: f64,
    /// `‖ℒρ∞‖_F`
    pub residual: f64,
}

impl SteadyStateReport {
    /// Fills in the observables for a solved steady state. `rho_full` is the
    /// 16-dim system+memory state or `None` for the memoryless model.
    pub fn new(
        rho_system: DensityMatrix,
        rho_full: Option<DensityMatrix>,
        params: &ModelParams,
        residual: f64,
    ) -> Result<Self> {
        let heat = match &rho_full {
            Some(full) => heat_current_dissipator(full, params)?,
            None => heat_current_system(&rho_system, params)?,
        };
        let (s1, s2) = local_temperatures(&rho_system)?;
        let concurrence = match concurrence_x_state(&rho_system) {
            Ok(c) => c,
            Err(Error::Shape(_)) => concurrence_wootters(&rho_system)?,
            Err(e) => return Err(e),
        };
        Ok(SteadyStateReport {
            rho_system,
            rho_full,
            concurrence,
            q_dot: heat.bath1,
            q_dot2: heat.bath2,
            s1,
            s2,
            residual,
        })
    }

    /// `|ρ₂₃| − √(ρ₁₁ρ₄₄)`, positive exactly when the X-state is entangled.
    pub fn entanglement_margin(&self) -> f64 {
        entanglement_margin(&self.rho_system)
    }
}

/// Closed-form steady state of the memoryless model.
#[derive(Debug, Clone)]
pub struct AnalyticSteadyState {
    pub eta: f64,
    /// Correlation part `ρ − ρ₁ ⊗ ρ₂`.
    pub chi: CMatrix,
    pub s1: f64,
    pub s2: f64,
    pub rho: DensityMatrix,
}

/// `η = (z₁−z₂)·γ₁γ₂ / ((γ₁+γ₂)(γ₁γ₂+4))`.
pub fn eta(z1: f64, z2: f64, g1: f64, g2: f64) -> f64 {
    (z1 - z2) * g1 * g2 / ((g1 + g2) * (g1 * g2 + 4.0))
}

fn check_couplings(g1: f64, g2: f64) -> Result<()> {
    if !(g1 > 0.0 && g2 > 0.0 && g1.is_finite() && g2.is_finite()) {
        return Err(Error::Parameter(format!("couplings must be positive, got γ₁ = {g1}, γ₂ = {g2}")));
    }
    Ok(())
}

/// `ρ∞ = ρ₁ ⊗ ρ₂ + χ` with local states `½(𝟙 + s_k σ_z)`.
///
/// In the excited-first basis `|ee⟩, |eg⟩, |ge⟩, |gg⟩` the coherence is
/// `χ[eg, ge] = +iη`, so that for `z₁ > z₂` the exchange drains the hotter qubit.
pub fn analytic_memoryless_steady_state(z1: f64, z2: f64, g1: f64, g2: f64) -> Result<AnalyticSteadyState> {
    check_couplings(g1, g2)?;
    let eta = eta(z1, z2, g1, g2);
    let s1 = z1 - 4.0 * eta / g1;
    let s2 = z2 + 4.0 * eta / g2;
    let e2 = C64::new(eta * eta, 0.0);
    let mut chi = CMatrix::zeros(4, 4);
    chi[(0, 0)] = -e2;
    chi[(1, 1)] = e2;
    chi[(2, 2)] = e2;
    chi[(3, 3)] = -e2;
    chi[(1, 2)] = I * eta;
    chi[(2, 1)] = -I * eta;
    let local = kron_matrix(thermal_qubit(s1)?.matrix(), thermal_qubit(s2)?.matrix());
    let rho = DensityMatrix::new(local + &chi)?;
    Ok(AnalyticSteadyState { eta, chi, s1, s2, rho })
}

fn check_two_qubit(rho: &DensityMatrix) -> Result<()> {
    if rho.dim() != 4 {
        return Err(Error::Dimension(format!("two-qubit state expected, got dimension {}", rho.dim())));
    }
    Ok(())
}

/// `|ρ₂₃| − √(ρ₁₁ρ₄₄)` (one-based indices).
pub fn entanglement_margin(rho: &DensityMatrix) -> f64 {
    rho.get(1, 2).norm() - (rho.get(0, 0).re.max(0.0) * rho.get(3, 3).re.max(0.0)).sqrt()
}

/// `C = 2·max{0, |ρ₂₃| − √(ρ₁₁ρ₄₄)}` for X-states with `ρ₁₄ = 0`.
pub fn concurrence_x_state(rho: &DensityMatrix) -> Result<f64> {
    check_two_qubit(rho)?;
    const OFF_X: [(usize, usize); 5] = [(0, 1), (0, 2), (1, 3), (2, 3), (0, 3)];
    for &(r, c) in &OFF_X {
        let v = rho.get(r, c).norm().max(rho.get(c, r).norm());
        if v > X_STATE_TOL {
            return Err(Error::Shape(format!(
                "not an X-state with ρ₁₄ = 0: |ρ[{r},{c}]| = {v:.3e}"
            )));
        }
    }
    Ok((2.0 * entanglement_margin(rho)).clamp(0.0, 1.0))
}

/// Wootters concurrence `max{0, λ₁−λ₂−λ₃−λ₄}` for any two-qubit state.
///
/// The `λ_i` are the square roots of the eigenvalues of
/// `√ρ ρ̃ √ρ`, `ρ̃ = (σ_y⊗σ_y) ρ* (σ_y⊗σ_y)`, which share the spectrum of
/// `ρ ρ̃` but come from a Hermitian eigenproblem.
pub fn concurrence_wootters(rho: &DensityMatrix) -> Result<f64> {
    check_two_qubit(rho)?;
    let yy = kron_matrix(Operator::sigma_y().matrix(), Operator::sigma_y().matrix());
    let m = rho.matrix();
    let flipped = &yy * m.conjugate() * &yy;
    let eig = m.clone().symmetric_eigen();
    let sqrt_diag = CMatrix::from_diagonal(&eig.eigenvalues.map(|x| C64::new(x.max(0.0).sqrt(), 0.0)));
    let sqrt_rho = &eig.eigenvectors * sqrt_diag * eig.eigenvectors.adjoint();
    let r = &sqrt_rho * flipped * &sqrt_rho;
    let r = (&r + r.adjoint()) * C64::new(0.5, 0.0);
    let mut lambdas: Vec<f64> = r.symmetric_eigenvalues().iter().map(|x| x.max(0.0).sqrt()).collect();
    lambdas.sort_by(|a, b| b.total_cmp(a));
    Ok((lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).clamp(0.0, 1.0))
}

/// Scaled memoryless heat current into bath 1, `Q̇₁ = −2η`.
pub fn heat_current_analytic(z1: f64, z2: f64, g1: f64, g2: f64) -> Result<f64> {
    check_couplings(g1, g2)?;
    Ok(-2.0 * eta(z1, z2, g1, g2))
}

/// `Q̇_max = |z₁ − z₂|/4`, reached at `γ₁ = γ₂ = 2`.
pub fn max_memoryless_heat_current(z1: f64, z2: f64) -> f64 {
    0.25 * (z1 - z2).abs()
}

/// Scaled heat currents into the two baths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeatCurrents {
    pub bath1: f64,
    pub bath2: f64,
}

/// Rate at which bath `k` gains energy from a qubit with excited
/// population `pe`: `γ[z⁻ p_e − z⁺ (1 − p_e)]`.
fn bath_flux(gamma: f64, z: f64, pe: f64) -> f64 {
    let up = (1.0 + z) / 2.0;
    let down = (1.0 - z) / 2.0;
    gamma * (down * pe - up * (1.0 - pe))
}

fn excited(rho: &CMatrix, site: usize, n_qubits: usize) -> f64 {
    let mask = 1usize << (n_qubits - 1 - site);
    (0..rho.nrows()).filter(|i| i & mask == 0).map(|i| rho[(i, i)].re).sum()
}

/// Heat currents from the dissipators of the system+memory generator:
/// `Q̇₁ = (1−p)·J(S₁) + p·J(M₁)`, likewise for bath 2.
pub fn heat_current_dissipator(rho_sm: &DensityMatrix, params: &ModelParams) -> Result<HeatCurrents> {
    if rho_sm.dim() != 16 {
        return Err(Error::Dimension(format!("system+memory state expected, got dimension {}", rho_sm.dim())));
    }
    Ok(HeatCurrents {
        bath1: dissipator_flux(rho_sm.matrix(), params, 0),
        bath2: dissipator_flux(rho_sm.matrix(), params, 1),
    })
}

fn dissipator_flux(m: &CMatrix, params: &ModelParams, k: usize) -> f64 {
    let (gamma, z) = if k == 0 { (params.gamma1, params.z1) } else { (params.gamma2, params.z2) };
    let p = params.p;
    (1.0 - p) * bath_flux(gamma, z, excited(m, k, 4)) + p * bath_flux(gamma, z, excited(m, 2 + k, 4))
}

/// Bath-1 current of a 16-dim matrix, unchecked.
pub(crate) fn heat_current_dissipator_matrix(m: &CMatrix, params: &ModelParams) -> f64 {
    dissipator_flux(m, params, 0)
}

/// Bath-1 current of a memoryless 4-dim matrix, unchecked.
pub(crate) fn heat_current_system_matrix(m: &CMatrix, params: &ModelParams) -> f64 {
    bath_flux(params.gamma1, params.z1, excited(m, 0, 2))
}

/// Heat currents of the memoryless model from the two-qubit state.
pub fn heat_current_system(rho: &DensityMatrix, params: &ModelParams) -> Result<HeatCurrents> {
    check_two_qubit(rho)?;
    let m = rho.matrix();
    Ok(HeatCurrents {
        bath1: bath_flux(params.gamma1, params.z1, excited(m, 0, 2)),
        bath2: bath_flux(params.gamma2, params.z2, excited(m, 1, 2)),
    })
}

/// `⟨σ_z⟩` of each system qubit.
pub fn local_temperatures(rho: &DensityMatrix) -> Result<(f64, f64)> {
    check_two_qubit(rho)?;
    let q1 = partial_trace_matrix(rho.matrix(), &[0], &[2, 2])?;
    let q2 = partial_trace_matrix(rho.matrix(), &[1], &[2, 2])?;
    Ok(((q1[(0, 0)] - q1[(1, 1)]).re, (q2[(0, 0)] - q2[(1, 1)]).re))
}

/// `|Q̇| > 2√(ρ₁₁ρ₄₄)`: necessary and sufficient for entanglement of a
/// memoryless steady state.
pub fn critical_entanglement_condition(rho_steady: &DensityMatrix, q_dot: f64) -> bool {
    let floor = 2.0 * (rho_steady.get(0, 0).re.max(0.0) * rho_steady.get(3, 3).re.max(0.0)).sqrt();
    q_dot.abs() > floor
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qops::{random_unitary, ONE, ZERO};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn x_state(p: [f64; 4], coh: C64) -> DensityMatrix {
        let mut m = CMatrix::zeros(4, 4);
        for i in 0..4 {
            m[(i, i)] = C64::new(p[i], 0.0);
        }
        m[(1, 2)] = coh;
        m[(2, 1)] = coh.conj();
        DensityMatrix::new(m).unwrap()
    }

    #[test]
    fn x_formula_arithmetic() {
        // |ρ23| = 0.3, ρ11ρ44 = 0.04 → C = 0.2
        let rho = x_state([0.2, 0.3, 0.3, 0.2], C64::new(0.0, 0.3));
        assert!((concurrence_x_state(&rho).unwrap() - 0.2).abs() < 1e-15);
    }

    #[test]
    fn product_and_bell_states() {
        let xi = thermal_qubit(-0.3).unwrap();
        let prod = DensityMatrix::product(&[&xi, &thermal_qubit(0.2).unwrap()]);
        assert_eq!(concurrence_x_state(&prod).unwrap(), 0.0);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let psi_plus = DensityMatrix::pure(&[ZERO, C64::new(s, 0.0), C64::new(s, 0.0), ZERO]).unwrap();
        assert!((concurrence_x_state(&psi_plus).unwrap() - 1.0).abs() < 1e-15);
        assert!((concurrence_wootters(&psi_plus).unwrap() - 1.0).abs() < 1e-7);
    }

    #[test]
    fn x_formula_rejects_general_state() {
        let phi = DensityMatrix::pure(&[ONE, ZERO, ZERO, ONE]).unwrap();
        assert!(matches!(concurrence_x_state(&phi), Err(Error::Shape(_))));
        assert!((concurrence_wootters(&phi).unwrap() - 1.0).abs() < 1e-7);
    }

    #[test]
    fn werner_threshold() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let singlet = DensityMatrix::pure(&[ZERO, C64::new(s, 0.0), C64::new(-s, 0.0), ZERO]).unwrap();
        let werner = |w: f64| {
            let m = singlet.matrix() * C64::new(w, 0.0) + CMatrix::identity(4, 4) * C64::new((1.0 - w) / 4.0, 0.0);
            DensityMatrix::new(m).unwrap()
        };
        assert!(concurrence_wootters(&werner(1.0 / 3.0)).unwrap() < 1e-12);
        for &w in &[0.5, 0.8] {
            let c = concurrence_wootters(&werner(w)).unwrap();
            assert!((c - (3.0 * w - 1.0) / 2.0).abs() < 1e-10);
        }
        assert_eq!(concurrence_wootters(&DensityMatrix::maximally_mixed(4).unwrap()).unwrap(), 0.0);
    }

    #[test]
    fn wootters_agrees_with_x_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..100 {
            let raw: [f64; 4] = std::array::from_fn(|_| rng.random::<f64>() + 1e-3);
            let total: f64 = raw.iter().sum();
            let p = raw.map(|x| x / total);
            let bound = (p[1] * p[2]).sqrt();
            let mag = bound * rng.random::<f64>();
            let phase = rng.random::<f64>() * std::f64::consts::TAU;
            let rho = x_state(p, C64::from_polar(mag, phase));
            let cx = concurrence_x_state(&rho).unwrap();
            let cw = concurrence_wootters(&rho).unwrap();
            assert!((cx - cw).abs() < 1e-10, "{cx} vs {cw}");
        }
    }

    #[test]
    fn concurrence_invariant_under_local_unitaries() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let rho = analytic_memoryless_steady_state(1.0, -1.0, 3.0, 3.0).unwrap().rho;
        let c0 = concurrence_wootters(&rho).unwrap();
        assert!(c0 > 0.1);
        for _ in 0..20 {
            let u = crate::qops::kron(&random_unitary(&mut rng, 2), &random_unitary(&mut rng, 2));
            let rotated = DensityMatrix::from_numerical(u.conjugate(rho.matrix())).unwrap();
            assert!((concurrence_wootters(&rotated).unwrap() - c0).abs() < 1e-10);
        }
    }

    #[test]
    fn analytic_equilibrium_is_product() {
        let a = analytic_memoryless_steady_state(-0.4, -0.4, 1.3, 0.2).unwrap();
        assert_eq!(a.eta, 0.0);
        let xi = thermal_qubit(-0.4).unwrap();
        let prod = DensityMatrix::product(&[&xi, &xi]);
        assert!(a.rho.frobenius_distance(&prod) < 1e-15);
    }

    #[test]
    fn analytic_reference_point() {
        let a = analytic_memoryless_steady_state(0.0, -1.0, 2.0, 2.0).unwrap();
        assert!((a.eta - 0.125).abs() < 1e-15);
        assert!((a.s1 + 0.25).abs() < 1e-15);
        assert!((a.s2 + 0.75).abs() < 1e-15);
        assert!((a.rho.get(1, 2).norm() - 0.125).abs() < 1e-15);
        let trace: C64 = a.chi.trace();
        assert!(trace.norm() < 1e-16);
    }

    #[test]
    fn analytic_strong_coupling_limit() {
        let a = analytic_memoryless_steady_state(0.0, -1.0, 1000.0, 1000.0).unwrap();
        assert!((a.eta - 1e6 / (2000.0 * 1_000_004.0)).abs() < 1e-18);
        let prod = DensityMatrix::product(&[&thermal_qubit(0.0).unwrap(), &thermal_qubit(-1.0).unwrap()]);
        assert!(a.rho.trace_distance(&prod) < 1e-2);
    }

    #[test]
    fn analytic_rejects_nonpositive_coupling() {
        assert!(analytic_memoryless_steady_state(0.0, -1.0, 0.0, 1.0).is_err());
        assert!(heat_current_analytic(0.0, -1.0, 1.0, -2.0).is_err());
    }

    #[test]
    fn analytic_state_valid_everywhere() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..500 {
            let z1 = rng.random_range(-1.0..=1.0);
            let z2 = rng.random_range(-1.0..=1.0);
            let g1 = 10f64.powf(rng.random_range(-3.0..3.0));
            let g2 = 10f64.powf(rng.random_range(-3.0..3.0));
            assert!(analytic_memoryless_steady_state(z1, z2, g1, g2).is_ok());
        }
    }

    #[test]
    fn heat_current_values() {
        let q = heat_current_analytic(0.0, -1.0, 2.0, 2.0).unwrap();
        assert!((q + 0.25).abs() < 1e-15);
        assert!((q.abs() - max_memoryless_heat_current(0.0, -1.0)).abs() < 1e-15);
        assert_eq!(heat_current_analytic(0.3, 0.3, 1.0, 4.0).unwrap(), 0.0);
        let insulated = heat_current_analytic(0.0, -1.0, 1000.0, 2.0).unwrap().abs();
        assert!((insulated - 2.0 * 2000.0 / (1002.0 * 2004.0)).abs() < 1e-15);
        let more_insulated = heat_current_analytic(0.0, -1.0, 2000.0, 2.0).unwrap().abs();
        assert!((insulated / more_insulated - 2.0).abs() < 0.01);
    }

    #[test]
    fn dissipator_current_matches_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        for _ in 0..50 {
            let z1 = rng.random_range(-1.0..=1.0);
            let z2 = rng.random_range(-1.0..=1.0);
            let g1 = 10f64.powf(rng.random_range(-2.0..2.0));
            let g2 = 10f64.powf(rng.random_range(-2.0..2.0));
            let a = analytic_memoryless_steady_state(z1, z2, g1, g2).unwrap();
            let params = ModelParams::memoryless(z1, z2, g1, g2);
            let h = heat_current_system(&a.rho, &params).unwrap();
            assert!((h.bath1 + 2.0 * a.eta).abs() < 1e-9);
            assert!((h.bath1 + h.bath2).abs() < 1e-9);
        }
    }

    #[test]
    fn thermal_qubit_carries_no_flux() {
        assert!(bath_flux(3.0, -0.4, 0.3).abs() < 1e-15);
        let xi = thermal_qubit(-0.4).unwrap();
        let state = DensityMatrix::product(&[&xi, &xi, &xi, &xi]);
        let params = ModelParams::with_memory(-0.4, -0.4, 1.0, 2.0, 1.0, 1.0, 0.5);
        let h = heat_current_dissipator(&state, &params).unwrap();
        assert!(h.bath1.abs() < 1e-15 && h.bath2.abs() < 1e-15);
    }

    #[test]
    fn critical_condition_matches_concurrence() {
        let mut rng = ChaCha8Rng::seed_from_u64(25);
        for _ in 0..200 {
            let z1 = rng.random_range(-1.0..=1.0);
            let z2 = rng.random_range(-1.0..=1.0);
            let g1 = 10f64.powf(rng.random_range(-1.0..1.5));
            let g2 = 10f64.powf(rng.random_range(-1.0..1.5));
            let a = analytic_memoryless_steady_state(z1, z2, g1, g2).unwrap();
            let q = heat_current_analytic(z1, z2, g1, g2).unwrap();
            let c = concurrence_x_state(&a.rho).unwrap();
            assert_eq!(critical_entanglement_condition(&a.rho, q), c > 0.0);
        }
        let a = analytic_memoryless_steady_state(0.1, 0.1, 1.0, 1.0).unwrap();
        assert!(!critical_entanglement_condition(&a.rho, 0.0));
    }

    #[test]
    fn boundary_couplings_are_marginal() {
        // On the low boundary z₂ = (4 − 3√2 z₁)/(4z₁ − 3√2) the couplings
        // γ₁ = 2/(√2 − z₁), γ₂ = 4√2 − γ₁ sit exactly at C = 0.
        let r2 = std::f64::consts::SQRT_2;
        let z2 = -4.0 / (3.0 * r2);
        let a = analytic_memoryless_steady_state(0.0, z2, r2, 3.0 * r2).unwrap();
        let q = heat_current_analytic(0.0, z2, r2, 3.0 * r2).unwrap();
        assert!(entanglement_margin(&a.rho).abs() < 1e-12);
        assert!((q.abs() - 2.0 * (a.rho.get(0, 0).re * a.rho.get(3, 3).re).sqrt()).abs() < 1e-12);
        assert!(concurrence_x_state(&a.rho).unwrap() < 1e-12);
    }

    #[test]
    fn local_temperatures_of_analytic_state() {
        let a = analytic_memoryless_steady_state(0.5, -0.7, 0.8, 3.0).unwrap();
        let (s1, s2) = local_temperatures(&a.rho).unwrap();
        assert!((s1 - a.s1).abs() < 1e-15 && (s2 - a.s2).abs() < 1e-15);
    }
}
