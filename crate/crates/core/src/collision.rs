// Copyright 2026 ness-lab contributors
// SPDX-License-Identifier: Apache-2.0

//! Discrete-time collision model.
//!
//! The register is `S₁ ⊗ S₂ ⊗ M₁ ⊗ M₂` (16-dim); during a collision two
//! fresh bath qubits `B₁ ⊗ B₂` in their thermal states are appended and
//! traced out again afterwards. Every interaction is a flip-flop rotation
//! `exp(−iθ σ_int)`, `σ_int = σ_+ ⊗ σ_− + σ_− ⊗ σ_+`, which conserves the
//! total excitation number.
//!
//! Times are in units of `1/Ω` and energies in units of `ω`, so a collision of
//! duration `dt` rotates by `dt` (inner coupling), `√(γ·dt)` (bath) and
//! `υ·dt` (memory).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::observables::{concurrence_wootters, concurrence_x_state};
use crate::qops::{
    kron_matrix, partial_trace_matrix, CMatrix, DensityMatrix, Operator, C64, I, ZERO,
};

pub const S1: usize = 0;
pub const S2: usize = 1;
pub const M1: usize = 2;
pub const M2: usize = 3;
pub const B1: usize = 4;
pub const B2: usize = 5;
const REGISTER_QUBITS: usize = 6;

/// Default collision duration in units of `1/Ω`.
pub const DEFAULT_DT: f64 = 1e-3;

/// One instance of the model. Couplings are ratios to the inner-system
/// coupling `Ω`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub z1: f64,
    pub z2: f64,
    /// `Γ₁/Ω`
    pub gamma1: f64,
    /// `Γ₂/Ω`
    pub gamma2: f64,
    /// `Υ₁/Ω`
    pub upsilon1: f64,
    /// `Υ₂/Ω`
    pub upsilon2: f64,
    /// Probability that a bath qubit couples through the memory qubit.
    pub p: f64,
    /// Level splitting `ω`.
    pub omega: f64,
    /// Inner-system coupling `Ω`.
    pub inner_coupling: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams {
            z1: 0.0,
            z2: -1.0,
            gamma1: 2.0,
            gamma2: 2.0,
            upsilon1: 0.0,
            upsilon2: 0.0,
            p: 0.0,
            omega: 1.0,
            inner_coupling: 1.0,
        }
    }
}

impl ModelParams {
    pub fn memoryless(z1: f64, z2: f64, gamma1: f64, gamma2: f64) -> Self {
        ModelParams { z1, z2, gamma1, gamma2, ..Default::default() }
    }

    #[allow(clippy::too_many_arguments)]
    pub fn with_memory(z1: f64, z2: f64, gamma1: f64, gamma2: f64, upsilon1: f64, upsilon2: f64, p: f64) -> Self {
        ModelParams { z1, z2, gamma1, gamma2, upsilon1, upsilon2, p, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let check = |ok: bool, msg: String| if ok { Ok(()) } else { Err(Error::Parameter(msg)) };
        check((-1.0..=1.0).contains(&self.z1), format!("z1 = {} outside [-1, 1]", self.z1))?;
        check((-1.0..=1.0).contains(&self.z2), format!("z2 = {} outside [-1, 1]", self.z2))?;
        check(self.gamma1 > 0.0 && self.gamma1.is_finite(), format!("gamma1 = {} must be > 0", self.gamma1))?;
        check(self.gamma2 > 0.0 && self.gamma2.is_finite(), format!("gamma2 = {} must be > 0", self.gamma2))?;
        check(self.upsilon1 >= 0.0 && self.upsilon1.is_finite(), format!("upsilon1 = {} must be >= 0", self.upsilon1))?;
        check(self.upsilon2 >= 0.0 && self.upsilon2.is_finite(), format!("upsilon2 = {} must be >= 0", self.upsilon2))?;
        check((0.0..=1.0).contains(&self.p), format!("p = {} outside [0, 1]", self.p))?;
        check(self.omega > 0.0 && self.omega.is_finite(), format!("omega = {} must be > 0", self.omega))?;
        check(
            self.inner_coupling > 0.0 && self.inner_coupling.is_finite(),
            format!("inner coupling = {} must be > 0", self.inner_coupling),
        )
    }

    /// Bath rates `z^±_k = (1 ± z_k)/2` for bath `k ∈ {0, 1}`.
    pub fn rates(&self, k: usize) -> (f64, f64) {
        let z = if k == 0 { self.z1 } else { self.z2 };
        ((1.0 + z) / 2.0, (1.0 - z) / 2.0)
    }
}

/// Thermal (or population-inverted) qubit `½(𝟙 + z σ_z)`.
pub fn thermal_qubit(z: f64) -> Result<DensityMatrix> {
    if !(-1.0..=1.0).contains(&z) {
        return Err(Error::Parameter(format!("temperature parameter z = {z} outside [-1, 1]")));
    }
    let mut m = CMatrix::zeros(2, 2);
    m[(0, 0)] = C64::new((1.0 + z) / 2.0, 0.0);
    m[(1, 1)] = C64::new((1.0 - z) / 2.0, 0.0);
    Ok(DensityMatrix::from_trusted(m))
}

/// `z = (1 − e^{1/T})/(1 + e^{1/T})` with `T` in units of `ω/k_B`.
pub fn z_of_temperature(temperature: f64) -> Result<f64> {
    if !(temperature > 0.0) {
        return Err(Error::Parameter(format!("temperature {temperature} must be > 0")));
    }
    // Same expression, written to avoid overflow of e^{1/T}.
    Ok(-(0.5 / temperature).tanh())
}

/// `exp(−iθ σ_int)` on a qubit pair, stored by its rotation angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlipFlopGate {
    pub angle: f64,
    cos: f64,
    sin: f64,
}

impl FlipFlopGate {
    pub fn new(angle: f64) -> Self {
        FlipFlopGate { angle, cos: angle.cos(), sin: angle.sin() }
    }

    /// Dense 4×4 matrix in the `|00⟩,|01⟩,|10⟩,|11⟩` basis.
    pub fn operator(&self) -> Operator {
        let c = C64::new(self.cos, 0.0);
        let s = -I * self.sin;
        let one = C64::new(1.0, 0.0);
        let m = CMatrix::from_row_slice(4, 4, &[
            one, ZERO, ZERO, ZERO,
            ZERO, c, s, ZERO,
            ZERO, s, c, ZERO,
            ZERO, ZERO, ZERO, one,
        ]);
        Operator::new(m).expect("square")
    }

    /// `ρ ↦ G ρ G†` with the gate on qubits `(a, b)` of an `n`-qubit register.
    pub fn conjugate_in_place(&self, rho: &mut CMatrix, a: usize, b: usize, n: usize) {
        if self.sin == 0.0 && self.cos == 1.0 {
            return;
        }
        let dim = 1usize << n;
        let ma = 1usize << (n - 1 - a);
        let mb = 1usize << (n - 1 - b);
        let c = self.cos;
        let ms = -I * self.sin;
        // Index pairs (x, y) with bits (a,b) = (0,1) and (1,0).
        let pairs: Vec<(usize, usize)> = (0..dim)
            .filter(|&i| i & ma == 0 && i & mb != 0)
            .map(|i| (i, (i & !mb) | ma))
            .collect();
        // Left multiply: rows.
        for col in 0..dim {
            for &(x, y) in &pairs {
                let rx = rho[(x, col)];
                let ry = rho[(y, col)];
                rho[(x, col)] = rx * c + ry * ms;
                rho[(y, col)] = rx * ms + ry * c;
            }
        }
        // Right multiply by G†: columns.
        let ps = -ms;
        for &(x, y) in &pairs {
            for row in 0..dim {
                let cx = rho[(row, x)];
                let cy = rho[(row, y)];
                rho[(row, x)] = cx * c + cy * ps;
                rho[(row, y)] = cx * ps + cy * c;
            }
        }
    }
}

/// The seven interaction unitaries of one collision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InteractionUnitaries {
    /// `S₁–S₂`
    pub u: FlipFlopGate,
    /// `B_k–S_k`, direct bath coupling
    pub w: [FlipFlopGate; 2],
    /// `B_k–M_k`, bath coupling to the memory qubit
    pub w_tilde: [FlipFlopGate; 2],
    /// `S_k–M_k`
    pub y: [FlipFlopGate; 2],
}

impl InteractionUnitaries {
    /// Each unitary embedded in the six-qubit `S₁S₂M₁M₂B₁B₂` register.
    pub fn lifted(&self) -> Vec<(&'static str, Operator)> {
        let embed = |g: &FlipFlopGate, a: usize, b: usize| Operator::embed(&g.operator(), &[a, b], REGISTER_QUBITS);
        vec![
            ("U", embed(&self.u, S1, S2)),
            ("W1", embed(&self.w[0], B1, S1)),
            ("W2", embed(&self.w[1], B2, S2)),
            ("Wt1", embed(&self.w_tilde[0], B1, M1)),
            ("Wt2", embed(&self.w_tilde[1], B2, M2)),
            ("Y1", embed(&self.y[0], S1, M1)),
            ("Y2", embed(&self.y[1], S2, M2)),
        ]
    }
}

pub fn build_interaction_unitaries(params: &ModelParams, dt: f64) -> Result<InteractionUnitaries> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::Parameter(format!("collision duration {dt} must be > 0")));
    }
    let bath1 = FlipFlopGate::new((params.gamma1 * dt).sqrt());
    let bath2 = FlipFlopGate::new((params.gamma2 * dt).sqrt());
    Ok(InteractionUnitaries {
        u: FlipFlopGate::new(dt),
        w: [bath1, bath2],
        w_tilde: [bath1, bath2],
        y: [FlipFlopGate::new(params.upsilon1 * dt), FlipFlopGate::new(params.upsilon2 * dt)],
    })
}

/// Which of the four collision branches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// Both baths couple through the memory qubits.
    BothMemory,
    /// Both baths couple directly.
    Direct,
    /// Bath 1 through memory, bath 2 directly.
    FirstMemory,
    /// Bath 1 directly, bath 2 through memory.
    SecondMemory,
}

impl Branch {
    pub const ALL: [Branch; 4] = [Branch::BothMemory, Branch::Direct, Branch::FirstMemory, Branch::SecondMemory];

    pub fn weight(self, p: f64) -> f64 {
        match self {
            Branch::BothMemory => p * p,
            Branch::Direct => (1.0 - p) * (1.0 - p),
            Branch::FirstMemory | Branch::SecondMemory => p * (1.0 - p),
        }
    }
}

/// Outcome of one collision step.
#[derive(Debug, Clone)]
pub struct CollisionStepResult {
    /// System and memory state after the step.
    pub state: DensityMatrix,
    /// Energy change of the bath-1 qubit, units of `ω`.
    pub d_e1: f64,
    /// Energy change of the bath-2 qubit, units of `ω`.
    pub d_e2: f64,
}

/// Precomputed gates and bath states for repeated collisions.
#[derive(Debug, Clone)]
pub struct CollisionEngine {
    params: ModelParams,
    dt: f64,
    gates: InteractionUnitaries,
    bath: CMatrix,
}

impl CollisionEngine {
    pub fn new(params: &ModelParams, dt: f64) -> Result<Self> {
        params.validate()?;
        let gates = build_interaction_unitaries(params, dt)?;
        let xi1 = thermal_qubit(params.z1)?;
        let xi2 = thermal_qubit(params.z2)?;
        let bath = kron_matrix(xi1.matrix(), xi2.matrix());
        Ok(CollisionEngine { params: *params, dt, gates, bath })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn gates(&self) -> &InteractionUnitaries {
        &self.gates
    }

    /// Applies the gates of branch `branch` to the six-qubit register,
    /// rightmost operator first.
    pub fn apply_branch(&self, branch: Branch, register: &mut CMatrix) {
        let g = &self.gates;
        let n = REGISTER_QUBITS;
        g.u.conjugate_in_place(register, S1, S2, n);
        match branch {
            Branch::BothMemory => {
                g.y[1].conjugate_in_place(register, S2, M2, n);
                g.w_tilde[1].conjugate_in_place(register, B2, M2, n);
                g.y[0].conjugate_in_place(register, S1, M1, n);
                g.w_tilde[0].conjugate_in_place(register, B1, M1, n);
            }
            Branch::Direct => {
                g.w[1].conjugate_in_place(register, B2, S2, n);
                g.w[0].conjugate_in_place(register, B1, S1, n);
            }
            Branch::FirstMemory => {
                g.w[1].conjugate_in_place(register, B2, S2, n);
                g.y[0].conjugate_in_place(register, S1, M1, n);
                g.w_tilde[0].conjugate_in_place(register, B1, M1, n);
            }
            Branch::SecondMemory => {
                g.y[1].conjugate_in_place(register, S2, M2, n);
                g.w_tilde[1].conjugate_in_place(register, B2, M2, n);
                g.w[0].conjugate_in_place(register, B1, S1, n);
            }
        }
    }

    /// `ρ_SM ⊗ ξ₁ ⊗ ξ₂`.
    pub fn attach_baths(&self, state: &CMatrix) -> CMatrix {
        kron_matrix(state, &self.bath)
    }

    /// One application of the mixed map `p²ℰ₁ + (1−p)²ℰ₂ + p(1−p)(ℰ₃ + ℰ₄)`
    /// to a raw 16×16 matrix, returning the image and bath-qubit excitation
    /// changes. Linear in `state`.
    pub fn map_matrix(&self, state: &CMatrix) -> Result<(CMatrix, f64, f64)> {
        if state.nrows() != 16 || state.ncols() != 16 {
            return Err(Error::Dimension(format!(
                "collision map acts on 16x16 system+memory matrices, got {}x{}",
                state.nrows(),
                state.ncols()
            )));
        }
        let joint = self.attach_baths(state);
        let before1 = excited_population(&joint, B1);
        let before2 = excited_population(&joint, B2);
        let mut out = CMatrix::zeros(16, 16);
        let (mut d1, mut d2) = (0.0, 0.0);
        for branch in Branch::ALL {
            let w = branch.weight(self.params.p);
            if w == 0.0 {
                continue;
            }
            let mut reg = joint.clone();
            self.apply_branch(branch, &mut reg);
            d1 += w * (excited_population(&reg, B1) - before1);
            d2 += w * (excited_population(&reg, B2) - before2);
            let reduced = partial_trace_matrix(&reg, &[0], &[16, 4])?;
            out += reduced * C64::new(w, 0.0);
        }
        Ok((out, d1, d2))
    }

    pub fn step(&self, state: &DensityMatrix) -> Result<CollisionStepResult> {
        let (out, d1, d2) = self.map_matrix(state.matrix())?;
        let herm = (&out + out.adjoint()) * C64::new(0.5, 0.0);
        Ok(CollisionStepResult { state: DensityMatrix::from_trusted(herm), d_e1: d1, d_e2: d2 })
    }
}

/// `Re ⟨σ_+σ_−⟩` of qubit `site` in the six-qubit register.
fn excited_population(register: &CMatrix, site: usize) -> f64 {
    let mask = 1usize << (REGISTER_QUBITS - 1 - site);
    (0..register.nrows()).filter(|i| i & mask == 0).map(|i| register[(i, i)].re).sum()
}

/// Total excitation number `Σ_k ⟨σ_+σ_−⟩_k` of a register state.
pub fn excitation_number(rho: &CMatrix) -> f64 {
    let n = rho.nrows().trailing_zeros() as usize;
    (0..rho.nrows())
        .map(|i| rho[(i, i)].re * crate::qops::excitations(i, n) as f64)
        .sum()
}

/// Single collision step from a 16-dim system+memory state.
pub fn one_step_map(state: &DensityMatrix, params: &ModelParams, dt: f64) -> Result<CollisionStepResult> {
    if state.dim() != 16 {
        return Err(Error::Dimension(format!("expected a 16-dim system+memory state, got {}", state.dim())));
    }
    CollisionEngine::new(params, dt)?.step(state)
}

/// Per-step observables of a collision trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: usize,
    /// Time after the step, units of `1/Ω`.
    pub t: f64,
    /// Concurrence of the reduced two-qubit system state.
    pub concurrence: f64,
    pub d_e1: f64,
    pub d_e2: f64,
    /// Cumulative heat `Σ dE₁` delivered to bath 1.
    pub cumulative_q1: f64,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub dt: f64,
    pub records: Vec<StepRecord>,
    pub final_state: DensityMatrix,
}

impl Trajectory {
    /// Scaled heat current into bath 1 in the last step, `dE₁/dt`.
    pub fn final_heat_current(&self) -> f64 {
        self.records.last().map_or(0.0, |r| r.d_e1 / self.dt)
    }
}

/// System+memory initial state `ρ_S ⊗ ξ₁ ⊗ ξ₂`.
pub fn initial_state(system: &DensityMatrix, params: &ModelParams) -> Result<DensityMatrix> {
    if system.dim() != 4 {
        return Err(Error::Dimension(format!("system state must be 4-dim, got {}", system.dim())));
    }
    let xi1 = thermal_qubit(params.z1)?;
    let xi2 = thermal_qubit(params.z2)?;
    Ok(DensityMatrix::product(&[system, &xi1, &xi2]))
}

/// Iterates the collision map `n_steps` times.
pub fn simulate(initial: &DensityMatrix, params: &ModelParams, dt: f64, n_steps: usize) -> Result<Trajectory> {
    if n_steps == 0 {
        return Err(Error::Parameter("n_steps must be >= 1".into()));
    }
    if initial.dim() != 16 {
        return Err(Error::Dimension(format!("expected a 16-dim system+memory state, got {}", initial.dim())));
    }
    let engine = CollisionEngine::new(params, dt)?;
    let mut state = initial.clone();
    let mut records = Vec::with_capacity(n_steps);
    let mut q1 = 0.0;
    for step in 1..=n_steps {
        let res = engine.step(&state)?;
        q1 += res.d_e1;
        let system = partial_trace_matrix(res.state.matrix(), &[0], &[4, 4])?;
        let system = DensityMatrix::from_trusted(system);
        let concurrence = match concurrence_x_state(&system) {
            Err(Error::Shape(_)) => concurrence_wootters(&system)?,
            other => other?,
        };
        records.push(StepRecord {
            step,
            t: step as f64 * dt,
            concurrence,
            d_e1: res.d_e1,
            d_e2: res.d_e2,
            cumulative_q1: q1,
        });
        state = res.state;
    }
    Ok(Trajectory { dt, records, final_state: state })
}
