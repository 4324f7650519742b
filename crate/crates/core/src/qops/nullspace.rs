// Copyright 2026 ness-lab contributors
// SPDX-License-Identifier: Apache-2.0

//! Stationary states of Liouvillians.

use nalgebra::Schur;

use super::{max_abs, unvectorize, CMatrix, CVector, DensityMatrix, Superoperator, ONE, ZERO};
use crate::error::{Error, Result};

/// Eigenvalue moduli below this count as a second zero mode.
pub const DEGENERACY_TOL: f64 = 1e-8;
/// Residual bound on `‖ℒρ‖_F`, relative to `max(1, ‖ℒ‖_max)`.
pub const RESIDUAL_TOL: f64 = 1e-10;
/// Pivot ratio below which the bordered system is treated as singular.
const PIVOT_TOL: f64 = 1e-14;

/// A stationary state together with its residual `‖ℒρ‖_F`.
#[derive(Debug, Clone)]
pub struct Stationary {
    pub state: DensityMatrix,
    pub residual: f64,
}

/// Unique stationary state of a generator.
///
/// The spectrum (complex Schur form) is checked first: the eigenvalue of
/// smallest modulus is the zero mode, and a second modulus below
/// [`DEGENERACY_TOL`] means the stationary state is not unique. The vector
/// itself comes from a bordered linear solve with the trace condition
/// replacing the first population equation, followed by Hermitization and
/// renormalization.
pub fn nullspace_steady_state(l: &Superoperator) -> Result<DensityMatrix> {
    let dim = l.dim();
    // nalgebra treats 0 as "no iteration limit".
    let schur = Schur::try_new(l.matrix().clone(), 1e-15, 10_000 * dim.max(1))
        .ok_or_else(|| Error::Convergence("Schur decomposition did not converge".into()))?;
    let (_, t) = schur.unpack();
    let mut moduli: Vec<f64> = t.diagonal().iter().map(|z| z.norm()).collect();
    moduli.sort_by(|a, b| a.total_cmp(b));
    let scale = max_abs(l.matrix()).max(1.0);
    if moduli[0] > 1e-8 * scale {
        return Err(Error::Convergence(format!(
            "no zero mode: smallest eigenvalue modulus {:.3e}",
            moduli[0]
        )));
    }
    if moduli.len() > 1 && moduli[1] < DEGENERACY_TOL {
        return Err(Error::NonUniqueSteadyState(format!(
            "second-smallest eigenvalue modulus {:.3e} below {DEGENERACY_TOL:e}",
            moduli[1]
        )));
    }
    let all: Vec<usize> = (0..dim * dim).collect();
    Ok(stationary_in_subspace(l.matrix(), &all, dim)?.state)
}

/// Stationary state of a generator restricted to an invariant subspace of
/// Liouville space.
///
/// `block` is the generator restricted to the vectorized `indices`, which
/// must contain every diagonal entry `a + dim·a`. Entries outside the
/// subspace are zero in the result. Degeneracy is detected through the
/// pivots of the bordered system.
pub fn stationary_in_subspace(block: &CMatrix, indices: &[usize], dim: usize) -> Result<Stationary> {
    let n = indices.len();
    if block.nrows() != n || block.ncols() != n {
        return Err(Error::Dimension(format!(
            "block is {}x{}, subspace has {n} indices",
            block.nrows(),
            block.ncols()
        )));
    }
    let diag: Vec<usize> = (0..n).filter(|&i| indices[i] % dim == indices[i] / dim).collect();
    if diag.len() != dim {
        return Err(Error::Dimension(format!(
            "subspace holds {} of {dim} diagonal entries",
            diag.len()
        )));
    }

    // Replace the first population equation by Tr ρ = 1.
    let row = diag[0];
    let mut bordered = block.clone();
    for c in 0..n {
        bordered[(row, c)] = ZERO;
    }
    for &d in &diag {
        bordered[(row, d)] = ONE;
    }
    let mut rhs = CVector::zeros(n);
    rhs[row] = ONE;

    let lu = bordered.clone().lu();
    let u = lu.u();
    let pivots: Vec<f64> = u.diagonal().iter().map(|z| z.norm()).collect();
    let pmax = pivots.iter().copied().fold(0.0, f64::max);
    let pmin = pivots.iter().copied().fold(f64::INFINITY, f64::min);
    if !(pmax > 0.0) || pmin < PIVOT_TOL * pmax {
        return Err(Error::NonUniqueSteadyState(format!(
            "bordered generator is singular (pivot ratio {:.3e})",
            pmin / pmax
        )));
    }
    let mut x = lu
        .solve(&rhs)
        .ok_or_else(|| Error::NonUniqueSteadyState("bordered generator is singular".into()))?;
    // One step of iterative refinement.
    let r = &rhs - &bordered * &x;
    if let Some(dx) = lu.solve(&r) {
        x += dx;
    }

    let mut full = CVector::zeros(dim * dim);
    for (k, &idx) in indices.iter().enumerate() {
        full[idx] = x[k];
    }
    let state = DensityMatrix::from_numerical(unvectorize(&full, dim)).map_err(|e| match e {
        Error::Shape(msg) => Error::Convergence(format!("stationary vector is not a state: {msg}")),
        other => other,
    })?;

    let v = super::vectorize(state.matrix());
    let sub = CVector::from_iterator(n, indices.iter().map(|&i| v[i]));
    let residual = (block * sub).norm();
    let scale = max_abs(block).max(1.0);
    if !(residual <= RESIDUAL_TOL * scale) {
        return Err(Error::Convergence(format!(
            "residual {residual:.3e} exceeds {:.1e}",
            RESIDUAL_TOL * scale
        )));
    }
    Ok(Stationary { state, residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qops::{Operator, Superoperator};

    fn amplitude_damping_with_pump(down: f64, up: f64) -> Superoperator {
        let mut l = Superoperator::dissipator(Operator::sigma_minus().matrix()).scaled(down);
        l.add_scaled(&Superoperator::dissipator(Operator::sigma_plus().matrix()), up);
        l
    }

    #[test]
    fn single_qubit_detailed_balance() {
        let l = amplitude_damping_with_pump(3.0, 1.0);
        let rho = nullspace_steady_state(&l).unwrap();
        // Excited population up/(up+down).
        assert!((rho.get(0, 0).re - 0.25).abs() < 1e-14);
        assert!((rho.get(1, 1).re - 0.75).abs() < 1e-14);
    }

    #[test]
    fn pure_hamiltonian_is_degenerate() {
        let l = Superoperator::commutator(Operator::sigma_z().matrix());
        assert!(matches!(nullspace_steady_state(&l), Err(Error::NonUniqueSteadyState(_))));
        let all: Vec<usize> = (0..4).collect();
        assert!(matches!(
            stationary_in_subspace(l.matrix(), &all, 2),
            Err(Error::NonUniqueSteadyState(_))
        ));
    }

    #[test]
    fn subspace_missing_diagonal_rejected() {
        let l = amplitude_damping_with_pump(1.0, 1.0);
        let block = l.restrict(&[0, 1]);
        assert!(matches!(stationary_in_subspace(&block, &[0, 1], 2), Err(Error::Dimension(_))));
    }
}
