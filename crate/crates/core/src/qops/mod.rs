// Copyright 2026 ness-lab contributors
// SPDX-License-Identifier: Apache-2.0

//! Dense complex linear algebra on multi-qubit registers.
//!
//! Conventions shared by the whole crate:
//!
//! * `|0⟩` is the excited state: `σ_z|0⟩ = +|0⟩`, `σ_− = |1⟩⟨0|`.
//! * Tensor products are ordered left to right with the leftmost factor
//!   most significant, so `(a ⊗ b)[(i·db + k), (j·db + l)] = a[i,j]·b[k,l]`.
//! * Superoperators act on column-major (column-stacked) vectorizations,
//!   `vec(ρ)[a + D·b] = ρ[a, b]`, so that `A·ρ·B ↦ (Bᵀ ⊗ A)·vec(ρ)`.

mod expm;
mod hermitian;
mod nullspace;
mod sectors;

pub use expm::matrix_exp;
pub use hermitian::HermitianCoords;
pub use nullspace::{nullspace_steady_state, stationary_in_subspace, Stationary, DEGENERACY_TOL, RESIDUAL_TOL};
pub use sectors::{coherence_sectors, excitations, Sector};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
pub const PSD_TOL: f64 = 1e-10;
pub const UNITARY_TOL: f64 = 1e-12;

/// Largest absolute entry.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn dagger(m: &CMatrix) -> CMatrix {
    m.adjoint()
}

pub fn kron_matrix(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Column-stacking vectorization.
pub fn vectorize(m: &CMatrix) -> CVector {
    CVector::from_column_slice(m.as_slice())
}

pub fn unvectorize(v: &CVector, dim: usize) -> CMatrix {
    CMatrix::from_column_slice(dim, dim, v.as_slice())
}

fn is_power_of_two(n: usize) -> bool {
    n > 0 && n & (n - 1) == 0
}

/// A square operator on a qubit register.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    data: CMatrix,
}

impl Operator {
    pub fn new(data: CMatrix) -> Result<Self> {
        if !data.is_square() {
            return Err(Error::Dimension(format!(
                "operator must be square, got {}x{}",
                data.nrows(),
                data.ncols()
            )));
        }
        Ok(Operator { data })
    }

    pub fn identity(dim: usize) -> Self {
        Operator { data: CMatrix::identity(dim, dim) }
    }

    pub fn from_real(dim: usize, entries: &[f64]) -> Self {
        Operator {
            data: CMatrix::from_row_iterator(dim, dim, entries.iter().map(|&x| C64::new(x, 0.0))),
        }
    }

    pub fn sigma_x() -> Self {
        Self::from_real(2, &[0.0, 1.0, 1.0, 0.0])
    }

    pub fn sigma_y() -> Self {
        Operator { data: CMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO]) }
    }

    pub fn sigma_z() -> Self {
        Self::from_real(2, &[1.0, 0.0, 0.0, -1.0])
    }

    /// `σ_+ = |0⟩⟨1|`, raising to the excited state.
    pub fn sigma_plus() -> Self {
        Self::from_real(2, &[0.0, 1.0, 0.0, 0.0])
    }

    /// `σ_− = |1⟩⟨0|`.
    pub fn sigma_minus() -> Self {
        Self::from_real(2, &[0.0, 0.0, 1.0, 0.0])
    }

    /// The flip-flop coupling `σ_+ ⊗ σ_− + σ_− ⊗ σ_+`.
    pub fn flip_flop() -> Self {
        let p = Self::sigma_plus();
        let m = Self::sigma_minus();
        Operator { data: kron(&p, &m).data + kron(&m, &p).data }
    }

    /// Embeds a single-qubit operator at `site` of an `n_qubits` register.
    pub fn embed_single(op: &Operator, site: usize, n_qubits: usize) -> Self {
        Self::embed(op, &[site], n_qubits)
    }

    /// Embeds a k-qubit operator acting on `sites` (in the operator's own
    /// factor order) into an `n_qubits` register.
    pub fn embed(op: &Operator, sites: &[usize], n_qubits: usize) -> Self {
        let k = sites.len();
        assert_eq!(op.dim(), 1 << k, "operator size does not match site count");
        assert!(sites.iter().all(|&s| s < n_qubits));
        let dim = 1usize << n_qubits;
        let mut out = CMatrix::zeros(dim, dim);
        let local = |idx: usize| -> usize {
            sites.iter().fold(0, |acc, &s| (acc << 1) | ((idx >> (n_qubits - 1 - s)) & 1))
        };
        let rest_mask: usize = sites
            .iter()
            .fold(dim - 1, |m, &s| m & !(1 << (n_qubits - 1 - s)));
        for col in 0..dim {
            let lc = local(col);
            let rest = col & rest_mask;
            for lr in 0..(1 << k) {
                let v = op.data[(lr, lc)];
                if v == ZERO {
                    continue;
                }
                let mut row = rest;
                for (bit, &s) in sites.iter().enumerate() {
                    if (lr >> (k - 1 - bit)) & 1 == 1 {
                        row |= 1 << (n_qubits - 1 - s);
                    }
                }
                out[(row, col)] += v;
            }
        }
        Operator { data: out }
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.data
    }

    pub fn into_matrix(self) -> CMatrix {
        self.data
    }

    pub fn dagger(&self) -> Self {
        Operator { data: self.data.adjoint() }
    }

    pub fn scale(&self, s: C64) -> Self {
        Operator { data: &self.data * s }
    }

    pub fn compose(&self, rhs: &Operator) -> Self {
        Operator { data: &self.data * &rhs.data }
    }

    pub fn is_unitary(&self) -> bool {
        let id = CMatrix::identity(self.dim(), self.dim());
        max_abs(&(self.data.adjoint() * &self.data - id)) <= UNITARY_TOL
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        max_abs(&(&self.data - self.data.adjoint())) <= tol
    }

    /// `exp(t·self)`.
    pub fn exp(&self, t: f64) -> Result<Self> {
        Ok(Operator { data: matrix_exp(&self.data, t)? })
    }

    /// Conjugation `U ρ U†`.
    pub fn conjugate(&self, rho: &CMatrix) -> CMatrix {
        &self.data * rho * self.data.adjoint()
    }
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &Operator, b: &Operator) -> Operator {
    Operator { data: a.data.kronecker(&b.data) }
}

/// Hermitian, unit-trace, positive-semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    data: CMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, trace and positivity against the crate tolerances.
    pub fn new(data: CMatrix) -> Result<Self> {
        let dim = data.nrows();
        if !data.is_square() || !is_power_of_two(dim) {
            return Err(Error::Dimension(format!(
                "density matrix must be square with power-of-two side, got {}x{}",
                data.nrows(),
                data.ncols()
            )));
        }
        let herm = max_abs(&(&data - data.adjoint()));
        if herm > HERMITIAN_TOL {
            return Err(Error::Shape(format!("not Hermitian (skew {herm:.3e})")));
        }
        let tr = data.trace();
        if (tr - ONE).norm() > TRACE_TOL {
            return Err(Error::Shape(format!("trace {tr} differs from 1")));
        }
        let rho = DensityMatrix { data };
        let min_ev = rho.min_eigenvalue();
        if min_ev < -PSD_TOL {
            return Err(Error::Shape(format!("not positive semidefinite (min eigenvalue {min_ev:.3e})")));
        }
        Ok(rho)
    }

    /// Hermitizes and renormalizes before validating. Use for numerically
    /// produced states carrying round-off skew.
    pub fn from_numerical(data: CMatrix) -> Result<Self> {
        let herm = (&data + data.adjoint()) * C64::new(0.5, 0.0);
        let tr = herm.trace().re;
        if !tr.is_finite() || tr.abs() < f64::MIN_POSITIVE {
            return Err(Error::NumericalRange(format!("cannot normalize matrix with trace {tr}")));
        }
        Self::new(herm / C64::new(tr, 0.0))
    }

    /// Skips validation. Callers guarantee the invariants.
    pub(crate) fn from_trusted(data: CMatrix) -> Self {
        DensityMatrix { data }
    }

    pub fn pure(amplitudes: &[C64]) -> Result<Self> {
        let v = CVector::from_column_slice(amplitudes);
        let n = v.norm();
        if n == 0.0 {
            return Err(Error::Parameter("zero state vector".into()));
        }
        let v = v / C64::new(n, 0.0);
        Self::new(&v * v.adjoint())
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        Self::new(CMatrix::identity(dim, dim) / C64::new(dim as f64, 0.0))
    }

    pub fn product(factors: &[&DensityMatrix]) -> Self {
        let mut data = CMatrix::identity(1, 1);
        for f in factors {
            data = data.kronecker(&f.data);
        }
        DensityMatrix { data }
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn n_qubits(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.data
    }

    pub fn into_matrix(self) -> CMatrix {
        self.data
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.data[(row, col)]
    }

    pub fn trace(&self) -> C64 {
        self.data.trace()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self.data.clone().symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    /// Expectation value `Tr[ρ A]`.
    pub fn expect(&self, op: &CMatrix) -> C64 {
        (&self.data * op).trace()
    }

    pub fn trace_distance(&self, other: &DensityMatrix) -> f64 {
        let diff = &self.data - &other.data;
        0.5 * diff.symmetric_eigenvalues().iter().map(|x| x.abs()).sum::<f64>()
    }

    pub fn frobenius_distance(&self, other: &DensityMatrix) -> f64 {
        (&self.data - &other.data).norm()
    }
}

/// Partial trace of a general square matrix over the factors not in `keep`.
///
/// `dims` lists the factor dimensions in tensor order; `keep` the retained
/// factor indices (any order, output uses ascending tensor order).
pub fn partial_trace_matrix(m: &CMatrix, keep: &[usize], dims: &[usize]) -> Result<CMatrix> {
    let total: usize = dims.iter().product();
    if !m.is_square() || m.nrows() != total {
        return Err(Error::Dimension(format!(
            "factor dims {dims:?} (product {total}) do not match matrix side {}",
            m.nrows()
        )));
    }
    if let Some(&k) = keep.iter().find(|&&k| k >= dims.len()) {
        return Err(Error::Dimension(format!("kept factor {k} out of range for {} factors", dims.len())));
    }
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    let traced: Vec<usize> = (0..dims.len()).filter(|i| !kept.contains(i)).collect();
    let kept_dim: usize = kept.iter().map(|&i| dims[i]).product();
    let traced_dim: usize = traced.iter().map(|&i| dims[i]).product();

    // Strides of each factor in the full index.
    let mut strides = vec![1usize; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * dims[i + 1];
    }
    let compose = |factors: &[usize], mut idx: usize| -> usize {
        let mut full = 0;
        for &f in factors.iter().rev() {
            full += (idx % dims[f]) * strides[f];
            idx /= dims[f];
        }
        full
    };
    let kept_offsets: Vec<usize> = (0..kept_dim).map(|i| compose(&kept, i)).collect();
    let traced_offsets: Vec<usize> = (0..traced_dim).map(|i| compose(&traced, i)).collect();

    let mut out = CMatrix::zeros(kept_dim, kept_dim);
    for (c, &oc) in kept_offsets.iter().enumerate() {
        for (r, &or) in kept_offsets.iter().enumerate() {
            let mut acc = ZERO;
            for &t in &traced_offsets {
                acc += m[(or + t, oc + t)];
            }
            out[(r, c)] = acc;
        }
    }
    Ok(out)
}

/// Reduced state on the factors in `keep`.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize], dims: &[usize]) -> Result<DensityMatrix> {
    let reduced = partial_trace_matrix(&rho.data, keep, dims)?;
    Ok(DensityMatrix::from_trusted(reduced))
}

/// Linear map on vectorized `D×D` matrices, stored as a `D²×D²` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Superoperator {
    dim: usize,
    data: CMatrix,
}

impl Superoperator {
    pub fn new(dim: usize, data: CMatrix) -> Result<Self> {
        if data.nrows() != dim * dim || data.ncols() != dim * dim {
            return Err(Error::Dimension(format!(
                "superoperator on {dim}-dim states must be {}x{}, got {}x{}",
                dim * dim,
                dim * dim,
                data.nrows(),
                data.ncols()
            )));
        }
        Ok(Superoperator { dim, data })
    }

    pub fn zeros(dim: usize) -> Self {
        Superoperator { dim, data: CMatrix::zeros(dim * dim, dim * dim) }
    }

    pub fn identity(dim: usize) -> Self {
        Superoperator { dim, data: CMatrix::identity(dim * dim, dim * dim) }
    }

    /// `ρ ↦ A ρ B`.
    pub fn sandwich(a: &CMatrix, b: &CMatrix) -> Self {
        Superoperator { dim: a.nrows(), data: b.transpose().kronecker(a) }
    }

    /// `ρ ↦ −i[H, ρ]`.
    pub fn commutator(h: &CMatrix) -> Self {
        let id = CMatrix::identity(h.nrows(), h.nrows());
        let data = (id.kronecker(h) - h.transpose().kronecker(&id)) * (-I);
        Superoperator { dim: h.nrows(), data }
    }

    /// Lindblad dissipator `ρ ↦ AρA† − ½{A†A, ρ}`.
    pub fn dissipator(a: &CMatrix) -> Self {
        let n = a.nrows();
        let id = CMatrix::identity(n, n);
        let ada = a.adjoint() * a;
        let jump = a.conjugate().kronecker(a);
        let anti = id.kronecker(&ada) + ada.transpose().kronecker(&id);
        Superoperator { dim: n, data: jump - anti * C64::new(0.5, 0.0) }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.data
    }

    pub fn into_matrix(self) -> CMatrix {
        self.data
    }

    pub fn apply(&self, rho: &CMatrix) -> CMatrix {
        unvectorize(&(&self.data * vectorize(rho)), self.dim)
    }

    pub fn compose(&self, rhs: &Superoperator) -> Superoperator {
        Superoperator { dim: self.dim, data: &self.data * &rhs.data }
    }

    pub fn scaled(&self, s: f64) -> Superoperator {
        Superoperator { dim: self.dim, data: &self.data * C64::new(s, 0.0) }
    }

    pub fn add_scaled(&mut self, other: &Superoperator, s: f64) {
        self.data.zip_apply(&other.data, |a, b| *a += b * s);
    }

    /// Row vector `vec(𝟙)† · S`, i.e. the functional `ρ ↦ Tr S[ρ]`.
    pub fn trace_row(&self) -> CVector {
        let mut row = CVector::zeros(self.dim * self.dim);
        for a in 0..self.dim {
            let idx = a + self.dim * a;
            for c in 0..self.dim * self.dim {
                row[c] += self.data[(idx, c)];
            }
        }
        row
    }

    /// Maximum deviation of `Tr∘S` from `target·Tr` (1 for channels, 0 for generators).
    pub fn trace_defect(&self, target: f64) -> f64 {
        let row = self.trace_row();
        let mut worst: f64 = 0.0;
        for b in 0..self.dim {
            for a in 0..self.dim {
                let expected = if a == b { target } else { 0.0 };
                worst = worst.max((row[a + self.dim * b] - C64::new(expected, 0.0)).norm());
            }
        }
        worst
    }

    /// `exp(t·S)`.
    pub fn exp(&self, t: f64) -> Result<Superoperator> {
        Ok(Superoperator { dim: self.dim, data: matrix_exp(&self.data, t)? })
    }

    /// Sub-block on the given vectorized indices (rows and columns).
    pub fn restrict(&self, indices: &[usize]) -> CMatrix {
        let n = indices.len();
        CMatrix::from_fn(n, n, |r, c| self.data[(indices[r], indices[c])])
    }
}

/// Random mixed state from a Ginibre matrix `G G† / Tr`.
pub fn random_density_matrix<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DensityMatrix {
    let g = CMatrix::from_fn(dim, dim, |_, _| {
        C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
    });
    let m = &g * g.adjoint();
    let tr = m.trace();
    DensityMatrix::from_trusted((&m + m.adjoint()) * C64::new(0.5, 0.0) / tr)
}

/// Random unitary via QR of a Ginibre matrix with phase fix.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Operator {
    let g = CMatrix::from_fn(dim, dim, |_, _| {
        C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
    });
    let qr = g.qr();
    let (mut q, r) = qr.unpack();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { ONE };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    Operator { data: q }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ket(bits: &[u8]) -> CVector {
        let n = bits.len();
        let idx = bits.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize);
        let mut v = CVector::zeros(1 << n);
        v[idx] = ONE;
        v
    }

    #[test]
    fn kron_of_identities_is_identity() {
        let id = Operator::identity(2);
        assert_eq!(kron(&id, &id), Operator::identity(4));
    }

    #[test]
    fn kron_sigma_z_identity_diagonal() {
        let m = kron(&Operator::sigma_z(), &Operator::identity(2));
        let diag: Vec<f64> = (0..4).map(|i| m.matrix()[(i, i)].re).collect();
        assert_eq!(diag, vec![1.0, 1.0, -1.0, -1.0]);
    }

    #[test]
    fn kron_ladder_moves_excitation() {
        // |g e⟩ = |1 0⟩ → |e g⟩ = |0 1⟩
        let op = kron(&Operator::sigma_plus(), &Operator::sigma_minus());
        let out = op.matrix() * ket(&[1, 0]);
        assert_eq!(out, ket(&[0, 1]));
        assert_eq!(op.matrix().iter().filter(|z| z.norm() > 0.0).count(), 1);
    }

    #[test]
    fn embed_matches_kron() {
        let z = Operator::sigma_z();
        let id = Operator::identity(2);
        let expected = kron(&kron(&id, &z), &id);
        assert_eq!(Operator::embed_single(&z, 1, 3), expected);
        let ff = Operator::flip_flop();
        let expected = kron(&ff, &id);
        assert_eq!(Operator::embed(&ff, &[0, 1], 3), expected);
    }

    #[test]
    fn embed_non_adjacent_sites() {
        // σ_+ on qubit 0, σ_- on qubit 2 of 3: compare with explicit kron.
        let pm = kron(&Operator::sigma_plus(), &Operator::sigma_minus());
        let got = Operator::embed(&pm, &[0, 2], 3);
        let expected = kron(&kron(&Operator::sigma_plus(), &Operator::identity(2)), &Operator::sigma_minus());
        assert_eq!(got, expected);
        // Reversed site order swaps the roles.
        let got = Operator::embed(&pm, &[2, 0], 3);
        let expected = kron(&kron(&Operator::sigma_minus(), &Operator::identity(2)), &Operator::sigma_plus());
        assert_eq!(got, expected);
    }

    #[test]
    fn partial_trace_of_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = random_density_matrix(&mut rng, 2);
        let b = random_density_matrix(&mut rng, 4);
        let ab = DensityMatrix::product(&[&a, &b]);
        let ra = partial_trace(&ab, &[0], &[2, 4]).unwrap();
        let rb = partial_trace(&ab, &[1], &[2, 4]).unwrap();
        assert!(max_abs(&(ra.matrix() - a.matrix())) < 1e-14);
        assert!(max_abs(&(rb.matrix() - b.matrix())) < 1e-14);
    }

    #[test]
    fn partial_trace_of_bell_state_is_maximally_mixed() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bell = DensityMatrix::pure(&[C64::new(s, 0.0), ZERO, ZERO, C64::new(s, 0.0)]).unwrap();
        let r = partial_trace(&bell, &[0], &[2, 2]).unwrap();
        let half = CMatrix::identity(2, 2) * C64::new(0.5, 0.0);
        assert!(max_abs(&(r.matrix() - half)) < 1e-15);
    }

    #[test]
    fn partial_trace_middle_factor() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = random_density_matrix(&mut rng, 2);
        let b = random_density_matrix(&mut rng, 2);
        let c = random_density_matrix(&mut rng, 2);
        let abc = DensityMatrix::product(&[&a, &b, &c]);
        let ac = partial_trace(&abc, &[2, 0], &[2, 2, 2]).unwrap();
        let expected = DensityMatrix::product(&[&a, &c]);
        assert!(max_abs(&(ac.matrix() - expected.matrix())) < 1e-14);
    }

    #[test]
    fn partial_trace_dims_mismatch() {
        let rho = DensityMatrix::maximally_mixed(4).unwrap();
        assert!(matches!(partial_trace(&rho, &[0], &[2, 4]), Err(Error::Dimension(_))));
        assert!(matches!(partial_trace(&rho, &[3], &[2, 2]), Err(Error::Dimension(_))));
    }

    #[test]
    fn density_matrix_validation() {
        let bad_trace = CMatrix::identity(2, 2);
        assert!(DensityMatrix::new(bad_trace).is_err());
        let not_psd = CMatrix::from_row_slice(2, 2, &[C64::new(1.5, 0.0), ZERO, ZERO, C64::new(-0.5, 0.0)]);
        assert!(DensityMatrix::new(not_psd).is_err());
        let not_herm = CMatrix::from_row_slice(2, 2, &[C64::new(0.5, 0.0), ONE, ZERO, C64::new(0.5, 0.0)]);
        assert!(DensityMatrix::new(not_herm).is_err());
        assert!(DensityMatrix::new(CMatrix::identity(3, 3) / C64::new(3.0, 0.0)).is_err());
    }

    #[test]
    fn superoperator_sandwich_matches_direct_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_unitary(&mut rng, 4).into_matrix();
        let b = random_density_matrix(&mut rng, 4).into_matrix();
        let rho = random_density_matrix(&mut rng, 4).into_matrix();
        let s = Superoperator::sandwich(&a, &b);
        assert!(max_abs(&(s.apply(&rho) - &a * &rho * &b)) < 1e-13);
    }

    #[test]
    fn dissipator_is_trace_annihilating() {
        let a = Operator::sigma_minus().into_matrix();
        let d = Superoperator::dissipator(&a);
        assert!(d.trace_defect(0.0) < 1e-15);
        let h = Operator::flip_flop().into_matrix();
        assert!(Superoperator::commutator(&h).trace_defect(0.0) < 1e-15);
    }

    #[test]
    fn random_unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        assert!(random_unitary(&mut rng, 8).is_unitary());
    }
}
