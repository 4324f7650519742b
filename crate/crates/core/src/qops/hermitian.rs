// Copyright 2026 ness-lab contributors
// SPDX-License-Identifier: Apache-2.0

//! Real coordinates for Hermitian matrices on a subspace of Liouville space.
//!
//! A Hermiticity-preserving generator restricted to an invariant subspace
//! that is closed under `(a, b) ↦ (b, a)` is a real-linear map on the real
//! coordinates `ρ_aa`, `Re ρ_ab`, `Im ρ_ab` (`a < b`). Solving for the
//! stationary state there halves the dimension count of the arithmetic.

use nalgebra::{DMatrix, DVector};

use super::{CMatrix, CVector, C64};
use crate::error::{Error, Result};

const PIVOT_TOL: f64 = 1e-14;

/// Coordinate layout: `diag.len()` populations, then `(Re, Im)` per pair.
#[derive(Debug, Clone)]
pub struct HermitianCoords {
    dim: usize,
    diag: Vec<usize>,
    pairs: Vec<(usize, usize)>,
    /// Position in the subspace index list of `(a, b)` and `(b, a)`.
    pair_slots: Vec<(usize, usize)>,
    diag_slots: Vec<usize>,
    n_sub: usize,
}

impl HermitianCoords {
    /// Layout for the column-major Liouville `indices` of a `dim × dim`
    /// matrix. The index set must be closed under transposition.
    pub fn new(indices: &[usize], dim: usize) -> Result<Self> {
        let slot = |r: usize, c: usize| indices.iter().position(|&i| i == r + dim * c);
        let mut diag = Vec::new();
        let mut diag_slots = Vec::new();
        let mut pairs = Vec::new();
        let mut pair_slots = Vec::new();
        for (k, &i) in indices.iter().enumerate() {
            let (r, c) = (i % dim, i / dim);
            if r == c {
                diag.push(r);
                diag_slots.push(k);
            } else if r < c {
                let t = slot(c, r)
                    .ok_or_else(|| Error::Dimension(format!("index set lacks the transpose of ({r}, {c})")))?;
                pairs.push((r, c));
                pair_slots.push((k, t));
            }
        }
        Ok(HermitianCoords { dim, diag, pairs, pair_slots, diag_slots, n_sub: indices.len() })
    }

    /// Number of real coordinates; equals the subspace dimension.
    pub fn len(&self) -> usize {
        self.diag.len() + 2 * self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn n_diagonal(&self) -> usize {
        self.diag.len()
    }

    /// Complex subspace vector of the Hermitian matrix with coordinates `x`.
    pub fn to_subspace(&self, x: &DVector<f64>) -> CVector {
        let mut v = CVector::zeros(self.n_sub);
        for (k, &s) in self.diag_slots.iter().enumerate() {
            v[s] = C64::new(x[k], 0.0);
        }
        let off = self.diag.len();
        for (k, &(s, t)) in self.pair_slots.iter().enumerate() {
            let (re, im) = (x[off + 2 * k], x[off + 2 * k + 1]);
            v[s] = C64::new(re, im);
            v[t] = C64::new(re, -im);
        }
        v
    }

    /// Coordinates of a Hermitian subspace vector (the anti-Hermitian part
    /// is discarded).
    pub fn from_subspace(&self, v: &CVector) -> DVector<f64> {
        let mut x = DVector::zeros(self.len());
        for (k, &s) in self.diag_slots.iter().enumerate() {
            x[k] = v[s].re;
        }
        let off = self.diag.len();
        for (k, &(s, t)) in self.pair_slots.iter().enumerate() {
            let z = (v[s] + v[t].conj()) * 0.5;
            x[off + 2 * k] = z.re;
            x[off + 2 * k + 1] = z.im;
        }
        x
    }

    /// Full `dim × dim` matrix with coordinates `x`.
    pub fn to_matrix(&self, x: &DVector<f64>) -> CMatrix {
        let mut m = CMatrix::zeros(self.dim, self.dim);
        for (k, &a) in self.diag.iter().enumerate() {
            m[(a, a)] = C64::new(x[k], 0.0);
        }
        let off = self.diag.len();
        for (k, &(a, b)) in self.pairs.iter().enumerate() {
            let z = C64::new(x[off + 2 * k], x[off + 2 * k + 1]);
            m[(a, b)] = z;
            m[(b, a)] = z.conj();
        }
        m
    }

    /// Frobenius norm of the Hermitian matrix with coordinates `x`.
    pub fn frobenius(&self, x: &DVector<f64>) -> f64 {
        let nd = self.diag.len();
        let d: f64 = x.rows(0, nd).norm_squared();
        let o: f64 = x.rows(nd, x.len() - nd).norm_squared();
        (d + 2.0 * o).sqrt()
    }

    /// Real matrix of a complex subspace block acting on Hermitian inputs.
    pub fn realify(&self, block: &CMatrix) -> DMatrix<f64> {
        let n = self.len();
        let mut out = DMatrix::zeros(n, n);
        let mut e = DVector::zeros(n);
        for j in 0..n {
            e[j] = 1.0;
            let image = block * self.to_subspace(&e);
            out.set_column(j, &self.from_subspace(&image));
            e[j] = 0.0;
        }
        out
    }

    /// Coordinates that survive the antiunitary symmetry `ρ ↦ Uρ*U` with
    /// `U = diag(signs)`: populations, `Re ρ_ab` when `signs[a]·signs[b] = 1`
    /// and `Im ρ_ab` otherwise. Populations come first.
    pub fn symmetric_subset(&self, signs: &[f64]) -> Vec<usize> {
        let nd = self.diag.len();
        let mut keep: Vec<usize> = (0..nd).collect();
        for (k, &(a, b)) in self.pairs.iter().enumerate() {
            keep.push(nd + 2 * k + usize::from(signs[a] * signs[b] < 0.0));
        }
        keep
    }

    /// Embeds coordinates on a subset back into the full layout.
    pub fn expand(&self, keep: &[usize], y: &DVector<f64>) -> DVector<f64> {
        let mut x = DVector::zeros(self.len());
        for (k, &i) in keep.iter().enumerate() {
            x[i] = y[k];
        }
        x
    }

    /// Unit-trace null vector of a real generator block, by a bordered LU
    /// solve with the first population equation replaced by the trace.
    /// Returns the coordinates and the residual `‖ℒρ‖_F`.
    pub fn stationary(&self, r: &DMatrix<f64>) -> Result<(DVector<f64>, f64)> {
        let n = self.len();
        if r.nrows() != n || r.ncols() != n {
            return Err(Error::Dimension(format!("real block is {}x{}, layout has {n}", r.nrows(), r.ncols())));
        }
        self.stationary_on(r, self.diag.len())
    }

    /// As [`stationary`](Self::stationary) for a block restricted to an
    /// invariant coordinate subset whose first `n_diag` entries are the
    /// populations.
    pub fn stationary_on(&self, r: &DMatrix<f64>, n_diag: usize) -> Result<(DVector<f64>, f64)> {
        let n = r.nrows();
        let nd = n_diag;
        if r.ncols() != n || nd == 0 || nd > n {
            return Err(Error::Dimension(format!("real block is {}x{} with {nd} populations", r.nrows(), r.ncols())));
        }
        let mut bordered = r.clone();
        bordered.row_mut(0).fill(0.0);
        for k in 0..nd {
            bordered[(0, k)] = 1.0;
        }
        let mut rhs = DVector::zeros(n);
        rhs[0] = 1.0;
        let lu = bordered.clone().lu();
        let pivots = lu.u().diagonal().map(f64::abs);
        let (pmin, pmax) = (pivots.min(), pivots.max());
        if !(pmax > 0.0) || pmin < PIVOT_TOL * pmax {
            return Err(Error::NonUniqueSteadyState(format!(
                "bordered generator is singular (pivot ratio {:.3e})",
                pmin / pmax
            )));
        }
        let mut x = lu.solve(&rhs).ok_or_else(|| Error::NonUniqueSteadyState("singular bordered generator".into()))?;
        let res = &rhs - &bordered * &x;
        if let Some(dx) = lu.solve(&res) {
            x += dx;
        }
        let residual = self.frobenius(&(r * &x));
        Ok((x, residual))
    }
}
