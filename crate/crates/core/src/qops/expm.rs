// Copyright 2026 ness-lab contributors
// SPDX-License-Identifier: Apache-2.0

//! Scaling-and-squaring Padé approximant of the matrix exponential
//! (Higham 2005 order selection).

use super::{CMatrix, C64};
use crate::error::{Error, Result};

const PADE3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const PADE5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const PADE7: [f64; 8] = [17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0];
const PADE9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

const THETA3: f64 = 1.495585217958292e-2;
const THETA5: f64 = 2.539398330063230e-1;
const THETA7: f64 = 9.504178996162932e-1;
const THETA9: f64 = 2.097847961257068;
const THETA13: f64 = 5.371920351148152;

fn norm1(m: &CMatrix) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// `exp(t·m)` for a square complex matrix.
pub fn matrix_exp(m: &CMatrix, t: f64) -> Result<CMatrix> {
    if !m.is_square() {
        return Err(Error::Dimension(format!("matrix_exp needs a square matrix, got {}x{}", m.nrows(), m.ncols())));
    }
    if !t.is_finite() || m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NumericalRange("non-finite input to matrix_exp".into()));
    }
    let n = m.nrows();
    let id = CMatrix::identity(n, n);
    if t == 0.0 || n == 0 {
        return Ok(id);
    }
    let a = m * c(t);
    let nrm = norm1(&a);
    if nrm == 0.0 {
        return Ok(id);
    }

    let a2 = &a * &a;
    let (u, v, squarings) = if nrm <= THETA3 {
        let (u, v) = pade_low(&a, &a2, &id, &PADE3);
        (u, v, 0)
    } else if nrm <= THETA5 {
        let (u, v) = pade_low(&a, &a2, &id, &PADE5);
        (u, v, 0)
    } else if nrm <= THETA7 {
        let (u, v) = pade_low(&a, &a2, &id, &PADE7);
        (u, v, 0)
    } else if nrm <= THETA9 {
        let (u, v) = pade_low(&a, &a2, &id, &PADE9);
        (u, v, 0)
    } else {
        let s = (nrm / THETA13).log2().ceil().max(0.0) as i32;
        if s > 1000 {
            return Err(Error::NumericalRange(format!("norm {nrm:.3e} too large for scaling")));
        }
        let scale = c(2f64.powi(-s));
        let a = &a * scale;
        let a2 = &a2 * (scale * scale);
        let (u, v) = pade13(&a, &a2, &id);
        (u, v, s)
    };

    let p = &v + &u;
    let q = &v - &u;
    let mut r = q
        .lu()
        .solve(&p)
        .ok_or_else(|| Error::NumericalRange("singular Padé denominator".into()))?;
    for _ in 0..squarings {
        r = &r * &r;
    }
    if r.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NumericalRange("matrix exponential overflowed".into()));
    }
    Ok(r)
}

fn pade_low(a: &CMatrix, a2: &CMatrix, id: &CMatrix, b: &[f64]) -> (CMatrix, CMatrix) {
    // U = A Σ b_{2k+1} A^{2k},  V = Σ b_{2k} A^{2k}
    let mut power = id.clone();
    let mut u = CMatrix::zeros(a.nrows(), a.ncols());
    let mut v = CMatrix::zeros(a.nrows(), a.ncols());
    for k in 0..b.len() / 2 {
        if k > 0 {
            power = &power * a2;
        }
        u += &power * c(b[2 * k + 1]);
        v += &power * c(b[2 * k]);
    }
    (a * u, v)
}

fn pade13(a: &CMatrix, a2: &CMatrix, id: &CMatrix) -> (CMatrix, CMatrix) {
    let b = &PADE13;
    let a4 = a2 * a2;
    let a6 = &a4 * a2;
    let inner_u = &a6 * c(b[13]) + &a4 * c(b[11]) + a2 * c(b[9]);
    let u = a * (&a6 * inner_u + &a6 * c(b[7]) + &a4 * c(b[5]) + a2 * c(b[3]) + id * c(b[1]));
    let inner_v = &a6 * c(b[12]) + &a4 * c(b[10]) + a2 * c(b[8]);
    let v = &a6 * inner_v + &a6 * c(b[6]) + &a4 * c(b[4]) + a2 * c(b[2]) + id * c(b[0]);
    (u, v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qops::max_abs;

    /// Taylor series with many terms, for small-norm inputs only.
    fn taylor(m: &CMatrix, terms: usize) -> CMatrix {
        let n = m.nrows();
        let mut term = CMatrix::identity(n, n);
        let mut sum = term.clone();
        for k in 1..terms {
            term = &term * m / c(k as f64);
            sum += &term;
        }
        sum
    }

    fn test_matrix(n: usize, scale: f64) -> CMatrix {
        CMatrix::from_fn(n, n, |i, j| {
            C64::new(((i * 7 + j * 3) % 11) as f64 / 11.0 - 0.5, ((i + 2 * j) % 5) as f64 / 5.0 - 0.4) * scale
        })
    }

    #[test]
    fn zero_time_gives_identity() {
        let m = test_matrix(5, 3.0);
        assert_eq!(matrix_exp(&m, 0.0).unwrap(), CMatrix::identity(5, 5));
    }

    #[test]
    fn diagonal_exponentiates_entrywise() {
        let m = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(-2.0), C64::new(0.5, 1.0)]));
        let e = matrix_exp(&m, 1.0).unwrap();
        assert!((e[(0, 0)] - c((-2.0f64).exp())).norm() < 1e-15);
        assert!((e[(1, 1)] - C64::new(0.5, 1.0).exp()).norm() < 1e-14);
        assert_eq!(e[(0, 1)], c(0.0));
    }

    #[test]
    fn matches_taylor_for_each_pade_order() {
        for &scale in &[0.002, 0.05, 0.2, 0.4, 0.8, 3.0] {
            let m = test_matrix(6, scale);
            let e = matrix_exp(&m, 1.0).unwrap();
            let reference = taylor(&m, 60);
            let rel = max_abs(&(&e - &reference)) / max_abs(&reference);
            assert!(rel < 1e-13, "scale {scale}: rel error {rel:e}");
        }
    }

    #[test]
    fn rotation_generator() {
        // exp(θ·[[0,-1],[1,0]]) is a rotation by θ.
        let m = CMatrix::from_row_slice(2, 2, &[c(0.0), c(-1.0), c(1.0), c(0.0)]);
        let theta = 123.456;
        let e = matrix_exp(&m, theta).unwrap();
        let expected = CMatrix::from_row_slice(
            2,
            2,
            &[c(theta.cos()), c(-theta.sin()), c(theta.sin()), c(theta.cos())],
        );
        assert!(max_abs(&(e - expected)) < 1e-10);
    }

    #[test]
    fn product_property_large_norm() {
        // Anti-Hermitian input has a unitary exponential; norm ~ 10^3.
        let h = test_matrix(8, 1.0);
        let h = (&h + h.adjoint()) * c(0.5);
        let m = h * C64::new(0.0, -1.0);
        let big = matrix_exp(&m, 400.0).unwrap();
        let half = matrix_exp(&m, 200.0).unwrap();
        let rel = max_abs(&(&half * &half - &big)) / max_abs(&big);
        assert!(rel < 1e-10, "rel {rel:e}");
        let unit = big.adjoint() * &big - CMatrix::identity(8, 8);
        assert!(max_abs(&unit) < 1e-10);
    }

    #[test]
    fn non_finite_rejected() {
        let mut m = test_matrix(3, 1.0);
        m[(1, 1)] = c(f64::NAN);
        assert!(matches!(matrix_exp(&m, 1.0), Err(Error::NumericalRange(_))));
    }

    #[test]
    fn overflow_reported() {
        let m = CMatrix::identity(2, 2) * c(1000.0);
        assert!(matches!(matrix_exp(&m, 1.0), Err(Error::NumericalRange(_))));
    }
}
