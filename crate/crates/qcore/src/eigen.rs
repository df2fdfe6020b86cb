//! Hermitian eigenvalues via cyclic Jacobi sweeps.
//!
//! The matrices in this project are at most 8x8, where Jacobi iteration is
//! both simple and effectively exact. Each rotation absorbs the phase of the
//! targeted off-diagonal entry and then applies the classical symmetric
//! Jacobi rotation, so complex Hermitian input needs no reduction step.

use crate::{Complex64, ComplexMatrix, QcoreError};

const MAX_SWEEPS: usize = 100;

/// Eigenvalues of a Hermitian matrix, sorted ascending.
///
/// `tol` bounds both the accepted Hermiticity deviation of the input and the
/// off-diagonal Frobenius norm at convergence.
pub fn hermitian_eigenvalues(h: &ComplexMatrix, tol: f64) -> Result<Vec<f64>, QcoreError> {
    if h.rows() != h.cols() {
        return Err(QcoreError::BadDimensions(format!(
            "{}x{} is not square",
            h.rows(),
            h.cols()
        )));
    }
    let deviation = h.hermiticity_deviation();
    if deviation > tol {
        return Err(QcoreError::NotHermitian { deviation, tol });
    }

    let n = h.rows();
    if n == 1 {
        return Ok(vec![h.get(0, 0).re]);
    }

    // Work on the symmetrized copy to kill any sub-tolerance drift.
    let mut a = vec![Complex64::new(0.0, 0.0); n * n];
    for r in 0..n {
        for c in 0..n {
            a[r * n + c] = (h.get(r, c) + h.get(c, r).conj()) * 0.5;
        }
    }

    let mut off_norm = off_frobenius(&a, n);
    for _sweep in 0..MAX_SWEEPS {
        if off_norm < tol {
            let mut eigs: Vec<f64> = (0..n).map(|i| a[i * n + i].re).collect();
            eigs.sort_by(f64::total_cmp);
            return Ok(eigs);
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                rotate(&mut a, n, p, q);
            }
        }
        off_norm = off_frobenius(&a, n);
    }
    Err(QcoreError::NoConvergence {
        sweeps: MAX_SWEEPS,
        off_norm,
    })
}

fn off_frobenius(a: &[Complex64], n: usize) -> f64 {
    let mut s = 0.0;
    for p in 0..n {
        for q in 0..n {
            if p != q {
                s += a[p * n + q].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// One Jacobi rotation annihilating A[p][q] (and A[q][p]).
fn rotate(a: &mut [Complex64], n: usize, p: usize, q: usize) {
    let apq = a[p * n + q];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let phase = apq / r;
    let app = a[p * n + p].re;
    let aqq = a[q * n + q].re;
    let tau = (aqq - app) / (2.0 * r);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    // G[p][p] = c*phase, G[p][q] = s*phase, G[q][p] = -s, G[q][q] = c
    let gpp = phase * c;
    let gpq = phase * s;
    let gqp = Complex64::new(-s, 0.0);
    let gqq = Complex64::new(c, 0.0);

    // columns: A <- A G
    for k in 0..n {
        let akp = a[k * n + p];
        let akq = a[k * n + q];
        a[k * n + p] = akp * gpp + akq * gqp;
        a[k * n + q] = akp * gpq + akq * gqq;
    }
    // rows: A <- G^dagger A
    for k in 0..n {
        let apk = a[p * n + k];
        let aqk = a[q * n + k];
        a[p * n + k] = gpp.conj() * apk + gqp.conj() * aqk;
        a[q * n + k] = gpq.conj() * apk + gqq.conj() * aqk;
    }
    // force the annihilated pair and real diagonals exactly
    a[p * n + q] = Complex64::new(0.0, 0.0);
    a[q * n + p] = Complex64::new(0.0, 0.0);
    a[p * n + p] = Complex64::new(a[p * n + p].re, 0.0);
    a[q * n + q] = Complex64::new(a[q * n + q].re, 0.0);
}
