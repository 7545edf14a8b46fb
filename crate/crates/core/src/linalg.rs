//! Small dense linear-algebra helpers used throughout the crate.

use ndarray::{Array1, Array2, ArrayView2};
use ndarray_linalg::{Eigh, UPLO};
use num_complex::Complex64 as C64;

use crate::error::Result;

pub fn adjoint(m: &ArrayView2<C64>) -> Array2<C64> {
    m.t().mapv(|c| c.conj())
}

pub fn trace(m: &ArrayView2<C64>) -> C64 {
    m.diag().sum()
}

/// tr[a·b] without forming the product.
pub fn trace_product(a: &ArrayView2<C64>, b: &ArrayView2<C64>) -> C64 {
    let n = a.nrows();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

pub fn max_abs_diff(a: &ArrayView2<C64>, b: &ArrayView2<C64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Max entrywise deviation restricted to the top-left `n × n` sub-block,
/// where truncated operators are meaningful.
pub fn max_abs_diff_block(a: &ArrayView2<C64>, b: &ArrayView2<C64>, n: usize) -> f64 {
    let sa = a.slice(ndarray::s![..n, ..n]);
    let sb = b.slice(ndarray::s![..n, ..n]);
    max_abs_diff(&sa, &sb)
}

pub fn hermiticity_defect(m: &ArrayView2<C64>) -> f64 {
    let adj = adjoint(m);
    max_abs_diff(m, &adj.view())
}

/// Eigendecomposition of a Hermitian matrix, ascending eigenvalues.
pub fn hermitian_eigh(m: &Array2<C64>) -> Result<(Array1<f64>, Array2<C64>)> {
    debug_assert!(m.is_standard_layout());
    let (vals, vecs) = m.eigh(UPLO::Lower)?;
    // LAPACK works on the column-major buffer, i.e. on the transpose of a
    // row-major Hermitian matrix; the eigenvectors come back conjugated.
    Ok((vals, vecs.mapv(|c| c.conj())))
}

/// exp(i·h) for Hermitian `h`; unitary to machine precision by construction.
pub fn expi_hermitian(h: &Array2<C64>) -> Result<Array2<C64>> {
    let (vals, vecs) = hermitian_eigh(h)?;
    Ok(recompose_phases(&vals, &vecs, 1.0))
}

/// V · diag(e^{i·scale·λ}) · V† for an eigensystem (λ, V).
pub fn recompose_phases(vals: &Array1<f64>, vecs: &Array2<C64>, scale: f64) -> Array2<C64> {
    let mut scaled = vecs.clone();
    for (mut col, lam) in scaled.columns_mut().into_iter().zip(vals.iter()) {
        let phase = C64::from_polar(1.0, scale * lam);
        col.mapv_inplace(|c| c * phase);
    }
    scaled.dot(&adjoint(&vecs.view()))
}

pub fn identity(d: usize) -> Array2<C64> {
    Array2::eye(d)
}

/// Gauss–Hermite nodes and weights for ∫ e^{−t²} f(t) dt ≈ Σ wᵢ f(tᵢ),
/// computed by the Golub–Welsch eigenvalue method.
pub fn gauss_hermite(n: usize) -> Result<(Array1<f64>, Array1<f64>)> {
    assert!(n >= 1, "quadrature needs at least one node");
    if n == 1 {
        return Ok((ndarray::array![0.0], ndarray::array![std::f64::consts::PI.sqrt()]));
    }
    let mut jacobi: Array2<f64> = Array2::zeros((n, n));
    for k in 1..n {
        let b = (k as f64 / 2.0).sqrt();
        jacobi[(k - 1, k)] = b;
        jacobi[(k, k - 1)] = b;
    }
    let (nodes, vecs) = jacobi.eigh(UPLO::Lower)?;
    let mu0 = std::f64::consts::PI.sqrt();
    let weights = vecs.row(0).mapv(|v| mu0 * v * v);
    Ok((nodes, weights))
}
