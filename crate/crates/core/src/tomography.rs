//! State reconstruction from sampled phase-space densities.
//!
//! The density ρ ↦ g(q, p) is linear in ρ, so sampling it on M grid cells
//! defines a real M × d² linear map on the space of Hermitian matrices.
//! When the generating operator's Weyl transform has full support the map
//! is injective in the infinite-data limit; on a finite grid we certify
//! practical invertibility through the numerical rank of the map and
//! reconstruct by least squares followed by a projection back onto the
//! density matrices.

use ndarray::{Array1, Array2};
use ndarray_linalg::SVD;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::fock::DensityOperator;
use crate::grid::Grid2D;
use crate::linalg;
use crate::observable::GeneratingOperator;
use crate::optics::TiltAngle;

/// Singular values below this fraction of the largest are treated as zero
/// when solving and when reporting the numerical rank.
pub const RANK_TOL: f64 = 1e-8;

/// Orthonormal real parameterization of Hermitian d×d matrices: d diagonal
/// elements, then (√2-scaled) real and imaginary parts of each upper
/// off-diagonal entry.
fn n_params(d: usize) -> usize {
    d * d
}

/// Coefficients of a Hermitian matrix in the orthonormal basis.
fn to_params(m: &Array2<C64>) -> Array1<f64> {
    let d = m.nrows();
    let mut x = Array1::zeros(n_params(d));
    for i in 0..d {
        x[i] = m[(i, i)].re;
    }
    let mut a = d;
    let sqrt2 = std::f64::consts::SQRT_2;
    for i in 0..d {
        for j in (i + 1)..d {
            x[a] = sqrt2 * m[(i, j)].re;
            x[a + 1] = sqrt2 * m[(i, j)].im;
            a += 2;
        }
    }
    x
}

/// Hermitian matrix from its basis coefficients.
fn from_params(x: &Array1<f64>, d: usize) -> Array2<C64> {
    let mut m = Array2::zeros((d, d));
    for i in 0..d {
        m[(i, i)] = C64::new(x[i], 0.0);
    }
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let mut a = d;
    for i in 0..d {
        for j in (i + 1)..d {
            let val = C64::new(x[a] * inv_sqrt2, x[a + 1] * inv_sqrt2);
            m[(i, j)] = val;
            m[(j, i)] = val.conj();
            a += 2;
        }
    }
    m
}

/// The sampled linear map from states to density values on a grid.
#[derive(Debug, Clone)]
pub struct ForwardMap {
    matrix: Array2<f64>,
    grid: Grid2D,
    tilt: TiltAngle,
    dim: usize,
}

impl ForwardMap {
    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn tilt(&self) -> &TiltAngle {
        &self.tilt
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_rows(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn n_params(&self) -> usize {
        self.matrix.ncols()
    }

    /// Predicted density samples for a state, row-major over the grid.
    pub fn apply(&self, rho: &DensityOperator) -> Array1<f64> {
        self.matrix.dot(&to_params(rho.matrix()))
    }
}

/// Assemble the forward map of an observable on a grid: row (q, p) holds
/// the pairing of W_θ(q,p)·S·W_θ(q,p)†/(2π|sinθ|) with each basis element.
/// Warns when the grid has fewer cells than the d² parameters.
pub fn build_forward_map(gen: &GeneratingOperator, grid: &Grid2D) -> Result<ForwardMap> {
    let d = gen.dim();
    let (nx, ny) = grid.shape();
    let rows = nx * ny;
    if rows < n_params(d) {
        log::warn!(
            "forward map underdetermined: {rows} samples for {} parameters",
            n_params(d)
        );
    }
    let prefactor = 1.0 / (2.0 * std::f64::consts::PI * gen.tilt().sin_theta().abs());
    let pts: Vec<crate::optics::PhaseSpacePoint> = grid
        .x
        .points()
        .iter()
        .flat_map(|&q| {
            grid.y
                .points()
                .iter()
                .map(move |&p| crate::optics::PhaseSpacePoint::new(q, p))
                .collect::<Vec<_>>()
        })
        .collect();
    let kernels = crate::observable::displaced_generator_kernel(gen, &pts)?;
    let mut matrix = Array2::zeros((rows, n_params(d)));
    for (r, kernel) in kernels.into_iter().enumerate() {
        matrix.row_mut(r).assign(&to_params(&kernel.mapv(|c| c * prefactor)));
    }
    Ok(ForwardMap { matrix, grid: *grid, tilt: *gen.tilt(), dim: d })
}

/// Result of a reconstruction.
#[derive(Debug, Clone)]
pub struct Reconstruction {
    /// The reconstructed state (positive, unit trace).
    pub rho: DensityOperator,
    /// ‖F·x − samples‖₂ of the least-squares solution before projection.
    pub residual: f64,
    /// Numerical rank of the forward map at [`RANK_TOL`].
    pub rank: usize,
    pub max_singular: f64,
    pub min_singular: f64,
}

/// Reconstruct a state from density samples (row-major over the map's
/// grid) by a pseudo-inverse solve, then eigenvalue clipping to the
/// positive cone and trace renormalization. Deterministic throughout.
pub fn reconstruct(samples: &Array2<f64>, map: &ForwardMap) -> Result<Reconstruction> {
    reconstruct_with_ridge(samples, map, 0.0)
}

/// [`reconstruct`] with Tikhonov filtering σ/(σ² + ridge²) applied to the
/// singular values; `ridge = 0` is the plain pseudo-inverse.
pub fn reconstruct_with_ridge(
    samples: &Array2<f64>,
    map: &ForwardMap,
    ridge: f64,
) -> Result<Reconstruction> {
    if samples.dim() != map.grid.shape() {
        return Err(Error::DimensionMismatch {
            left: samples.len(),
            right: map.n_rows(),
        });
    }
    let b = Array1::from_iter(samples.iter().cloned());
    let (u, s, vt) = map.matrix.svd(true, true)?;
    let u = u.expect("svd computes u");
    let vt = vt.expect("svd computes vt");
    let max_singular = s.iter().cloned().fold(0.0, f64::max);
    let cut = RANK_TOL * max_singular;
    let rank = s.iter().filter(|&&v| v > cut).count();
    let min_singular = s.iter().cloned().fold(f64::INFINITY, f64::min);
    if rank < map.n_params() {
        log::warn!(
            "forward map rank-deficient: rank {rank} of {} at tolerance {RANK_TOL}",
            map.n_params()
        );
    }
    let utb = u.t().dot(&b);
    let mut coeffs = Array1::zeros(s.len());
    for (k, &sv) in s.iter().enumerate() {
        if sv > cut {
            let filter = if ridge > 0.0 { sv / (sv * sv + ridge * ridge) } else { 1.0 / sv };
            coeffs[k] = utb[k] * filter;
        }
    }
    let x = vt.t().dot(&coeffs);
    let residual = (&map.matrix.dot(&x) - &b).mapv(|v| v * v).sum().sqrt();

    // project back onto the density matrices: clip negative eigenvalues,
    // renormalize the trace
    let herm = from_params(&x, map.dim);
    let (vals, vecs) = linalg::hermitian_eigh(&herm)?;
    let clipped: Vec<f64> = vals.iter().map(|&v| v.max(0.0)).collect();
    let total: f64 = clipped.iter().sum();
    if total <= 0.0 {
        return Err(Error::NotPositive { min_eigenvalue: vals[0] });
    }
    let mut rho_mat: Array2<C64> = Array2::zeros((map.dim, map.dim));
    for (k, &w) in clipped.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        let col = vecs.column(k);
        let scale = w / total;
        for i in 0..map.dim {
            for j in 0..map.dim {
                rho_mat[(i, j)] += col[i] * col[j].conj() * scale;
            }
        }
    }
    Ok(Reconstruction {
        rho: DensityOperator::from_unchecked(rho_mat),
        residual,
        rank,
        max_singular,
        min_singular,
    })
}

/// Trace distance ½·‖ρ − σ‖₁.
pub fn trace_distance(a: &DensityOperator, b: &DensityOperator) -> Result<f64> {
    let diff = a.matrix() - b.matrix();
    let (vals, _) = linalg::hermitian_eigh(&diff)?;
    Ok(0.5 * vals.iter().map(|v| v.abs()).sum::<f64>())
}

/// Fidelity ⟨ψ|ρ|ψ⟩ against a pure target.
pub fn fidelity_pure(psi: &crate::fock::StateVector, rho: &DensityOperator) -> f64 {
    let amps = psi.amplitudes();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..psi.dim() {
        for j in 0..psi.dim() {
            acc += amps[i].conj() * rho.matrix()[(i, j)] * amps[j];
        }
    }
    acc.re
}
