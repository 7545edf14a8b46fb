//! Outcome densities of rotated quadratures, the joint density measured in
//! the high-amplitude limit of the detector network, and discrete
//! convolution of densities on uniform grids.

use ndarray::{Array1, Array2, Axis};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::fock::{self, DensityOperator};
use crate::grid::{Density1D, Density2D, Grid1D, Grid2D};
use crate::optics::BeamSplitter;

/// Eigenvalue weights below this are dropped from spectral decompositions.
const WEIGHT_FLOOR: f64 = 1e-14;

/// Warn when a density's grid captures less than this much probability.
const COVERAGE_FLOOR: f64 = 1.0 - 1e-6;

/// Distribution density of the rotated quadrature Q_θ in state ρ:
///
/// p(x) = Σ_{m,n} ρ_{mn} e^{iθ(n−m)} h_m(x) h_n(x),
///
/// i.e. the position density of R(θ)†·ρ·R(θ).
pub fn quadrature_density(rho: &DensityOperator, theta: f64, grid: &Grid1D) -> Result<Density1D> {
    let d = rho.dim();
    let h = fock::hermite_values(&grid.points(), d - 1).mapv(|v| C64::new(v, 0.0));
    // ρ' = R(θ)†ρR(θ): row m picks up e^{−iθm}, column n picks up e^{iθn}
    let mut rot = rho.matrix().clone();
    for m in 0..d {
        for n in 0..d {
            rot[(m, n)] *= C64::from_polar(1.0, theta * (n as f64 - m as f64));
        }
    }
    let m = rot.dot(&h); // d × npts
    let values = Array1::from_iter(
        (0..grid.count()).map(|k| (0..d).map(|i| (h[(i, k)] * m[(i, k)]).re).sum::<f64>()),
    );
    let density = Density1D::new(*grid, values)?;
    let mass = density.mass();
    if mass < COVERAGE_FLOOR * rho.trace() {
        log::warn!("quadrature grid captures only {mass:.8} of the distribution; widen it");
    }
    Ok(density)
}

/// Joint outcome density of the high-amplitude limit: the distribution of
/// (Q on mode 1) × (Q_θ on mode 2) in the state U₁₂(ρ⊗σ)U₁₂†, with both
/// outcome sets rescaled by √2.
///
/// Concretely, density(x, y) = ½·f(x/√2, y/√2) where f is the joint
/// position/rotated-position density of the beam-split two-mode state; the
/// ½ is the Jacobian of the rescaling. Computed through the spectral
/// decomposition of ρ and σ, which keeps the two-mode work linear in the
/// number of significant eigenvalues.
pub fn limit_rhs_density(
    rho: &DensityOperator,
    sigma: &DensityOperator,
    theta: f64,
    grid: &Grid2D,
) -> Result<Density2D> {
    let d = rho.dim();
    if sigma.dim() != d {
        return Err(Error::DimensionMismatch { left: d, right: sigma.dim() });
    }
    let splitter = BeamSplitter::new(d);
    let rho_parts = rho.spectral(WEIGHT_FLOOR)?;
    let sigma_parts = sigma.spectral(WEIGHT_FLOOR)?;

    // Hermite bases at the rescaled outcome points u = x/√2, v = y/√2.
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let hx = fock::hermite_values(&grid.x.scaled(inv_sqrt2).points(), d - 1).mapv(|v| C64::new(v, 0.0));
    let hy = fock::hermite_values(&grid.y.scaled(inv_sqrt2).points(), d - 1);
    // mode-2 vectors pick up the R(θ)† phases: ψ_v(n) = e^{−iθn} h_n(v)
    let mut hy_phased = hy.mapv(|v| C64::new(v, 0.0));
    for n in 0..d {
        let phase = C64::from_polar(1.0, -theta * n as f64);
        hy_phased.row_mut(n).mapv_inplace(|c| c * phase);
    }

    let (nx, ny) = grid.shape();
    let mut values: Array2<f64> = Array2::zeros((nx, ny));
    for (w_r, v_r) in &rho_parts {
        for (w_s, v_s) in &sigma_parts {
            let weight = w_r * w_s;
            if weight < WEIGHT_FLOOR {
                continue;
            }
            let joint = fock::compose_states(
                &fock::StateVector::new(v_r.clone()),
                &fock::StateVector::new(v_s.clone()),
            );
            let chi = splitter.apply(joint.amplitudes());
            // amplitude(u, v) = Σ_{mn} h_m(u)·e^{−iθn}h_n(v)·χ[m,n]
            let chi_mat = chi.into_shape_with_order((d, d)).expect("χ reshapes to d×d");
            let amp = hx.t().dot(&chi_mat).dot(&hy_phased);
            values.zip_mut_with(&amp, |acc, a| *acc += weight * a.norm_sqr());
        }
    }
    values.mapv_inplace(|v| 0.5 * v);
    let density = Density2D::new(*grid, values)?;
    let mass = density.mass();
    if mass < COVERAGE_FLOOR * rho.trace() * sigma.trace() {
        log::warn!("limit grid captures only {mass:.8} of the distribution; widen it");
    }
    Ok(density)
}

/// Discrete convolution of two densities on equally spaced grids:
/// out(x) = Σ_j kernel(x_j)·base(x − x_j)·Δ on the extended grid whose
/// bounds are the sums of the inputs' bounds. Mass is preserved up to the
/// mass the inputs leave outside their grids.
pub fn convolve_density(kernel: &Density1D, base: &Density1D) -> Result<Density1D> {
    kernel.grid().same_spacing(base.grid())?;
    let dx = kernel.grid().spacing();
    let (nk, nb) = (kernel.grid().count(), base.grid().count());
    let out_grid = Grid1D::new(
        kernel.grid().min() + base.grid().min(),
        kernel.grid().max() + base.grid().max(),
        nk + nb - 1,
    )?;
    let kv = kernel.values();
    let bv = base.values();
    let mut out = Array1::zeros(nk + nb - 1);
    for i in 0..nk {
        for j in 0..nb {
            out[i + j] += kv[i] * bv[j] * dx;
        }
    }
    Density1D::new(out_grid, out)
}

/// Convolve a 2D density along one axis with a 1D kernel; the grid extends
/// along that axis exactly as in [`convolve_density`].
pub fn convolve_axis(kernel: &Density1D, base: &Density2D, axis: Axis) -> Result<Density2D> {
    let base_axis_grid = match axis {
        Axis(0) => base.grid().x,
        _ => base.grid().y,
    };
    kernel.grid().same_spacing(&base_axis_grid)?;
    let dx = kernel.grid().spacing();
    let nk = kernel.grid().count();
    let nb = base_axis_grid.count();
    let ext = Grid1D::new(
        kernel.grid().min() + base_axis_grid.min(),
        kernel.grid().max() + base_axis_grid.max(),
        nk + nb - 1,
    )?;
    let kv = kernel.values();
    let (nx, ny) = base.grid().shape();
    let (out_grid, mut out) = match axis {
        Axis(0) => (Grid2D::new(ext, base.grid().y), Array2::zeros((nk + nb - 1, ny))),
        _ => (Grid2D::new(base.grid().x, ext), Array2::zeros((nx, nk + nb - 1))),
    };
    for i in 0..nk {
        for j in 0..nb {
            let w = kv[i] * dx;
            match axis {
                Axis(0) => {
                    for c in 0..ny {
                        out[(i + j, c)] += w * base.values()[(j, c)];
                    }
                }
                _ => {
                    for r in 0..nx {
                        out[(r, i + j)] += w * base.values()[(r, j)];
                    }
                }
            }
        }
    }
    Density2D::new(out_grid, out)
}
