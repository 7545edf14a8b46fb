//! Truncated Fock-space states and operators.
//!
//! Everything lives in the number basis {|0⟩, …, |d−1⟩} of a single mode
//! (or the tensor product of two such bases). The cutoff d has to be chosen
//! so that the states of interest carry negligible weight above it; the
//! rule of thumb exposed by [`suggested_cutoff`] keeps the Poisson tail of a
//! coherent state below ~1e−10.

use ndarray::{Array1, Array2, ArrayView2};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::grid::Grid1D;
use crate::linalg;

/// Default tolerance for normalization deficits caused by truncation.
pub const DEFAULT_TAIL_TOL: f64 = 1e-10;

/// Tolerance on Hermiticity of density matrices.
pub const HERMITICITY_TOL: f64 = 1e-12;

/// Eigenvalues of density matrices may undershoot zero by this much.
pub const POSITIVITY_TOL: f64 = 1e-10;

/// Smallest cutoff that keeps the Poisson tail of a coherent state with
/// amplitude `amp` below ~1e−10: ⌈|α|² + 6|α| + 10⌉.
pub fn suggested_cutoff(amp: f64) -> usize {
    (amp * amp + 6.0 * amp + 10.0).ceil() as usize
}

/// Validated Fock-space dimension (number of retained levels).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FockCutoff(usize);

impl FockCutoff {
    pub fn new(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::CutoffTooSmall(d));
        }
        Ok(Self(d))
    }

    /// Smallest valid cutoff for a coherent amplitude, per [`suggested_cutoff`].
    pub fn for_amplitude(amp: f64) -> Self {
        Self(suggested_cutoff(amp).max(2))
    }

    pub fn dim(self) -> usize {
        self.0
    }
}

impl std::fmt::Display for FockCutoff {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/* Pure states ***************************************************************/

/// Pure state as a complex amplitude vector in the number basis.
#[derive(Debug, Clone)]
pub struct StateVector {
    amps: Array1<C64>,
}

impl StateVector {
    pub fn new(amps: Array1<C64>) -> Self {
        Self { amps }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &Array1<C64> {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|c| c.norm_sqr()).sum()
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &Self) -> C64 {
        self.amps
            .iter()
            .zip(other.amps.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn to_density(&self) -> DensityOperator {
        let d = self.dim();
        let mut m = Array2::zeros((d, d));
        for i in 0..d {
            for j in 0..d {
                m[(i, j)] = self.amps[i] * self.amps[j].conj();
            }
        }
        DensityOperator { mat: m }
    }
}

/// Coherent state |z⟩ truncated at `d` levels, with the default tail
/// tolerance. Fails if the Poisson weight lost to truncation exceeds it.
pub fn coherent_state(z: C64, d: usize) -> Result<StateVector> {
    coherent_state_with_tol(z, d, DEFAULT_TAIL_TOL)
}

pub fn coherent_state_with_tol(z: C64, d: usize, tail_tol: f64) -> Result<StateVector> {
    FockCutoff::new(d)?;
    let mut amps = Array1::zeros(d);
    // c_{n+1} = c_n · z/√(n+1), starting from the vacuum weight
    let mut c = C64::new((-z.norm_sqr() / 2.0).exp(), 0.0);
    for n in 0..d {
        amps[n] = c;
        c *= z / ((n + 1) as f64).sqrt();
    }
    let state = StateVector::new(amps);
    let tail = 1.0 - state.norm_sqr();
    if tail > tail_tol {
        return Err(Error::TruncationTail {
            cutoff: d,
            amplitude: z.norm(),
            tail,
            tolerance: tail_tol,
            suggested: suggested_cutoff(z.norm()),
        });
    }
    Ok(state)
}

/// Number state |n⟩ in a `d`-level truncation.
pub fn number_state(n: usize, d: usize) -> Result<StateVector> {
    FockCutoff::new(d)?;
    if n >= d {
        return Err(Error::LevelOutOfRange { n, cutoff: d });
    }
    let mut amps = Array1::zeros(d);
    amps[n] = C64::new(1.0, 0.0);
    Ok(StateVector::new(amps))
}

/* Density operators *********************************************************/

/// Positive unit-trace operator on the truncated space.
///
/// Construction from a raw matrix verifies Hermiticity, positivity and the
/// trace; the named constructors build matrices that satisfy the invariants
/// by design.
#[derive(Debug, Clone)]
pub struct DensityOperator {
    mat: Array2<C64>,
}

impl DensityOperator {
    /// Validates a raw matrix against all invariants (trace within the
    /// default tail tolerance of 1).
    pub fn from_matrix(mat: Array2<C64>) -> Result<Self> {
        Self::from_matrix_with_tol(mat, DEFAULT_TAIL_TOL)
    }

    pub fn from_matrix_with_tol(mat: Array2<C64>, trace_tol: f64) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::DimensionMismatch { left: mat.nrows(), right: mat.ncols() });
        }
        FockCutoff::new(mat.nrows())?;
        let defect = linalg::hermiticity_defect(&mat.view());
        if defect > HERMITICITY_TOL {
            return Err(Error::NotHermitian { defect });
        }
        let (vals, _) = linalg::hermitian_eigh(&mat)?;
        let min_eig = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        if min_eig < -POSITIVITY_TOL {
            return Err(Error::NotPositive { min_eigenvalue: min_eig });
        }
        let trace = linalg::trace(&mat.view()).re;
        if (trace - 1.0).abs() > trace_tol {
            return Err(Error::TraceDeficit { trace, tolerance: trace_tol });
        }
        Ok(Self { mat })
    }

    /// For matrices valid by construction (unitary conjugations of valid
    /// states, convex mixtures, …).
    pub(crate) fn from_unchecked(mat: Array2<C64>) -> Self {
        Self { mat }
    }

    pub fn from_pure(state: &StateVector) -> Self {
        state.to_density()
    }

    pub fn vacuum(d: usize) -> Self {
        let mut m = Array2::zeros((d, d));
        m[(0, 0)] = C64::new(1.0, 0.0);
        Self { mat: m }
    }

    pub fn fock(n: usize, d: usize) -> Result<Self> {
        Ok(number_state(n, d)?.to_density())
    }

    pub fn coherent(z: C64, d: usize) -> Result<Self> {
        Ok(coherent_state(z, d)?.to_density())
    }

    /// Thermal state with mean occupation `nbar`, renormalized over the
    /// retained levels (the geometric tail is negligible at sane cutoffs).
    pub fn thermal(nbar: f64, d: usize) -> Result<Self> {
        FockCutoff::new(d)?;
        if !(nbar >= 0.0) {
            return Err(Error::InvalidThermalOccupation(nbar));
        }
        let mut m = Array2::zeros((d, d));
        if nbar == 0.0 {
            m[(0, 0)] = C64::new(1.0, 0.0);
            return Ok(Self { mat: m });
        }
        let ratio = nbar / (1.0 + nbar);
        let mut w = 1.0 / (1.0 + nbar);
        let mut total = 0.0;
        for n in 0..d {
            m[(n, n)] = C64::new(w, 0.0);
            total += w;
            w *= ratio;
        }
        let tail = 1.0 - total;
        if tail > DEFAULT_TAIL_TOL {
            return Err(Error::TruncationTail {
                cutoff: d,
                amplitude: nbar.sqrt(),
                tail,
                tolerance: DEFAULT_TAIL_TOL,
                suggested: (((DEFAULT_TAIL_TOL).ln() / ratio.ln()).ceil() as usize).max(d + 1),
            });
        }
        m.mapv_inplace(|c| c / total);
        Ok(Self { mat: m })
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.mat
    }

    pub fn trace(&self) -> f64 {
        linalg::trace(&self.mat.view()).re
    }

    /// tr[ρ·op].
    pub fn expectation(&self, op: &ArrayView2<C64>) -> C64 {
        linalg::trace_product(&self.mat.view(), op)
    }

    /// Action of the conjugation map: entrywise complex conjugate in the
    /// number basis. This is the correct Fock-basis form because the
    /// position wavefunctions of the number states are real, so the
    /// coordinate-representation conjugation fixes every |n⟩.
    pub fn conjugated(&self) -> Self {
        Self { mat: self.mat.mapv(|c| c.conj()) }
    }

    /// U·ρ·U† for a unitary `u`; positivity and trace are preserved.
    pub fn conjugate_by(&self, u: &ArrayView2<C64>) -> Self {
        let ua = linalg::adjoint(u);
        Self { mat: u.dot(&self.mat).dot(&ua) }
    }

    /// Spectral decomposition with eigenvalues below `weight_floor` dropped
    /// (slightly negative roundoff eigenvalues included). Returned in
    /// descending weight order.
    pub fn spectral(&self, weight_floor: f64) -> Result<Vec<(f64, Array1<C64>)>> {
        let (vals, vecs) = linalg::hermitian_eigh(&self.mat)?;
        let mut pairs: Vec<(f64, Array1<C64>)> = vals
            .iter()
            .enumerate()
            .filter(|(_, w)| **w > weight_floor)
            .map(|(i, w)| (*w, vecs.column(i).to_owned()))
            .collect();
        pairs.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
        Ok(pairs)
    }
}

/* Mode operators ************************************************************/

/// Annihilation operator a, ⟨n−1|a|n⟩ = √n.
pub fn annihilation(d: usize) -> Array2<C64> {
    let mut a = Array2::zeros((d, d));
    for n in 1..d {
        a[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
    }
    a
}

/// Creation operator a†.
pub fn creation(d: usize) -> Array2<C64> {
    let mut a = Array2::zeros((d, d));
    for n in 1..d {
        a[(n, n - 1)] = C64::new((n as f64).sqrt(), 0.0);
    }
    a
}

/// Number operator N = a†a (diagonal).
pub fn number_operator(d: usize) -> Array2<C64> {
    Array2::from_diag(&Array1::from_iter((0..d).map(|n| C64::new(n as f64, 0.0))))
}

/// Rotated quadrature Q_θ = (e^{iθ}a† + e^{−iθ}a)/√2.
pub fn quadrature_operator(theta: f64, d: usize) -> Array2<C64> {
    let mut q = Array2::zeros((d, d));
    let phase = C64::from_polar(std::f64::consts::FRAC_1_SQRT_2, theta);
    for n in 1..d {
        let x = (n as f64).sqrt();
        q[(n, n - 1)] = phase * x;
        q[(n - 1, n)] = phase.conj() * x;
    }
    q
}

/// Position quadrature Q = Q_0.
pub fn position_operator(d: usize) -> Array2<C64> {
    quadrature_operator(0.0, d)
}

/// Momentum quadrature P = Q_{π/2}.
pub fn momentum_operator(d: usize) -> Array2<C64> {
    quadrature_operator(std::f64::consts::FRAC_PI_2, d)
}

/* Hermite functions *********************************************************/

/// Hermite functions h_0 … h_nmax evaluated on a grid, row n = h_n(x_k).
///
/// Uses the stable two-term recurrence
/// h_{n+1} = √(2/(n+1))·x·h_n − √(n/(n+1))·h_{n−1}
/// seeded with h_0(x) = π^{−1/4}·e^{−x²/2}. Warns if the grid does not
/// reach the classical turning point of h_nmax, which matters when the
/// values feed a quadrature rule (pointwise evaluation on a narrow window
/// is fine and can use [`hermite_values`] directly).
pub fn hermite_basis(grid: &Grid1D, nmax: usize) -> Array2<f64> {
    let needed = (2.0 * nmax as f64).sqrt() + 2.0;
    if grid.max() < needed || grid.min() > -needed {
        log::warn!(
            "hermite grid [{}, {}] does not cover ±{:.2}; quadrature over it will miss weight",
            grid.min(),
            grid.max(),
            needed
        );
    }
    hermite_values(&grid.points(), nmax)
}

/// [`hermite_basis`] without the quadrature-coverage warning.
pub fn hermite_values(x: &Array1<f64>, nmax: usize) -> Array2<f64> {
    let npts = x.len();
    let mut h = Array2::zeros((nmax + 1, npts));
    let norm0 = std::f64::consts::PI.powf(-0.25);
    for (k, xk) in x.iter().enumerate() {
        h[(0, k)] = norm0 * (-xk * xk / 2.0).exp();
    }
    if nmax == 0 {
        return h;
    }
    for (k, xk) in x.iter().enumerate() {
        h[(1, k)] = std::f64::consts::SQRT_2 * xk * h[(0, k)];
    }
    for n in 1..nmax {
        let a = (2.0 / (n as f64 + 1.0)).sqrt();
        let b = (n as f64 / (n as f64 + 1.0)).sqrt();
        for (k, xk) in x.iter().enumerate() {
            h[(n + 1, k)] = a * xk * h[(n, k)] - b * h[(n - 1, k)];
        }
    }
    h
}

/* Two-mode composition ******************************************************/

/// Which mode of a two-mode operator to keep under a partial trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    First,
    Second,
}

/// Kronecker composition A⊗B with the first mode as the slow index:
/// row (m₁·d₂ + m₂), matching the ρ⊗σ ordering used everywhere here.
pub fn compose_two_mode(a: &ArrayView2<C64>, b: &ArrayView2<C64>) -> Array2<C64> {
    ndarray::linalg::kron(a, b)
}

/// Tensor product of two state vectors, first mode slow.
pub fn compose_states(a: &StateVector, b: &StateVector) -> StateVector {
    let (da, db) = (a.dim(), b.dim());
    let mut out = Array1::zeros(da * db);
    for i in 0..da {
        for j in 0..db {
            out[i * db + j] = a.amplitudes()[i] * b.amplitudes()[j];
        }
    }
    StateVector::new(out)
}

/// Partial trace of a two-mode operator with per-mode dimensions `dims`,
/// keeping the requested mode. Preserves the trace exactly.
pub fn reduce(tau: &ArrayView2<C64>, dims: (usize, usize), keep: Mode) -> Result<Array2<C64>> {
    let (d1, d2) = dims;
    if tau.nrows() != d1 * d2 || tau.ncols() != d1 * d2 {
        return Err(Error::DimensionMismatch { left: tau.nrows(), right: d1 * d2 });
    }
    match keep {
        Mode::First => {
            let mut out = Array2::zeros((d1, d1));
            for m in 0..d1 {
                for n in 0..d1 {
                    let mut acc = C64::new(0.0, 0.0);
                    for k in 0..d2 {
                        acc += tau[(m * d2 + k, n * d2 + k)];
                    }
                    out[(m, n)] = acc;
                }
            }
            Ok(out)
        }
        Mode::Second => {
            let mut out = Array2::zeros((d2, d2));
            for m in 0..d2 {
                for n in 0..d2 {
                    let mut acc = C64::new(0.0, 0.0);
                    for k in 0..d1 {
                        acc += tau[(k * d2 + m, k * d2 + n)];
                    }
                    out[(m, n)] = acc;
                }
            }
            Ok(out)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{identity, max_abs_diff, max_abs_diff_block};
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    const I: C64 = C64::new(0.0, 1.0);

    /// Poisson tail Σ_{n≥d} e^{−|z|²}|z|^{2n}/n!, summed directly.
    fn poisson_tail(z_abs: f64, d: usize) -> f64 {
        let lam = z_abs * z_abs;
        let mut term = (-lam).exp();
        let mut head = 0.0;
        for n in 0..d {
            head += term;
            term *= lam / (n as f64 + 1.0);
        }
        1.0 - head
    }

    #[test]
    fn coherent_vacuum_is_ground_state() {
        let s = coherent_state(C64::new(0.0, 0.0), 8).unwrap();
        assert_eq!(s.amplitudes()[0], C64::new(1.0, 0.0));
        assert!(s.amplitudes().iter().skip(1).all(|c| c.norm() == 0.0));
    }

    #[test]
    fn coherent_norm_matches_poisson_tail() {
        let s = coherent_state(C64::new(1.0, 0.0), 30).unwrap();
        assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
        // the deficit itself equals the analytic tail
        for d in [5, 8, 12] {
            let s = coherent_state_with_tol(C64::new(1.2, -0.3), d, 1.0).unwrap();
            let tail = poisson_tail((1.2f64 * 1.2 + 0.09).sqrt(), d);
            assert!(
                ((1.0 - s.norm_sqr()) - tail).abs() < 1e-12,
                "d = {d}: {} vs {tail}",
                1.0 - s.norm_sqr()
            );
        }
    }

    #[test]
    fn coherent_overlap_closed_form() {
        let z = C64::new(1.0, 0.0);
        let w = I;
        let a = coherent_state(z, 40).unwrap();
        let b = coherent_state(w, 40).unwrap();
        let expect = ((-(z.norm_sqr() + w.norm_sqr()) / 2.0) + z.conj() * w).exp();
        assert!((a.inner(&b) - expect).norm() < 1e-10);
    }

    #[test]
    fn coherent_truncation_error_suggests_cutoff() {
        let err = coherent_state(C64::new(3.0, 0.0), 10).unwrap_err();
        match err {
            Error::TruncationTail { suggested, .. } => {
                assert_eq!(suggested, suggested_cutoff(3.0));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn ladder_matrix_elements() {
        let d = 6;
        let q = position_operator(d);
        // ⟨0|Q|1⟩ = 1/√2
        assert!((q[(0, 1)] - C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
        let n_op = number_operator(d);
        let ada = creation(d).dot(&annihilation(d));
        assert!(max_abs_diff(&n_op.view(), &ada.view()) < 1e-14);
    }

    #[test]
    fn canonical_commutator_on_low_levels() {
        let d = 24;
        let q = position_operator(d);
        let p = momentum_operator(d);
        let comm = q.dot(&p) - p.dot(&q);
        let expect = identity(d).mapv(|c| c * I);
        assert!(max_abs_diff_block(&comm.view(), &expect.view(), d - 2) < 1e-12);
    }

    #[test]
    fn rotated_quadrature_is_phase_conjugated_position() {
        let d = 18;
        let theta = 0.9;
        let q_theta = quadrature_operator(theta, d);
        // R(θ)·Q·R(θ)† with R diagonal e^{iθn}
        let q = position_operator(d);
        let mut conj = q.clone();
        for m in 0..d {
            for n in 0..d {
                conj[(m, n)] = q[(m, n)] * C64::from_polar(1.0, theta * (m as f64 - n as f64));
            }
        }
        assert!(max_abs_diff(&q_theta.view(), &conj.view()) < 1e-12);
    }

    #[test]
    fn hermite_values_and_recurrence_seed() {
        let grid = Grid1D::new(-5.0, 5.0, 501).unwrap();
        let h = hermite_basis(&grid, 3);
        // h_0(0) = π^{−1/4}
        let mid = 250;
        assert!((h[(0, mid)] - 0.7511255444649425).abs() < 1e-12);
        // h_1 = √2·x·h_0 exactly by the recurrence
        for (k, x) in grid.points().iter().enumerate() {
            assert_eq!(h[(1, k)], std::f64::consts::SQRT_2 * x * h[(0, k)]);
        }
    }

    #[test]
    fn hermite_orthonormal_under_quadrature() {
        let grid = Grid1D::new(-11.0, 11.0, 1101).unwrap();
        let nmax = 20;
        let h = hermite_basis(&grid, nmax);
        let w = grid.trapezoid_weights();
        for m in 0..=nmax {
            for n in m..=nmax {
                let ip: f64 = (0..grid.count()).map(|k| w[k] * h[(m, k)] * h[(n, k)]).sum();
                let expect = if m == n { 1.0 } else { 0.0 };
                assert!((ip - expect).abs() < 1e-8, "⟨h_{m}, h_{n}⟩ = {ip}");
            }
        }
    }

    #[test]
    fn hermite_matches_rodrigues_polynomials() {
        // independent route: physicists' Hermite polynomial coefficients via
        // H_{n+1} = 2x·H_n − 2n·H_{n−1}, then normalize
        let nmax = 10;
        let mut coeffs: Vec<Vec<f64>> = vec![vec![1.0], vec![0.0, 2.0]];
        for n in 1..nmax {
            let mut next = vec![0.0; n + 2];
            for (k, c) in coeffs[n].iter().enumerate() {
                next[k + 1] += 2.0 * c;
            }
            for (k, c) in coeffs[n - 1].iter().enumerate() {
                next[k] -= 2.0 * n as f64 * c;
            }
            coeffs.push(next);
        }
        let grid = Grid1D::new(-5.0, 5.0, 201).unwrap();
        let h = hermite_basis(&grid, nmax);
        for n in 0..=nmax {
            // normalization 1/√(2ⁿ n! √π)
            let mut log_fact = 0.0;
            for k in 1..=n {
                log_fact += (k as f64).ln();
            }
            let norm = (-(0.5 * (n as f64 * std::f64::consts::LN_2 + log_fact))
                - 0.25 * std::f64::consts::PI.ln())
            .exp();
            for (k, x) in grid.points().iter().enumerate() {
                let poly: f64 = coeffs[n]
                    .iter()
                    .enumerate()
                    .map(|(j, c)| c * x.powi(j as i32))
                    .sum();
                let expect = norm * poly * (-x * x / 2.0).exp();
                assert!(
                    (h[(n, k)] - expect).abs() < 1e-9,
                    "n = {n}, x = {x}: {} vs {expect}",
                    h[(n, k)]
                );
            }
        }
    }

    #[test]
    fn density_validation_catches_defects() {
        let d = 4;
        let mut bad = DensityOperator::vacuum(d).matrix().clone();
        bad[(0, 1)] = C64::new(0.5, 0.0); // not Hermitian
        assert!(matches!(
            DensityOperator::from_matrix(bad),
            Err(Error::NotHermitian { .. })
        ));

        let mut neg = Array2::zeros((d, d));
        neg[(0, 0)] = C64::new(1.5, 0.0);
        neg[(1, 1)] = C64::new(-0.5, 0.0);
        assert!(matches!(
            DensityOperator::from_matrix(neg),
            Err(Error::NotPositive { .. })
        ));

        let half = DensityOperator::vacuum(d).matrix().mapv(|c| c * 0.5);
        assert!(matches!(
            DensityOperator::from_matrix(half),
            Err(Error::TraceDeficit { .. })
        ));
    }

    #[test]
    fn thermal_state_geometric_weights() {
        let rho = DensityOperator::thermal(0.5, 40).unwrap();
        assert!((rho.trace() - 1.0).abs() < 1e-14);
        let ratio = (rho.matrix()[(1, 1)] / rho.matrix()[(0, 0)]).re;
        assert!((ratio - 1.0 / 3.0).abs() < 1e-12);
        let n_mean = rho.expectation(&number_operator(40).view()).re;
        assert!((n_mean - 0.5).abs() < 1e-10);
    }

    #[test]
    fn conjugated_coherent_state() {
        let z = C64::new(1.0, 1.0);
        let rho = DensityOperator::coherent(z, 40).unwrap();
        let expect = DensityOperator::coherent(z.conj(), 40).unwrap();
        assert!(max_abs_diff(&rho.conjugated().matrix().view(), &expect.matrix().view()) < 1e-10);
        // involution
        let twice = rho.conjugated().conjugated();
        assert!(max_abs_diff(&twice.matrix().view(), &rho.matrix().view()) == 0.0);
    }

    #[test]
    fn compose_and_reduce_round_trip() {
        let d = 5;
        let id = identity(d * d);
        let composed = compose_two_mode(&identity(d).view(), &identity(d).view());
        assert!(max_abs_diff(&composed.view(), &id.view()) == 0.0);

        let mut mixed = Array2::zeros((d, d));
        mixed[(0, 0)] = C64::new(0.5, 0.0);
        mixed[(1, 1)] = C64::new(0.3, 0.0);
        mixed[(0, 2)] = C64::new(0.1, 0.05);
        mixed[(2, 0)] = C64::new(0.1, -0.05);
        mixed[(2, 2)] = C64::new(0.2, 0.0);
        let sigma = DensityOperator::from_matrix(mixed).unwrap();
        let tau = compose_two_mode(
            &DensityOperator::vacuum(d).matrix().view(),
            &sigma.matrix().view(),
        );
        let back = reduce(&tau.view(), (d, d), Mode::Second).unwrap();
        assert!(max_abs_diff(&back.view(), &sigma.matrix().view()) == 0.0);

        // index order: first mode is the slow index
        let n1 = compose_two_mode(&number_operator(d).view(), &identity(d).view());
        assert_eq!(n1[(d, d)], C64::new(1.0, 0.0)); // |1,0⟩ has one photon in mode 1
    }

    #[test]
    fn partial_trace_preserves_trace_of_random_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let d = 4;
        let mut g: Array2<C64> = Array2::zeros((d * d, d * d));
        for i in 0..d * d {
            for j in 0..d * d {
                g[(i, j)] = C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
            }
        }
        // Hermitian PSD test matrix with unit trace
        let psd = g.dot(&linalg::adjoint(&g.view()));
        let tr = linalg::trace(&psd.view()).re;
        let tau = psd.mapv(|c| c / tr);
        let r1 = reduce(&tau.view(), (d, d), Mode::First).unwrap();
        let r2 = reduce(&tau.view(), (d, d), Mode::Second).unwrap();
        assert!((linalg::trace(&r1.view()).re - 1.0).abs() < 1e-14);
        assert!((linalg::trace(&r2.view()).re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn reduce_of_product_recovers_both_factors() {
        let d = 10;
        let psi = {
            let mut amps: Array1<C64> = Array1::zeros(d);
            amps[0] = C64::new(0.8, 0.0);
            amps[2] = C64::new(0.0, 0.6);
            StateVector::new(amps)
        };
        let rho = psi.to_density();
        let phi = {
            let mut amps: Array1<C64> = Array1::zeros(d);
            amps[1] = C64::new(0.6, 0.0);
            amps[3] = C64::new(-0.48, 0.64);
            StateVector::new(amps)
        };
        let sigma = phi.to_density();
        let tau = compose_two_mode(&rho.matrix().view(), &sigma.matrix().view());
        let back1 = reduce(&tau.view(), (d, d), Mode::First).unwrap();
        let back2 = reduce(&tau.view(), (d, d), Mode::Second).unwrap();
        assert!(max_abs_diff(&back1.view(), &rho.matrix().view()) < 1e-13);
        assert!(max_abs_diff(&back2.view(), &sigma.matrix().view()) < 1e-13);
    }

    #[test]
    fn spectral_reassembles_density() {
        let d = 30;
        let sigma = DensityOperator::thermal(0.7, d).unwrap();
        let parts = sigma.spectral(1e-14).unwrap();
        let mut sum: Array2<C64> = Array2::zeros((d, d));
        for (w, v) in &parts {
            for i in 0..d {
                for j in 0..d {
                    sum[(i, j)] += v[i] * v[j].conj() * *w;
                }
            }
        }
        assert!(max_abs_diff(&sum.view(), &sigma.matrix().view()) < 1e-12);
    }
}
