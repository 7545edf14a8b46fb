//! The unitary building blocks of the detector network and of the limit
//! observable: 50:50 beam splitters, phase shifters, Weyl (displacement)
//! operators and their tilted variants, the dilation that implements a
//! change of quadrature pair, and the parity operator.

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::fock::{self, suggested_cutoff};
use crate::linalg;

/// Phase shift θ of the detector network, restricted to (−π, 0) ∪ (0, π)
/// where sin θ ≠ 0 and the tilt map is invertible.
///
/// Carries the derived quantities used everywhere: sin θ, cos θ and the
/// dilation scale √((1 − cos θ)/(1 + cos θ)).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TiltAngle {
    theta: f64,
    sin: f64,
    cos: f64,
    scale: f64,
}

impl TiltAngle {
    pub fn new(theta: f64) -> Result<Self> {
        if !theta.is_finite()
            || theta <= -std::f64::consts::PI
            || theta >= std::f64::consts::PI
            || theta == 0.0
        {
            return Err(Error::InvalidTiltAngle { theta });
        }
        let (sin, cos) = theta.sin_cos();
        if sin == 0.0 {
            return Err(Error::InvalidTiltAngle { theta });
        }
        let scale = ((1.0 - cos) / (1.0 + cos)).sqrt();
        Ok(Self { theta, sin, cos, scale })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn sin_theta(&self) -> f64 {
        self.sin
    }

    pub fn cos_theta(&self) -> f64 {
        self.cos
    }

    /// Coordinate scale of the dilation operator, λ = √((1−cosθ)/(1+cosθ)).
    pub fn dilation_scale(&self) -> f64 {
        self.scale
    }

    /// Tilt map f(q, p) = (q, q·cosθ + p·sinθ).
    pub fn forward(&self, pt: PhaseSpacePoint) -> PhaseSpacePoint {
        PhaseSpacePoint::new(pt.q, pt.q * self.cos + pt.p * self.sin)
    }

    /// Inverse tilt map f⁻¹(q, p) = (q, (p − q·cosθ)/sinθ).
    pub fn inverse(&self, pt: PhaseSpacePoint) -> PhaseSpacePoint {
        PhaseSpacePoint::new(pt.q, (pt.p - pt.q * self.cos) / self.sin)
    }
}

/// A point (q, p) of the two-dimensional outcome space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseSpacePoint {
    pub q: f64,
    pub p: f64,
}

impl PhaseSpacePoint {
    pub fn new(q: f64, p: f64) -> Self {
        Self { q, p }
    }
}

/* Beam splitter **************************************************************/

/// Lossless 50:50 beam splitter on two modes, defined by its action on
/// coherent states: U |z⟩⊗|w⟩ = |(z−w)/√2⟩ ⊗ |(z+w)/√2⟩.
///
/// The matrix conserves total photon number, so it is stored and applied
/// block by block; each block is the exponential of the (antisymmetric)
/// restriction of the generator (π/4)(a b† − a† b) and is therefore exactly
/// unitary even in blocks clipped by the per-mode cutoffs.
#[derive(Debug, Clone)]
pub struct BeamSplitter {
    d1: usize,
    d2: usize,
    blocks: Vec<SplitterBlock>,
}

#[derive(Debug, Clone)]
struct SplitterBlock {
    /// Positions m·d2 + n of the block's basis states |m, n⟩, m ascending.
    index: Vec<usize>,
    mat: Array2<C64>,
}

impl BeamSplitter {
    /// Square truncation: both modes keep `d` levels.
    pub fn new(d: usize) -> Self {
        Self::rect(d, d)
    }

    /// Rectangular truncation with separate per-mode cutoffs.
    pub fn rect(d1: usize, d2: usize) -> Self {
        let mut blocks = Vec::with_capacity(d1 + d2 - 1);
        for total in 0..(d1 + d2 - 1) {
            let m_lo = total.saturating_sub(d2 - 1);
            let m_hi = total.min(d1 - 1);
            let size = m_hi - m_lo + 1;
            let index: Vec<usize> =
                (m_lo..=m_hi).map(|m| m * d2 + (total - m)).collect();
            if size == 1 {
                blocks.push(SplitterBlock {
                    index,
                    mat: Array2::from_elem((1, 1), C64::new(1.0, 0.0)),
                });
                continue;
            }
            // Hermitian i·G on the block; G = (π/4)(a b† − a† b) couples
            // |m, n⟩ → |m−1, n+1⟩ with amplitude √(m(n+1)).
            let mut h: Array2<C64> = Array2::zeros((size, size));
            for (i, m) in (m_lo..=m_hi).enumerate().skip(1) {
                let n = total - m;
                let g = std::f64::consts::FRAC_PI_4 * ((m * (n + 1)) as f64).sqrt();
                h[(i - 1, i)] = C64::new(0.0, g);
                h[(i, i - 1)] = C64::new(0.0, -g);
            }
            let (vals, vecs) = linalg::hermitian_eigh(&h).expect("tridiagonal eigh");
            let mat = linalg::recompose_phases(&vals, &vecs, -1.0);
            blocks.push(SplitterBlock { index, mat });
        }
        Self { d1, d2, blocks }
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.d1, self.d2)
    }

    pub fn joint_dim(&self) -> usize {
        self.d1 * self.d2
    }

    /// Visit every total-photon-number block as (basis positions, matrix).
    pub fn blocks(&self) -> impl Iterator<Item = (&[usize], &Array2<C64>)> {
        self.blocks.iter().map(|b| (b.index.as_slice(), &b.mat))
    }

    pub fn to_matrix(&self) -> Array2<C64> {
        let n = self.joint_dim();
        let mut out = Array2::zeros((n, n));
        for b in &self.blocks {
            for (i, &row) in b.index.iter().enumerate() {
                for (j, &col) in b.index.iter().enumerate() {
                    out[(row, col)] = b.mat[(i, j)];
                }
            }
        }
        out
    }

    /// U·v on the joint space.
    pub fn apply(&self, v: &Array1<C64>) -> Array1<C64> {
        self.apply_impl(v, false)
    }

    /// U†·v on the joint space.
    pub fn apply_adjoint(&self, v: &Array1<C64>) -> Array1<C64> {
        self.apply_impl(v, true)
    }

    fn apply_impl(&self, v: &Array1<C64>, adjoint: bool) -> Array1<C64> {
        assert_eq!(v.len(), self.joint_dim(), "vector length mismatch");
        let mut out = Array1::zeros(v.len());
        for b in &self.blocks {
            let size = b.index.len();
            for i in 0..size {
                let mut acc = C64::new(0.0, 0.0);
                for j in 0..size {
                    let u = if adjoint { b.mat[(j, i)].conj() } else { b.mat[(i, j)] };
                    acc += u * v[b.index[j]];
                }
                out[b.index[i]] = acc;
            }
        }
        out
    }

    /// U·X·U† on the joint space, exploiting the block structure.
    pub fn conjugate(&self, x: &Array2<C64>) -> Array2<C64> {
        let n = self.joint_dim();
        assert_eq!(x.dim(), (n, n), "matrix dimension mismatch");
        // left multiply: rows mix within blocks
        let mut left: Array2<C64> = Array2::zeros((n, n));
        for b in &self.blocks {
            let size = b.index.len();
            for i in 0..size {
                for col in 0..n {
                    let mut acc = C64::new(0.0, 0.0);
                    for j in 0..size {
                        acc += b.mat[(i, j)] * x[(b.index[j], col)];
                    }
                    left[(b.index[i], col)] = acc;
                }
            }
        }
        // right multiply by U†: columns mix within blocks
        let mut out: Array2<C64> = Array2::zeros((n, n));
        for b in &self.blocks {
            let size = b.index.len();
            for j in 0..size {
                for row in 0..n {
                    let mut acc = C64::new(0.0, 0.0);
                    for k in 0..size {
                        acc += left[(row, b.index[k])] * b.mat[(j, k)].conj();
                    }
                    out[(row, b.index[j])] = acc;
                }
            }
        }
        out
    }
}

/// Convenience constructor matching the network's nominal per-mode cutoff.
pub fn beam_splitter(d: usize) -> BeamSplitter {
    BeamSplitter::new(d)
}

/* Phase shifter **************************************************************/

/// R(φ) = e^{iφN}, diagonal in the number basis.
pub fn phase_shifter(phi: f64, d: usize) -> Array2<C64> {
    Array2::from_diag(&Array1::from_iter(
        (0..d).map(|n| C64::from_polar(1.0, phi * n as f64)),
    ))
}

/// Parity operator Π = (−1)^N.
pub fn parity(d: usize) -> Array2<C64> {
    Array2::from_diag(&Array1::from_iter(
        (0..d).map(|n| C64::new(if n % 2 == 0 { 1.0 } else { -1.0 }, 0.0)),
    ))
}

/* Weyl operators *************************************************************/

/// Factory for Weyl operators W(q, p) = exp(i(pQ − qP)) at a fixed cutoff.
///
/// The anti-Hermitian generator is exponentiated through one cached
/// eigendecomposition: W(q, p) = R(φ)·exp(r(a†−a))·R(φ)† with
/// r·e^{iφ} = (q + ip)/√2, so every displacement is exactly unitary and
/// costs a single matrix product. Accuracy holds on the lower part of the
/// spectrum; a displacement that pushes significant weight past the cutoff
/// logs a warning.
#[derive(Debug, Clone)]
pub struct WeylEngine {
    d: usize,
    evals: Array1<f64>,
    evecs: Array2<C64>,
}

impl WeylEngine {
    pub fn new(d: usize) -> Self {
        // K = i(a† − a) is Hermitian; exp(r(a†−a)) = exp(−i·r·K)
        let mut k: Array2<C64> = Array2::zeros((d, d));
        for n in 1..d {
            let x = (n as f64).sqrt();
            k[(n, n - 1)] = C64::new(0.0, x);
            k[(n - 1, n)] = C64::new(0.0, -x);
        }
        let (evals, evecs) = linalg::hermitian_eigh(&k).expect("displacement generator eigh");
        Self { d, evals, evecs }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// W(q, p); equal to the displacement D(α) with α = (q + ip)/√2.
    pub fn weyl(&self, q: f64, p: f64) -> Array2<C64> {
        let alpha = C64::new(q, p) / std::f64::consts::SQRT_2;
        let r = alpha.norm();
        if suggested_cutoff(r) > self.d {
            log::warn!(
                "displacement |α| = {r:.2} strains cutoff {}; suggest ≥ {}",
                self.d,
                suggested_cutoff(r)
            );
        }
        if r == 0.0 {
            return linalg::identity(self.d);
        }
        let phi = alpha.arg();
        let mut w = linalg::recompose_phases(&self.evals, &self.evecs, -r);
        for m in 0..self.d {
            for n in 0..self.d {
                w[(m, n)] *= C64::from_polar(1.0, phi * (m as f64 - n as f64));
            }
        }
        w
    }

    /// Tilted Weyl operator W_θ(q, p) = W(f_θ⁻¹(q, p)).
    pub fn tilted(&self, tilt: &TiltAngle, q: f64, p: f64) -> Array2<C64> {
        let pt = tilt.inverse(PhaseSpacePoint::new(q, p));
        self.weyl(pt.q, pt.p)
    }
}

/// One-off W(q, p) at cutoff `d`; heavy grid evaluations should share a
/// [`WeylEngine`] instead.
pub fn weyl(q: f64, p: f64, d: usize) -> Array2<C64> {
    WeylEngine::new(d).weyl(q, p)
}

/// One-off W_θ(q, p) at cutoff `d`.
pub fn tilted_weyl(tilt: &TiltAngle, q: f64, p: f64, d: usize) -> Array2<C64> {
    WeylEngine::new(d).tilted(tilt, q, p)
}

/* Dilation and tilt conjugator ***********************************************/

/// Dilation A_θ, defined in the coordinate representation by
/// (A_θ ψ)(x) = √λ·ψ(λx) with λ the tilt's dilation scale.
///
/// Built as exp(i·lnλ·(QP+PQ)/2), the exponential of the truncated
/// dilation generator, which keeps every cutoff exactly unitary; on the
/// lower part of the spectrum this agrees with the quadrature of the
/// coordinate kernel ⟨m|A_θ|n⟩ = √λ ∫ h_m(x) h_n(λx) dx (checked in the
/// tests). The parity selection rule (zero unless m + n is even) holds
/// exactly and is enforced against roundoff.
pub fn dilation(tilt: &TiltAngle, d: usize) -> Array2<C64> {
    let lambda = tilt.dilation_scale();
    let q = fock::position_operator(d);
    let p = fock::momentum_operator(d);
    let half_log = C64::new(0.5 * lambda.ln(), 0.0);
    let gen = (q.dot(&p) + p.dot(&q)).mapv(|c| c * half_log);
    let mut a = linalg::expi_hermitian(&gen).expect("dilation generator eigh");
    for m in 0..d {
        for n in 0..d {
            if (m + n) % 2 == 1 {
                a[(m, n)] = C64::new(0.0, 0.0);
            }
        }
    }
    a
}

/// Tilt conjugator V_θ: the unitary carrying the standard generating
/// operator to the tilted one,
/// V_θ = R((θ−π)/2)·A_θ·R(θ/2) for θ ∈ (0, π) and
/// V_θ = R((θ+π)/2)·A_θ·R(θ/2) for θ ∈ (−π, 0).
pub fn tilt_conjugator(tilt: &TiltAngle, d: usize) -> Array2<C64> {
    let theta = tilt.theta();
    let outer = if theta > 0.0 {
        (theta - std::f64::consts::PI) / 2.0
    } else {
        (theta + std::f64::consts::PI) / 2.0
    };
    let inner = theta / 2.0;
    let mut v = dilation(tilt, d);
    // diagonal phase shifters act as row/column scalings
    for m in 0..d {
        let row_phase = C64::from_polar(1.0, outer * m as f64);
        for n in 0..d {
            let col_phase = C64::from_polar(1.0, inner * n as f64);
            v[(m, n)] *= row_phase * col_phase;
        }
    }
    v
}
