//! Finite-amplitude model of the eight-port detector network: signal and
//! parameter states meet at one beam splitter, a local oscillator is split
//! against vacuum at another, and each output arm interferes signal with
//! oscillator before two photon counters whose scaled count difference is
//! recorded.
//!
//! Port conventions. `lo_split` follows the defining coherent action with
//! the vacuum on the dashed (primary) port, so the oscillator |√2·z⟩
//! arrives at the arms as (−z, z), and the phase shifter multiplies the
//! second arm's amplitude by e^{iθ}. On the first arm the oscillator
//! enters the *dashed* port of the arm splitter; reflecting the splitter
//! that way is equivalent to flipping the sign of the oscillator amplitude
//! in the standard orientation, which is how [`arm_povm`] receives it.
//! This is the unique assignment (up to unobservable phases) under which
//! the scaled difference statistics converge, as the oscillator amplitude
//! grows, to the joint distribution of (Q, Q_θ) after the signal splitter
//! — the convergence is exercised by the acceptance suite.

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::fock::{self, coherent_state, DensityOperator};
use crate::grid::{Density2D, Grid1D, Grid2D};
use crate::observable::EfficiencyQuad;
use crate::optics::{BeamSplitter, TiltAngle};

/// Histogram mass below this aborts with a truncation error.
pub const MASS_FLOOR: f64 = 1.0 - 1e-4;

/// Cutoff heuristic for the oscillator-carrying modes: Poisson bulk plus
/// the spread of the count difference, 2|z|² + 8|z| + 12.
pub fn lo_cutoff_heuristic(z_abs: f64) -> usize {
    (2.0 * z_abs * z_abs + 8.0 * z_abs + 12.0).ceil() as usize
}

/// Parameters of one detector run.
#[derive(Debug, Clone)]
pub struct NetworkConfig {
    tilt: TiltAngle,
    lo_amplitude: C64,
    d_signal: usize,
    d_lo: usize,
    efficiencies: EfficiencyQuad,
}

impl NetworkConfig {
    pub fn new(
        tilt: TiltAngle,
        lo_amplitude: C64,
        d_signal: usize,
        d_lo: usize,
        efficiencies: EfficiencyQuad,
    ) -> Result<Self> {
        fock::FockCutoff::new(d_signal)?;
        fock::FockCutoff::new(d_lo)?;
        let z_abs = lo_amplitude.norm();
        if z_abs == 0.0 {
            return Err(Error::ZeroLocalOscillator);
        }
        let needed = lo_cutoff_heuristic(z_abs);
        if d_lo < needed {
            return Err(Error::TruncationTail {
                cutoff: d_lo,
                amplitude: z_abs,
                tail: f64::NAN,
                tolerance: f64::NAN,
                suggested: needed,
            });
        }
        Ok(Self { tilt, lo_amplitude, d_signal, d_lo, efficiencies })
    }

    /// Ideal detectors, oscillator cutoff from the heuristic.
    pub fn recommended(tilt: TiltAngle, lo_amplitude: C64, d_signal: usize) -> Result<Self> {
        let d_lo = lo_cutoff_heuristic(lo_amplitude.norm());
        Self::new(tilt, lo_amplitude, d_signal, d_lo, EfficiencyQuad::ideal())
    }

    pub fn with_efficiencies(mut self, eff: EfficiencyQuad) -> Self {
        self.efficiencies = eff;
        self
    }

    pub fn tilt(&self) -> &TiltAngle {
        &self.tilt
    }

    pub fn lo_amplitude(&self) -> C64 {
        self.lo_amplitude
    }

    pub fn d_signal(&self) -> usize {
        self.d_signal
    }

    pub fn d_lo(&self) -> usize {
        self.d_lo
    }

    pub fn efficiencies(&self) -> &EfficiencyQuad {
        &self.efficiencies
    }

    /// Lattice spacing of the scaled count differences, 1/(√2|z|).
    pub fn outcome_spacing(&self) -> f64 {
        1.0 / (std::f64::consts::SQRT_2 * self.lo_amplitude.norm())
    }
}

/// Arm amplitudes produced by splitting |√2·z⟩ against vacuum:
/// U|0⟩⊗|√2z⟩ = |−z⟩⊗|z⟩, so the first arm receives −z and the second z
/// (the phase shifter later multiplies the second by e^{iθ}).
pub fn lo_split(z: C64) -> (C64, C64) {
    (-z, z)
}

/// POVM of one arm on its signal mode, indexed by the integer count
/// difference k = n_lo-port − n_sig-port after the arm splitter.
#[derive(Debug, Clone)]
pub struct ArmPovm {
    k_min: i64,
    elements: Vec<Array2<C64>>,
}

impl ArmPovm {
    pub fn k_range(&self) -> std::ops::RangeInclusive<i64> {
        self.k_min..=(self.k_min + self.elements.len() as i64 - 1)
    }

    pub fn element(&self, k: i64) -> Option<&Array2<C64>> {
        let idx = k.checked_sub(self.k_min)?;
        usize::try_from(idx).ok().and_then(|i| self.elements.get(i))
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &Array2<C64>)> {
        self.elements.iter().enumerate().map(|(i, m)| (self.k_min + i as i64, m))
    }

    /// ‖Σ_k Π(k) − I‖_max.
    pub fn completeness_defect(&self) -> f64 {
        let d = self.elements[0].nrows();
        let mut sum: Array2<C64> = Array2::zeros((d, d));
        for m in &self.elements {
            sum += m;
        }
        crate::linalg::max_abs_diff(&sum.view(), &crate::linalg::identity(d).view())
    }
}

/// Binomial counting kernel of a detector with quantum efficiency ε:
/// row m holds the distribution of detected counts n given m photons,
/// C(m,n)·εⁿ·(1−ε)^{m−n}. Rows sum to one, so the induced POVM is
/// complete, and the detected mean is ε·m.
pub fn binomial_counting_kernel(d: usize, eps: f64) -> Array2<f64> {
    let mut b = Array2::zeros((d, d));
    if eps == 1.0 {
        for m in 0..d {
            b[(m, m)] = 1.0;
        }
        return b;
    }
    let mut ln_fact = vec![0.0_f64; d + 1];
    for k in 1..=d {
        ln_fact[k] = ln_fact[k - 1] + (k as f64).ln();
    }
    let (ln_e, ln_ne) = (eps.ln(), (1.0 - eps).ln());
    for m in 0..d {
        for n in 0..=m {
            let ln_c = ln_fact[m] - ln_fact[n] - ln_fact[m - n];
            b[(m, n)] = (ln_c + n as f64 * ln_e + (m - n) as f64 * ln_ne).exp();
        }
    }
    b
}

/// Construct the arm POVM for oscillator amplitude `lo` (already carrying
/// any phase shift and port-orientation sign), with per-port detector
/// efficiencies `(eps_sig_port, eps_lo_port)`.
pub fn arm_povm(
    lo: C64,
    d_sig: usize,
    d_lo: usize,
    eff: (f64, f64),
) -> Result<ArmPovm> {
    let splitter = BeamSplitter::rect(d_sig, d_lo);
    let beta = coherent_state(lo, d_lo)?;
    // columns U·(|s⟩ ⊗ |β⟩)
    let joint_dim = d_sig * d_lo;
    let mut v = Array2::zeros((joint_dim, d_sig));
    for s in 0..d_sig {
        let mut col: Array1<C64> = Array1::zeros(joint_dim);
        for l in 0..d_lo {
            col[s * d_lo + l] = beta.amplitudes()[l];
        }
        v.column_mut(s).assign(&splitter.apply(&col));
    }

    let (eps_sig, eps_lo) = eff;
    let b_sig = binomial_counting_kernel(d_sig, eps_sig);
    let b_lo = binomial_counting_kernel(d_lo, eps_lo);

    let k_min = -(d_sig as i64 - 1);
    let n_k = d_sig + d_lo - 1;
    let mut elements = vec![Array2::<C64>::zeros((d_sig, d_sig)); n_k];
    let mut outer = Array2::<C64>::zeros((d_sig, d_sig));
    let mut diff = vec![0.0_f64; n_k];
    for m in 0..d_sig {
        for l in 0..d_lo {
            let row = m * d_lo + l;
            // detected-difference distribution for true counts (m, l)
            for f in diff.iter_mut() {
                *f = 0.0;
            }
            for n_s in 0..=m {
                let w_s = b_sig[(m, n_s)];
                if w_s == 0.0 {
                    continue;
                }
                for n_l in 0..=l {
                    let k = n_l as i64 - n_s as i64;
                    diff[(k - k_min) as usize] += w_s * b_lo[(l, n_l)];
                }
            }
            for s in 0..d_sig {
                let vs = v[(row, s)].conj();
                for s2 in 0..d_sig {
                    outer[(s, s2)] = vs * v[(row, s2)];
                }
            }
            for (f, elem) in diff.iter().zip(elements.iter_mut()) {
                if *f > 0.0 {
                    let w = C64::new(*f, 0.0);
                    elem.zip_mut_with(&outer, |e, o| *e += w * o);
                }
            }
        }
    }
    Ok(ArmPovm { k_min, elements })
}

/// Joint probabilities of the integer count differences (k₁, k₂) on the
/// scaled lattice with spacing 1/(√2|z|).
#[derive(Debug, Clone)]
pub struct OutcomeHistogram {
    spacing: f64,
    k1_min: i64,
    k2_min: i64,
    probs: Array2<f64>,
}

impl OutcomeHistogram {
    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn k_ranges(&self) -> (std::ops::RangeInclusive<i64>, std::ops::RangeInclusive<i64>) {
        (
            self.k1_min..=(self.k1_min + self.probs.nrows() as i64 - 1),
            self.k2_min..=(self.k2_min + self.probs.ncols() as i64 - 1),
        )
    }

    pub fn prob(&self, k1: i64, k2: i64) -> f64 {
        let (r1, r2) = self.k_ranges();
        if r1.contains(&k1) && r2.contains(&k2) {
            self.probs[((k1 - self.k1_min) as usize, (k2 - self.k2_min) as usize)]
        } else {
            0.0
        }
    }

    pub fn probabilities(&self) -> &Array2<f64> {
        &self.probs
    }

    pub fn total_mass(&self) -> f64 {
        self.probs.sum()
    }

    /// Outcome values (k₁·Δ, k₂·Δ) of a lattice point.
    pub fn outcome(&self, k1: i64, k2: i64) -> (f64, f64) {
        (k1 as f64 * self.spacing, k2 as f64 * self.spacing)
    }

    pub fn mean(&self) -> (f64, f64) {
        let mut mx = 0.0;
        let mut my = 0.0;
        for ((i, j), p) in self.probs.indexed_iter() {
            let (x, y) = self.outcome(self.k1_min + i as i64, self.k2_min + j as i64);
            mx += p * x;
            my += p * y;
        }
        (mx, my)
    }

    pub fn argmax_outcome(&self) -> (f64, f64) {
        let mut best = (0usize, 0usize);
        let mut best_p = -1.0;
        for ((i, j), p) in self.probs.indexed_iter() {
            if *p > best_p {
                best_p = *p;
                best = (i, j);
            }
        }
        self.outcome(self.k1_min + best.0 as i64, self.k2_min + best.1 as i64)
    }

    /// Marginal over the second outcome: (first k offset, probabilities).
    pub fn marginal_first(&self) -> (i64, Vec<f64>) {
        let m = self
            .probs
            .rows()
            .into_iter()
            .map(|r| r.sum())
            .collect();
        (self.k1_min, m)
    }

    pub fn marginal_second(&self) -> (i64, Vec<f64>) {
        let m = self
            .probs
            .columns()
            .into_iter()
            .map(|c| c.sum())
            .collect();
        (self.k2_min, m)
    }

    /// Grid whose points sit exactly on the outcome lattice, covering
    /// |outcome| ≤ `half_width` on both axes. This is the grid on which a
    /// limit density must be sampled for [`compare_to_limit`].
    pub fn aligned_grid(&self, half_width: f64) -> Result<Grid2D> {
        let k_max = (half_width / self.spacing).floor() as i64;
        if k_max < 1 {
            return Err(Error::GridMisaligned(
                "half_width smaller than one lattice cell".into(),
            ));
        }
        let g = Grid1D::new(
            -(k_max as f64) * self.spacing,
            k_max as f64 * self.spacing,
            (2 * k_max + 1) as usize,
        )?;
        Ok(Grid2D::new(g, g))
    }
}

/// Exact joint statistics of the two scaled count differences for signal
/// state ρ and parameter state σ.
pub fn joint_statistics(
    rho: &DensityOperator,
    sigma: &DensityOperator,
    cfg: &NetworkConfig,
) -> Result<OutcomeHistogram> {
    let d = cfg.d_signal();
    if rho.dim() != d || sigma.dim() != d {
        return Err(Error::DimensionMismatch {
            left: rho.dim().max(sigma.dim()),
            right: d,
        });
    }
    let (amp_a, amp_b) = lo_split(cfg.lo_amplitude());
    // arm A: oscillator on the dashed port = sign flip in standard orientation
    let (e1, e3) = cfg.efficiencies().pair_13();
    let (e2, e4) = cfg.efficiencies().pair_24();
    let arm_a = arm_povm(-amp_a, d, cfg.d_lo(), (e1, e3))?;
    let theta_phase = C64::from_polar(1.0, cfg.tilt().theta());
    let arm_b = arm_povm(theta_phase * amp_b, d, cfg.d_lo(), (e2, e4))?;

    // τ = U₁₂(ρ⊗σ)U₁₂†, assembled from the spectral parts of ρ and σ
    let splitter = BeamSplitter::new(d);
    let rho_parts = rho.spectral(1e-14)?;
    let sigma_parts = sigma.spectral(1e-14)?;
    let dd = d * d;
    let mut tau: Array2<C64> = Array2::zeros((dd, dd));
    for (w_r, v_r) in &rho_parts {
        for (w_s, v_s) in &sigma_parts {
            let weight = w_r * w_s;
            if weight < 1e-14 {
                continue;
            }
            let joint = fock::compose_states(
                &fock::StateVector::new(v_r.clone()),
                &fock::StateVector::new(v_s.clone()),
            );
            let chi = splitter.apply(joint.amplitudes());
            for i in 0..dd {
                let wi = chi[i] * weight;
                for j in 0..dd {
                    tau[(i, j)] += wi * chi[j].conj();
                }
            }
        }
    }

    // tr[τ·(A⊗B)] = Σ τ[(m,n),(m',n')]·A[m',m]·B[n',n]: shuffle τ so the
    // contraction becomes two small matrix products
    let mut shuffled: Array2<C64> = Array2::zeros((dd, dd));
    for m in 0..d {
        for n in 0..d {
            for mp in 0..d {
                for np in 0..d {
                    shuffled[(mp * d + m, np * d + n)] = tau[(m * d + n, mp * d + np)];
                }
            }
        }
    }
    let pack = |povm: &ArmPovm| -> Array2<C64> {
        let n_k = povm.elements.len();
        let mut p = Array2::zeros((n_k, dd));
        for (row, elem) in povm.elements.iter().enumerate() {
            for mp in 0..d {
                for m in 0..d {
                    p[(row, mp * d + m)] = elem[(mp, m)];
                }
            }
        }
        p
    };
    let pa = pack(&arm_a);
    let pb = pack(&arm_b);
    let joint = pa.dot(&shuffled).dot(&pb.t());

    let mut probs = joint.mapv(|c| c.re);
    let min = probs.iter().cloned().fold(f64::INFINITY, f64::min);
    if min < crate::grid::DENSITY_FLOOR {
        return Err(Error::NegativeDensity { min });
    }
    probs.mapv_inplace(|p| p.max(0.0));
    let total = probs.sum();
    if total < MASS_FLOOR {
        return Err(Error::MassDeficit { mass: total, minimum: MASS_FLOOR });
    }
    Ok(OutcomeHistogram {
        spacing: cfg.outcome_spacing(),
        k1_min: -(d as i64 - 1),
        k2_min: -(d as i64 - 1),
        probs,
    })
}

/// Total-variation distance between a histogram and a limit density
/// sampled on a lattice-aligned grid: ½·Σ_cells |P(cell) − g(center)·Δ²|,
/// summed over the union of the histogram's support and the grid.
pub fn compare_to_limit(hist: &OutcomeHistogram, limit: &Density2D) -> Result<f64> {
    let dx = limit.grid().x.spacing();
    let dy = limit.grid().y.spacing();
    let delta = hist.spacing();
    for s in [dx, dy] {
        if (s - delta).abs() > 1e-9 * delta {
            return Err(Error::SpacingMismatch { left: s, right: delta });
        }
    }
    let to_lattice = |min: f64| -> Result<i64> {
        let r = min / delta;
        if (r - r.round()).abs() > 1e-6 {
            return Err(Error::GridMisaligned(format!(
                "grid origin {min} is not a lattice multiple of {delta}"
            )));
        }
        Ok(r.round() as i64)
    };
    let gx0 = to_lattice(limit.grid().x.min())?;
    let gy0 = to_lattice(limit.grid().y.min())?;
    let gx1 = gx0 + limit.grid().x.count() as i64 - 1;
    let gy1 = gy0 + limit.grid().y.count() as i64 - 1;
    let (hr1, hr2) = hist.k_ranges();

    let cell = delta * delta;
    let mut tv = 0.0;
    let lo1 = (*hr1.start()).min(gx0);
    let hi1 = (*hr1.end()).max(gx1);
    let lo2 = (*hr2.start()).min(gy0);
    let hi2 = (*hr2.end()).max(gy1);
    for k1 in lo1..=hi1 {
        for k2 in lo2..=hi2 {
            let p = hist.prob(k1, k2);
            let g = if k1 >= gx0 && k1 <= gx1 && k2 >= gy0 && k2 <= gy1 {
                limit.values()[((k1 - gx0) as usize, (k2 - gy0) as usize)] * cell
            } else {
                0.0
            };
            tv += (p - g).abs();
        }
    }
    Ok(0.5 * tv)
}
