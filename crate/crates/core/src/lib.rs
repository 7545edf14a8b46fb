//! Simulation of eight-port homodyne detection with an arbitrary phase
//! shift, and the phase-space observables it measures in the limit of a
//! strong local oscillator.
//!
//! The crate has two independent routes to the same statistics:
//!
//! * [`eightport`] models the detector network at finite local-oscillator
//!   amplitude — beam splitters, a phase shifter, photon counters with
//!   optional quantum efficiencies — and produces exact joint distributions
//!   of the scaled photon-number differences.
//! * [`observable`] builds the high-amplitude-limit observable analytically:
//!   a phase-space density generated by conjugating a generating operator
//!   with tilted Weyl operators.
//!
//! The two agree as the oscillator amplitude grows, which is exercised by
//! the acceptance test suite. [`tomography`] inverts the analytic map to
//! reconstruct states from sampled densities.
//!
//! All values are immutable after construction and all operations are pure
//! functions, so everything here is safe to use from multiple threads;
//! per-cell grid evaluations are internally parallelized with deterministic
//! results.

extern crate blas_src;

pub mod error;
pub mod grid;
pub mod linalg;

pub mod fock;
pub mod optics;
pub mod quadrature;
pub mod observable;
pub mod eightport;
pub mod tomography;

pub use error::{Error, Result};
pub use fock::{DensityOperator, FockCutoff, StateVector};
pub use grid::{Density1D, Density2D, Grid1D, Grid2D};
pub use optics::{PhaseSpacePoint, TiltAngle};
