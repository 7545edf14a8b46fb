//! Uniform outcome grids and the probability densities tabulated on them.
//!
//! A [`Grid1D`] is a closed interval sampled at `count` equally spaced
//! points; [`Grid2D`] is the Cartesian product of two of them. Densities
//! carry their grid so that quadrature (trapezoid rule) and convolution
//! can check spacing compatibility.

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};

/// Negative density values above this floor are treated as roundoff and
/// clipped to zero; anything below it is an error.
pub const DENSITY_FLOOR: f64 = -1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    min: f64,
    max: f64,
    count: usize,
}

impl Grid1D {
    pub fn new(min: f64, max: f64, count: usize) -> Result<Self> {
        if count < 2 {
            return Err(Error::GridTooSmall(count));
        }
        if !(min.is_finite() && max.is_finite() && max > min) {
            return Err(Error::GridBounds { min, max });
        }
        Ok(Self { min, max, count })
    }

    /// Symmetric grid wide and fine enough for every Hermite function below
    /// `dim`: range ±(√(2·dim) + 4), spacing ≲ 0.02.
    pub fn hermite_default(dim: usize) -> Self {
        let half = (2.0 * dim as f64).sqrt() + 4.0;
        let count = 2 * (half / 0.02).ceil() as usize + 1;
        Self { min: -half, max: half, count }
    }

    pub fn min(&self) -> f64 {
        self.min
    }

    pub fn max(&self) -> f64 {
        self.max
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn spacing(&self) -> f64 {
        (self.max - self.min) / (self.count - 1) as f64
    }

    pub fn point(&self, index: usize) -> f64 {
        self.min + self.spacing() * index as f64
    }

    pub fn points(&self) -> Array1<f64> {
        Array1::linspace(self.min, self.max, self.count)
    }

    /// Trapezoid-rule quadrature weights (endpoints carry half weight).
    pub fn trapezoid_weights(&self) -> Array1<f64> {
        let dx = self.spacing();
        let mut w = Array1::from_elem(self.count, dx);
        w[0] = 0.5 * dx;
        w[self.count - 1] = 0.5 * dx;
        w
    }

    /// Rescale every point by a positive factor (still a uniform grid).
    pub fn scaled(&self, factor: f64) -> Self {
        if factor > 0.0 {
            Self { min: self.min * factor, max: self.max * factor, count: self.count }
        } else {
            Self { min: self.max * factor, max: self.min * factor, count: self.count }
        }
    }

    pub fn same_spacing(&self, other: &Self) -> Result<()> {
        let (a, b) = (self.spacing(), other.spacing());
        if (a - b).abs() > 1e-9 * a.abs().max(b.abs()) {
            return Err(Error::SpacingMismatch { left: a, right: b });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid2D {
    pub x: Grid1D,
    pub y: Grid1D,
}

impl Grid2D {
    pub fn new(x: Grid1D, y: Grid1D) -> Self {
        Self { x, y }
    }

    pub fn square(min: f64, max: f64, count: usize) -> Result<Self> {
        let g = Grid1D::new(min, max, count)?;
        Ok(Self { x: g, y: g })
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.x.count(), self.y.count())
    }
}

fn validate_values(values: &mut [f64]) -> Result<()> {
    let mut min = f64::INFINITY;
    for v in values.iter() {
        if *v < min {
            min = *v;
        }
    }
    if min < DENSITY_FLOOR {
        return Err(Error::NegativeDensity { min });
    }
    for v in values.iter_mut() {
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    Ok(())
}

/// Probability density sampled on a [`Grid1D`]; values are per unit outcome.
#[derive(Debug, Clone)]
pub struct Density1D {
    grid: Grid1D,
    values: Array1<f64>,
}

impl Density1D {
    /// Wraps sampled values, clipping roundoff negatives (≥ −1e−12) to zero.
    pub fn new(grid: Grid1D, mut values: Array1<f64>) -> Result<Self> {
        if values.len() != grid.count() {
            return Err(Error::DimensionMismatch { left: values.len(), right: grid.count() });
        }
        validate_values(values.as_slice_mut().expect("contiguous"))?;
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn values(&self) -> &Array1<f64> {
        &self.values
    }

    /// Trapezoid-rule integral over the grid.
    pub fn mass(&self) -> f64 {
        self.grid.trapezoid_weights().dot(&self.values)
    }

    pub fn mean(&self) -> f64 {
        let w = self.grid.trapezoid_weights();
        let x = self.grid.points();
        (&w * &x).dot(&self.values)
    }

    pub fn variance(&self) -> f64 {
        let mu = self.mean();
        let w = self.grid.trapezoid_weights();
        let x = self.grid.points().mapv(|v| (v - mu) * (v - mu));
        (&w * &x).dot(&self.values)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.values
            .iter()
            .zip(other.values.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// L1 distance ∫|f − g| by the trapezoid rule; grids must agree.
    pub fn l1_distance(&self, other: &Self) -> Result<f64> {
        if self.grid != other.grid {
            return Err(Error::GridMisaligned("L1 distance needs identical grids".into()));
        }
        let diff = (&self.values - &other.values).mapv(f64::abs);
        Ok(self.grid.trapezoid_weights().dot(&diff))
    }
}

/// Probability density sampled on a [`Grid2D`]; `values[[i, j]]` sits at
/// `(x.point(i), y.point(j))`.
#[derive(Debug, Clone)]
pub struct Density2D {
    grid: Grid2D,
    values: Array2<f64>,
}

impl Density2D {
    pub fn new(grid: Grid2D, mut values: Array2<f64>) -> Result<Self> {
        if values.dim() != grid.shape() {
            return Err(Error::DimensionMismatch {
                left: values.len(),
                right: grid.shape().0 * grid.shape().1,
            });
        }
        validate_values(values.as_slice_mut().expect("contiguous"))?;
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn mass(&self) -> f64 {
        let wx = self.grid.x.trapezoid_weights();
        let wy = self.grid.y.trapezoid_weights();
        wx.dot(&self.values.dot(&wy))
    }

    /// Margin over the second coordinate: a density on the x grid.
    pub fn marginal_x(&self) -> Density1D {
        let wy = self.grid.y.trapezoid_weights();
        let vals = self.values.dot(&wy);
        Density1D { grid: self.grid.x, values: vals }
    }

    /// Margin over the first coordinate: a density on the y grid.
    pub fn marginal_y(&self) -> Density1D {
        let wx = self.grid.x.trapezoid_weights();
        let vals = self.values.t().dot(&wx);
        Density1D { grid: self.grid.y, values: vals }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.values
            .iter()
            .zip(other.values.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn l1_distance(&self, other: &Self) -> Result<f64> {
        if self.grid != other.grid {
            return Err(Error::GridMisaligned("L1 distance needs identical grids".into()));
        }
        let wx = self.grid.x.trapezoid_weights();
        let wy = self.grid.y.trapezoid_weights();
        let diff = (&self.values - &other.values).mapv(f64::abs);
        Ok(wx.dot(&diff.dot(&wy)))
    }
}
