//! Sampled complex functions on centered square windows.
//!
//! A [`GridSpec`] fixes `n` points per side on `[-L, L)²` with spacing `2L/n`;
//! the point `+L` is excluded so that the lattice is periodic. Values are
//! stored row-major with the row index running over the second coordinate.

mod cgrd;
mod csv;

pub use cgrd::{read_grid, write_grid, FormatError, CGRD_HEADER_LEN, CGRD_MAGIC, CGRD_VERSION};
pub use csv::write_csv;

use num_complex::Complex;
use thiserror::Error;

use crate::scalar::Real;

/// Errors raised while building or combining grids.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GridError {
    #[error("points per side must be a power of two >= {min}, got {found}")]
    InvalidPoints { min: usize, found: usize },
    #[error("half-width must be positive and finite, got {0}")]
    InvalidHalfWidth(f64),
    #[error("non-finite sample at ({x1}, {x2})")]
    NonFinite { x1: f64, x2: f64 },
    #[error("expected {expected} samples, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("grid specs differ: {left} vs {right}")]
    SpecMismatch { left: String, right: String },
}

/// Geometry of a square sampling window.
#[derive(Debug, Clone, Copy)]
pub struct GridSpec<T> {
    n: usize,
    half_width: T,
}

impl<T: Real> GridSpec<T> {
    /// Smallest admissible number of points per side.
    pub const MIN_POINTS: usize = 16;

    pub fn new(n: usize, half_width: T) -> Result<Self, GridError> {
        if n < Self::MIN_POINTS || !n.is_power_of_two() {
            return Err(GridError::InvalidPoints { min: Self::MIN_POINTS, found: n });
        }
        if !(half_width.is_finite() && half_width > T::zero()) {
            return Err(GridError::InvalidHalfWidth(half_width.wide()));
        }
        Ok(Self { n, half_width })
    }

    /// Points per side.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Total number of samples.
    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn half_width(&self) -> T {
        self.half_width
    }

    /// Lattice spacing `2L/n`.
    pub fn spacing(&self) -> T {
        (self.half_width + self.half_width) / T::of(self.n as f64)
    }

    /// Quadrature weight of one sample.
    pub fn cell_area(&self) -> T {
        let h = self.spacing();
        h * h
    }

    /// Coordinate of lattice index `j` along either axis.
    pub fn coordinate(&self, j: usize) -> T {
        -self.half_width + T::of(j as f64) * self.spacing()
    }

    /// The sample point `x₁ + i x₂` at column `i`, row `j`.
    pub fn point(&self, i: usize, j: usize) -> Complex<T> {
        Complex::new(self.coordinate(i), self.coordinate(j))
    }

    /// Index of the lattice coordinate nearest to `x`, if it lies in the window.
    pub fn nearest_index(&self, x: T) -> Option<usize> {
        let j = ((x + self.half_width) / self.spacing()).round();
        let j = j.to_i64()?;
        (0..self.n as i64).contains(&j).then_some(j as usize)
    }

    /// Transform-dual window: same `n`, half-width `πn/(4L)`.
    pub fn dual(&self) -> Self {
        let k = T::PI() * T::of(self.n as f64) / (T::of(4.0) * self.half_width);
        Self { n: self.n, half_width: k }
    }
}

// Half-widths are compared to a few ulps so that `dual().dual()` matches the original.
impl<T: Real> PartialEq for GridSpec<T> {
    fn eq(&self, other: &Self) -> bool {
        let tol = T::of(16.0) * T::epsilon() * self.half_width.abs().max(other.half_width.abs());
        self.n == other.n && (self.half_width - other.half_width).abs() <= tol
    }
}

impl<T: Real> std::fmt::Display for GridSpec<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "n={}, L={}", self.n, self.half_width)
    }
}

/// A complex function sampled on a [`GridSpec`].
#[derive(Debug, Clone)]
pub struct ComplexGrid<T> {
    spec: GridSpec<T>,
    values: Vec<Complex<T>>,
}

impl<T: Real> PartialEq for ComplexGrid<T> {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec && self.values == other.values
    }
}

pub(crate) fn is_finite<T: Real>(z: &Complex<T>) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// Samples `f(x₁, x₂)` on every lattice point.
pub fn make_grid<T: Real, F>(spec: GridSpec<T>, f: F) -> Result<ComplexGrid<T>, GridError>
where
    F: FnMut(T, T) -> Complex<T>,
{
    ComplexGrid::from_fn(spec, f)
}

impl<T: Real> ComplexGrid<T> {
    pub fn from_fn<F>(spec: GridSpec<T>, mut f: F) -> Result<Self, GridError>
    where
        F: FnMut(T, T) -> Complex<T>,
    {
        let n = spec.n();
        let mut values = Vec::with_capacity(spec.len());
        for j in 0..n {
            let x2 = spec.coordinate(j);
            for i in 0..n {
                let x1 = spec.coordinate(i);
                let v = f(x1, x2);
                if !is_finite(&v) {
                    return Err(GridError::NonFinite { x1: x1.wide(), x2: x2.wide() });
                }
                values.push(v);
            }
        }
        Ok(Self { spec, values })
    }

    pub fn from_values(spec: GridSpec<T>, values: Vec<Complex<T>>) -> Result<Self, GridError> {
        if values.len() != spec.len() {
            return Err(GridError::LengthMismatch { expected: spec.len(), found: values.len() });
        }
        if let Some(idx) = values.iter().position(|v| !is_finite(v)) {
            let p = spec.point(idx % spec.n(), idx / spec.n());
            return Err(GridError::NonFinite { x1: p.re.wide(), x2: p.im.wide() });
        }
        Ok(Self { spec, values })
    }

    /// Wraps values already known to be finite and correctly sized.
    pub(crate) fn from_raw(spec: GridSpec<T>, values: Vec<Complex<T>>) -> Self {
        debug_assert_eq!(values.len(), spec.len());
        Self { spec, values }
    }

    pub fn zeros(spec: GridSpec<T>) -> Self {
        Self::constant(spec, Complex::new(T::zero(), T::zero()))
    }

    pub fn constant(spec: GridSpec<T>, c: Complex<T>) -> Self {
        Self { spec, values: vec![c; spec.len()] }
    }

    pub fn spec(&self) -> &GridSpec<T> {
        &self.spec
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex<T>> {
        self.values
    }

    /// Sample at column `i` (first coordinate) and row `j` (second coordinate).
    pub fn at(&self, i: usize, j: usize) -> Complex<T> {
        self.values[j * self.spec.n() + i]
    }

    /// Iterates over `(point, value)` pairs in storage order.
    pub fn samples(&self) -> impl Iterator<Item = (Complex<T>, Complex<T>)> + '_ {
        let n = self.spec.n();
        self.values
            .iter()
            .enumerate()
            .map(move |(idx, &v)| (self.spec.point(idx % n, idx / n), v))
    }

    fn check_spec(&self, other: &Self) -> Result<(), GridError> {
        if self.spec == other.spec {
            Ok(())
        } else {
            Err(GridError::SpecMismatch {
                left: self.spec.to_string(),
                right: other.spec.to_string(),
            })
        }
    }

    fn finite_or_err(spec: GridSpec<T>, values: Vec<Complex<T>>) -> Result<Self, GridError> {
        Self::from_values(spec, values)
    }

    pub fn add(&self, other: &Self) -> Result<Self, GridError> {
        self.check_spec(other)?;
        let v = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        Self::finite_or_err(self.spec, v)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, GridError> {
        self.check_spec(other)?;
        let v = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        Self::finite_or_err(self.spec, v)
    }

    pub fn multiply(&self, other: &Self) -> Result<Self, GridError> {
        self.check_spec(other)?;
        let v = self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect();
        Self::finite_or_err(self.spec, v)
    }

    pub fn scale(&self, c: Complex<T>) -> Result<Self, GridError> {
        let v = self.values.iter().map(|a| a * c).collect();
        Self::finite_or_err(self.spec, v)
    }

    pub fn conjugate(&self) -> Self {
        Self::from_raw(self.spec, self.values.iter().map(|a| a.conj()).collect())
    }

    /// Multiplies by `⟨x⟩^β = (1 + |x|²)^{β/2}`.
    pub fn weight_bracket(&self, beta: T) -> Result<Self, GridError> {
        if beta == T::zero() {
            return Ok(self.clone());
        }
        let half = beta / T::of(2.0);
        let v = self
            .samples()
            .map(|(x, f)| f * (T::one() + x.norm_sqr()).powf(half))
            .collect();
        Self::finite_or_err(self.spec, v)
    }

    /// Applies `f` to every sample.
    pub fn map<F>(&self, f: F) -> Result<Self, GridError>
    where
        F: FnMut(&Complex<T>) -> Complex<T>,
    {
        Self::finite_or_err(self.spec, self.values.iter().map(f).collect())
    }

    /// Largest pointwise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<T, GridError> {
        self.check_spec(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(T::zero(), T::max))
    }

    /// Quadrature L² norm.
    pub fn l2_norm(&self) -> T {
        (l2_norm_sqr(&self.values) * self.spec.cell_area()).sqrt()
    }

    /// Largest pointwise modulus.
    pub fn max_abs(&self) -> T {
        self.values.iter().map(|v| v.norm()).fold(T::zero(), T::max)
    }

    /// Quadrature integral `∫ f dx`.
    pub fn integral(&self) -> Complex<T> {
        let s: Complex<T> = self.values.iter().fold(Complex::new(T::zero(), T::zero()), |acc, v| acc + v);
        s * self.spec.cell_area()
    }

    /// Converts the sample type, e.g. between `f32` and `f64` grids.
    pub fn cast<U: Real>(&self) -> Result<ComplexGrid<U>, GridError> {
        let spec = GridSpec::new(self.spec.n(), U::of(self.spec.half_width().wide()))?;
        let v = self
            .values
            .iter()
            .map(|z| Complex::new(U::of(z.re.wide()), U::of(z.im.wide())))
            .collect();
        ComplexGrid::from_values(spec, v)
    }
}

/// Unweighted `Σ|v|²`.
pub(crate) fn l2_norm_sqr<T: Real>(values: &[Complex<T>]) -> T {
    values.iter().fold(T::zero(), |acc, v| acc + v.norm_sqr())
}
