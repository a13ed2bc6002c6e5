//! Numerics for the two-dimensional d-bar scattering transform.

pub mod cauchy;
pub mod fourier;
pub mod grids;
pub mod matroid;
pub mod scalar;
pub mod scattering;
pub mod series;
pub mod sobolev;

mod fft2;

pub use grids::{make_grid, ComplexGrid, GridError, GridSpec};
pub use scalar::Real;

/// Double-precision grid.
pub type Grid = ComplexGrid<f64>;
/// Double-precision grid description.
pub type Spec = GridSpec<f64>;
/// Single-precision grid.
pub type Grid32 = ComplexGrid<f32>;
/// Exact rational used by the matroid certificates.
pub type Rational = matroid::Rational;
