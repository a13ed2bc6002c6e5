//! Fourier transform `f̂(k) = (1/π)∫ e_k(x) f(x) dx` with the phase
//! `e_k(x) = exp(−2i(k₁x₂ + k₂x₁))`, and its inverse `ǔ(x) = (1/π)∫ e_k(−x) u(k) dk`.
//!
//! On a window of half-width `L` with `n` points the transform lands on the
//! dual window of half-width `K = πn/(4L)`, where the discrete pair is exactly
//! unitary. Because `k₁` pairs with `x₂`, the discrete transform is taken
//! without the final transpose.

use num_complex::Complex;
use serde::Serialize;

use crate::fft2::{Direction, Fft2, Fft2Scratch};
use crate::grids::{ComplexGrid, GridError, GridSpec};
use crate::scalar::Real;

/// `e_k(x) = exp(k̄x̄ − kx) = exp(−2i(k₁x₂ + k₂x₁))`.
pub fn phase<T: Real>(k: Complex<T>, x: Complex<T>) -> Complex<T> {
    let arg = -(k.re * x.im + k.im * x.re) * T::of(2.0);
    Complex::new(arg.cos(), arg.sin())
}

/// Samples `x ↦ e_k(x)` on `spec`.
pub fn phase_grid<T: Real>(k: Complex<T>, spec: GridSpec<T>) -> ComplexGrid<T> {
    let n = spec.n();
    let values = (0..spec.len()).map(|idx| phase(k, spec.point(idx % n, idx / n))).collect();
    ComplexGrid::from_raw(spec, values)
}

/// Reusable transform plan for one window and its dual.
#[derive(Clone)]
pub struct FourierPlan<T: Real> {
    spec: GridSpec<T>,
    dual: GridSpec<T>,
    fft: Fft2<T>,
}

/// Scratch buffers owned by one caller of a [`FourierPlan`].
pub struct FourierScratch<T>(Fft2Scratch<T>);

fn checkerboard<T: Real>(data: &mut [Complex<T>], n: usize, scale: T) {
    for (row, chunk) in data.chunks_exact_mut(n).enumerate() {
        for (col, v) in chunk.iter_mut().enumerate() {
            *v = if (row + col) % 2 == 0 { *v * scale } else { -*v * scale };
        }
    }
}

impl<T: Real> FourierPlan<T> {
    pub fn new(spec: GridSpec<T>) -> Self {
        Self { spec, dual: spec.dual(), fft: Fft2::new(spec.n()) }
    }

    /// The x-window.
    pub fn spec(&self) -> &GridSpec<T> {
        &self.spec
    }

    /// The k-window.
    pub fn dual_spec(&self) -> &GridSpec<T> {
        &self.dual
    }

    pub fn scratch(&self) -> FourierScratch<T> {
        FourierScratch(self.fft.scratch())
    }

    /// In-place forward transform of raw samples on the x-window.
    pub fn forward_in_place(&self, data: &mut [Complex<T>], s: &mut FourierScratch<T>) {
        let n = self.spec.n();
        checkerboard(data, n, T::one());
        self.fft.process_transposed(data, Direction::Forward, &mut s.0);
        checkerboard(data, n, self.spec.cell_area() / T::PI());
    }

    /// In-place inverse transform of raw samples on the k-window.
    pub fn inverse_in_place(&self, data: &mut [Complex<T>], s: &mut FourierScratch<T>) {
        let n = self.spec.n();
        checkerboard(data, n, T::one());
        self.fft.process_transposed(data, Direction::Inverse, &mut s.0);
        checkerboard(data, n, self.dual.cell_area() / T::PI());
    }

    pub fn forward(&self, f: &ComplexGrid<T>) -> Result<ComplexGrid<T>, GridError> {
        expect_spec(f.spec(), &self.spec)?;
        let mut data = f.values().to_vec();
        self.forward_in_place(&mut data, &mut self.scratch());
        Ok(ComplexGrid::from_raw(self.dual, data))
    }

    pub fn inverse(&self, u: &ComplexGrid<T>) -> Result<ComplexGrid<T>, GridError> {
        expect_spec(u.spec(), &self.dual)?;
        let mut data = u.values().to_vec();
        self.inverse_in_place(&mut data, &mut self.scratch());
        Ok(ComplexGrid::from_raw(self.spec, data))
    }

    /// Applies the Fourier multiplier `symbol(k)` through the forward and inverse transform.
    pub fn multiplier<F>(&self, f: &ComplexGrid<T>, symbol: F) -> Result<ComplexGrid<T>, GridError>
    where
        F: Fn(Complex<T>) -> Complex<T>,
    {
        let mut u = self.forward(f)?.into_values();
        let n = self.dual.n();
        for (idx, v) in u.iter_mut().enumerate() {
            *v *= symbol(self.dual.point(idx % n, idx / n));
        }
        let mut s = self.scratch();
        self.inverse_in_place(&mut u, &mut s);
        ComplexGrid::from_values(self.spec, u)
    }
}

pub(crate) fn expect_spec<T: Real>(found: &GridSpec<T>, expected: &GridSpec<T>) -> Result<(), GridError> {
    if found == expected {
        Ok(())
    } else {
        Err(GridError::SpecMismatch { left: found.to_string(), right: expected.to_string() })
    }
}

/// Transform onto the dual window of `f`.
pub fn forward_transform<T: Real>(f: &ComplexGrid<T>) -> ComplexGrid<T> {
    FourierPlan::new(*f.spec()).forward(f).expect("plan built for this spec")
}

/// Inverse transform of samples on a k-window, landing on its dual x-window.
pub fn inverse_transform<T: Real>(u: &ComplexGrid<T>) -> ComplexGrid<T> {
    FourierPlan::new(u.spec().dual()).inverse(u).expect("plan built for this spec")
}

/// Direct quadrature of `f̂` at an arbitrary frequency.
pub fn transform_at<T: Real>(f: &ComplexGrid<T>, k: Complex<T>) -> Complex<T> {
    let zero = Complex::new(T::zero(), T::zero());
    let sum = f.samples().fold(zero, |acc, (x, v)| acc + phase(k, x) * v);
    sum * (f.spec().cell_area() / T::PI())
}

/// Quadrature convolution `(a*b)(x) = ∫ a(y) b(x−y) dy` sampled on the same window.
///
/// Both factors are treated as zero outside the window.
pub fn convolve<T: Real>(a: &ComplexGrid<T>, b: &ComplexGrid<T>) -> Result<ComplexGrid<T>, GridError> {
    expect_spec(b.spec(), a.spec())?;
    let spec = *a.spec();
    let n = spec.n();
    let m = 2 * n;
    let fft = Fft2::new(m);
    let mut s = fft.scratch();
    let pad = |g: &ComplexGrid<T>| {
        let mut buf = vec![Complex::new(T::zero(), T::zero()); m * m];
        for (row, chunk) in g.values().chunks_exact(n).enumerate() {
            buf[row * m..row * m + n].copy_from_slice(chunk);
        }
        buf
    };
    let mut pa = pad(a);
    let mut pb = pad(b);
    fft.process(&mut pa, Direction::Forward, &mut s);
    fft.process(&mut pb, Direction::Forward, &mut s);
    for (x, y) in pa.iter_mut().zip(&pb) {
        *x *= y;
    }
    fft.process(&mut pa, Direction::Inverse, &mut s);
    // The lattice point x_m − x_i sits at index m − i + n/2.
    let scale = spec.cell_area() / T::of((m * m) as f64);
    let off = n / 2;
    let values = (0..n)
        .flat_map(|row| (0..n).map(move |col| (row, col)))
        .map(|(row, col)| pa[(row + off) * m + col + off] * scale)
        .collect();
    ComplexGrid::from_values(spec, values)
}

/// Residuals of the convolution identities for the transform.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvolutionReport {
    /// `‖(f*g)ˆ − π f̂ ĝ‖∞`
    pub convolution_residual: f64,
    /// `‖(fg)ˆ − (1/π) f̂*ĝ‖∞`
    pub product_residual: f64,
}

pub fn check_convolution_identities<T: Real>(
    f: &ComplexGrid<T>,
    g: &ComplexGrid<T>,
) -> Result<ConvolutionReport, GridError> {
    expect_spec(g.spec(), f.spec())?;
    let plan = FourierPlan::new(*f.spec());
    let fh = plan.forward(f)?;
    let gh = plan.forward(g)?;
    let pi = Complex::new(T::PI(), T::zero());

    let lhs = plan.forward(&convolve(f, g)?)?;
    let rhs = fh.multiply(&gh)?.scale(pi)?;
    let convolution_residual = lhs.max_abs_diff(&rhs)?;

    let lhs = plan.forward(&f.multiply(g)?)?;
    let rhs = convolve(&fh, &gh)?.scale(pi.inv())?;
    let product_residual = lhs.max_abs_diff(&rhs)?;

    Ok(ConvolutionReport {
        convolution_residual: convolution_residual.wide(),
        product_residual: product_residual.wide(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grids::make_grid;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn gaussian(spec: GridSpec<f64>) -> ComplexGrid<f64> {
        make_grid(spec, |a, b| c((-(a * a + b * b)).exp(), 0.0)).unwrap()
    }

    fn spec(n: usize, l: f64) -> GridSpec<f64> {
        GridSpec::new(n, l).unwrap()
    }

    #[test]
    fn phase_examples() {
        let s = spec(32, 4.0);
        let g = phase_grid(c(0.0, 0.0), s);
        assert!(g.values().iter().all(|v| *v == c(1.0, 0.0)));
        let g = phase_grid(c(1.3, -0.7), s);
        assert!(g.values().iter().all(|v| (v.norm() - 1.0).abs() < 1e-15));
        let v = phase(c(1.0, 0.0), c(0.0, PI / 2.0));
        assert!((v - c(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn phase_is_symmetric_in_its_arguments() {
        let s = spec(16, 2.0);
        for &(k, x) in &[(c(0.5, -1.0), c(0.25, 1.5)), (c(-2.0, 0.0), c(1.0, -1.75))] {
            assert_eq!(phase(k, x), phase(x, k));
            let i = s.nearest_index(x.re).unwrap();
            let j = s.nearest_index(x.im).unwrap();
            assert_eq!(phase_grid(k, s).at(i, j), phase(x, k));
        }
    }

    #[test]
    fn gaussian_is_self_dual() {
        let s = spec(256, 8.0);
        let fh = forward_transform(&gaussian(s));
        assert_eq!(*fh.spec(), s.dual());
        let err = fh
            .samples()
            .map(|(k, v)| (v - c((-k.norm_sqr()).exp(), 0.0)).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-10, "{err}");
        let center = fh.at(128, 128);
        assert!((center - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn zero_maps_to_zero() {
        let s = spec(16, 1.0);
        let z = ComplexGrid::zeros(s);
        assert!(forward_transform(&z).values().iter().all(|v| *v == c(0.0, 0.0)));
    }

    #[test]
    fn roundtrip_and_odd_function() {
        let s = spec(256, 8.0);
        let g = gaussian(s);
        let back = inverse_transform(&forward_transform(&g));
        assert!(back.max_abs_diff(&g).unwrap() < 1e-12);
        let f = make_grid(s, |a, b| c(a * (-(a * a + b * b)).exp(), 0.0)).unwrap();
        let back = inverse_transform(&forward_transform(&f));
        assert!(back.max_abs_diff(&f).unwrap() < 1e-10);
    }

    #[test]
    fn point_mass_inverts_to_constant() {
        let s = spec(32, 4.0);
        let k = s.dual();
        let mass = 1.0 / k.cell_area();
        let u = make_grid(k, |a, b| if a == 0.0 && b == 0.0 { c(mass, 0.0) } else { c(0.0, 0.0) }).unwrap();
        let f = inverse_transform(&u);
        for v in f.values() {
            assert!((v - c(1.0 / PI, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn direct_quadrature_matches_fast_transform() {
        let s = spec(32, 4.0);
        let f = make_grid(s, |a, b| c((-(a * a + 2.0 * b * b)).exp() * (1.0 + a), b)).unwrap();
        let f = f.map(|v| v * c((-(0.1f64)).exp(), 0.0)).unwrap();
        let fh = forward_transform(&f);
        for &(i, j) in &[(16, 16), (3, 29), (20, 7)] {
            let k = fh.spec().point(i, j);
            assert!((transform_at(&f, k) - fh.at(i, j)).norm() < 1e-12);
        }
    }

    #[test]
    fn real_even_stays_real_even() {
        let s = spec(64, 6.0);
        let f = make_grid(s, |a, b| c((-(a * a + 0.5 * b * b)).exp() * (1.0 + a * a * b * b), 0.0)).unwrap();
        let fh = forward_transform(&f);
        let n = 64;
        for j in 1..n {
            for i in 1..n {
                let v = fh.at(i, j);
                assert!(v.im.abs() < 1e-12);
                assert!((v - fh.at(n - i, n - j)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn convolution_identities() {
        let s = spec(256, 8.0);
        let g = gaussian(s);
        let r = check_convolution_identities(&g, &g).unwrap();
        assert!(r.convolution_residual < 1e-8 && r.product_residual < 1e-8, "{r:?}");
        let shifted = make_grid(s, |a, b| c((-((a - 1.0).powi(2) + b * b)).exp(), 0.0)).unwrap();
        let r = check_convolution_identities(&g, &shifted).unwrap();
        assert!(r.convolution_residual < 1e-8 && r.product_residual < 1e-8, "{r:?}");
        let r = check_convolution_identities(&ComplexGrid::zeros(s), &g).unwrap();
        assert_eq!(r, ConvolutionReport { convolution_residual: 0.0, product_residual: 0.0 });
    }

    #[test]
    fn single_precision_roundtrip() {
        let s = GridSpec::<f32>::new(64, 6.0).unwrap();
        let f = make_grid(s, |a, b| Complex::new((-(a * a + b * b)).exp(), 0.0)).unwrap();
        let back = inverse_transform(&forward_transform(&f));
        assert!(back.max_abs_diff(&f).unwrap() < 1e-5);
    }

    proptest! {
        #[test]
        fn linear_plancherel(values in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 256), l in 0.5f64..20.0) {
            let s = spec(16, l);
            let f = ComplexGrid::from_values(s, values.into_iter().map(|(a, b)| c(a, b)).collect()).unwrap();
            let fh = forward_transform(&f);
            let (a, b) = (f.l2_norm(), fh.l2_norm());
            prop_assert!((a - b).abs() <= 1e-13 * a.max(1e-300));
        }
    }
}
