//! Square two-dimensional FFTs on row-major buffers.

use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::scalar::Real;

#[derive(Clone)]
pub(crate) struct Fft2<T: Real> {
    size: usize,
    forward: Arc<dyn Fft<T>>,
    inverse: Arc<dyn Fft<T>>,
}

/// Per-caller scratch for [`Fft2`].
pub(crate) struct Fft2Scratch<T> {
    pub(crate) transposed: Vec<Complex<T>>,
    pub(crate) fft: Vec<Complex<T>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Direction {
    Forward,
    Inverse,
}

impl<T: Real> Fft2<T> {
    pub(crate) fn new(size: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            size,
            forward: planner.plan_fft_forward(size),
            inverse: planner.plan_fft_inverse(size),
        }
    }

    pub(crate) fn scratch(&self) -> Fft2Scratch<T> {
        let zero = Complex::new(T::zero(), T::zero());
        let len = self
            .forward
            .get_inplace_scratch_len()
            .max(self.inverse.get_inplace_scratch_len());
        Fft2Scratch {
            transposed: vec![zero; self.size * self.size],
            fft: vec![zero; len],
        }
    }

    fn plan(&self, dir: Direction) -> &Arc<dyn Fft<T>> {
        match dir {
            Direction::Forward => &self.forward,
            Direction::Inverse => &self.inverse,
        }
    }

    /// Transforms the first `rows` rows of `data` in place.
    pub(crate) fn rows(&self, data: &mut [Complex<T>], rows: usize, dir: Direction, scratch: &mut [Complex<T>]) {
        let m = self.size;
        self.plan(dir).process_with_scratch(&mut data[..rows * m], scratch);
    }

    /// Unnormalized 2D transform whose result is left transposed:
    /// on return `data[c][r]` holds the coefficient for row frequency `r`
    /// and column frequency `c`.
    pub(crate) fn process_transposed(&self, data: &mut [Complex<T>], dir: Direction, s: &mut Fft2Scratch<T>) {
        let m = self.size;
        self.rows(data, m, dir, &mut s.fft);
        transpose::transpose(data, &mut s.transposed, m, m);
        self.rows(&mut s.transposed, m, dir, &mut s.fft);
        data.copy_from_slice(&s.transposed);
    }

    /// Unnormalized 2D transform in the natural layout.
    pub(crate) fn process(&self, data: &mut [Complex<T>], dir: Direction, s: &mut Fft2Scratch<T>) {
        let m = self.size;
        self.rows(data, m, dir, &mut s.fft);
        transpose::transpose(data, &mut s.transposed, m, m);
        self.rows(&mut s.transposed, m, dir, &mut s.fft);
        transpose::transpose(&s.transposed, data, m, m);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_direct_dft() {
        let m = 8;
        let data: Vec<Complex<f64>> = (0..m * m)
            .map(|i| Complex::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()))
            .collect();
        let plan = Fft2::new(m);
        let mut s = plan.scratch();
        let mut out = data.clone();
        plan.process(&mut out, Direction::Forward, &mut s);
        let mut tr = data.clone();
        plan.process_transposed(&mut tr, Direction::Forward, &mut s);
        for r in 0..m {
            for c in 0..m {
                let mut acc = Complex::new(0.0, 0.0);
                for j in 0..m {
                    for i in 0..m {
                        let ang = -2.0 * std::f64::consts::PI * ((r * j + c * i) as f64) / m as f64;
                        acc += data[j * m + i] * Complex::from_polar(1.0, ang);
                    }
                }
                assert!((out[r * m + c] - acc).norm() < 1e-12);
                assert!((tr[c * m + r] - acc).norm() < 1e-12);
            }
        }
    }
}
