//! The solid Cauchy transform `Cf(x) = (1/π)∫ f(y)/(x−y) dy`, its partner
//! `C̄ = conj∘C∘conj` inverting `∂`, the fractional integral
//! `I₁f(x) = (1/π)∫ f(y)/|x−y| dy`, and the spectral derivatives `∂̄`, `∂`.
//!
//! Convolutions are evaluated on the doubled window `[−2L, 2L)²`, so the
//! circular convolution equals the linear one on the original window.

mod kernel;

pub(crate) use kernel::KernelKind;
pub use kernel::KernelRule;

use std::sync::OnceLock;

use num_complex::Complex;
use serde::Serialize;

use crate::fft2::{Direction, Fft2, Fft2Scratch};
use crate::fourier::{expect_spec, phase_grid, FourierPlan};
use crate::grids::{ComplexGrid, GridError, GridSpec};
use crate::scalar::Real;
use kernel::unit_weights;

/// Precomputed kernel spectra for one window.
pub struct KernelPlan<T: Real> {
    spec: GridSpec<T>,
    rule: KernelRule,
    fft: Fft2<T>,
    cauchy: Vec<Complex<T>>,
    riesz: OnceLock<Vec<Complex<T>>>,
}

/// Per-caller buffers for [`KernelPlan`] applications.
pub struct KernelScratch<T> {
    padded: Vec<Complex<T>>,
    fft: Fft2Scratch<T>,
}

impl<T: Real> KernelPlan<T> {
    pub fn new(spec: GridSpec<T>) -> Self {
        Self::with_rule(spec, KernelRule::default())
    }

    pub fn with_rule(spec: GridSpec<T>, rule: KernelRule) -> Self {
        let fft = Fft2::new(2 * spec.n());
        let cauchy = spectrum(&spec, KernelKind::Cauchy, rule);
        Self { spec, rule, fft, cauchy, riesz: OnceLock::new() }
    }

    pub fn spec(&self) -> &GridSpec<T> {
        &self.spec
    }

    pub fn rule(&self) -> KernelRule {
        self.rule
    }

    pub fn scratch(&self) -> KernelScratch<T> {
        let m = 2 * self.spec.n();
        KernelScratch { padded: vec![Complex::new(T::zero(), T::zero()); m * m], fft: self.fft.scratch() }
    }

    fn kernel_spectrum(&self, kind: KernelKind) -> &[Complex<T>] {
        match kind {
            KernelKind::Cauchy => &self.cauchy,
            KernelKind::Riesz => self.riesz.get_or_init(|| spectrum(&self.spec, KernelKind::Riesz, self.rule)),
        }
    }

    /// Convolves raw window samples with the kernel, writing window samples.
    pub(crate) fn convolve_into(
        &self,
        kind: KernelKind,
        input: &[Complex<T>],
        out: &mut [Complex<T>],
        s: &mut KernelScratch<T>,
    ) {
        let n = self.spec.n();
        let m = 2 * n;
        let zero = Complex::new(T::zero(), T::zero());
        s.padded.fill(zero);
        for (row, chunk) in input.chunks_exact(n).enumerate() {
            s.padded[row * m..row * m + n].copy_from_slice(chunk);
        }
        // Rows beyond n are zero, so only the first n need transforming.
        self.fft.rows(&mut s.padded, n, Direction::Forward, &mut s.fft.fft);
        transpose::transpose(&s.padded, &mut s.fft.transposed, m, m);
        self.fft.rows(&mut s.fft.transposed, m, Direction::Forward, &mut s.fft.fft);
        for (v, k) in s.fft.transposed.iter_mut().zip(self.kernel_spectrum(kind)) {
            *v *= k;
        }
        self.fft.rows(&mut s.fft.transposed, m, Direction::Inverse, &mut s.fft.fft);
        transpose::transpose(&s.fft.transposed, &mut s.padded, m, m);
        self.fft.rows(&mut s.padded, n, Direction::Inverse, &mut s.fft.fft);
        for (row, chunk) in out.chunks_exact_mut(n).enumerate() {
            chunk.copy_from_slice(&s.padded[row * m..row * m + n]);
        }
    }

    fn apply(&self, kind: KernelKind, f: &ComplexGrid<T>) -> Result<ComplexGrid<T>, GridError> {
        expect_spec(f.spec(), &self.spec)?;
        let mut out = vec![Complex::new(T::zero(), T::zero()); self.spec.len()];
        self.convolve_into(kind, f.values(), &mut out, &mut self.scratch());
        ComplexGrid::from_values(self.spec, out)
    }

    /// `C f`, the right inverse of `∂̄`.
    pub fn cauchy(&self, f: &ComplexGrid<T>) -> Result<ComplexGrid<T>, GridError> {
        self.apply(KernelKind::Cauchy, f)
    }

    /// `C̄ f = conj(C(conj f))`, the right inverse of `∂`.
    pub fn conj_cauchy(&self, f: &ComplexGrid<T>) -> Result<ComplexGrid<T>, GridError> {
        Ok(self.cauchy(&f.conjugate())?.conjugate())
    }

    /// `I₁ f`.
    pub fn fractional_integral(&self, f: &ComplexGrid<T>) -> Result<ComplexGrid<T>, GridError> {
        self.apply(KernelKind::Riesz, f)
    }
}

/// Kernel spectrum on the `2n` lattice, laid out to match `convolve_into`.
fn spectrum<T: Real>(spec: &GridSpec<T>, kind: KernelKind, rule: KernelRule) -> Vec<Complex<T>> {
    let m = 2 * spec.n();
    let h = spec.spacing().wide();
    let mut w: Vec<Complex<f64>> = unit_weights(spec.n(), kind, rule).into_iter().map(|v| v * h).collect();
    let fft = Fft2::<f64>::new(m);
    fft.process_transposed(&mut w, Direction::Forward, &mut fft.scratch());
    let norm = 1.0 / (m * m) as f64;
    w.into_iter().map(|v| Complex::new(T::of(v.re * norm), T::of(v.im * norm))).collect()
}

/// `C f` with a fresh plan.
pub fn cauchy_transform<T: Real>(f: &ComplexGrid<T>) -> ComplexGrid<T> {
    KernelPlan::new(*f.spec()).cauchy(f).expect("plan built for this spec")
}

/// `C̄ f` with a fresh plan.
pub fn conj_cauchy_transform<T: Real>(f: &ComplexGrid<T>) -> ComplexGrid<T> {
    KernelPlan::new(*f.spec()).conj_cauchy(f).expect("plan built for this spec")
}

/// `I₁ f` with a fresh plan.
pub fn fractional_integral<T: Real>(f: &ComplexGrid<T>) -> ComplexGrid<T> {
    KernelPlan::new(*f.spec()).fractional_integral(f).expect("plan built for this spec")
}

/// Fourier symbol of `∂̄`. Since `∂̄e_k = k̄e_k`, integration by parts gives
/// `(∂̄f)ˆ(k) = −k̄ f̂(k)`.
pub fn dbar_symbol<T: Real>(k: Complex<T>) -> Complex<T> {
    -k.conj()
}

/// Fourier symbol of `∂`: `(∂f)ˆ(k) = k f̂(k)`.
pub fn partial_symbol<T: Real>(k: Complex<T>) -> Complex<T> {
    k
}

/// `∂̄f = ½(∂₁ + i∂₂)f`, spectrally.
pub fn dbar<T: Real>(f: &ComplexGrid<T>) -> ComplexGrid<T> {
    FourierPlan::new(*f.spec()).multiplier(f, dbar_symbol).expect("finite symbol")
}

/// `∂f = ½(∂₁ − i∂₂)f`, spectrally.
pub fn partial<T: Real>(f: &ComplexGrid<T>) -> ComplexGrid<T> {
    FourierPlan::new(*f.spec()).multiplier(f, partial_symbol).expect("finite symbol")
}

/// Residuals of the two Cauchy-transform identities that move between the
/// x-plane and the k-plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityReport {
    pub c1_residual: f64,
    pub c2_residual: f64,
    pub scale: f64,
}

/// Compares `(1/π)∫ e_k(y)q(y)/(ȳ−x̄) dy` with its frequency-side form
/// `(1/π)∫ q̂(ℓ) e_x(k−ℓ)/(k−ℓ) dℓ`, and likewise the conjugate pair, on the
/// inner half of the window.
pub fn check_c1_c2<T: Real>(q: &ComplexGrid<T>, k: Complex<T>) -> Result<IdentityReport, GridError> {
    let spec = *q.spec();
    let n = spec.n();
    let g = q.multiply(&phase_grid(k, spec))?;
    let plan = KernelPlan::new(spec);

    let lhs1 = plan.conj_cauchy(&g)?.scale(Complex::new(-T::one(), T::zero()))?;
    let lhs2 = plan.cauchy(&g.conjugate())?.scale(Complex::new(-T::one(), T::zero()))?;

    // Frequency side: the ℓ-integral is a Cauchy transform in the ℓ-plane,
    // read off at the lattice point ℓ = 0 after the shift ℓ → k + ℓ.
    let fourier = FourierPlan::new(spec);
    let g_hat = fourier.forward(&g)?;
    let dual = *fourier.dual_spec();
    let weights = unit_weights(n, KernelKind::Cauchy, KernelRule::Truncated);
    let m2 = 2 * n;
    let dl = dual.spacing().wide();
    let centered = |i: usize, j: usize| {
        // Weight for the offset (centre − point).
        let c = (n / 2 + m2 - i) % m2;
        let r = (n / 2 + m2 - j) % m2;
        let w = weights[r * m2 + c] * dl;
        Complex::new(T::of(w.re), T::of(w.im))
    };
    let gain = T::PI() / dual.cell_area();
    let mut v1 = Vec::with_capacity(spec.len());
    let mut v2 = Vec::with_capacity(spec.len());
    for j in 0..n {
        for i in 0..n {
            let w = centered(i, j);
            let gh = g_hat.at(i, j);
            v1.push(w * gh * gain);
            v2.push((w * gh).conj() * gain);
        }
    }
    let rhs1 = fourier.inverse(&ComplexGrid::from_values(dual, v1)?)?;
    let rhs2 = FourierPlan::new(dual).forward(&ComplexGrid::from_values(dual, v2)?)?;

    let inner = |i: usize| {
        let x = spec.coordinate(i).abs();
        x < spec.half_width() / T::of(2.0)
    };
    let mut r1 = T::zero();
    let mut r2 = T::zero();
    let mut scale = T::zero();
    for j in (0..n).filter(|&j| inner(j)) {
        for i in (0..n).filter(|&i| inner(i)) {
            r1 = r1.max((lhs1.at(i, j) - rhs1.at(i, j)).norm());
            r2 = r2.max((lhs2.at(i, j) - rhs2.at(i, j)).norm());
            scale = scale.max(lhs1.at(i, j).norm());
        }
    }
    Ok(IdentityReport { c1_residual: r1.wide(), c2_residual: r2.wide(), scale: scale.wide() })
}
