//! Discrete convolution weights for `1/(πz)` and `1/(π|z|)`.
//!
//! The truncated rule cuts the kernel off at radius `R = 2√2·L`, which covers
//! every difference of two window points, and samples the exact Fourier
//! transform of the cut-off kernel on a fourfold oversampled frequency
//! lattice. The inverse FFT of those samples gives weights that reproduce the
//! continuous convolution to spectral accuracy for smooth, window-contained
//! data. The punctured rule samples `h²/(πz)` directly and sets the origin
//! weight to zero.

use std::collections::BTreeMap;
use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex;
use puruspe::bessel::Jn;

use crate::fft2::{Direction, Fft2};

/// Discretization of a singular convolution kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize)]
pub enum KernelRule {
    /// Truncated kernel with exact sampled spectrum (spectrally accurate).
    #[default]
    Truncated,
    /// Pointwise samples with the origin weight set to zero (first order).
    Punctured,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum KernelKind {
    /// `1/(πz)`
    Cauchy,
    /// `1/(π|z|)`
    Riesz,
}

fn j0(x: f64) -> f64 {
    Jn(0, x)
}

const GL_NODES: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL_WEIGHTS: [f64; 4] = [
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// `∫_a^b J₀` by 8-point Gauss–Legendre on panels of length at most ½.
fn integrate_j0(a: f64, b: f64) -> f64 {
    let panels = ((b - a) / 0.5).ceil().max(1.0) as usize;
    let width = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * width;
        let half = 0.5 * width;
        let mut acc = 0.0;
        for (x, w) in GL_NODES.iter().zip(GL_WEIGHTS) {
            acc += w * (j0(mid - half * x) + j0(mid + half * x));
        }
        total += acc * half;
    }
    total
}

/// Evaluates `radial(√s)` once per distinct squared radius `s`.
fn radial_table(squared: impl Iterator<Item = u64>, mut radial: impl FnMut(&[u64]) -> Vec<f64>) -> BTreeMap<u64, f64> {
    let mut keys: Vec<u64> = squared.collect();
    keys.sort_unstable();
    keys.dedup();
    let vals = radial(&keys);
    keys.into_iter().zip(vals).collect()
}

fn signed_index(p: usize, m: usize) -> i64 {
    if p < m / 2 {
        p as i64
    } else {
        p as i64 - m as i64
    }
}

/// Weights for unit spacing on the `2n × 2n` circular lattice, row-major.
///
/// Entry `(r, c)` holds the weight for the offset `(c', r')`, where a primed
/// index is the signed representative in `[−n, n)`. Weights for spacing `h`
/// are `h` times these.
pub(crate) fn unit_weights(n: usize, kind: KernelKind, rule: KernelRule) -> Vec<Complex<f64>> {
    let m2 = 2 * n;
    match rule {
        KernelRule::Punctured => {
            let mut w = vec![Complex::new(0.0, 0.0); m2 * m2];
            for r in 0..m2 {
                for c in 0..m2 {
                    let z = Complex::new(signed_index(c, m2) as f64, signed_index(r, m2) as f64);
                    if r == 0 && c == 0 {
                        continue;
                    }
                    w[r * m2 + c] = match kind {
                        KernelKind::Cauchy => z.inv() / PI,
                        KernelKind::Riesz => Complex::new(1.0 / (PI * z.norm()), 0.0),
                    };
                }
            }
            w
        }
        KernelRule::Truncated => truncated_weights(n, kind),
    }
}

fn truncated_weights(n: usize, kind: KernelKind) -> Vec<Complex<f64>> {
    let big = 4 * n;
    // Frequencies are 2π p/(M h) with h = 1 and radius R = 2√2·(n/2).
    let step = 2.0 * PI / big as f64;
    let radius = SQRT_2 * n as f64;
    let half = (big / 2) as i64;
    let squares = (0..=half).flat_map(|a| (a..=half).map(move |b| (a * a + b * b) as u64));
    let table = match kind {
        KernelKind::Cauchy => radial_table(squares, |keys| {
            keys.iter().map(|&s| 1.0 - j0(radius * step * (s as f64).sqrt())).collect()
        }),
        KernelKind::Riesz => radial_table(squares, |keys| {
            // Cumulative ∫₀^x J₀ over increasing radii.
            let mut prev = 0.0;
            let mut acc = 0.0;
            keys.iter()
                .map(|&s| {
                    let x = radius * step * (s as f64).sqrt();
                    acc += integrate_j0(prev, x);
                    prev = x;
                    acc
                })
                .collect()
        }),
    };

    let mut spectrum = vec![Complex::new(0.0, 0.0); big * big];
    for r in 0..big {
        let p2 = signed_index(r, big);
        for c in 0..big {
            let p1 = signed_index(c, big);
            let s = (p1 * p1 + p2 * p2) as u64;
            let xi = Complex::new(p1 as f64 * step, p2 as f64 * step);
            spectrum[r * big + c] = match kind {
                // The Nyquist lines have no mirror partner; dropping them keeps the weights odd.
                KernelKind::Cauchy if s == 0 || p1 == -half || p2 == -half => Complex::new(0.0, 0.0),
                KernelKind::Cauchy => Complex::new(0.0, -2.0) * table[&s] / xi,
                KernelKind::Riesz if s == 0 => Complex::new(2.0 * radius, 0.0),
                KernelKind::Riesz => Complex::new(2.0 * table[&s] / xi.norm(), 0.0),
            };
        }
    }
    let fft = Fft2::new(big);
    let mut scratch = fft.scratch();
    fft.process(&mut spectrum, Direction::Inverse, &mut scratch);
    let norm = 1.0 / (big * big) as f64;

    let m2 = 2 * n;
    let mut w = vec![Complex::new(0.0, 0.0); m2 * m2];
    for r in 0..m2 {
        let sr = signed_index(r, m2).rem_euclid(big as i64) as usize;
        for c in 0..m2 {
            let sc = signed_index(c, m2).rem_euclid(big as i64) as usize;
            w[r * m2 + c] = spectrum[sr * big + sc] * norm;
        }
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integral_of_j0_matches_series() {
        // ∫₀^x J₀ = 2 Σ_k J_{2k+1}(x)
        for &x in &[0.3, 2.0, 7.5, 19.0] {
            let series: f64 = (0..60).map(|k| 2.0 * Jn(2 * k + 1, x)).sum();
            assert!((integrate_j0(0.0, x) - series).abs() < 1e-13, "{x}");
        }
    }

    #[test]
    fn far_weights_approach_the_kernel() {
        let n = 32;
        let w = unit_weights(n, KernelKind::Cauchy, KernelRule::Truncated);
        let m2 = 2 * n;
        // Offset (5, -3): weight ~ 1/(π z) for smooth data.
        let (c, r) = (5usize, m2 - 3);
        let z = Complex::new(5.0, -3.0);
        let exact = z.inv() / PI;
        assert!((w[r * m2 + c] - exact).norm() < 0.05 * exact.norm());
        let p = unit_weights(n, KernelKind::Cauchy, KernelRule::Punctured);
        assert!((p[r * m2 + c] - exact).norm() < 1e-15);
        assert_eq!(p[0], Complex::new(0.0, 0.0));
    }

    #[test]
    fn cauchy_weights_are_odd() {
        let n = 16;
        let m2 = 2 * n;
        let w = unit_weights(n, KernelKind::Cauchy, KernelRule::Truncated);
        for r in (1..m2).filter(|&r| r != n) {
            for c in (1..m2).filter(|&c| c != n) {
                let opp = w[(m2 - r) * m2 + (m2 - c)];
                assert!((w[r * m2 + c] + opp).norm() < 1e-13, "{r} {c} {}", (w[r * m2 + c] + opp).norm());
            }
        }
    }
}
