//! Weighted Sobolev norms `H^{α,β}` and (weighted) Lebesgue norms.
//!
//! `‖f‖_{H^{α,β}} = (‖⟨D⟩^α f‖₂² + ‖⟨x⟩^β f‖₂²)^{1/2}` with `⟨D⟩^α` acting as the
//! multiplier `⟨k⟩^α` on the transform side.

use serde::Serialize;
use thiserror::Error;

use crate::fourier::FourierPlan;
use crate::grids::ComplexGrid;
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NormError {
    #[error("exponent {name} must be nonnegative, got {value}")]
    NegativeExponent { name: &'static str, value: f64 },
    #[error("Lebesgue exponent must satisfy p >= 1, got {0}")]
    InvalidLebesgueExponent(f64),
}

/// Smoothness (`alpha`) and decay (`beta`) exponents.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SobolevParams<T> {
    alpha: T,
    beta: T,
}

impl<T: Real> SobolevParams<T> {
    pub fn new(alpha: T, beta: T) -> Result<Self, NormError> {
        for (name, value) in [("alpha", alpha), ("beta", beta)] {
            if value.is_nan() || value < T::zero() {
                return Err(NormError::NegativeExponent { name, value: value.wide() });
            }
        }
        Ok(Self { alpha, beta })
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn beta(&self) -> T {
        self.beta
    }

    /// The exponents with roles exchanged, `H^{β,α}`.
    pub fn swapped(&self) -> Self {
        Self { alpha: self.beta, beta: self.alpha }
    }
}

/// Spatial weight used by [`weighted_lp_norm`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum Weight {
    /// `⟨x⟩^α = (1 + |x|²)^{α/2}`
    #[default]
    Bracket,
    /// `|x|^α`, for the homogeneous spaces.
    Homogeneous,
}

/// `⟨D⟩^α f`.
pub fn bessel_potential<T: Real>(f: &ComplexGrid<T>, alpha: T) -> ComplexGrid<T> {
    if alpha == T::zero() {
        return f.clone();
    }
    let half = alpha / T::of(2.0);
    FourierPlan::new(*f.spec())
        .multiplier(f, |k| num_complex::Complex::new((T::one() + k.norm_sqr()).powf(half), T::zero()))
        .expect("finite symbol")
}

pub fn sobolev_norm<T: Real>(f: &ComplexGrid<T>, params: SobolevParams<T>) -> T {
    let smooth = bessel_potential(f, params.alpha).l2_norm();
    let decay = f.weight_bracket(params.beta).map(|g| g.l2_norm()).unwrap_or(T::infinity());
    smooth.hypot(decay)
}

fn check_p<T: Real>(p: T) -> Result<(), NormError> {
    if p >= T::one() {
        Ok(())
    } else {
        Err(NormError::InvalidLebesgueExponent(p.wide()))
    }
}

/// Quadrature `L^p` norm; `p = ∞` is the largest sample modulus.
pub fn lp_norm<T: Real>(f: &ComplexGrid<T>, p: T) -> Result<T, NormError> {
    weighted_lp_norm(f, p, T::zero(), Weight::Bracket)
}

/// `‖w f‖_p` with `w = ⟨x⟩^α` or `|x|^α`.
pub fn weighted_lp_norm<T: Real>(f: &ComplexGrid<T>, p: T, alpha: T, weight: Weight) -> Result<T, NormError> {
    check_p(p)?;
    let weighted = f.samples().map(|(x, v)| {
        let w = if alpha == T::zero() {
            T::one()
        } else {
            match weight {
                Weight::Bracket => (T::one() + x.norm_sqr()).powf(alpha / T::of(2.0)),
                Weight::Homogeneous => x.norm().powf(alpha),
            }
        };
        w * v.norm()
    });
    if p.is_infinite() {
        return Ok(weighted.fold(T::zero(), T::max));
    }
    let sum = weighted.fold(T::zero(), |acc, a| acc + a.powf(p));
    Ok((sum * f.spec().cell_area()).powf(p.recip()))
}

/// One row of the embedding table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EmbeddingEntry {
    pub p: f64,
    pub inv_p: f64,
    pub lp_norm: f64,
    /// `‖f‖_p / ‖f‖_{H^{α,β}}`; zero when both vanish.
    pub ratio: f64,
    /// The excluded upper end of the admissible `1/p` range.
    pub open_endpoint: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmbeddingReport {
    pub alpha: f64,
    pub beta: f64,
    pub sobolev_norm: f64,
    pub entries: Vec<EmbeddingEntry>,
}

/// Tabulates `‖f‖_p` for `½ − α/2 ≤ 1/p < ½ + β/2` against the `H^{α,β}` norm.
pub fn embedding_report<T: Real>(f: &ComplexGrid<T>, params: SobolevParams<T>) -> EmbeddingReport {
    let alpha = params.alpha.wide();
    let beta = params.beta.wide();
    let lo = (0.5 - alpha / 2.0).max(0.0);
    let hi = (0.5 + beta / 2.0).min(1.0);
    let hi_open = 0.5 + beta / 2.0 <= 1.0;
    let mut inv: Vec<f64> = vec![lo, 0.5 * (lo + 0.5), 0.5, 0.5 * (0.5 + hi), hi];
    inv.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
    let sob = sobolev_norm(f, params).wide();
    let entries = inv
        .into_iter()
        .map(|ip| {
            let p = if ip == 0.0 { f64::INFINITY } else { ip.recip() };
            let norm = lp_norm(f, T::of(p)).expect("p >= 1").wide();
            EmbeddingEntry {
                p,
                inv_p: ip,
                lp_norm: norm,
                ratio: if sob == 0.0 { 0.0 } else { norm / sob },
                open_endpoint: hi_open && ip == hi && hi > 0.5,
            }
        })
        .collect();
    EmbeddingReport { alpha, beta, sobolev_norm: sob, entries }
}
