//! The expansion `R(q) = Σ_{j<N} r_j + r^{(N)}` with
//! `r_j(k) = (1/π)∫ q e_k conj(T_k^{2j}(1))` and
//! `r^{(N)}(k) = (1/π)∫ q e_k conj(T_k^{2N}(μ₁))`, and a finite-difference
//! check of `∂μ₁/∂k̄ = ½ conj(R(q)(k)) μ₂`.

use num_complex::Complex;
use serde::Serialize;
use thiserror::Error;

use crate::fourier::expect_spec;
use crate::grids::{ComplexGrid, GridError, GridSpec};
use crate::scalar::Real;
use crate::scattering::{map_lattice, ScatterError, Scatterer, SolveReport, SolverOptions};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SeriesError {
    #[error(transparent)]
    Scatter(#[from] ScatterError),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error("partial sums miss R(q) by {defect:e} (allowed {allowed:e})")]
    IdentityViolated { defect: f64, allowed: f64 },
    #[error("probe point {0} is not a lattice point")]
    ProbeOffGrid(String),
    #[error("the k-lattice needs at least 3 points per side, got {0}")]
    LatticeTooSmall(usize),
}

fn one<T: Real>(len: usize) -> Vec<Complex<T>> {
    vec![Complex::new(T::one(), T::zero()); len]
}

/// `r_j(k)`.
pub fn expansion_term<T: Real>(q: &ComplexGrid<T>, k: Complex<T>, j: usize) -> Complex<T> {
    let s = Scatterer::new(q.clone(), SolverOptions::default());
    let mut ws = s.workspace();
    s.prepare(k, &mut ws);
    let mut g = one(q.spec().len());
    s.apply_power(&mut ws, &mut g, 2 * j);
    s.pair_with(&ws, &g)
}

/// `r^{(N)}(k)` for a given `μ₁(·, k)`.
pub fn remainder_term<T: Real>(
    q: &ComplexGrid<T>,
    k: Complex<T>,
    order: usize,
    mu1: &ComplexGrid<T>,
) -> Result<Complex<T>, SeriesError> {
    expect_spec(mu1.spec(), q.spec())?;
    let s = Scatterer::new(q.clone(), SolverOptions::default());
    let mut ws = s.workspace();
    s.prepare(k, &mut ws);
    let mut g = mu1.values().to_vec();
    s.apply_power(&mut ws, &mut g, 2 * order);
    Ok(s.pair_with(&ws, &g))
}

#[derive(Debug, Clone)]
pub struct ExpansionResult<T> {
    pub order: usize,
    /// `r_0 … r_{N−1}` on the k-lattice.
    pub terms: Vec<ComplexGrid<T>>,
    pub remainder: ComplexGrid<T>,
    pub scattering: ComplexGrid<T>,
    /// `max_k |Σ r_j + r^{(N)} − R(q)|`.
    pub identity_defect: f64,
}

/// Terms, remainder and `R(q)` on `kspec`, checking that they add up.
pub fn expand<T: Real>(
    q: &ComplexGrid<T>,
    kspec: GridSpec<T>,
    order: usize,
    options: SolverOptions,
    workers: usize,
) -> Result<ExpansionResult<T>, SeriesError> {
    let scatterer = Scatterer::new(q.clone(), options);
    let len = q.spec().len();
    let rows = map_lattice(&scatterer, kspec, workers, |s, ws, k| {
        let (r, report) = s.scatter_with(k, ws);
        if !report.converged {
            return Err(report);
        }
        let mut g = ws.deviation().iter().map(|v| v + T::one()).collect::<Vec<_>>();
        s.apply_power(ws, &mut g, 2 * order);
        let remainder = s.pair_with(ws, &g);
        let mut g = one(len);
        let mut terms = Vec::with_capacity(order);
        for _ in 0..order {
            terms.push(s.pair_with(ws, &g));
            s.apply_power(ws, &mut g, 2);
        }
        Ok((terms, remainder, r))
    })?;
    let mut terms = vec![Vec::with_capacity(kspec.len()); order];
    let (mut remainder, mut scattering) = (Vec::with_capacity(kspec.len()), Vec::with_capacity(kspec.len()));
    let mut defect = 0.0f64;
    for row in rows {
        let (ts, rem, r) = row.map_err(|report| ScatterError::NonConvergence(Box::new(report)))?;
        let sum = ts.iter().fold(rem, |acc, t| acc + t);
        defect = defect.max((sum - r).norm().wide());
        for (col, t) in terms.iter_mut().zip(ts) {
            col.push(t);
        }
        remainder.push(rem);
        scattering.push(r);
    }
    let allowed = 10.0 * options.residual_tolerance();
    if defect.is_nan() || defect > allowed {
        return Err(SeriesError::IdentityViolated { defect, allowed });
    }
    Ok(ExpansionResult {
        order,
        terms: terms.into_iter().map(|t| ComplexGrid::from_values(kspec, t)).collect::<Result<_, _>>()?,
        remainder: ComplexGrid::from_values(kspec, remainder)?,
        scattering: ComplexGrid::from_values(kspec, scattering)?,
        identity_defect: defect,
    })
}

/// Outcome of the `∂μ₁/∂k̄` check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DbarKReport {
    pub k_step: f64,
    pub probes: usize,
    pub interior_points: usize,
    /// `max |∂_k̄ μ₁ − ½ conj(R) μ₂| / max |½ conj(R) μ₂|` over probes and interior k.
    pub residual: f64,
    pub failed_points: usize,
}

/// The fixed probe set `{−1, 0, 1}²`.
pub fn default_probes<T: Real>() -> Vec<Complex<T>> {
    let c = [-1.0, 0.0, 1.0];
    c.iter().flat_map(|&a| c.iter().map(move |&b| Complex::new(T::of(a), T::of(b)))).collect()
}

/// Compares a central difference of `μ₁` in `k̄` with `½ conj(R(q)(k)) μ₂` at
/// the interior points of `kspec` and at `probes`, which must be lattice points
/// of `q`.
pub fn dbar_k_residual<T: Real>(
    q: &ComplexGrid<T>,
    kspec: GridSpec<T>,
    probes: &[Complex<T>],
    options: SolverOptions,
    workers: usize,
) -> Result<DbarKReport, SeriesError> {
    let xspec = *q.spec();
    let kn = kspec.n();
    if kn < 3 {
        return Err(SeriesError::LatticeTooSmall(kn));
    }
    let idx: Vec<usize> = probes
        .iter()
        .map(|p| match (xspec.nearest_index(p.re), xspec.nearest_index(p.im)) {
            (Some(i), Some(j)) if (xspec.point(i, j) - p).norm() <= xspec.spacing() * T::of(1e-9) => Ok(j * xspec.n() + i),
            _ => Err(SeriesError::ProbeOffGrid(format!("{p}"))),
        })
        .collect::<Result<_, _>>()?;

    struct Sample<T> {
        mu1: Vec<Complex<T>>,
        mu2: Vec<Complex<T>>,
        r: Complex<T>,
        report: SolveReport,
    }
    let scatterer = Scatterer::new(q.clone(), options);
    let samples = map_lattice(&scatterer, kspec, workers, |s, ws, k| {
        let (r, report) = s.scatter_with(k, ws);
        let mut g = ws.deviation().iter().map(|v| v + T::one()).collect::<Vec<_>>();
        let mu1 = idx.iter().map(|&i| g[i]).collect();
        s.apply_power(ws, &mut g, 1);
        let mu2 = idx.iter().map(|&i| g[i]).collect();
        Sample { mu1, mu2, r, report }
    })?;
    let failed = samples.iter().filter(|s| !s.report.converged).count();

    let step = kspec.spacing();
    let quarter_step = T::of(0.25) / step;
    let half = T::of(0.5);
    let i_unit = Complex::new(T::zero(), T::one());
    let (mut worst, mut scale) = (T::zero(), T::zero());
    let mut interior = 0;
    for b in 1..kn - 1 {
        for a in 1..kn - 1 {
            let at = |i: usize, j: usize| &samples[j * kn + i];
            let nbrs = [at(a + 1, b), at(a - 1, b), at(a, b + 1), at(a, b - 1), at(a, b)];
            if nbrs.iter().any(|s| !s.report.converged) {
                continue;
            }
            interior += 1;
            let c = nbrs[4];
            for p in 0..idx.len() {
                // ∂_k̄ = ½(∂_k₁ + i ∂_k₂)
                let lhs = (nbrs[0].mu1[p] - nbrs[1].mu1[p] + i_unit * (nbrs[2].mu1[p] - nbrs[3].mu1[p])) * quarter_step;
                let rhs = c.r.conj() * c.mu2[p] * half;
                worst = worst.max((lhs - rhs).norm());
                scale = scale.max(rhs.norm());
            }
        }
    }
    let residual = if scale > T::zero() { (worst / scale).wide() } else { worst.wide() };
    Ok(DbarKReport { k_step: step.wide(), probes: idx.len(), interior_points: interior, residual, failed_points: failed })
}
