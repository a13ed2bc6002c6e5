//! Sweeps of `R(q)` over a k-lattice and the inverse map.

use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;

use super::{ScatterError, Scatterer, SolveReport, SolverOptions, Workspace};
use crate::fourier::expect_spec;
use crate::grids::{ComplexGrid, GridSpec};
use crate::scalar::Real;

/// Largest tolerated fraction of failed k-points.
pub const MAX_FAILURE_FRACTION: f64 = 0.01;

/// `R(q)` on a k-lattice with one report per k-point, in grid order.
#[derive(Debug, Clone)]
pub struct ScatterGrid<T> {
    pub values: ComplexGrid<T>,
    pub reports: Vec<SolveReport>,
    /// Flat indices of k-points whose solve failed; their samples are 0.
    pub failed: Vec<usize>,
}

/// Samples `R(q)` at every point of `kspec` using `workers` threads.
///
/// Each k-point is solved independently and written to its own slot, so the
/// result does not depend on `workers`.
pub fn scatter_grid<T: Real>(
    q: &ComplexGrid<T>,
    kspec: GridSpec<T>,
    options: SolverOptions,
    workers: usize,
) -> Result<ScatterGrid<T>, ScatterError> {
    let scatterer = Scatterer::new(q.clone(), options);
    let samples = map_lattice(&scatterer, kspec, workers, |s, ws, k| s.scatter_with(k, ws))?;
    let failed: Vec<usize> = samples.iter().enumerate().filter(|(_, (_, r))| !r.converged).map(|(i, _)| i).collect();
    if failed.len() as f64 > MAX_FAILURE_FRACTION * kspec.len() as f64 {
        return Err(ScatterError::TooManyFailures { failed: failed.len(), total: kspec.len() });
    }
    let (values, reports): (Vec<_>, Vec<_>) = samples.into_iter().unzip();
    Ok(ScatterGrid { values: ComplexGrid::from_values(kspec, values)?, reports, failed })
}

/// Evaluates `f` at every point of `kspec` on a pool of `workers` threads,
/// returning results in grid order.
pub(crate) fn map_lattice<T, R, F>(
    scatterer: &Scatterer<T>,
    kspec: GridSpec<T>,
    workers: usize,
    f: F,
) -> Result<Vec<R>, ScatterError>
where
    T: Real,
    R: Send,
    F: Fn(&Scatterer<T>, &mut Workspace<T>, Complex<T>) -> R + Sync,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| ScatterError::Pool(e.to_string()))?;
    let n = kspec.n();
    Ok(pool.install(|| {
        (0..kspec.len())
            .into_par_iter()
            .map_init(|| scatterer.workspace(), |ws, idx| f(scatterer, ws, kspec.point(idx % n, idx / n)))
            .collect()
    }))
}

/// `I(r) = conj(R(conj r))`, with `r` acting as the potential on its k-lattice
/// and the output sampled on `out_spec`.
pub fn inverse_scatter<T: Real>(
    r: &ComplexGrid<T>,
    out_spec: GridSpec<T>,
    options: SolverOptions,
    workers: usize,
) -> Result<ScatterGrid<T>, ScatterError> {
    let mut sweep = scatter_grid(&r.conjugate(), out_spec, options, workers)?;
    sweep.values = sweep.values.conjugate();
    Ok(sweep)
}

/// Comparison of `‖q‖₂²` with `‖R(q)‖₂²`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlancherelReport {
    pub q_norm_sqr: f64,
    pub r_norm_sqr: f64,
    /// `|‖q‖² − ‖R(q)‖²| / ‖q‖²`.
    pub defect: f64,
    pub failed_points: usize,
}

pub fn plancherel_defect<T: Real>(q: &ComplexGrid<T>, r: &ScatterGrid<T>) -> PlancherelReport {
    let q_norm_sqr = q.l2_norm().wide().powi(2);
    let r_norm_sqr = r.values.l2_norm().wide().powi(2);
    PlancherelReport {
        q_norm_sqr,
        r_norm_sqr,
        defect: (q_norm_sqr - r_norm_sqr).abs() / q_norm_sqr,
        failed_points: r.failed.len(),
    }
}

/// `‖I(R(q)) − q‖₂ / ‖q‖₂`.
pub fn roundtrip_error<T: Real>(q: &ComplexGrid<T>, recovered: &ComplexGrid<T>) -> Result<f64, ScatterError> {
    expect_spec(recovered.spec(), q.spec())?;
    Ok((recovered.sub(q)?.l2_norm() / q.l2_norm()).wide())
}
